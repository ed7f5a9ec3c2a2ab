#pragma once

#include <functional>
#include <memory>

#include "sphcap/cap_basis.hpp"
#include "sphcap/operators.hpp"
#include "sphcap/transforms.hpp"

namespace sphcap {

/// Truncated Fourier series in the boundary angle theta:
/// g(theta) = c[0] Y_0 + sum_{k>=1} c[k] cos(k theta) + s[k] sin(k theta).
struct ThetaSeries {
  Eigen::VectorXd c;
  Eigen::VectorXd s;

  bool empty() const { return c.size() == 0; }
  int degree() const { return static_cast<int>(c.size()) - 1; }
  double eval(double theta) const;
  /// -sum_k k^2 (c[k] cos + s[k] sin); the surface Laplacian of the
  /// z-independent extension is this divided by rho(z)^2.
  double laplacian_numerator(double theta) const;
};

/// Fourier coefficients of a 2pi-periodic callable up to mode max_k;
/// throws BoundaryResolutionError when the tail above max_k exceeds
/// tail_tol relative to the series scale.
ThetaSeries theta_series(const std::function<double(double)>& g, int max_k,
                         double tail_tol = 1e-10);

struct PdeProblem {
  enum class Kind { Poisson, Helmholtz, Biharmonic };

  Kind kind = Kind::Poisson;
  double alpha = 0.0;
  int N = 0;
  std::function<double(const CapPoint&)> f;
  std::function<double(const CapPoint&)> v;  // Helmholtz coefficient
  double k_wave = 0.0;
  std::function<double(double)> boundary;  // Dirichlet data in theta

  void validate() const;
};

struct PdeSolution {
  CoefficientVector coeffs;  // weighted basis: a=1 (Poisson/Helmholtz), a=2 (biharmonic)
  double residual_norm = 0.0;
  Eigen::VectorXd block_norms;
  bool decoupled = false;
  ThetaSeries lift;  // boundary series added back at evaluation; may be empty

  double expand_seconds = 0.0;
  double assemble_seconds = 0.0;
  double solve_seconds = 0.0;

  std::shared_ptr<CapBasis> basis;  // basis of coeffs, for evaluation

  double evaluate(const CapPoint& p) const;
};

PdeSolution solve_poisson(const PdeProblem& problem,
                          std::shared_ptr<CapContext> ctx = nullptr);
PdeSolution solve_helmholtz(const PdeProblem& problem,
                            std::shared_ptr<CapContext> ctx = nullptr);
PdeSolution solve_biharmonic(const PdeProblem& problem,
                             std::shared_ptr<CapContext> ctx = nullptr);

struct LiftedProblem {
  PdeProblem problem;  // zero-boundary equivalent with modified right side
  ThetaSeries series;  // added back to the solution
};

/// Substitute u = u_tilde + c(theta): the returned problem has zero boundary
/// data and right-hand side f - k^2 v c - Lap(c).
LiftedProblem lift_boundary(const PdeProblem& problem);

}  // namespace sphcap
