#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <numbers>

#include "sphcap/cap_basis.hpp"
#include "sphcap/cap_layout.hpp"

namespace sphcap {

/// Tensor quadrature on the cap for the measure w^(a,0)(z) dA.  Node j also
/// stands for its antipodal partner (-x_j, -y_j, z_j): an integral is
/// sum_j w_j (f(p_j) + f(pbar_j)).
struct CapQuadrature {
  double alpha = 0.0;
  double a = 0.0;
  int M1 = 0;  // Gauss points in z
  int M2 = 0;  // Chebyshev points in theta
  Eigen::VectorXd z_nodes, z_weights;  // weight (t - alpha)^a on [alpha, 1]
  Eigen::VectorXd thetas;              // (2l+1) pi / (2 M2), l = 0..M2-1
  bool antipodal = true;

  int size() const { return M1 * M2; }
  /// Node index (j, l) -> j*M2 + l.
  CapPoint node(int idx) const;
  CapPoint antipode(int idx) const;
  double weight(int idx) const {
    return z_weights[idx / M2] * (std::numbers::pi / M2);
  }
};

/// Quadrature exact for polynomial integrands of total degree <= degree:
/// M1 = ceil((degree+1)/2) Gauss points, M2 = degree+1 Chebyshev points.
CapQuadrature cap_quadrature(const CapContext& ctx, double a, int degree);
CapQuadrature cap_quadrature(const BasisSpec& spec, int degree);

/// sum_j w_j [f(p_j) + f(pbar_j)]  ~  int f w^(a,0) dA, in fixed node order.
double integrate(const CapQuadrature& q,
                 const std::function<double(const CapPoint&)>& f);

/// Expansion coefficients of f in the Q^(a) basis up to degree spec.N,
/// FourierMajor ordering; exact for polynomial f of degree <= N.
CoefficientVector expand(const std::function<double(const CapPoint&)>& f,
                         const BasisSpec& spec,
                         std::shared_ptr<CapContext> ctx = nullptr);

/// Sampled-values variant: values at the quadrature nodes of
/// cap_quadrature(spec, 2N) in node order, and at their antipodes.
CoefficientVector expand_samples(const Eigen::VectorXd& values,
                                 const Eigen::VectorXd& antipodal_values,
                                 const BasisSpec& spec,
                                 std::shared_ptr<CapContext> ctx = nullptr);

}  // namespace sphcap
