#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <map>
#include <memory>
#include <vector>

#include "sphcap/cap_layout.hpp"
#include "sphcap/circular.hpp"
#include "sphcap/semiclassical.hpp"
#include "sphcap/structured.hpp"

namespace sphcap {

/// Shared per-alpha store of univariate families and Gauss rules.
/// Construction is single-threaded; the cached objects are immutable.
class CapContext {
 public:
  explicit CapContext(double alpha) : alpha_(alpha) {}

  double alpha() const { return alpha_; }

  /// Family for weight (z-alpha)^a rho(z)^b with a table extending at least
  /// to degree n_needed.  All families of one exponent a share a base rule
  /// for the weight (z-alpha)^a, grown on demand.
  std::shared_ptr<const Family1D> family(double a, int b, int n_needed) const;

  /// An m-point Gauss rule of the (a, b) family.
  std::shared_ptr<const GaussRule1D> rule(double a, int b, int m) const;

  /// Shared base rule for the weight (z-alpha)^a with at least min_size
  /// points.
  std::shared_ptr<const GaussRule1D> base_rule(double a, int min_size) const;

  double omega(double a, int b) const { return family(a, b, 0)->omega(); }

 private:
  double alpha_;
  mutable std::map<std::pair<double, int>, std::shared_ptr<const Family1D>>
      families_;
  mutable std::map<std::tuple<double, int, int>,
                   std::shared_ptr<const GaussRule1D>>
      rules_;
  mutable std::map<double, std::shared_ptr<const GaussRule1D>> bases_;
};

/// rho(z)^k cos(k theta) and rho(z)^k sin(k theta) as polynomials in (x, y),
/// evaluated by the angle-addition recurrence; well defined at the pole.
void rho_harmonics(double x, double y, int k_max, Eigen::VectorXd& c,
                   Eigen::VectorXd& s);

enum class Axis { X, Y, Z };

/// Recurrence coefficients of multiplication by x (slots 1..6 of the lemma
/// layout) and by z (slots 1..3); y follows from x by the sign rule.
class RecurrenceCoeffs {
 public:
  RecurrenceCoeffs(const BasisSpec& spec, const CapContext& ctx);

  /// slot in 1..6: coefficient of Q_{m,j,i} in x Q_{n,k,i} with
  /// (m,j) = (n-1,k-1),(n-1,k+1),(n,k-1),(n,k+1),(n+1,k-1),(n+1,k+1).
  double alpha(int n, int k, int slot) const {
    return alpha_[pair_index(n, k)][slot - 1];
  }
  /// y-multiplication coefficient for selector i (sign rule applied).
  double beta(int n, int k, int i, int slot) const {
    const bool negate = (i == 0) ? (slot % 2 == 1) : (slot % 2 == 0);
    return (negate ? -1.0 : 1.0) * alpha(n, k, slot);
  }
  /// slot in 1..3: coefficient of Q_{m,k,i} in z Q_{n,k,i} with
  /// m = n-1, n, n+1.
  double gamma(int n, int k, int slot) const {
    return gamma_[pair_index(n, k)][slot - 1];
  }

  int N() const { return N_; }

 private:
  int pair_index(int n, int k) const { return n * (n + 1) / 2 + k; }
  int N_;
  std::vector<std::array<double, 6>> alpha_;
  std::vector<std::array<double, 3>> gamma_;
};

/// Per-degree recurrence coefficient matrices A_n, B_n, C_n and the sparse
/// left inverse Dt_n with Dt_n A_n = I, plus the transposed products the
/// Clenshaw recurrence consumes.
struct ClenshawDegree {
  Eigen::SparseMatrix<double> A, B, C, Dt;
  // transposes of Dt*B, Dt*C and of the x/y/z column sections of Dt
  Eigen::SparseMatrix<double> DBt, DCt, Dxt, Dyt, Dzt;
};

struct ClenshawMatrices {
  BasisSpec spec;
  std::vector<ClenshawDegree> degrees;  // n = 0..N
};

/// The trivariate cap basis Q^(a)_{n,k,i} for one BasisSpec.
class CapBasis {
 public:
  CapBasis(const BasisSpec& spec, std::shared_ptr<CapContext> ctx);
  explicit CapBasis(const BasisSpec& spec);

  const BasisSpec& spec() const { return spec_; }
  const CapContext& context() const { return *ctx_; }
  std::shared_ptr<CapContext> context_ptr() const { return ctx_; }

  /// Q_{n,k,i} at a cap point (pole-safe).
  double eval(int n, int k, int i, const CapPoint& p) const;

  /// Values of all (N+1)^2 basis functions at p, DegreeMajor order.
  Eigen::VectorXd eval_all(const CapPoint& p) const;

  /// Jacobi matrix of multiplication by a coordinate, DegreeMajor ordering,
  /// block-tridiagonal with the lemma's sub-block structure.
  BandedBlockBanded jacobi(Axis axis) const;

  const RecurrenceCoeffs& recurrence_coeffs() const;
  const ClenshawMatrices& clenshaw() const;

  /// Clenshaw evaluation of an expansion at p; weighted vectors are
  /// multiplied by w^(a,0)(z) after the recurrence.
  double evaluate(const CoefficientVector& coeffs, const CapPoint& p) const;

 private:
  BasisSpec spec_;
  std::shared_ptr<CapContext> ctx_;
  mutable std::unique_ptr<RecurrenceCoeffs> coeffs_;
  mutable std::unique_ptr<ClenshawMatrices> clenshaw_;
};

/// Convenience wrappers matching the per-operation surface.
double eval_Q(const BasisSpec& spec, int n, int k, int i, const CapPoint& p);
BandedBlockBanded jacobi_matrix(const BasisSpec& spec, Axis axis);
ClenshawMatrices clenshaw_matrices(const BasisSpec& spec);
double evaluate(const CoefficientVector& coeffs, const CapPoint& p);

}  // namespace sphcap
