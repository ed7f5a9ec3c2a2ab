#pragma once

#include <functional>
#include <memory>

#include "sphcap/cap_basis.hpp"
#include "sphcap/structured.hpp"

namespace sphcap {

enum class OperatorKind {
  Dtheta,
  Dphi,
  Wphi,
  Laplacian,
  WeightedLaplacian,
  WeightedLaplacianA1,
  ConvertUp,
  ConvertDown,
};

/// A differential or conversion operator on coefficient vectors, assembled
/// in FourierMajor ordering (block-diagonal across modes).
struct OperatorSpec {
  OperatorKind kind = OperatorKind::Dtheta;
  double alpha = 0.0;
  int a_in = 0;
  int a_tilde = 2;  // parameter step for Laplacians and conversions
  int N = 0;

  int a_out() const;
  bool weighted_in() const;
  bool weighted_out() const;
  /// Sub-block bandwidths (lower, upper) of the assembled matrix.
  std::pair<int, int> sub_bandwidths() const;
  void validate() const;
};

/// Assemble the operator; every entry is a 1D quadrature evaluation of the
/// corresponding coefficient integral, exact for its integrand degree.
/// `band_padding` widens the stored mask by that many degrees on each side
/// (used by bandwidth-certification tests; entries outside the proven band
/// come out at rounding level).
BandedBlockBanded assemble(const OperatorSpec& spec,
                           std::shared_ptr<CapContext> ctx = nullptr,
                           int band_padding = 0);

/// rho^2-factored spherical Laplacian
/// Dphi^(0) Wphi^(1) + T^(0->1) Tw^(1->0) Dtheta^2,
/// mapping weighted a=1 coefficients to plain a=1 coefficients.
BandedBlockBanded rho2_laplacian(double alpha, int N,
                                 std::shared_ptr<CapContext> ctx = nullptr);

/// Biharmonic operator L^(0->2) Lw^(2->0), mapping weighted a=2
/// coefficients to plain a=2 coefficients.
BandedBlockBanded biharmonic(double alpha, int N,
                             std::shared_ptr<CapContext> ctx = nullptr);

/// Multiplication operator V for a variable coefficient v, acting on
/// FourierMajor coefficient vectors of the (spec.a, spec.N) basis.
/// Built by the Clenshaw recurrence with the transposed Jacobi matrices in
/// place of the evaluation point, at degree N + N_v, then truncated; block
/// bandwidth is the detected coefficient degree N_v of v.
BandedBlockBanded variable_coefficient(const CoefficientVector& v,
                                       const BasisSpec& spec,
                                       std::shared_ptr<CapContext> ctx = nullptr);
BandedBlockBanded variable_coefficient(
    const std::function<double(const CapPoint&)>& v, const BasisSpec& spec,
    std::shared_ptr<CapContext> ctx = nullptr);

/// Restrict a FourierMajor operator assembled at degree N_old to the
/// leading (N_new+1)^2 coefficient space.
BandedBlockBanded truncate_fourier(const BandedBlockBanded& A, int N_old,
                                   int N_new);

/// T^(a->a+1) and Tw^(a+1->a) assembled together: both draw on the same
/// cross-family integrals, so one tabulation pass serves the pair.
std::pair<BandedBlockBanded, BandedBlockBanded> conversion_pair(
    double alpha, int a, int N, std::shared_ptr<CapContext> ctx = nullptr);

/// Degree of the last coefficient block above 1e-13 * max block norm.
int coefficient_degree(const CoefficientVector& v);

/// True when all k > 0 coefficients are negligible (v depends on z only).
bool rotationally_invariant(const CoefficientVector& v);

/// Mode-k diagonal block of the z Jacobi matrix at truncation degree N
/// (symmetric, tridiagonal per degree).
BandedMatrix mode_z_block(const CapContext& ctx, int a, int k, int N);

}  // namespace sphcap
