#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "sphcap/errors.hpp"

namespace sphcap {

/// A point on the spherical cap surface {x^2+y^2+z^2 = 1, alpha <= z <= 1}.
struct CapPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;

  double theta() const { return std::atan2(y, x); }
};

inline double rho(double z) { return std::sqrt(std::max(0.0, 1.0 - z * z)); }

inline bool on_cap(const CapPoint& p, double alpha, double tol = 1e-12) {
  const double r2 = p.x * p.x + p.y * p.y + p.z * p.z;
  return std::abs(r2 - 1.0) < tol && p.z >= alpha - tol && p.z <= 1.0 + tol;
}

/// Basis parameters: cap boundary alpha, weight exponent a, max total
/// degree N.  The degree-<=N space has dimension (N+1)^2.
struct BasisSpec {
  double alpha = 0.0;
  int a = 0;
  int N = 0;

  int dimension() const { return (N + 1) * (N + 1); }
  void validate() const {
    if (!(alpha > -1.0 && alpha < 1.0))
      throw ParameterError("basis alpha must lie in (-1, 1)");
    if (a < 0) throw ParameterError("basis parameter a must be non-negative");
    if (N < 0) throw ParameterError("basis degree N must be non-negative");
  }
  bool operator==(const BasisSpec&) const = default;
};

struct BasisIndex {
  int n = 0;
  int k = 0;
  int i = 0;
};

/// DegreeMajor groups coefficients by degree n (block n holds the 2n+1
/// entries (n,0,0), (n,1,0), (n,1,1), ..., (n,n,0), (n,n,1)); FourierMajor
/// groups them by mode k (block 0 holds (n,0,0) for n = 0..N, block k >= 1
/// holds (n,k,0), (n,k,1) for n = k..N).
enum class Ordering { DegreeMajor, FourierMajor };

namespace layout {

inline int degree_block_size(int n) { return 2 * n + 1; }
inline int degree_block_offset(int n) { return n * n; }
inline int degree_local(int k, int i) { return k == 0 ? 0 : 2 * k - 1 + i; }

inline int fourier_block_size(int N, int k) {
  return k == 0 ? N + 1 : 2 * (N - k + 1);
}
inline int fourier_block_offset(int N, int k) {
  if (k == 0) return 0;
  // N+1 entries for mode 0, then 2(N-j+1) for modes 1..k-1.
  return (N + 1) + (k - 1) * (2 * N + 2) - (k - 1) * k;
}
inline int fourier_local(int N, int n, int k, int i) {
  return k == 0 ? n : 2 * (n - k) + i;
}

inline int degree_major_index(int N, int n, int k, int i) {
  (void)N;
  return degree_block_offset(n) + degree_local(k, i);
}
inline int fourier_major_index(int N, int n, int k, int i) {
  return fourier_block_offset(N, k) + fourier_local(N, n, k, i);
}

BasisIndex from_degree_major(int N, int idx);
BasisIndex from_fourier_major(int N, int idx);

/// Permutation p with p[degree_major_index] = fourier_major_index.
std::vector<int> degree_to_fourier(int N);

}  // namespace layout

/// Expansion coefficients of a function in a cap basis, with their ordering
/// and whether they multiply the weighted basis w^(a,0)(z) * Q.
struct CoefficientVector {
  Eigen::VectorXd values;
  Ordering ordering = Ordering::FourierMajor;
  BasisSpec spec;
  bool weighted = false;

  void validate() const {
    spec.validate();
    if (values.size() != spec.dimension())
      throw ParameterError("coefficient vector length must be (N+1)^2");
  }
};

/// Permute a coefficient vector between the two orderings (involutive).
CoefficientVector reorder(const CoefficientVector& coeffs, Ordering target);

/// Per-degree 2-norms of the coefficient blocks, length N+1.
Eigen::VectorXd block_norms(const CoefficientVector& coeffs);

}  // namespace sphcap
