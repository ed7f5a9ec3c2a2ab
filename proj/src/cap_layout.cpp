#include "sphcap/cap_layout.hpp"

namespace sphcap {
namespace layout {

BasisIndex from_degree_major(int N, int idx) {
  (void)N;
  const int n = static_cast<int>(std::floor(std::sqrt(double(idx))));
  int local = idx - n * n;
  // floor(sqrt) can be off by one at block edges
  int nn = n;
  if (local < 0) {
    nn -= 1;
    local = idx - nn * nn;
  } else if (local >= 2 * nn + 1) {
    nn += 1;
    local = idx - nn * nn;
  }
  BasisIndex b;
  b.n = nn;
  if (local == 0) {
    b.k = 0;
    b.i = 0;
  } else {
    b.k = (local + 1) / 2;
    b.i = (local + 1) % 2;
  }
  return b;
}

BasisIndex from_fourier_major(int N, int idx) {
  int k = 0;
  while (k < N && idx >= fourier_block_offset(N, k + 1)) ++k;
  const int local = idx - fourier_block_offset(N, k);
  BasisIndex b;
  b.k = k;
  if (k == 0) {
    b.n = local;
    b.i = 0;
  } else {
    b.n = k + local / 2;
    b.i = local % 2;
  }
  return b;
}

std::vector<int> degree_to_fourier(int N) {
  std::vector<int> perm((N + 1) * (N + 1));
  for (int n = 0; n <= N; ++n)
    for (int k = 0; k <= n; ++k)
      for (int i = 0; i <= (k == 0 ? 0 : 1); ++i)
        perm[degree_major_index(N, n, k, i)] = fourier_major_index(N, n, k, i);
  return perm;
}

}  // namespace layout

CoefficientVector reorder(const CoefficientVector& coeffs, Ordering target) {
  coeffs.validate();
  if (coeffs.ordering == target) return coeffs;
  const int N = coeffs.spec.N;
  const auto perm = layout::degree_to_fourier(N);
  CoefficientVector out = coeffs;
  out.ordering = target;
  out.values.resize(coeffs.values.size());
  if (target == Ordering::FourierMajor) {
    for (size_t d = 0; d < perm.size(); ++d)
      out.values[perm[d]] = coeffs.values[d];
  } else {
    for (size_t d = 0; d < perm.size(); ++d)
      out.values[d] = coeffs.values[perm[d]];
  }
  return out;
}

Eigen::VectorXd block_norms(const CoefficientVector& coeffs) {
  coeffs.validate();
  const int N = coeffs.spec.N;
  Eigen::VectorXd norms = Eigen::VectorXd::Zero(N + 1);
  for (int idx = 0; idx < coeffs.values.size(); ++idx) {
    const BasisIndex b = coeffs.ordering == Ordering::DegreeMajor
                             ? layout::from_degree_major(N, idx)
                             : layout::from_fourier_major(N, idx);
    norms[b.n] += coeffs.values[idx] * coeffs.values[idx];
  }
  return norms.array().sqrt();
}

}  // namespace sphcap
