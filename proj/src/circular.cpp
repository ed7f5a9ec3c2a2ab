#include "sphcap/circular.hpp"

#include <cmath>
#include <numbers>

namespace sphcap {

namespace {
constexpr double kPi = std::numbers::pi;
}

double harmonic_constant() { return std::numbers::sqrt2 / 2.0; }

double harmonic_eta(int k) {
  if (k < 0) return 0.0;
  if (k == 0) return harmonic_constant();
  return 0.5;
}

double eval_harmonic(const HarmonicIndex& index, double theta) {
  index.validate();
  if (index.k == 0) return harmonic_constant();
  return index.i == 0 ? std::cos(index.k * theta) : std::sin(index.k * theta);
}

double harmonic_product_integral(const HarmonicIndex& a,
                                 const HarmonicIndex& b, TrigFactor factor) {
  a.validate();
  b.validate();
  const int k = a.k, i = a.i;
  const int j = b.k, h = b.i;

  if (factor == TrigFactor::One) {
    // (1/pi) normalization makes the family orthonormal; the raw integral
    // is pi on the diagonal (2 pi for the constant pair, folded into Y_0^2).
    if (k != j || i != h) return 0.0;
    return k == 0 ? 2.0 * kPi * harmonic_constant() * harmonic_constant()
                  : kPi;
  }

  // The two linearization identities share one closed form:
  //   cos factor couples (k, i) -> (k -/+ 1, i)        with weights eta
  //   sin factor couples (k, i) -> (k -/+ 1, |i - 1|)  with signs (-1)^(i+1), (-1)^i
  if (factor == TrigFactor::Cos) {
    if (i != h) return 0.0;
    double v = 0.0;
    if (j == k - 1) v += harmonic_eta(k - 1);
    if (j == k + 1) v += harmonic_eta(k);
    return kPi * v;
  }

  if (std::abs(i - 1) != h) return 0.0;
  double v = 0.0;
  if (j == k - 1) v += ((i + 1) % 2 == 0 ? 1.0 : -1.0) * harmonic_eta(k - 1);
  if (j == k + 1) v += (i % 2 == 0 ? 1.0 : -1.0) * harmonic_eta(k);
  return kPi * v;
}

}  // namespace sphcap
