#pragma once

#include "sphcap/errors.hpp"

namespace sphcap {

/// Index of a circular harmonic: Fourier mode k >= 0 and cos/sin selector i.
/// Y_{0,0} is the constant sqrt(2)/2; Y_{k,0} = cos(k theta),
/// Y_{k,1} = sin(k theta) for k >= 1.
struct HarmonicIndex {
  int k = 0;
  int i = 0;

  void validate() const {
    if (k < 0 || i < 0 || i > 1 || (k == 0 && i == 1))
      throw ParameterError("invalid circular harmonic index");
  }
};

enum class TrigFactor { One, Cos, Sin };

/// The constant Y_0 = sqrt(2)/2.
double harmonic_constant();

double eval_harmonic(const HarmonicIndex& index, double theta);

/// Raw integral int_0^{2pi} Y_{kA} Y_{kB} f(theta) dtheta for
/// f in {1, cos theta, sin theta}, in closed form.
double harmonic_product_integral(const HarmonicIndex& a,
                                 const HarmonicIndex& b, TrigFactor factor);

/// eta_k: 0 for k < 0, Y_0 for k = 0, 1/2 otherwise.
double harmonic_eta(int k);

}  // namespace sphcap
