#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sphcap/transforms.hpp"

using namespace sphcap;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("constant integrates to the cap area") {
  const BasisSpec spec{0.2, 0, 6};
  const CapQuadrature q = cap_quadrature(spec, 12);
  const double got = integrate(q, [](const CapPoint&) { return 1.0; });
  CHECK(got == doctest::Approx(2.0 * kPi * 0.8).epsilon(1e-13));
}

TEST_CASE("odd functions integrate to zero") {
  const BasisSpec spec{0.2, 0, 6};
  const CapQuadrature q = cap_quadrature(spec, 12);
  CHECK(std::abs(integrate(q, [](const CapPoint& p) { return p.x; })) <
        1e-14);
  CHECK(std::abs(integrate(q, [](const CapPoint& p) { return p.y * p.z; })) <
        1e-14);
}

TEST_CASE("x^2 y^2 z^2 matches the adaptive oracle") {
  const BasisSpec spec{0.3, 0, 4};
  const CapQuadrature q = cap_quadrature(spec, 6);
  auto f = [](const CapPoint& p) {
    return p.x * p.x * p.y * p.y * p.z * p.z;
  };
  const double got = integrate(q, f);
  const double want = oracles::integrate_cap(f, 0.3, 0.0, 1e-13);
  CHECK(oracles::rel_err(got, want) < 1e-11);
}

TEST_CASE("monomial exactness up to degree 12") {
  const double alpha = 0.2;
  for (int a : {0, 1}) {
    const BasisSpec spec{alpha, a, 6};
    const CapQuadrature q = cap_quadrature(spec, 12);
    for (int p = 0; p + 0 <= 12; ++p)
      for (int r = 0; p + r <= 12; r += 3) {
        for (int s = 0; p + r + s <= 12; s += 2) {
          auto f = [&](const CapPoint& pt) {
            return std::pow(pt.x, p) * std::pow(pt.y, s) * std::pow(pt.z, r);
          };
          const double got = integrate(q, f);
          const double want = oracles::integrate_cap(f, alpha, a, 1e-12);
          CHECK(std::abs(got - want) <
                1e-10 * std::max(1.0, std::abs(want)));
        }
      }
  }
}

TEST_CASE("node layout follows the tensor convention") {
  const BasisSpec spec{0.2, 0, 3};
  const CapQuadrature q = cap_quadrature(spec, 7);
  CHECK(q.M1 == 4);
  CHECK(q.M2 == 8);
  for (int idx = 0; idx < q.size(); ++idx) {
    const CapPoint p = q.node(idx);
    CHECK(on_cap(p, 0.2));
    CHECK(p.y >= 0.0);  // upper half; antipodes supply the lower half
    CHECK(q.weight(idx) ==
          doctest::Approx(q.z_weights[idx / q.M2] * kPi / q.M2));
    const CapPoint pb = q.antipode(idx);
    CHECK(pb.x == -p.x);
    CHECK(pb.y == -p.y);
    CHECK(pb.z == p.z);
  }
}

TEST_CASE("expanding a basis function gives a unit vector") {
  const BasisSpec spec{0.2, 1, 6};
  CapBasis basis(spec);
  auto f = [&](const CapPoint& p) { return basis.eval(3, 2, 1, p); };
  const CoefficientVector c = expand(f, spec, basis.context_ptr());
  const int hit = layout::fourier_major_index(6, 3, 2, 1);
  for (int idx = 0; idx < c.values.size(); ++idx) {
    if (idx == hit)
      CHECK(c.values[idx] == doctest::Approx(1.0).epsilon(1e-12));
    else
      CHECK(std::abs(c.values[idx]) < 1e-11);
  }
}

TEST_CASE("expanding a constant") {
  const BasisSpec spec{0.2, 0, 5};
  const CoefficientVector c =
      expand([](const CapPoint&) { return 2.5; }, spec);
  CHECK(c.values[0] == doctest::Approx(2.5 * std::sqrt(2.0)).epsilon(1e-13));
  CHECK(c.values.tail(c.values.size() - 1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("expand/evaluate round trip on a smooth function") {
  const BasisSpec spec{0.2, 1, 40};
  auto f = [](const CapPoint& p) { return std::exp(p.x) * p.y * p.z; };
  CapBasis basis(spec);
  const CoefficientVector c = expand(f, spec, basis.context_ptr());
  double max_err = 0.0;
  for (const CapPoint& p : oracles::random_cap_points(0.2, 200, 2024)) {
    max_err = std::max(max_err, std::abs(basis.evaluate(c, p) - f(p)));
  }
  CHECK(max_err < 1e-10);
}

TEST_CASE("expansion is exact for polynomials of degree N") {
  const BasisSpec spec{-0.3, 0, 4};
  auto f = [](const CapPoint& p) {
    return p.x * p.x * p.y - 2.0 * p.z * p.z * p.z + 0.5;
  };
  CapBasis basis(spec);
  const CoefficientVector c = expand(f, spec, basis.context_ptr());
  for (const CapPoint& p : oracles::random_cap_points(-0.3, 50, 99))
    CHECK(basis.evaluate(c, p) == doctest::Approx(f(p)).epsilon(1e-12));
}

TEST_CASE("Parseval identity") {
  const BasisSpec spec{0.2, 1, 12};
  auto f = [](const CapPoint& p) { return p.x * p.y + p.z * p.z; };  // degree 2 <= N/2
  CapBasis basis(spec);
  const auto ctx = basis.context_ptr();
  const CoefficientVector c = expand(f, spec, ctx);
  double sum = 0.0;
  for (int idx = 0; idx < c.values.size(); ++idx) {
    const BasisIndex b = layout::from_fourier_major(12, idx);
    const double norm2 = kPi * ctx->omega(1, 2 * b.k);
    sum += c.values[idx] * c.values[idx] * norm2;
  }
  const CapQuadrature q = cap_quadrature(spec, 2 * 12);
  const double want =
      integrate(q, [&](const CapPoint& p) { return f(p) * f(p); });
  CHECK(oracles::rel_err(sum, want) < 1e-9);
}

TEST_CASE("expansion determinism and sample variant") {
  const BasisSpec spec{0.2, 0, 10};
  auto f = [](const CapPoint& p) { return std::sin(3.0 * p.x) + p.z; };
  const CoefficientVector a = expand(f, spec);
  const CoefficientVector b = expand(f, spec);
  CHECK((a.values - b.values).lpNorm<Eigen::Infinity>() == 0.0);

  const CapQuadrature q = cap_quadrature(spec, 2 * spec.N);
  Eigen::VectorXd vp(q.size()), vm(q.size());
  for (int idx = 0; idx < q.size(); ++idx) {
    vp[idx] = f(q.node(idx));
    vm[idx] = f(q.antipode(idx));
  }
  const CoefficientVector c = expand_samples(vp, vm, spec);
  CHECK((a.values - c.values).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("shuffled summation stays within the determinism budget") {
  // quadrature applied with reversed node order agrees to near round-off
  const BasisSpec spec{0.2, 0, 8};
  const CapQuadrature q = cap_quadrature(spec, 16);
  auto f = [](const CapPoint& p) { return std::cos(2.0 * p.x + p.y) * p.z; };
  const double forward = integrate(q, f);
  double reversed = 0.0;
  for (int idx = q.size() - 1; idx >= 0; --idx)
    reversed += q.weight(idx) * (f(q.node(idx)) + f(q.antipode(idx)));
  CHECK(std::abs(forward - reversed) <
        1e-13 * std::max(1.0, std::abs(forward)));
}
