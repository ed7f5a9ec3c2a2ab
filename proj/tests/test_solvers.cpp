#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "oracles.hpp"
#include "sphcap/solvers.hpp"

using namespace sphcap;

namespace {

// Right-hand side of the zero-boundary Poisson benchmark with the
// manufactured solution u = (z - alpha) y e^x.
double poisson_rhs(const CapPoint& p, double alpha) {
  return -2.0 * std::exp(p.x) * p.y * p.z * (2.0 + p.x) +
         (p.z - alpha) * std::exp(p.x) *
             (p.y * p.y * p.y + p.z * p.z * p.y - 4.0 * p.x * p.y - 2.0 * p.y);
}

oracles::AmbientField manufactured_field(double alpha) {
  oracles::AmbientField F;
  F.value = [alpha](double x, double y, double z) {
    return (z - alpha) * y * std::exp(x);
  };
  F.gradient = [alpha](double x, double y, double z) {
    return Eigen::Vector3d((z - alpha) * y * std::exp(x),
                           (z - alpha) * std::exp(x), y * std::exp(x));
  };
  F.hessian = [alpha](double x, double y, double z) {
    Eigen::Matrix3d H;
    const double ex = std::exp(x);
    H << (z - alpha) * y * ex, (z - alpha) * ex, y * ex,
        (z - alpha) * ex, 0.0, ex,
        y * ex, ex, 0.0;
    return H;
  };
  return F;
}

double helmholtz_v(const CapPoint& p) {
  const double x0 = 0.7, z0 = 0.2;
  const double y0 = std::sqrt(1.0 - x0 * x0 - z0 * z0);
  return 1.0 - (3.0 * (p.x - x0) * (p.x - x0) +
                5.0 * (p.y - y0) * (p.y - y0) +
                2.0 * (p.z - z0) * (p.z - z0));
}

}  // namespace

TEST_CASE("manufactured Poisson identity holds symbolically") {
  const double alpha = 0.2;
  const oracles::AmbientField F = manufactured_field(alpha);
  for (const CapPoint& p : oracles::random_cap_points(alpha, 50, 4)) {
    const double lap = oracles::laplace_beltrami(F, p);
    CHECK(lap == doctest::Approx(poisson_rhs(p, alpha)).epsilon(1e-12));
  }
}

TEST_CASE("Poisson benchmark reproduces the manufactured solution") {
  const double alpha = 0.2;
  const int N = 60;
  PdeProblem prob;
  prob.kind = PdeProblem::Kind::Poisson;
  prob.alpha = alpha;
  prob.N = N;
  prob.f = [alpha](const CapPoint& p) { return poisson_rhs(p, alpha); };
  const PdeSolution sol = solve_poisson(prob);
  CHECK(sol.decoupled);
  CHECK(sol.residual_norm < 1e-10);
  double max_err = 0.0;
  for (const CapPoint& p : oracles::random_cap_points(alpha, 200, 21)) {
    const double want = (p.z - alpha) * p.y * std::exp(p.x);
    max_err = std::max(max_err, std::abs(sol.evaluate(p) - want));
  }
  CHECK(max_err < 1e-8);
  // structural boundary enforcement
  const double r = rho(alpha);
  for (double theta : {0.0, 1.1, 2.9, 4.4}) {
    const CapPoint pb{r * std::cos(theta), r * std::sin(theta), alpha};
    CHECK(std::abs(sol.evaluate(pb)) <
          1e-9 * sol.coeffs.values.norm());
  }
}

TEST_CASE("zero right-hand side gives the zero solution") {
  PdeProblem prob;
  prob.kind = PdeProblem::Kind::Poisson;
  prob.alpha = 0.2;
  prob.N = 12;
  prob.f = [](const CapPoint&) { return 0.0; };
  const PdeSolution sol = solve_poisson(prob);
  CHECK(sol.coeffs.values.lpNorm<Eigen::Infinity>() < 1e-13);

  PdeProblem bi = prob;
  bi.kind = PdeProblem::Kind::Biharmonic;
  const PdeSolution bsol = solve_biharmonic(bi);
  CHECK(bsol.coeffs.values.lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("the epsilon family decays spectrally") {
  const double alpha = 0.2;
  const int N = 60;
  const double offset = 0.5 + 1.0 / std::sqrt(3.0);
  PdeProblem prob;
  prob.kind = PdeProblem::Kind::Poisson;
  prob.alpha = alpha;
  prob.N = N;
  prob.f = [offset](const CapPoint& p) {
    const double dx = p.x - offset, dy = p.y - offset, dz = p.z - offset;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  };
  const PdeSolution sol = solve_poisson(prob);
  const auto& b = sol.block_norms;
  CHECK(b[N * 3 / 4] < 1e-6 * b.maxCoeff());
  CHECK(b[N * 3 / 4] < b[N / 4]);
}

TEST_CASE("Helmholtz with k = 0 matches Poisson") {
  const double alpha = 0.2;
  PdeProblem prob;
  prob.kind = PdeProblem::Kind::Poisson;
  prob.alpha = alpha;
  prob.N = 24;
  prob.f = [alpha](const CapPoint& p) { return poisson_rhs(p, alpha); };
  const PdeSolution ps = solve_poisson(prob);

  PdeProblem h = prob;
  h.kind = PdeProblem::Kind::Helmholtz;
  h.v = helmholtz_v;
  h.k_wave = 0.0;
  const PdeSolution hs = solve_helmholtz(h);
  CHECK((ps.coeffs.values - hs.coeffs.values).lpNorm<Eigen::Infinity>() <
        1e-12);
}

TEST_CASE("variable-coefficient Helmholtz residual") {
  const double alpha = 0.2;
  const int N = 40;
  PdeProblem prob;
  prob.kind = PdeProblem::Kind::Helmholtz;
  prob.alpha = alpha;
  prob.N = N;
  prob.k_wave = 5.0;
  prob.v = helmholtz_v;
  prob.f = [alpha](const CapPoint& p) {
    return p.y * std::exp(p.x) * (p.z - alpha);
  };
  const PdeSolution sol = solve_helmholtz(prob);
  CHECK(!sol.decoupled);  // v couples modes
  CHECK(sol.residual_norm < 1e-8);
}

TEST_CASE("rotationally invariant Helmholtz decouples") {
  const double alpha = 0.2;
  PdeProblem prob;
  prob.kind = PdeProblem::Kind::Helmholtz;
  prob.alpha = alpha;
  prob.N = 32;
  prob.k_wave = 3.0;
  prob.v = [](const CapPoint& p) { return std::cos(p.z); };
  prob.f = [alpha](const CapPoint& p) { return poisson_rhs(p, alpha); };
  const PdeSolution sol = solve_helmholtz(prob);
  CHECK(sol.decoupled);
  CHECK(sol.residual_norm < 1e-9);
}

TEST_CASE("biharmonic benchmark") {
  const double alpha = 0.2;
  const int N = 40;
  PdeProblem prob;
  prob.kind = PdeProblem::Kind::Biharmonic;
  prob.alpha = alpha;
  prob.N = N;
  prob.f = [](const CapPoint& p) {
    const double arg = 5.0 * (1.0 - 10.0 * ((p.x - 0.5) * (p.x - 0.5) +
                                            p.y * p.y));
    return (1.0 + std::erf(arg)) * (1.0 - p.z * p.z);
  };
  const PdeSolution sol = solve_biharmonic(prob);
  CHECK(sol.residual_norm < 1e-7 * std::max(1.0, sol.coeffs.values.norm()));
  CHECK(sol.decoupled);

  // Dirichlet and Neumann data vanish structurally at the boundary; the
  // finite-difference probe itself contributes O(h * interior scale), so
  // the bound carries a unit floor
  const double scale = std::max(1.0, sol.coeffs.values.norm());
  const double h = 1e-8;
  for (const CapPoint& p : oracles::random_cap_points(alpha, 50, 90)) {
    const double theta = p.theta();
    auto at_z = [&](double z) {
      const double r = rho(z);
      return sol.evaluate({r * std::cos(theta), r * std::sin(theta), z});
    };
    CHECK(std::abs(at_z(alpha + h)) < 1e-9 * scale);
    const double dn = (at_z(alpha + 2.0 * h) - at_z(alpha)) / (2.0 * h);
    CHECK(std::abs(dn) < 1e-9 * scale);
  }
}

TEST_CASE("theta series analysis") {
  const ThetaSeries s =
      theta_series([](double th) { return std::cos(th) - 2.0 * std::sin(3.0 * th); }, 6);
  CHECK(s.c[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.s[3] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(std::abs(s.c[0]) < 1e-13);
  CHECK(s.eval(0.7) ==
        doctest::Approx(std::cos(0.7) - 2.0 * std::sin(2.1)).epsilon(1e-12));

  CHECK_THROWS_AS(
      theta_series([](double th) { return std::cos(8.0 * th); }, 4),
      BoundaryResolutionError);
}

TEST_CASE("lifting leaves a boundary-free problem unchanged") {
  PdeProblem prob;
  prob.kind = PdeProblem::Kind::Helmholtz;
  prob.alpha = 0.2;
  prob.N = 10;
  prob.k_wave = 2.0;
  prob.v = [](const CapPoint&) { return 1.0; };
  prob.f = [](const CapPoint& p) { return p.x; };
  const LiftedProblem lifted = lift_boundary(prob);
  CHECK(lifted.series.empty());
  const CapPoint p{0.3, 0.4, std::sqrt(1.0 - 0.25)};
  CHECK(lifted.problem.f(p) == prob.f(p));
}

TEST_CASE("lifting formula matches the surface Laplacian of the extension") {
  // boundary data cos(theta): the z-independent extension is x / rho(z)
  PdeProblem prob;
  prob.kind = PdeProblem::Kind::Poisson;
  prob.alpha = 0.2;
  prob.N = 10;
  prob.f = [](const CapPoint&) { return 0.0; };
  prob.boundary = [](double th) { return std::cos(th); };
  PdeProblem h = prob;
  h.kind = PdeProblem::Kind::Helmholtz;
  h.v = [](const CapPoint&) { return 0.0; };
  const LiftedProblem lifted = lift_boundary(h);

  // finite differences of the extension in the (z, theta) chart:
  // Lap = d/dz(rho^2 d/dz .) + (1/rho^2) d2/dtheta2
  auto ext = [](double z, double th) { return std::cos(th); };
  const double dz = 1e-4, dth = 1e-4;
  for (const CapPoint& p : oracles::random_cap_points(0.2, 30, 55)) {
    if (p.z > 0.9) continue;  // stay away from the pole for the FD oracle
    const double th = p.theta();
    const double rho2 = 1.0 - p.z * p.z;
    auto g = [&](double z) {
      return (1.0 - z * z) * (ext(z + dz, th) - ext(z - dz, th)) /
             (2.0 * dz);
    };
    const double term_z = (g(p.z + dz) - g(p.z - dz)) / (2.0 * dz);
    const double term_t = (ext(p.z, th + dth) - 2.0 * ext(p.z, th) +
                           ext(p.z, th - dth)) /
                          (dth * dth) / rho2;
    const double fd_lap = term_z + term_t;
    const double formula = lifted.series.laplacian_numerator(th) / rho2;
    CHECK(formula == doctest::Approx(fd_lap).epsilon(1e-5));
    // the lifted right-hand side carries -Lap(c)
    CHECK(lifted.problem.f(p) == doctest::Approx(-formula).epsilon(1e-10));
  }
}

TEST_CASE("lifted solve reproduces the boundary data") {
  PdeProblem prob;
  prob.kind = PdeProblem::Kind::Poisson;
  prob.alpha = 0.2;
  prob.N = 24;
  prob.f = [](const CapPoint&) { return 0.0; };
  prob.boundary = [](double th) { return std::cos(th); };
  const PdeSolution sol = solve_poisson(prob);
  const double r = rho(0.2);
  for (double theta : {0.0, 0.9, 2.2, 3.6, 5.1}) {
    const CapPoint pb{r * std::cos(theta), r * std::sin(theta), 0.2};
    CHECK(sol.evaluate(pb) == doctest::Approx(std::cos(theta)).epsilon(1e-8));
  }
}

TEST_CASE("problem validation") {
  PdeProblem prob;
  prob.kind = PdeProblem::Kind::Helmholtz;
  prob.alpha = 0.2;
  prob.N = 4;
  prob.f = [](const CapPoint&) { return 1.0; };
  CHECK_THROWS_AS(solve_helmholtz(prob), ParameterError);  // missing v

  PdeProblem bi;
  bi.kind = PdeProblem::Kind::Biharmonic;
  bi.alpha = 0.2;
  bi.N = 4;
  bi.f = [](const CapPoint&) { return 1.0; };
  bi.boundary = [](double) { return 1.0; };
  CHECK_THROWS_AS(solve_biharmonic(bi), ParameterError);
}
