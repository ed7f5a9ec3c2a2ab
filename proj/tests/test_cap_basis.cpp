#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "oracles.hpp"
#include "sphcap/cap_basis.hpp"

using namespace sphcap;

namespace {

double coord(const CapPoint& p, Axis ax) {
  return ax == Axis::X ? p.x : (ax == Axis::Y ? p.y : p.z);
}

CoefficientVector random_coeffs(const BasisSpec& spec, unsigned seed) {
  CoefficientVector v;
  v.spec = spec;
  v.ordering = Ordering::DegreeMajor;
  v.values.resize(spec.dimension());
  unsigned state = seed;
  for (int i = 0; i < v.values.size(); ++i) {
    state = state * 1664525u + 1013904223u;
    v.values[i] = double(state) / 4294967296.0 - 0.5;
  }
  return v;
}

}  // namespace

TEST_CASE("basis values: constants and coordinates") {
  const BasisSpec spec{0.2, 1, 4};
  CapBasis basis(spec);
  for (const CapPoint& p : oracles::random_cap_points(0.2, 20)) {
    CHECK(basis.eval(0, 0, 0, p) ==
          doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));
    // Q_{1,1,0} = R_0^(a,2) rho cos(theta) = x
    CHECK(basis.eval(1, 1, 0, p) == doctest::Approx(p.x).epsilon(1e-13));
  }
  // pole is well defined
  CHECK(basis.eval(1, 1, 0, {0.0, 0.0, 1.0}) == doctest::Approx(0.0));
  CHECK(basis.eval(0, 0, 0, {0.0, 0.0, 1.0}) ==
        doctest::Approx(std::sqrt(2.0) / 2.0));
}

TEST_CASE("Q_{2,1,1} equals the componentwise product") {
  const BasisSpec spec{0.2, 1, 4};
  CapBasis basis(spec);
  const auto fam = basis.context().family(1, 2, 4);
  for (const CapPoint& p : oracles::random_cap_points(0.2, 50, 777)) {
    const double want = fam->eval(1, p.z) * p.y;
    CHECK(basis.eval(2, 1, 1, p) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("eval_all agrees with single evaluation") {
  const BasisSpec spec{-0.4, 0, 6};
  CapBasis basis(spec);
  const CapPoint p = oracles::random_cap_points(-0.4, 1, 5)[0];
  const Eigen::VectorXd all = basis.eval_all(p);
  for (int n = 0; n <= 6; ++n)
    for (int k = 0; k <= n; ++k)
      for (int i = 0; i <= (k == 0 ? 0 : 1); ++i)
        CHECK(all[layout::degree_major_index(6, n, k, i)] ==
              doctest::Approx(basis.eval(n, k, i, p)).epsilon(1e-14));
}

TEST_CASE("index validation") {
  CapBasis basis({0.2, 0, 3});
  CHECK_THROWS_AS(basis.eval(4, 0, 0, {0, 0, 1}), ParameterError);
  CHECK_THROWS_AS(basis.eval(2, 3, 0, {0, 0, 1}), ParameterError);
  CHECK_THROWS_AS(basis.eval(2, 0, 1, {0, 0, 1}), ParameterError);
}

TEST_CASE("Jacobi matrices reproduce coordinate multiplication") {
  const int N = 10;
  for (int a : {0, 1}) {
    const BasisSpec spec{0.2, a, N};
    CapBasis basis(spec);
    for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
      const BandedBlockBanded J = basis.jacobi(ax);
      for (const CapPoint& p : oracles::random_cap_points(0.2, 20, 42)) {
        const Eigen::VectorXd Q = basis.eval_all(p);
        const Eigen::VectorXd JQ = J.multiply(Q);
        const Eigen::VectorXd want = coord(p, ax) * Q;
        // the final degree block sees the truncation; exclude it
        const int keep = N * N;
        CHECK((JQ.head(keep) - want.head(keep)).lpNorm<Eigen::Infinity>() <
              1e-10);
      }
    }
  }
}

TEST_CASE("Jacobi block structure") {
  const BasisSpec spec{0.3, 1, 8};
  CapBasis basis(spec);
  const BandedBlockBanded Jx = basis.jacobi(Axis::X);
  const BandedBlockBanded Jy = basis.jacobi(Axis::Y);
  const BandedBlockBanded Jz = basis.jacobi(Axis::Z);
  CHECK(Jx.block_lower() == 1);
  CHECK(Jx.block_upper() == 1);
  CHECK(Jx.sub_lower() == 2);
  CHECK(Jy.sub_lower() == 3);
  CHECK(Jz.sub_lower() == 0);
  CHECK(Jz.sub_upper() == 0);

  // z sub-blocks are diagonal with recurrence entries
  const auto fam = basis.context().family(1, 4, 8);
  const double g = fam->table().betas[2];  // gamma_{4,2,3} = beta_{2}^(a,4)
  CHECK(Jz.block(4, 5)(layout::degree_local(2, 0), layout::degree_local(2, 0)) ==
        doctest::Approx(g).epsilon(1e-13));

  // mirror symmetry: |J_y| entries equal |J_x| entries with flipped selector
  for (int n = 1; n <= 7; ++n)
    for (int m = n - 1; m <= n + 1; ++m)
      for (int k = 0; k <= n; ++k)
        for (int i = 0; i <= (k == 0 ? 0 : 1); ++i)
          for (int dj : {-1, 1}) {
            const int j = k + dj;
            if (j < 0 || j > m) continue;
            const int hx = i, hy = 1 - i;
            if (j == 0 && hx == 1) continue;
            const double vx =
                Jx.block(n, m)(layout::degree_local(k, i),
                               layout::degree_local(j, hx));
            if (j == 0 && hy == 1) continue;
            const double vy =
                Jy.block(n, m)(layout::degree_local(k, i),
                               layout::degree_local(j, hy));
            if (vx == 0.0 && vy == 0.0) continue;
            const bool negate = (i == 0 && dj == -1) || (i == 1 && dj == 1);
            CHECK(vy == doctest::Approx(negate ? -vx : vx).epsilon(1e-12));
          }
}

TEST_CASE("multiplication operators commute on the interior truncation") {
  const int N = 10;
  CapBasis basis({0.2, 0, N});
  const Eigen::MatrixXd X = basis.jacobi(Axis::X).dense();
  const Eigen::MatrixXd Y = basis.jacobi(Axis::Y).dense();
  const Eigen::MatrixXd P = X * Y, Q = Y * X;
  const int keep = (N - 1) * (N - 1);
  CHECK((P.topLeftCorner(keep, keep) - Q.topLeftCorner(keep, keep))
            .lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("left inverse identity Dt_n A_n = I") {
  const BasisSpec spec{0.2, 1, 16};
  CapBasis basis(spec);
  const ClenshawMatrices& cm = basis.clenshaw();
  for (int n = 0; n <= 15; ++n) {
    const Eigen::MatrixXd prod =
        Eigen::MatrixXd(cm.degrees[n].Dt) * Eigen::MatrixXd(cm.degrees[n].A);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2 * n + 3, 2 * n + 3);
    CHECK((prod - I).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  // shapes
  CHECK(cm.degrees[5].A.rows() == 33);
  CHECK(cm.degrees[5].A.cols() == 13);
  CHECK(cm.degrees[5].B.cols() == 11);
  CHECK(cm.degrees[5].C.cols() == 9);
  CHECK(cm.degrees[5].Dt.rows() == 13);
  CHECK(cm.degrees[5].Dt.cols() == 33);
}

TEST_CASE("explicit D0") {
  const BasisSpec spec{-0.1, 2, 3};
  CapBasis basis(spec);
  const RecurrenceCoeffs& rc = basis.recurrence_coeffs();
  const Eigen::MatrixXd D0 = Eigen::MatrixXd(basis.clenshaw().degrees[0].Dt);
  CHECK(D0(0, 2) == doctest::Approx(1.0 / rc.gamma(0, 0, 3)));
  CHECK(D0(1, 0) == doctest::Approx(1.0 / rc.alpha(0, 0, 6)));
  CHECK(D0(2, 1) == doctest::Approx(1.0 / rc.beta(0, 0, 0, 6)));
  CHECK(D0.cwiseAbs().sum() ==
        doctest::Approx(std::abs(D0(0, 2)) + std::abs(D0(1, 0)) +
                        std::abs(D0(2, 1))));
}

TEST_CASE("Clenshaw evaluation equals direct summation") {
  const int N = 8;
  for (int a : {0, 2}) {
    const BasisSpec spec{0.2, a, N};
    CapBasis basis(spec);
    const CoefficientVector coeffs = random_coeffs(spec, 1234 + a);
    for (const CapPoint& p : oracles::random_cap_points(0.2, 100, 31)) {
      const double direct = basis.eval_all(p).dot(coeffs.values);
      const double clenshaw = basis.evaluate(coeffs, p);
      CHECK(std::abs(direct - clenshaw) <
            1e-11 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("degree-0 Clenshaw returns the constant") {
  const BasisSpec spec{0.2, 0, 0};
  CapBasis basis(spec);
  CoefficientVector c;
  c.spec = spec;
  c.ordering = Ordering::DegreeMajor;
  c.values.resize(1);
  c.values[0] = 3.25;
  CHECK(basis.evaluate(c, {0.6, 0.0, 0.8}) ==
        doctest::Approx(3.25 * std::sqrt(2.0) / 2.0).epsilon(1e-14));
}

TEST_CASE("Clenshaw reproduces x from its single coefficient") {
  const int N = 3;
  const BasisSpec spec{0.2, 1, N};
  CapBasis basis(spec);
  CoefficientVector c;
  c.spec = spec;
  c.ordering = Ordering::DegreeMajor;
  c.values.setZero(spec.dimension());
  c.values[layout::degree_major_index(N, 1, 1, 0)] = 1.0;
  for (const CapPoint& p : oracles::random_cap_points(0.2, 25, 8)) {
    CHECK(basis.evaluate(c, p) == doctest::Approx(p.x).epsilon(1e-13));
  }
}

TEST_CASE("FourierMajor coefficients are reordered internally") {
  const BasisSpec spec{0.2, 0, 6};
  CapBasis basis(spec);
  const CoefficientVector cd = random_coeffs(spec, 5);
  const CoefficientVector cf = reorder(cd, Ordering::FourierMajor);
  const CapPoint p = oracles::random_cap_points(0.2, 1, 17)[0];
  CHECK(basis.evaluate(cd, p) == doctest::Approx(basis.evaluate(cf, p)));
}

TEST_CASE("weighted evaluation multiplies by the boundary factor") {
  const BasisSpec spec{0.2, 2, 5};
  CapBasis basis(spec);
  CoefficientVector c = random_coeffs(spec, 77);
  CoefficientVector cw = c;
  cw.weighted = true;
  for (const CapPoint& p : oracles::random_cap_points(0.2, 10, 3)) {
    const double w = std::pow(p.z - 0.2, 2.0);
    CHECK(basis.evaluate(cw, p) ==
          doctest::Approx(w * basis.evaluate(c, p)).epsilon(1e-12));
  }
  // weighted expansions vanish on the boundary circle
  const double r = rho(0.2);
  CHECK(basis.evaluate(cw, {r, 0.0, 0.2}) == doctest::Approx(0.0));
}
