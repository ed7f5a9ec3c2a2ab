#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "sphcap/structured.hpp"

using namespace sphcap;

namespace {

unsigned g_state = 99;
double next_uniform() {
  g_state = g_state * 1664525u + 1013904223u;
  return double(g_state) / 4294967296.0 - 0.5;
}

// Block-diagonal FourierMajor test matrix with random in-band entries.
BandedBlockBanded random_block_diagonal(int N, int lo, int up,
                                        double diag_boost = 4.0) {
  std::vector<int> sizes(N + 1);
  for (int k = 0; k <= N; ++k) sizes[k] = layout::fourier_block_size(N, k);
  BandedBlockBanded A(sizes, sizes, 0, 0, lo, up, Ordering::FourierMajor);
  for (int k = 0; k <= N; ++k) {
    BandedMatrix& b = A.block(k, k);
    for (int j = 0; j < b.cols(); ++j)
      for (int i = std::max(0, j - up); i <= std::min(b.rows() - 1, j + lo);
           ++i)
        b.at(i, j) = next_uniform() + (i == j ? diag_boost : 0.0);
  }
  return A;
}

BandedBlockBanded random_block_tridiagonal(int N, int lo, int up) {
  std::vector<int> sizes(N + 1);
  for (int k = 0; k <= N; ++k) sizes[k] = layout::fourier_block_size(N, k);
  BandedBlockBanded A(sizes, sizes, 1, 1, lo, up, Ordering::FourierMajor);
  for (int bi = 0; bi <= N; ++bi)
    for (int bj = std::max(0, bi - 1); bj <= std::min(N, bi + 1); ++bj) {
      BandedMatrix& b = A.block(bi, bj);
      for (int j = 0; j < b.cols(); ++j)
        for (int i = std::max(0, j - up); i <= std::min(b.rows() - 1, j + lo);
             ++i)
          b.at(i, j) = next_uniform() + (bi == bj && i == j ? 6.0 : 0.0);
    }
  return A;
}

CoefficientVector random_vector(int N) {
  CoefficientVector v;
  v.spec = {0.2, 0, N};
  v.ordering = Ordering::FourierMajor;
  v.values.resize(v.spec.dimension());
  for (int i = 0; i < v.values.size(); ++i) v.values[i] = next_uniform();
  return v;
}

}  // namespace

TEST_CASE("banded matrix mask discipline") {
  BandedMatrix b(5, 5, 1, 2);
  b.at(2, 3) = 1.5;
  CHECK(b(2, 3) == 1.5);
  CHECK(b(4, 0) == 0.0);
  CHECK_THROWS_AS(b.at(4, 0) = 1.0, ParameterError);
  CHECK_THROWS_AS(b.at(0, 3) = 1.0, ParameterError);
}

TEST_CASE("banded LU matches dense solve") {
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 24;
    const int lo = 2 + trial % 3, up = 3 - trial % 2;
    BandedMatrix A(n, n, lo, up);
    for (int j = 0; j < n; ++j)
      for (int i = std::max(0, j - up); i <= std::min(n - 1, j + lo); ++i)
        A.at(i, j) = next_uniform() + (i == j ? 3.0 : 0.0);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = next_uniform();
    const Eigen::VectorXd x = BandedLU(A).solve(rhs);
    const Eigen::VectorXd xd = A.dense().partialPivLu().solve(rhs);
    CHECK((x - xd).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("banded LU reports singular systems") {
  BandedMatrix A(3, 3, 1, 1);
  A.at(0, 0) = 1.0;
  A.at(1, 1) = 1.0;  // third row/col left zero
  CHECK_THROWS_AS(BandedLU(A, 7), SingularSystemError);
  try {
    BandedLU lu(A, 7);
  } catch (const SingularSystemError& e) {
    CHECK(e.mode() == 7);
  }
}

TEST_CASE("banded product and transpose match dense") {
  BandedMatrix A(6, 8, 1, 2), B(8, 5, 2, 1);
  for (int j = 0; j < 8; ++j)
    for (int i = std::max(0, j - 2); i <= std::min(5, j + 1); ++i)
      A.at(i, j) = next_uniform();
  for (int j = 0; j < 5; ++j)
    for (int i = std::max(0, j - 1); i <= std::min(7, j + 2); ++i)
      B.at(i, j) = next_uniform();
  CHECK((A.multiply(B).dense() - A.dense() * B.dense()).norm() < 1e-14);
  CHECK((A.transpose().dense() - A.dense().transpose()).norm() == 0.0);
}

TEST_CASE("block matvec: identity, zero, dense oracle") {
  const int N = 8;
  const BandedBlockBanded A = random_block_tridiagonal(N, 2, 2);
  CoefficientVector v = random_vector(N);

  const CoefficientVector y = bbb_matvec(A, v);
  const Eigen::VectorXd yd = A.dense() * v.values;
  CHECK((y.values - yd).lpNorm<Eigen::Infinity>() <
        1e-13 * std::max(1.0, yd.lpNorm<Eigen::Infinity>()));

  CoefficientVector zero = v;
  zero.values.setZero();
  CHECK(bbb_matvec(A, zero).values.lpNorm<Eigen::Infinity>() == 0.0);

  // identity mask leaves v unchanged
  std::vector<int> sizes(N + 1);
  for (int k = 0; k <= N; ++k) sizes[k] = layout::fourier_block_size(N, k);
  BandedBlockBanded I(sizes, sizes, 0, 0, 0, 0, Ordering::FourierMajor);
  for (int k = 0; k <= N; ++k)
    for (int j = 0; j < sizes[k]; ++j) I.block(k, k).at(j, j) = 1.0;
  CHECK((bbb_matvec(I, v).values - v.values).lpNorm<Eigen::Infinity>() == 0.0);

  v.ordering = Ordering::DegreeMajor;
  CHECK_THROWS_AS(bbb_matvec(A, v), OrderingError);
}

TEST_CASE("scalar reads outside the mask are zero, writes rejected") {
  const int N = 4;
  BandedBlockBanded A = random_block_diagonal(N, 1, 1);
  // entry coupling modes 0 and 2 lies outside the block band
  CHECK(A.coeff(0, A.col_offset(2)) == 0.0);
  CHECK_THROWS_AS(A.set(0, A.col_offset(2), 1.0), ParameterError);
  CHECK_THROWS_AS(A.set(0, 3, 1.0), ParameterError);  // outside sub band
}

TEST_CASE("mode partition of a block-diagonal matrix") {
  const int N = 10;
  const BandedBlockBanded A = random_block_diagonal(N, 2, 2);
  const CoefficientVector rhs = random_vector(N);
  const FourierBlockSystem sys = partition_by_mode(A, rhs);
  CHECK(sys.blocks.size() == size_t(N + 1));
  CHECK(sys.blocks[0].rows() == N + 1);
  for (int k = 1; k <= N; ++k) {
    CHECK(sys.blocks[k].rows() == 2 * (N - k + 1));
    CHECK(sys.blocks[k].lower() == 2);
    CHECK(sys.blocks[k].upper() == 2);
  }

  // zero matrix partitions into zero blocks
  std::vector<int> sizes(N + 1);
  for (int k = 0; k <= N; ++k) sizes[k] = layout::fourier_block_size(N, k);
  const BandedBlockBanded Z(sizes, sizes, 0, 0, 1, 1, Ordering::FourierMajor);
  const FourierBlockSystem zsys = partition_by_mode(Z, rhs);
  for (const auto& b : zsys.blocks) CHECK(b.max_abs() == 0.0);

  const BandedBlockBanded C = random_block_tridiagonal(N, 1, 1);
  CHECK_THROWS_AS(partition_by_mode(C, rhs), NotDecoupledError);
}

TEST_CASE("solve: identity, dense oracle, decoupled vs coupled") {
  const int N = 8;
  const CoefficientVector rhs = random_vector(N);

  std::vector<int> sizes(N + 1);
  for (int k = 0; k <= N; ++k) sizes[k] = layout::fourier_block_size(N, k);
  BandedBlockBanded I(sizes, sizes, 0, 0, 0, 0, Ordering::FourierMajor);
  for (int k = 0; k <= N; ++k)
    for (int j = 0; j < sizes[k]; ++j) I.block(k, k).at(j, j) = 1.0;
  const SolveResult rid = solve(I, rhs);
  CHECK((rid.solution.values - rhs.values).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(rid.decoupled);

  const BandedBlockBanded A = random_block_tridiagonal(N, 2, 1);
  const SolveResult r = solve(A, rhs);
  const Eigen::VectorXd xd = A.dense().partialPivLu().solve(rhs.values);
  CHECK(!r.decoupled);
  CHECK((r.solution.values - xd).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK(r.residual < 1e-11);

  // decoupled and coupled paths agree on a block-diagonal matrix
  const BandedBlockBanded D = random_block_diagonal(N, 2, 2);
  const SolveResult rdec = solve(D, rhs);
  CHECK(rdec.decoupled);
  const BandedLU lu(D.flatten());
  const Eigen::VectorXd xcoupled = lu.solve(rhs.values);
  CHECK((rdec.solution.values - xcoupled).lpNorm<Eigen::Infinity>() <
        1e-12 * std::max(1.0, xcoupled.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("flatten reproduces the dense matrix") {
  const BandedBlockBanded A = random_block_tridiagonal(6, 2, 3);
  CHECK((A.flatten().dense() - A.dense()).norm() == 0.0);
}

TEST_CASE("serialization round-trips bit-exactly") {
  const BandedBlockBanded A = random_block_tridiagonal(7, 2, 2);
  const std::string path = "bbb_roundtrip_test.json";
  save_bbb(A, path);
  const BandedBlockBanded B = load_bbb(path);
  std::remove(path.c_str());
  REQUIRE(B.rows() == A.rows());
  CHECK(B.block_lower() == A.block_lower());
  CHECK(B.sub_upper() == A.sub_upper());
  CHECK(B.ordering() == A.ordering());
  for (int bi = 0; bi < A.num_row_blocks(); ++bi)
    for (int bj = std::max(0, bi - 1); bj <= std::min(7, bi + 1); ++bj)
      CHECK((B.block(bi, bj).band() - A.block(bi, bj).band()).norm() == 0.0);

  // a second save of the reloaded matrix is byte-identical
  CHECK(to_json(A).dump() == to_json(B).dump());
}
