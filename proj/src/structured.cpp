#include "sphcap/structured.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <mutex>
#include <thread>

namespace sphcap {

// ---------------------------------------------------------------------------
// BandedMatrix

BandedMatrix::BandedMatrix(int rows, int cols, int lower, int upper)
    : rows_(rows), cols_(cols), lower_(lower), upper_(upper) {
  if (rows < 0 || cols < 0 || lower < 0 || upper < 0)
    throw ParameterError("banded matrix dimensions/bandwidths must be >= 0");
  band_.setZero(lower_ + upper_ + 1, std::max(cols_, 1));
}

double& BandedMatrix::at(int i, int j) {
  if (!in_band(i, j))
    throw ParameterError("write outside the band mask rejected");
  return band_(upper_ + i - j, j);
}

Eigen::VectorXd BandedMatrix::multiply(const Eigen::VectorXd& v) const {
  if (v.size() != cols_)
    throw ParameterError("banded matvec size mismatch");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rows_);
  for (int j = 0; j < cols_; ++j) {
    const int ilo = std::max(0, j - upper_);
    const int ihi = std::min(rows_ - 1, j + lower_);
    const double vj = v[j];
    for (int i = ilo; i <= ihi; ++i) y[i] += band_(upper_ + i - j, j) * vj;
  }
  return y;
}

BandedMatrix BandedMatrix::multiply(const BandedMatrix& other) const {
  if (cols_ != other.rows_)
    throw ParameterError("banded product size mismatch");
  BandedMatrix out(rows_, other.cols_, lower_ + other.lower_,
                   upper_ + other.upper_);
  for (int j = 0; j < other.cols_; ++j) {
    const int llo = std::max(0, j - other.upper_);
    const int lhi = std::min(cols_ - 1, j + other.lower_);
    for (int l = llo; l <= lhi; ++l) {
      const double blj = other(l, j);
      if (blj == 0.0) continue;
      const int ilo = std::max(0, l - upper_);
      const int ihi = std::min(rows_ - 1, l + lower_);
      for (int i = ilo; i <= ihi; ++i)
        out.band_(out.upper_ + i - j, j) += band_(upper_ + i - l, l) * blj;
    }
  }
  return out;
}

BandedMatrix BandedMatrix::plus(const BandedMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw ParameterError("banded sum size mismatch");
  // copy the wider operand's storage, add the other band column-wise
  if (lower_ >= other.lower_ && upper_ >= other.upper_) {
    BandedMatrix out = *this;
    for (int j = 0; j < cols_; ++j) {
      const int ilo = std::max(0, j - other.upper_);
      const int ihi = std::min(rows_ - 1, j + other.lower_);
      if (ilo > ihi) continue;
      out.band_.col(j).segment(upper_ + ilo - j, ihi - ilo + 1) +=
          other.band_.col(j).segment(other.upper_ + ilo - j, ihi - ilo + 1);
    }
    return out;
  }
  if (other.lower_ >= lower_ && other.upper_ >= upper_)
    return other.plus(*this);
  BandedMatrix out(rows_, cols_, std::max(lower_, other.lower_),
                   std::max(upper_, other.upper_));
  for (int j = 0; j < cols_; ++j) {
    const int ilo = std::max(0, j - out.upper_);
    const int ihi = std::min(rows_ - 1, j + out.lower_);
    for (int i = ilo; i <= ihi; ++i)
      out.band_(out.upper_ + i - j, j) = (*this)(i, j) + other(i, j);
  }
  return out;
}

BandedMatrix BandedMatrix::transpose() const {
  BandedMatrix out(cols_, rows_, upper_, lower_);
  for (int j = 0; j < cols_; ++j) {
    const int ilo = std::max(0, j - upper_);
    const int ihi = std::min(rows_ - 1, j + lower_);
    for (int i = ilo; i <= ihi; ++i)
      out.band_(out.upper_ + j - i, i) = band_(upper_ + i - j, j);
  }
  return out;
}

BandedMatrix BandedMatrix::truncated(int rows, int cols) const {
  if (rows > rows_ || cols > cols_)
    throw ParameterError("truncation cannot grow a banded matrix");
  BandedMatrix out(rows, cols, lower_, upper_);
  out.band_ = band_.leftCols(std::max(cols, 1));
  // clear band slots that referred to rows at or beyond the new edge
  for (int j = std::max(0, rows - lower_); j < cols; ++j) {
    const int ilo = std::max(rows, j - upper_);
    const int ihi = std::min(rows_ - 1, j + lower_);
    if (ilo <= ihi)
      out.band_.col(j).segment(upper_ + ilo - j, ihi - ilo + 1).setZero();
  }
  return out;
}

Eigen::MatrixXd BandedMatrix::dense() const {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int j = 0; j < cols_; ++j) {
    const int ilo = std::max(0, j - upper_);
    const int ihi = std::min(rows_ - 1, j + lower_);
    for (int i = ilo; i <= ihi; ++i) D(i, j) = band_(upper_ + i - j, j);
  }
  return D;
}

double BandedMatrix::max_abs() const {
  double m = 0.0;
  for (int j = 0; j < cols_; ++j) {
    const int ilo = std::max(0, j - upper_);
    const int ihi = std::min(rows_ - 1, j + lower_);
    for (int i = ilo; i <= ihi; ++i)
      m = std::max(m, std::abs(band_(upper_ + i - j, j)));
  }
  return m;
}

// ---------------------------------------------------------------------------
// BandedLU

BandedLU::BandedLU(const BandedMatrix& A, int mode) {
  if (A.rows() != A.cols())
    throw ParameterError("banded LU requires a square matrix");
  n_ = A.rows();
  kl_ = A.lower();
  ku_ = A.upper();
  // Row kl_+ku_+i-j holds entry (i, j); rows 0..kl_-1 receive pivot fill-in.
  ab_.setZero(2 * kl_ + ku_ + 1, std::max(n_, 1));
  for (int j = 0; j < n_; ++j) {
    const int ilo = std::max(0, j - ku_);
    const int ihi = std::min(n_ - 1, j + kl_);
    for (int i = ilo; i <= ihi; ++i) ab_(kl_ + ku_ + i - j, j) = A(i, j);
  }
  ipiv_.resize(n_);

  const double scale = std::max(A.max_abs(), 1.0);
  const double tiny = 1e-14 * scale;
  const int kv = kl_ + ku_;  // fill-in widened upper bandwidth

  for (int j = 0; j < n_; ++j) {
    // partial pivot among rows j..j+kl_
    const int pmax = std::min(n_ - 1, j + kl_);
    int piv = j;
    double best = std::abs(ab_(kv, j));
    for (int i = j + 1; i <= pmax; ++i) {
      const double v = std::abs(ab_(kv + i - j, j));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    ipiv_[j] = piv;
    if (!(best > tiny))
      throw SingularSystemError(
          "singular diagonal encountered in banded LU at row " +
              std::to_string(j),
          mode);
    if (piv != j) {
      const int jhi = std::min(n_ - 1, j + kv);
      for (int c = j; c <= jhi; ++c)
        std::swap(ab_(kv + j - c, c), ab_(kv + piv - c, c));
    }
    const double djj = ab_(kv, j);
    for (int i = j + 1; i <= pmax; ++i) {
      const double l = ab_(kv + i - j, j) / djj;
      ab_(kv + i - j, j) = l;
      const int jhi = std::min(n_ - 1, j + kv);
      for (int c = j + 1; c <= jhi; ++c)
        ab_(kv + i - c, c) -= l * ab_(kv + j - c, c);
    }
  }
}

Eigen::VectorXd BandedLU::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != n_) throw ParameterError("banded solve size mismatch");
  Eigen::VectorXd x = rhs;
  const int kv = kl_ + ku_;
  for (int j = 0; j < n_; ++j) {
    if (ipiv_[j] != j) std::swap(x[j], x[ipiv_[j]]);
    const int ihi = std::min(n_ - 1, j + kl_);
    for (int i = j + 1; i <= ihi; ++i) x[i] -= ab_(kv + i - j, j) * x[j];
  }
  for (int i = n_ - 1; i >= 0; --i) {
    const int jhi = std::min(n_ - 1, i + kv);
    double s = x[i];
    for (int j = i + 1; j <= jhi; ++j) s -= ab_(kv + i - j, j) * x[j];
    x[i] = s / ab_(kv, i);
  }
  return x;
}

// ---------------------------------------------------------------------------
// BandedBlockBanded

namespace {
std::vector<int> offsets_of(const std::vector<int>& sizes) {
  std::vector<int> off(sizes.size() + 1, 0);
  for (size_t i = 0; i < sizes.size(); ++i) off[i + 1] = off[i] + sizes[i];
  return off;
}

int locate(const std::vector<int>& offsets, int idx) {
  // offsets has one trailing entry equal to the total size
  int lo = 0, hi = static_cast<int>(offsets.size()) - 2;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (offsets[mid] <= idx)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}
}  // namespace

BandedBlockBanded::BandedBlockBanded(std::vector<int> row_sizes,
                                     std::vector<int> col_sizes,
                                     int block_lower, int block_upper,
                                     int sub_lower, int sub_upper,
                                     Ordering ordering)
    : row_sizes_(std::move(row_sizes)),
      col_sizes_(std::move(col_sizes)),
      block_lower_(block_lower),
      block_upper_(block_upper),
      sub_lower_(sub_lower),
      sub_upper_(sub_upper),
      ordering_(ordering) {
  if (row_sizes_.empty() || col_sizes_.empty())
    throw ParameterError("block matrix needs at least one block");
  row_offsets_ = offsets_of(row_sizes_);
  col_offsets_ = offsets_of(col_sizes_);
  blocks_.reserve(row_sizes_.size() * (block_lower_ + block_upper_ + 1));
  for (int bi = 0; bi < num_row_blocks(); ++bi)
    for (int bj = std::max(0, bi - block_lower_);
         bj <= std::min(num_col_blocks() - 1, bi + block_upper_); ++bj)
      blocks_.emplace_back(row_sizes_[bi], col_sizes_[bj], sub_lower_,
                           sub_upper_);
}

int BandedBlockBanded::block_index(int bi, int bj) const {
  int idx = 0;
  for (int r = 0; r < bi; ++r)
    idx += std::min(num_col_blocks() - 1, r + block_upper_) -
           std::max(0, r - block_lower_) + 1;
  return idx + (bj - std::max(0, bi - block_lower_));
}

const BandedMatrix& BandedBlockBanded::block(int bi, int bj) const {
  if (!block_in_band(bi, bj))
    throw ParameterError("block outside the block band");
  return blocks_[block_index(bi, bj)];
}

BandedMatrix& BandedBlockBanded::block(int bi, int bj) {
  if (!block_in_band(bi, bj))
    throw ParameterError("block outside the block band");
  return blocks_[block_index(bi, bj)];
}

double BandedBlockBanded::coeff(int I, int J) const {
  const int bi = locate(row_offsets_, I);
  const int bj = locate(col_offsets_, J);
  if (!block_in_band(bi, bj)) return 0.0;
  return block(bi, bj)(I - row_offsets_[bi], J - col_offsets_[bj]);
}

void BandedBlockBanded::set(int I, int J, double v) {
  const int bi = locate(row_offsets_, I);
  const int bj = locate(col_offsets_, J);
  if (!block_in_band(bi, bj))
    throw ParameterError("write outside the block band mask rejected");
  block(bi, bj).at(I - row_offsets_[bi], J - col_offsets_[bj]) = v;
}

Eigen::VectorXd BandedBlockBanded::multiply(const Eigen::VectorXd& v) const {
  if (v.size() != cols()) throw ParameterError("matvec size mismatch");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rows());
  for (int bi = 0; bi < num_row_blocks(); ++bi) {
    for (int bj = std::max(0, bi - block_lower_);
         bj <= std::min(num_col_blocks() - 1, bi + block_upper_); ++bj) {
      y.segment(row_offsets_[bi], row_sizes_[bi]) +=
          block(bi, bj).multiply(v.segment(col_offsets_[bj], col_sizes_[bj]));
    }
  }
  return y;
}

BandedBlockBanded BandedBlockBanded::multiply(
    const BandedBlockBanded& other) const {
  if (col_sizes_ != other.row_sizes_)
    throw ParameterError("block product structure mismatch");
  BandedBlockBanded out(row_sizes_, other.col_sizes_,
                        block_lower_ + other.block_lower_,
                        block_upper_ + other.block_upper_,
                        sub_lower_ + other.sub_lower_,
                        sub_upper_ + other.sub_upper_, ordering_);
  for (int bi = 0; bi < out.num_row_blocks(); ++bi) {
    for (int bj = std::max(0, bi - out.block_lower_);
         bj <= std::min(out.num_col_blocks() - 1, bi + out.block_upper_);
         ++bj) {
      const int llo =
          std::max({0, bi - block_lower_, bj - other.block_upper_});
      const int lhi = std::min({num_col_blocks() - 1, bi + block_upper_,
                                bj + other.block_lower_});
      if (llo == lhi) {
        // single term: the product already carries the summed bandwidths
        out.block(bi, bj) =
            block(bi, llo).multiply(other.block(llo, bj));
        continue;
      }
      BandedMatrix acc(row_sizes_[bi], other.col_sizes_[bj], out.sub_lower_,
                       out.sub_upper_);
      for (int bl = llo; bl <= lhi; ++bl) {
        const BandedMatrix prod = block(bi, bl).multiply(other.block(bl, bj));
        for (int j = 0; j < prod.cols(); ++j) {
          const int ilo = std::max(0, j - prod.upper());
          const int ihi = std::min(prod.rows() - 1, j + prod.lower());
          for (int i = ilo; i <= ihi; ++i) {
            const double v = prod(i, j);
            if (v != 0.0) acc.at(i, j) += v;
          }
        }
      }
      out.block(bi, bj) = acc;
    }
  }
  return out;
}

BandedBlockBanded BandedBlockBanded::plus(const BandedBlockBanded& other) const {
  if (row_sizes_ != other.row_sizes_ || col_sizes_ != other.col_sizes_)
    throw ParameterError("block sum structure mismatch");
  if (ordering_ != other.ordering_)
    throw OrderingError("block sum ordering mismatch");
  BandedBlockBanded out(row_sizes_, col_sizes_,
                        std::max(block_lower_, other.block_lower_),
                        std::max(block_upper_, other.block_upper_),
                        std::max(sub_lower_, other.sub_lower_),
                        std::max(sub_upper_, other.sub_upper_), ordering_);
  for (int bi = 0; bi < out.num_row_blocks(); ++bi) {
    for (int bj = std::max(0, bi - out.block_lower_);
         bj <= std::min(out.num_col_blocks() - 1, bi + out.block_upper_);
         ++bj) {
      const bool ina = block_in_band(bi, bj);
      const bool inb = other.block_in_band(bi, bj);
      if (ina && inb)
        out.block(bi, bj) = block(bi, bj).plus(other.block(bi, bj));
      else if (ina)
        out.block(bi, bj) = block(bi, bj);
      else if (inb)
        out.block(bi, bj) = other.block(bi, bj);
    }
  }
  return out;
}

BandedBlockBanded BandedBlockBanded::transpose() const {
  BandedBlockBanded out(col_sizes_, row_sizes_, block_upper_, block_lower_,
                        sub_upper_, sub_lower_, ordering_);
  for (int bi = 0; bi < num_row_blocks(); ++bi)
    for (int bj = std::max(0, bi - block_lower_);
         bj <= std::min(num_col_blocks() - 1, bi + block_upper_); ++bj)
      out.block(bj, bi) = block(bi, bj).transpose();
  return out;
}

void BandedBlockBanded::scale(double s) {
  for (auto& b : blocks_) b.scale(s);
}

Eigen::MatrixXd BandedBlockBanded::dense() const {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(rows(), cols());
  for (int bi = 0; bi < num_row_blocks(); ++bi)
    for (int bj = std::max(0, bi - block_lower_);
         bj <= std::min(num_col_blocks() - 1, bi + block_upper_); ++bj)
      D.block(row_offsets_[bi], col_offsets_[bj], row_sizes_[bi],
              col_sizes_[bj]) = block(bi, bj).dense();
  return D;
}

double BandedBlockBanded::max_offdiagonal_block_abs() const {
  double m = 0.0;
  for (int bi = 0; bi < num_row_blocks(); ++bi)
    for (int bj = std::max(0, bi - block_lower_);
         bj <= std::min(num_col_blocks() - 1, bi + block_upper_); ++bj)
      if (bj != bi) m = std::max(m, block(bi, bj).max_abs());
  return m;
}

std::pair<int, int> BandedBlockBanded::scalar_bandwidths() const {
  int lower = 0, upper = 0;
  for (int bi = 0; bi < num_row_blocks(); ++bi) {
    for (int bj = std::max(0, bi - block_lower_);
         bj <= std::min(num_col_blocks() - 1, bi + block_upper_); ++bj) {
      const int r = row_sizes_[bi], c = col_sizes_[bj];
      if (r == 0 || c == 0) continue;
      const int shift = row_offsets_[bi] - col_offsets_[bj];
      lower = std::max(lower, shift + std::min(sub_lower_, r - 1));
      upper = std::max(upper, -shift + std::min(sub_upper_, c - 1));
    }
  }
  return {std::max(lower, 0), std::max(upper, 0)};
}

BandedMatrix BandedBlockBanded::flatten() const {
  const auto [lower, upper] = scalar_bandwidths();
  BandedMatrix out(rows(), cols(), lower, upper);
  for (int bi = 0; bi < num_row_blocks(); ++bi) {
    for (int bj = std::max(0, bi - block_lower_);
         bj <= std::min(num_col_blocks() - 1, bi + block_upper_); ++bj) {
      const BandedMatrix& b = block(bi, bj);
      for (int j = 0; j < b.cols(); ++j) {
        const int ilo = std::max(0, j - b.upper());
        const int ihi = std::min(b.rows() - 1, j + b.lower());
        for (int i = ilo; i <= ihi; ++i) {
          const double v = b(i, j);
          if (v != 0.0)
            out.at(row_offsets_[bi] + i, col_offsets_[bj] + j) = v;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mode partition and solve

CoefficientVector bbb_matvec(const BandedBlockBanded& A,
                             const CoefficientVector& v) {
  v.validate();
  if (A.ordering() != v.ordering)
    throw OrderingError("matrix/vector ordering mismatch");
  if (A.cols() != v.values.size())
    throw ParameterError("matvec dimension mismatch");
  CoefficientVector out = v;
  out.values = A.multiply(v.values);
  return out;
}

FourierBlockSystem partition_by_mode(const BandedBlockBanded& A,
                                     const CoefficientVector& rhs) {
  if (A.ordering() != Ordering::FourierMajor)
    throw OrderingError("mode partition requires FourierMajor ordering");
  if (A.num_row_blocks() != A.num_col_blocks() ||
      A.row_sizes() != A.col_sizes())
    throw ParameterError("mode partition requires a square block structure");
  const double cross = A.max_offdiagonal_block_abs();
  if (cross > 1e-13)
    throw NotDecoupledError(
        "cross-mode coupling of magnitude " + std::to_string(cross) +
        " exceeds the decoupling threshold");
  FourierBlockSystem sys;
  sys.blocks.reserve(A.num_row_blocks());
  sys.rhs.reserve(A.num_row_blocks());
  for (int k = 0; k < A.num_row_blocks(); ++k) {
    sys.blocks.push_back(A.block(k, k));
    sys.rhs.push_back(
        rhs.values.segment(A.row_offset(k), A.row_sizes()[k]));
  }
  return sys;
}

SolveResult solve(const BandedBlockBanded& A, const CoefficientVector& rhs) {
  rhs.validate();
  if (A.ordering() != rhs.ordering)
    throw OrderingError("matrix/vector ordering mismatch");
  if (A.rows() != A.cols() || A.cols() != rhs.values.size())
    throw ParameterError("solve requires a square system matching the rhs");

  SolveResult result;
  result.solution = rhs;
  Eigen::VectorXd x(rhs.values.size());

  bool decoupled = false;
  if (A.ordering() == Ordering::FourierMajor &&
      A.max_offdiagonal_block_abs() <= 1e-13) {
    decoupled = true;
    FourierBlockSystem sys = partition_by_mode(A, rhs);
    std::vector<int> offsets(sys.blocks.size() + 1, 0);
    for (size_t k = 0; k < sys.blocks.size(); ++k)
      offsets[k + 1] = offsets[k] + static_cast<int>(sys.rhs[k].size());

    int threads = 1;
    if (const char* env = std::getenv("SPHCAP_THREADS"))
      threads = std::max(1, std::atoi(env));
    threads = std::min<int>(threads, static_cast<int>(sys.blocks.size()));

    auto solve_mode = [&](size_t k) {
      BandedLU lu(sys.blocks[k], static_cast<int>(k));
      x.segment(offsets[k], sys.rhs[k].size()) = lu.solve(sys.rhs[k]);
    };
    if (threads <= 1) {
      for (size_t k = 0; k < sys.blocks.size(); ++k) solve_mode(k);
    } else {
      // modes write disjoint segments, so the result is deterministic
      std::exception_ptr error;
      std::mutex error_mutex;
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
          try {
            for (size_t k = t; k < sys.blocks.size(); k += threads)
              solve_mode(k);
          } catch (...) {
            std::lock_guard<std::mutex> guard(error_mutex);
            if (!error) error = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      if (error) std::rethrow_exception(error);
    }
  } else {
    BandedLU lu(A.flatten(), -1);
    x = lu.solve(rhs.values);
  }

  result.solution.values = x;
  result.residual =
      (A.multiply(x) - rhs.values).lpNorm<Eigen::Infinity>();
  result.decoupled = decoupled;
  return result;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const BandedBlockBanded& A) {
  nlohmann::json j;
  j["format"] = "sphcap-bbb";
  j["version"] = 1;
  j["ordering"] =
      A.ordering() == Ordering::FourierMajor ? "fourier" : "degree";
  j["row_sizes"] = A.row_sizes();
  j["col_sizes"] = A.col_sizes();
  j["block_bandwidths"] = {A.block_lower(), A.block_upper()};
  j["sub_block_bandwidths"] = {A.sub_lower(), A.sub_upper()};
  nlohmann::json blocks = nlohmann::json::array();
  for (int bi = 0; bi < A.num_row_blocks(); ++bi) {
    for (int bj = std::max(0, bi - A.block_lower());
         bj <= std::min(A.num_col_blocks() - 1, bi + A.block_upper()); ++bj) {
      const BandedMatrix& b = A.block(bi, bj);
      nlohmann::json jb;
      jb["i"] = bi;
      jb["j"] = bj;
      std::vector<double> data(b.band().data(),
                               b.band().data() + b.band().size());
      jb["band"] = data;
      blocks.push_back(std::move(jb));
    }
  }
  j["blocks"] = std::move(blocks);
  return j;
}

BandedBlockBanded bbb_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "sphcap-bbb" || j.value("version", 0) != 1)
    throw InputError("unrecognized matrix file format/version");
  const auto row_sizes = j.at("row_sizes").get<std::vector<int>>();
  const auto col_sizes = j.at("col_sizes").get<std::vector<int>>();
  const auto bb = j.at("block_bandwidths").get<std::vector<int>>();
  const auto sb = j.at("sub_block_bandwidths").get<std::vector<int>>();
  const Ordering ord = j.at("ordering").get<std::string>() == "fourier"
                           ? Ordering::FourierMajor
                           : Ordering::DegreeMajor;
  BandedBlockBanded A(row_sizes, col_sizes, bb.at(0), bb.at(1), sb.at(0),
                      sb.at(1), ord);
  for (const auto& jb : j.at("blocks")) {
    const int bi = jb.at("i").get<int>();
    const int bj = jb.at("j").get<int>();
    const auto data = jb.at("band").get<std::vector<double>>();
    BandedMatrix& b = A.block(bi, bj);
    if (static_cast<int>(data.size()) != b.band().size())
      throw InputError("block band payload size mismatch");
    std::copy(data.begin(), data.end(), b.band().data());
  }
  return A;
}

void save_bbb(const BandedBlockBanded& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out << to_json(A).dump(2) << "\n";
}

BandedBlockBanded load_bbb(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return bbb_from_json(j);
}

}  // namespace sphcap
