#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <utility>
#include <vector>

#include "sphcap/cap_layout.hpp"
#include "sphcap/errors.hpp"

namespace sphcap {

/// Dense-banded matrix in LAPACK-style packed storage:
/// entry (i, j) lives at band(upper + i - j, j) for -upper <= i-j <= lower.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(int rows, int cols, int lower, int upper);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int lower() const { return lower_; }
  int upper() const { return upper_; }

  bool in_band(int i, int j) const {
    return i >= 0 && i < rows_ && j >= 0 && j < cols_ && i - j <= lower_ &&
           j - i <= upper_;
  }

  double operator()(int i, int j) const {
    return in_band(i, j) ? band_(upper_ + i - j, j) : 0.0;
  }

  /// Mutable access; throws outside the band mask.
  double& at(int i, int j);

  const Eigen::MatrixXd& band() const { return band_; }
  Eigen::MatrixXd& band() { return band_; }

  Eigen::VectorXd multiply(const Eigen::VectorXd& v) const;
  BandedMatrix multiply(const BandedMatrix& other) const;
  BandedMatrix plus(const BandedMatrix& other) const;
  BandedMatrix transpose() const;
  void scale(double s) { band_ *= s; }
  BandedMatrix scaled(double s) const {
    BandedMatrix out = *this;
    out.scale(s);
    return out;
  }
  /// Leading principal part, same band mask.
  BandedMatrix truncated(int rows, int cols) const;

  Eigen::MatrixXd dense() const;
  double max_abs() const;

 private:
  int rows_ = 0, cols_ = 0, lower_ = 0, upper_ = 0;
  Eigen::MatrixXd band_;  // (lower+upper+1) x cols
};

/// LU factorization of a square BandedMatrix with partial pivoting
/// restricted to the band (fill-in adds `lower` superdiagonals).
class BandedLU {
 public:
  /// `mode` is only used to label a SingularSystemError.
  explicit BandedLU(const BandedMatrix& A, int mode = -1);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  int n_ = 0, kl_ = 0, ku_ = 0;
  Eigen::MatrixXd ab_;  // (2*kl + ku + 1) x n
  std::vector<int> ipiv_;
};

/// Block matrix banded at the block level (block-bandwidths L, U) whose
/// blocks are themselves banded (sub-block-bandwidths lambda, mu).  Reads
/// outside the band mask return exactly zero; writes outside it throw.
class BandedBlockBanded {
 public:
  BandedBlockBanded() = default;
  BandedBlockBanded(std::vector<int> row_sizes, std::vector<int> col_sizes,
                    int block_lower, int block_upper, int sub_lower,
                    int sub_upper, Ordering ordering);

  int rows() const { return row_offsets_.back(); }
  int cols() const { return col_offsets_.back(); }
  int num_row_blocks() const { return static_cast<int>(row_sizes_.size()); }
  int num_col_blocks() const { return static_cast<int>(col_sizes_.size()); }
  int block_lower() const { return block_lower_; }
  int block_upper() const { return block_upper_; }
  int sub_lower() const { return sub_lower_; }
  int sub_upper() const { return sub_upper_; }
  Ordering ordering() const { return ordering_; }
  const std::vector<int>& row_sizes() const { return row_sizes_; }
  const std::vector<int>& col_sizes() const { return col_sizes_; }
  int row_offset(int bi) const { return row_offsets_[bi]; }
  int col_offset(int bj) const { return col_offsets_[bj]; }

  bool block_in_band(int bi, int bj) const {
    return bi >= 0 && bi < num_row_blocks() && bj >= 0 &&
           bj < num_col_blocks() && bj - bi <= block_upper_ &&
           bi - bj <= block_lower_;
  }

  const BandedMatrix& block(int bi, int bj) const;
  BandedMatrix& block(int bi, int bj);

  /// Scalar accessors on global indices.
  double coeff(int I, int J) const;
  void set(int I, int J, double v);

  Eigen::VectorXd multiply(const Eigen::VectorXd& v) const;
  BandedBlockBanded multiply(const BandedBlockBanded& other) const;
  BandedBlockBanded plus(const BandedBlockBanded& other) const;
  BandedBlockBanded transpose() const;
  void scale(double s);

  Eigen::MatrixXd dense() const;

  /// Largest |entry| outside the diagonal blocks.
  double max_offdiagonal_block_abs() const;
  /// Exact scalar bandwidths of the flattened matrix mask.
  std::pair<int, int> scalar_bandwidths() const;
  BandedMatrix flatten() const;

 private:
  int block_index(int bi, int bj) const;

  std::vector<int> row_sizes_, col_sizes_;
  std::vector<int> row_offsets_, col_offsets_;
  int block_lower_ = 0, block_upper_ = 0;
  int sub_lower_ = 0, sub_upper_ = 0;
  Ordering ordering_ = Ordering::FourierMajor;
  std::vector<BandedMatrix> blocks_;  // in-band blocks, row-major over (bi, bj)
};

/// Independent banded systems, one per Fourier mode, with their right-hand
/// segments.  Solutions concatenate back to the FourierMajor global vector.
struct FourierBlockSystem {
  std::vector<BandedMatrix> blocks;
  std::vector<Eigen::VectorXd> rhs;
};

/// y = A v, touching only in-band entries; ordering tags must match.
CoefficientVector bbb_matvec(const BandedBlockBanded& A,
                             const CoefficientVector& v);

/// Split a FourierMajor block-diagonal matrix into independent per-mode
/// systems; throws NotDecoupledError if any cross-mode entry exceeds 1e-13.
FourierBlockSystem partition_by_mode(const BandedBlockBanded& A,
                                     const CoefficientVector& rhs);

struct SolveResult {
  CoefficientVector solution;
  double residual = 0.0;
  bool decoupled = false;
};

/// Solve A x = rhs: per-mode banded LU when the matrix decouples across
/// Fourier modes, banded LU on the flattened global band otherwise.
SolveResult solve(const BandedBlockBanded& A, const CoefficientVector& rhs);

/// Versioned JSON serialization; reload reproduces entries bit-exactly.
nlohmann::json to_json(const BandedBlockBanded& A);
BandedBlockBanded bbb_from_json(const nlohmann::json& j);
void save_bbb(const BandedBlockBanded& A, const std::string& path);
BandedBlockBanded load_bbb(const std::string& path);

}  // namespace sphcap
