#include "sphcap/operators.hpp"

#include <Eigen/Sparse>
#include <cmath>

#include "sphcap/transforms.hpp"

namespace sphcap {

int OperatorSpec::a_out() const {
  switch (kind) {
    case OperatorKind::Dtheta: return a_in;
    case OperatorKind::Dphi: return a_in + 1;
    case OperatorKind::Wphi: return a_in - 1;
    case OperatorKind::Laplacian: return a_in + a_tilde;
    case OperatorKind::WeightedLaplacian: return a_in - a_tilde;
    case OperatorKind::WeightedLaplacianA1: return 1;
    case OperatorKind::ConvertUp: return a_in + a_tilde;
    case OperatorKind::ConvertDown: return a_in - a_tilde;
  }
  return a_in;
}

bool OperatorSpec::weighted_in() const {
  switch (kind) {
    case OperatorKind::Wphi:
    case OperatorKind::WeightedLaplacian:
    case OperatorKind::WeightedLaplacianA1:
    case OperatorKind::ConvertDown:
      return true;
    default:
      return false;
  }
}

bool OperatorSpec::weighted_out() const {
  switch (kind) {
    case OperatorKind::Wphi:
    case OperatorKind::WeightedLaplacian:
    case OperatorKind::ConvertDown:
      return true;
    default:
      return false;
  }
}

std::pair<int, int> OperatorSpec::sub_bandwidths() const {
  switch (kind) {
    case OperatorKind::Dtheta: return {1, 1};
    case OperatorKind::Dphi: return {2, 4};
    case OperatorKind::Wphi: return {4, 2};
    case OperatorKind::Laplacian: return {0, 2 * a_tilde};
    case OperatorKind::WeightedLaplacian: return {2 * a_tilde, 0};
    case OperatorKind::WeightedLaplacianA1: return {2, 2};
    case OperatorKind::ConvertUp: return {0, 2 * a_tilde};
    case OperatorKind::ConvertDown: return {2 * a_tilde, 0};
  }
  return {0, 0};
}

void OperatorSpec::validate() const {
  if (!(alpha > -1.0 && alpha < 1.0))
    throw ParameterError("operator alpha must lie in (-1, 1)");
  if (N < 0) throw ParameterError("operator degree must be >= 0");
  if (a_in < 0) throw ParameterError("operator parameter a must be >= 0");
  switch (kind) {
    case OperatorKind::Dtheta:
    case OperatorKind::Dphi:
      break;
    case OperatorKind::Wphi:
      if (a_in < 1)
        throw ParameterError("weighted phi derivative requires a >= 1");
      break;
    case OperatorKind::Laplacian:
      if (a_tilde < 2)
        throw ParameterError("Laplacian conversion step must be >= 2");
      break;
    case OperatorKind::WeightedLaplacian:
      if (a_in < 2)
        throw ParameterError("weighted Laplacian is defined for a >= 2 only");
      if (a_tilde < 2 || a_in - a_tilde < 0)
        throw ParameterError("weighted Laplacian step must satisfy 2 <= atilde <= a");
      break;
    case OperatorKind::WeightedLaplacianA1:
      if (a_in != 1)
        throw ParameterError("the weighted cap Laplacian fixes a = 1");
      break;
    case OperatorKind::ConvertUp:
      if (a_tilde < 1) throw ParameterError("conversion step must be >= 1");
      break;
    case OperatorKind::ConvertDown:
      if (a_tilde < 1 || a_in - a_tilde < 0)
        throw ParameterError("weighted conversion step must satisfy 1 <= atilde <= a");
      break;
  }
}

namespace {

struct DegreeBand {
  int mlo, mhi;  // rows m in [n + mlo, n + mhi]
};

DegreeBand degree_band(const OperatorSpec& op) {
  switch (op.kind) {
    case OperatorKind::Dphi: return {-2, 1};
    case OperatorKind::Wphi: return {-1, 2};
    case OperatorKind::Laplacian: return {-op.a_tilde, 0};
    case OperatorKind::WeightedLaplacian: return {0, op.a_tilde};
    case OperatorKind::WeightedLaplacianA1: return {-1, 1};
    case OperatorKind::ConvertUp: return {-op.a_tilde, 0};
    case OperatorKind::ConvertDown: return {0, op.a_tilde};
    default: return {0, 0};
  }
}

}  // namespace

BandedBlockBanded assemble(const OperatorSpec& op,
                           std::shared_ptr<CapContext> ctx, int band_padding) {
  op.validate();
  if (!ctx) ctx = std::make_shared<CapContext>(op.alpha);
  const int N = op.N;
  const double aa = op.a_in;
  const int at = op.a_tilde;

  std::vector<int> sizes(N + 1);
  for (int k = 0; k <= N; ++k) sizes[k] = layout::fourier_block_size(N, k);
  const auto [sl, su] = op.sub_bandwidths();
  BandedBlockBanded M(sizes, sizes, 0, 0, sl + 2 * band_padding,
                      su + 2 * band_padding, Ordering::FourierMajor);

  if (op.kind == OperatorKind::Dtheta) {
    for (int k = 1; k <= N; ++k)
      for (int n = k; n <= N; ++n) {
        M.block(k, k).at(layout::fourier_local(N, n, k, 1),
                         layout::fourier_local(N, n, k, 0)) = -double(k);
        M.block(k, k).at(layout::fourier_local(N, n, k, 0),
                         layout::fourier_local(N, n, k, 1)) = double(k);
      }
    return M;
  }

  const DegreeBand band = degree_band(op);
  const double cut = band_padding == 0 ? 1e-14 : 0.0;

  // Quadrature grids are shared across batches of modes: the batch base
  // carries the weight (z-alpha)^cw rho^{2k0} and the remaining rho^{2(k-k0)}
  // of each mode's integrand is absorbed into the running weights.  Exact
  // for every entry integrand: degrees stay <= 2(N - k0) + 5 < 2m - 1.
  double cw = 0.0;
  switch (op.kind) {
    case OperatorKind::Dphi: cw = aa + 1; break;
    case OperatorKind::Wphi: cw = aa; break;
    case OperatorKind::Laplacian: cw = aa + at - 1; break;
    case OperatorKind::WeightedLaplacian: cw = aa - 2; break;
    case OperatorKind::WeightedLaplacianA1: cw = 1; break;
    case OperatorKind::ConvertUp: cw = aa + at; break;
    case OperatorKind::ConvertDown: cw = aa; break;
    default: break;
  }
  constexpr int kBatch = 64;
  std::shared_ptr<const GaussRule1D> rule;
  Eigen::ArrayXd t, rho2, ta, wk;

  for (int k = 0; k <= N; ++k) {
    if (k % kBatch == 0) {
      rule = ctx->rule(cw, 2 * k, N - k + 10);
      t = rule->nodes.array();
      rho2 = 1.0 - t.square();
      ta = t - op.alpha;
      wk = rule->weights.array();
    }
    const int nk = N - k;
    std::shared_ptr<const Family1D> src, dst;
    switch (op.kind) {
      case OperatorKind::Dphi:
        src = ctx->family(aa, 2 * k, nk);
        dst = ctx->family(aa + 1, 2 * k, nk);
        break;
      case OperatorKind::Wphi:
        src = ctx->family(aa, 2 * k, nk);
        dst = ctx->family(aa - 1, 2 * k, nk);
        break;
      case OperatorKind::Laplacian:
        src = ctx->family(aa, 2 * k, nk);
        dst = ctx->family(aa + at, 2 * k, nk);
        break;
      case OperatorKind::WeightedLaplacian:
        src = ctx->family(aa, 2 * k, nk);
        dst = ctx->family(aa - at, 2 * k, nk);
        break;
      case OperatorKind::WeightedLaplacianA1:
        src = ctx->family(1, 2 * k, nk);
        dst = src;
        break;
      case OperatorKind::ConvertUp:
        src = ctx->family(aa, 2 * k, nk);
        dst = ctx->family(aa + at, 2 * k, nk);
        break;
      case OperatorKind::ConvertDown:
        src = ctx->family(aa, 2 * k, nk);
        dst = ctx->family(aa - at, 2 * k, nk);
        break;
      default:
        break;
    }

    const Eigen::ArrayXd& w = wk;
    const double inv = 1.0 / dst->omega();

    Eigen::MatrixXd S, dS, d2S, D, dD;
    switch (op.kind) {
      case OperatorKind::Dphi:
        src->eval_tables(nk, rule->nodes, &S, &dS);
        dst->eval_tables(nk, rule->nodes, &D);
        break;
      case OperatorKind::Wphi:
        src->eval_tables(nk, rule->nodes, &S);
        dst->eval_tables(nk, rule->nodes, &D, &dD);
        break;
      case OperatorKind::Laplacian:
        src->eval_tables(nk, rule->nodes, &S, &dS);
        dst->eval_tables(nk, rule->nodes, &D, &dD);
        break;
      case OperatorKind::WeightedLaplacian:
        src->eval_tables(nk, rule->nodes, &S, &dS, &d2S);
        dst->eval_tables(nk, rule->nodes, &D);
        break;
      case OperatorKind::WeightedLaplacianA1:
        src->eval_tables(nk, rule->nodes, &S, &dS);
        break;
      case OperatorKind::ConvertUp:
      case OperatorKind::ConvertDown:
        src->eval_tables(nk, rule->nodes, &S);
        dst->eval_tables(nk, rule->nodes, &D);
        break;
      default:
        break;
    }

    auto store = [&](int m, int n, double v) {
      if (std::abs(v) <= cut) return;
      for (int i = 0; i <= (k == 0 ? 0 : 1); ++i)
        M.block(k, k).at(layout::fourier_local(N, m, k, i),
                         layout::fourier_local(N, n, k, i)) = v;
    };

    const double kk1 = double(k) * (k + 1);
    // mode-static integrand prefactors
    Eigen::ArrayXd g1, g2, g3;
    switch (op.kind) {
      case OperatorKind::Dphi:
        g1 = w * double(k) * t;
        g2 = -w * rho2;
        break;
      case OperatorKind::Laplacian:
        g1 = -kk1 * w * ta;
        g2 = -(aa + at) * w * rho2;
        g3 = -w * ta * rho2;
        break;
      case OperatorKind::WeightedLaplacian:
        g1 = w * (aa * (aa - 1.0) * rho2 - 2.0 * aa * (k + 1) * t * ta -
                  kk1 * ta.square());
        g2 = w * (2.0 * aa * rho2 * ta - 2.0 * (k + 1) * t * ta.square());
        g3 = w * rho2 * ta.square();
        break;
      case OperatorKind::WeightedLaplacianA1:
        g1 = w * (kk1 * ta + 2.0 * (k + 1) * t);
        g2 = w * ta * rho2;
        break;
      default:
        break;
    }

    // the weighted a=1 Laplacian is symmetric per mode: fill m >= n, mirror
    const bool symmetric = op.kind == OperatorKind::WeightedLaplacianA1;

    // hoisted row combination for the weighted phi derivative
    Eigen::MatrixXd H;
    if (op.kind == OperatorKind::Wphi)
      H = (dD.array().colwise() * rho2 -
           (k + 2.0) * (D.array().colwise() * t))
              .matrix();

    Eigen::ArrayXd u1, u2;
    for (int n = k; n <= N; ++n) {
      const int mlo = std::max(k, n + band.mlo - band_padding);
      const int mhi = std::min(N, n + band.mhi + band_padding);
      switch (op.kind) {
        case OperatorKind::Dphi:
          u1 = g1 * S.col(n - k).array() + g2 * dS.col(n - k).array();
          break;
        case OperatorKind::Wphi:
          u1 = w * S.col(n - k).array();
          break;
        case OperatorKind::Laplacian:
          u1 = g1 * S.col(n - k).array() + g2 * dS.col(n - k).array();
          u2 = g3 * dS.col(n - k).array();
          break;
        case OperatorKind::WeightedLaplacian:
          u1 = g1 * S.col(n - k).array() + g2 * dS.col(n - k).array() +
               g3 * d2S.col(n - k).array();
          break;
        case OperatorKind::WeightedLaplacianA1:
          u1 = g1 * S.col(n - k).array();
          u2 = g2 * dS.col(n - k).array();
          break;
        case OperatorKind::ConvertUp:
        case OperatorKind::ConvertDown:
          u1 = w * S.col(n - k).array();
          break;
        default:
          break;
      }
      for (int m = mlo; m <= mhi; ++m) {
        if (symmetric && m < n) continue;  // filled by the mirror write
        double v = 0.0;
        switch (op.kind) {
          case OperatorKind::Dphi:
          case OperatorKind::WeightedLaplacian:
          case OperatorKind::ConvertUp:
          case OperatorKind::ConvertDown:
            v = inv * (D.col(m - k).array() * u1).sum();
            break;
          case OperatorKind::Wphi:
            v = inv * (u1 * H.col(m - k).array()).sum();
            break;
          case OperatorKind::Laplacian:
            v = inv * ((D.col(m - k).array() * u1).sum() +
                       (dD.col(m - k).array() * u2).sum());
            break;
          case OperatorKind::WeightedLaplacianA1:
            v = -inv * ((S.col(m - k).array() * u1).sum() +
                        (dS.col(m - k).array() * u2).sum());
            break;
          default:
            break;
        }
        store(m, n, v);
        if (symmetric && m != n) store(n, m, v);
      }
    }
    wk *= rho2;
  }
  return M;
}

std::pair<BandedBlockBanded, BandedBlockBanded> conversion_pair(
    double alpha, int a, int N, std::shared_ptr<CapContext> ctx) {
  if (!ctx) ctx = std::make_shared<CapContext>(alpha);
  std::vector<int> sizes(N + 1);
  for (int k = 0; k <= N; ++k) sizes[k] = layout::fourier_block_size(N, k);
  BandedBlockBanded T(sizes, sizes, 0, 0, 0, 2, Ordering::FourierMajor);
  BandedBlockBanded Tw(sizes, sizes, 0, 0, 2, 0, Ordering::FourierMajor);

  constexpr int kBatch = 64;
  std::shared_ptr<const GaussRule1D> rule;
  Eigen::ArrayXd rho2, wk;
  Eigen::MatrixXd P, Q;
  for (int k = 0; k <= N; ++k) {
    if (k % kBatch == 0) {
      rule = ctx->rule(a + 1, 2 * k, N - k + 10);
      rho2 = 1.0 - rule->nodes.array().square();
      wk = rule->weights.array();
    }
    const int nk = N - k;
    const auto lo = ctx->family(a, 2 * k, nk);
    const auto hi = ctx->family(a + 1, 2 * k, nk);
    lo->eval_tables(nk, rule->nodes, &P);
    hi->eval_tables(nk, rule->nodes, &Q);
    const double inv_hi = 1.0 / hi->omega();
    const double inv_lo = 1.0 / lo->omega();

    auto set_both = [&](BandedBlockBanded& M, int m, int n, double v) {
      if (std::abs(v) <= 1e-14) return;
      for (int i = 0; i <= (k == 0 ? 0 : 1); ++i)
        M.block(k, k).at(layout::fourier_local(N, m, k, i),
                         layout::fourier_local(N, n, k, i)) = v;
    };
    for (int p = 0; p <= nk; ++p) {
      // I(p, q) = int R^(a)_p R^(a+1)_q w^(a+1,2k)
      const Eigen::ArrayXd wp = wk * P.col(p).array();
      const double diag = (wp * Q.col(p).array()).sum();
      set_both(T, k + p, k + p, inv_hi * diag);
      set_both(Tw, k + p, k + p, inv_lo * diag);
      if (p >= 1) {
        const double low = (wp * Q.col(p - 1).array()).sum();
        // T couples column n = k+p to row m = n-1; Tw row m = n+1 to column n
        set_both(T, k + p - 1, k + p, inv_hi * low);
        set_both(Tw, k + p, k + p - 1, inv_lo * low);
      }
    }
    wk *= rho2;
  }
  return {std::move(T), std::move(Tw)};
}

BandedBlockBanded truncate_fourier(const BandedBlockBanded& A, int N_old,
                                   int N_new) {
  if (N_new > N_old)
    throw ParameterError("truncation cannot grow an operator");
  if (N_new == N_old) return A;
  std::vector<int> sizes(N_new + 1);
  for (int k = 0; k <= N_new; ++k)
    sizes[k] = layout::fourier_block_size(N_new, k);
  BandedBlockBanded out(sizes, sizes,
                        std::min(A.block_lower(), N_new),
                        std::min(A.block_upper(), N_new), A.sub_lower(),
                        A.sub_upper(), A.ordering());
  for (int bi = 0; bi <= N_new; ++bi)
    for (int bj = std::max(0, bi - out.block_lower());
         bj <= std::min(N_new, bi + out.block_upper()); ++bj)
      out.block(bi, bj) =
          A.block(bi, bj).truncated(sizes[bi], sizes[bj]);
  return out;
}

// Factors of composed operators are assembled beyond the truncation so that
// every retained entry of the product equals the untruncated composition;
// composing square-truncated factors corrupts the trailing columns and can
// make the product numerically singular.
BandedBlockBanded rho2_laplacian(double alpha, int N,
                                 std::shared_ptr<CapContext> ctx) {
  if (!ctx) ctx = std::make_shared<CapContext>(alpha);
  const int Ne = N + 2;
  const auto dphi0 = assemble({OperatorKind::Dphi, alpha, 0, 2, Ne}, ctx);
  const auto wphi1 = assemble({OperatorKind::Wphi, alpha, 1, 2, Ne}, ctx);
  const auto [t01, tw10] = conversion_pair(alpha, 0, Ne, ctx);
  const auto dth = assemble({OperatorKind::Dtheta, alpha, 1, 2, Ne}, ctx);
  const auto composed = dphi0.multiply(wphi1).plus(
      t01.multiply(tw10).multiply(dth.multiply(dth)));
  return truncate_fourier(composed, Ne, N);
}

BandedBlockBanded biharmonic(double alpha, int N,
                             std::shared_ptr<CapContext> ctx) {
  if (!ctx) ctx = std::make_shared<CapContext>(alpha);
  const int Ne = N + 2;
  const auto up = assemble({OperatorKind::Laplacian, alpha, 0, 2, Ne}, ctx);
  const auto down =
      assemble({OperatorKind::WeightedLaplacian, alpha, 2, 2, Ne}, ctx);
  return truncate_fourier(up.multiply(down), Ne, N);
}

// ---------------------------------------------------------------------------
// Variable-coefficient operators

int coefficient_degree(const CoefficientVector& v) {
  const Eigen::VectorXd norms = block_norms(v);
  const double mx = norms.maxCoeff();
  int d = 0;
  for (int n = 0; n < norms.size(); ++n)
    if (norms[n] > 1e-13 * mx) d = n;
  return d;
}

bool rotationally_invariant(const CoefficientVector& v) {
  const int N = v.spec.N;
  const CoefficientVector f = reorder(v, Ordering::FourierMajor);
  const double mx = std::max(f.values.cwiseAbs().maxCoeff(), 1e-300);
  const int zonal = layout::fourier_block_size(N, 0);
  if (f.values.size() == zonal) return true;
  return f.values.tail(f.values.size() - zonal).cwiseAbs().maxCoeff() <
         1e-13 * mx;
}

BandedMatrix mode_z_block(const CapContext& ctx, int a, int k, int N) {
  const int s = layout::fourier_block_size(N, k);
  const int step = k == 0 ? 1 : 2;
  BandedMatrix Z(s, s, step, step);
  const auto fam = ctx.family(a, 2 * k, std::max(N - k, 0));
  const auto& t = fam->table();
  for (int n = k; n <= N; ++n) {
    for (int i = 0; i <= (k == 0 ? 0 : 1); ++i) {
      const int r = layout::fourier_local(N, n, k, i);
      Z.at(r, r) = t.alphas[n - k];
      if (n + 1 <= N) {
        const int r1 = layout::fourier_local(N, n + 1, k, i);
        Z.at(r, r1) = t.betas[n - k];
        Z.at(r1, r) = t.betas[n - k];
      }
    }
  }
  return Z;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

SpMat bbb_to_sparse(const BandedBlockBanded& A) {
  std::vector<Eigen::Triplet<double>> trips;
  for (int bi = 0; bi < A.num_row_blocks(); ++bi) {
    for (int bj = std::max(0, bi - A.block_lower());
         bj <= std::min(A.num_col_blocks() - 1, bi + A.block_upper()); ++bj) {
      const BandedMatrix& b = A.block(bi, bj);
      for (int j = 0; j < b.cols(); ++j) {
        const int ilo = std::max(0, j - b.upper());
        const int ihi = std::min(b.rows() - 1, j + b.lower());
        for (int i = ilo; i <= ihi; ++i) {
          const double v = b(i, j);
          if (v != 0.0)
            trips.emplace_back(A.row_offset(bi) + i, A.col_offset(bj) + j, v);
        }
      }
    }
  }
  SpMat out(A.rows(), A.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

/// Truncate a DegreeMajor sparse operator to (N+1)^2, permute to
/// FourierMajor and pack with exact scanned bandwidths.
BandedBlockBanded pack_fourier(const SpMat& V, int N, int block_band) {
  const int dim = (N + 1) * (N + 1);
  double mx = 0.0;
  for (int c = 0; c < std::min<int>(V.cols(), dim); ++c)
    for (SpMat::InnerIterator it(V, c); it; ++it)
      if (it.row() < dim) mx = std::max(mx, std::abs(it.value()));
  const double cut = 1e-14 * std::max(mx, 1.0);

  int sub_lo = 0, sub_up = 0, blk_lo = 0, blk_up = 0;
  std::vector<Eigen::Triplet<double>> kept;
  for (int c = 0; c < std::min<int>(V.cols(), dim); ++c) {
    const BasisIndex bc = layout::from_degree_major(N, c);
    const int fc = layout::fourier_local(N, bc.n, bc.k, bc.i);
    for (SpMat::InnerIterator it(V, c); it; ++it) {
      if (it.row() >= dim || std::abs(it.value()) <= cut) continue;
      const BasisIndex br = layout::from_degree_major(N, int(it.row()));
      const int fr = layout::fourier_local(N, br.n, br.k, br.i);
      blk_lo = std::max(blk_lo, br.k - bc.k);
      blk_up = std::max(blk_up, bc.k - br.k);
      sub_lo = std::max(sub_lo, fr - fc);
      sub_up = std::max(sub_up, fc - fr);
      kept.emplace_back(layout::fourier_major_index(N, br.n, br.k, br.i),
                        layout::fourier_major_index(N, bc.n, bc.k, bc.i),
                        it.value());
    }
  }
  if (blk_lo > block_band || blk_up > block_band)
    throw DegreeError("variable coefficient couples more modes than its degree");

  std::vector<int> sizes(N + 1);
  for (int k = 0; k <= N; ++k) sizes[k] = layout::fourier_block_size(N, k);
  BandedBlockBanded out(sizes, sizes, block_band, block_band, sub_lo, sub_up,
                        Ordering::FourierMajor);
  for (const auto& tr : kept) {
    const int bi = layout::from_fourier_major(N, tr.row()).k;
    const int bj = layout::from_fourier_major(N, tr.col()).k;
    out.block(bi, bj).at(tr.row() - layout::fourier_block_offset(N, bi),
                         tr.col() - layout::fourier_block_offset(N, bj)) =
        tr.value();
  }
  return out;
}

/// General operator Clenshaw: xi_n are vectors of sparse matrices, the
/// transposed Jacobi matrices stand in for the evaluation point.
BandedBlockBanded vc_clenshaw(const CoefficientVector& vcoeffs,
                              const BasisSpec& spec,
                              std::shared_ptr<CapContext> ctx, int Nv) {
  const int Next = spec.N + Nv;
  CapBasis basis({spec.alpha, spec.a, Next}, ctx);
  const ClenshawMatrices& cm = basis.clenshaw();
  const SpMat X = SpMat(bbb_to_sparse(basis.jacobi(Axis::X)).transpose());
  const SpMat Y = SpMat(bbb_to_sparse(basis.jacobi(Axis::Y)).transpose());
  const SpMat Z = SpMat(bbb_to_sparse(basis.jacobi(Axis::Z)).transpose());
  const int dim = (Next + 1) * (Next + 1);

  SpMat ident(dim, dim);
  ident.setIdentity();

  const CoefficientVector vd = reorder(vcoeffs, Ordering::DegreeMajor);
  auto vcoef = [&](int n, int j) {
    return vd.values[layout::degree_block_offset(n) + j];
  };

  std::vector<SpMat> xi1, xi2;  // xi_{n+1}, xi_{n+2}
  for (int n = Nv; n >= 0; --n) {
    std::vector<SpMat> xi(2 * n + 1);
    for (int j = 0; j <= 2 * n; ++j) xi[j] = vcoef(n, j) * ident;
    if (!xi1.empty()) {
      const ClenshawDegree& d = cm.degrees[n];
      std::vector<SpMat> xiX(xi1.size()), xiY(xi1.size()), xiZ(xi1.size());
      for (size_t r = 0; r < xi1.size(); ++r) {
        xiX[r] = xi1[r] * X;
        xiY[r] = xi1[r] * Y;
        xiZ[r] = xi1[r] * Z;
      }
      auto accumulate = [&](const SpMat& coeffs, const std::vector<SpMat>& src,
                            double sign) {
        for (int r = 0; r < coeffs.outerSize(); ++r)
          for (SpMat::InnerIterator it(coeffs, r); it; ++it)
            xi[it.row()] += sign * it.value() * src[r];
      };
      accumulate(d.DBt, xi1, -1.0);
      accumulate(d.Dxt, xiX, +1.0);
      accumulate(d.Dyt, xiY, +1.0);
      accumulate(d.Dzt, xiZ, +1.0);
    }
    if (!xi2.empty()) {
      const ClenshawDegree& d1 = cm.degrees[n + 1];
      for (int r = 0; r < d1.DCt.outerSize(); ++r)
        for (SpMat::InnerIterator it(d1.DCt, r); it; ++it)
          xi[it.row()] -= it.value() * xi2[r];
    }
    xi2 = std::move(xi1);
    xi1 = std::move(xi);
  }
  SpMat V = harmonic_constant() * xi1[0];
  return pack_fourier(V, spec.N, Nv);
}

/// Rotationally invariant fast path: v depends on z only, so the operator is
/// block-diagonal per mode and is the 1D polynomial v applied to the mode's
/// z Jacobi block, built at degree N + Nv and truncated.
BandedBlockBanded vc_zonly(const CoefficientVector& vcoeffs,
                           const BasisSpec& spec,
                           std::shared_ptr<CapContext> ctx, int Nv) {
  const int N = spec.N;
  const int Next = N + Nv;
  const CoefficientVector vf = reorder(vcoeffs, Ordering::FourierMajor);
  const auto fam = ctx->family(spec.a, 0, std::max(Nv, 1));
  const auto& tab = fam->table();

  std::vector<int> sizes(N + 1);
  for (int k = 0; k <= N; ++k) sizes[k] = layout::fourier_block_size(N, k);
  BandedBlockBanded V(sizes, sizes, 0, 0, 2 * Nv, 2 * Nv,
                      Ordering::FourierMajor);

  auto vcoef = [&](int n) {
    return vf.values[layout::fourier_major_index(vf.spec.N, n, 0, 0)];
  };

  for (int k = 0; k <= N; ++k) {
    const int step = k == 0 ? 1 : 2;
    const int sdim = layout::fourier_block_size(Next, k);
    const int U = step * std::max(Nv, 1) + step;  // recurrence never exceeds this
    const auto famk = ctx->family(spec.a, 2 * k, std::max(Next - k, 0));
    const auto& tk = famk->table();

    // position-indexed recurrence coefficients of the mode's z Jacobi block
    Eigen::ArrayXd dpos(sdim), opos = Eigen::ArrayXd::Zero(sdim);
    for (int r = 0; r < sdim; ++r) {
      dpos[r] = tk.alphas[r / step];
      if (r + step < sdim) opos[r] = tk.betas[r / step];
    }

    BandedMatrix P(sdim, sdim, U, U), Pm1(sdim, sdim, U, U),
        tmp(sdim, sdim, U, U), acc(sdim, sdim, U, U);
    for (int r = 0; r < sdim; ++r) P.at(r, r) = 1.0;
    acc.band() = (vcoef(0) * harmonic_constant()) * P.band();

    for (int j = 0; j < Nv; ++j) {
      // tmp = (Z P - alpha_j P - beta_{j-1} Pm1) / beta_j, all in band form;
      // the recurrence only populates band step*(j+1), so restrict the work
      // to the active rows
      const int Ua = std::min(U, step * (j + 1));
      Eigen::MatrixXd& Tb = tmp.band();
      const Eigen::MatrixXd& Pb = P.band();
      Tb.middleRows(U - Ua, 2 * Ua + 1).setZero();
      for (int c = 0; c < sdim; ++c) {
        const int ilo = std::max(0, c - Ua);
        const int ihi = std::min(sdim - 1, c + Ua);
        const int len = ihi - ilo + 1;
        const int rb0 = U + ilo - c;
        Tb.col(c).segment(rb0, len).array() =
            dpos.segment(ilo, len) * Pb.col(c).segment(rb0, len).array();
        const int lo2 = std::max({ilo, step, c - U + step});
        if (lo2 <= ihi) {
          const int len2 = ihi - lo2 + 1;
          Tb.col(c).segment(U + lo2 - c, len2).array() +=
              opos.segment(lo2 - step, len2) *
              Pb.col(c).segment(U + lo2 - step - c, len2).array();
        }
        const int hi3 = std::min({ihi, sdim - 1 - step, c + U - step});
        if (ilo <= hi3) {
          const int len3 = hi3 - ilo + 1;
          Tb.col(c).segment(rb0, len3).array() +=
              opos.segment(ilo, len3) *
              Pb.col(c).segment(rb0 + step, len3).array();
        }
      }
      auto active = [&](Eigen::MatrixXd& m) {
        return m.middleRows(U - Ua, 2 * Ua + 1);
      };
      auto active_c = [&](const Eigen::MatrixXd& m) {
        return m.middleRows(U - Ua, 2 * Ua + 1);
      };
      active(Tb) -= tab.alphas[j] * active_c(Pb);
      if (j > 0) active(Tb) -= tab.betas[j - 1] * active_c(Pm1.band());
      active(Tb) *= 1.0 / tab.betas[j];
      std::swap(Pm1, P);
      std::swap(P, tmp);
      acc.band().middleRows(U - Ua, 2 * Ua + 1) +=
          (vcoef(j + 1) * harmonic_constant()) *
          P.band().middleRows(U - Ua, 2 * Ua + 1);
    }

    const int sk = layout::fourier_block_size(N, k);
    BandedMatrix& blk = V.block(k, k);
    for (int j = 0; j < sk; ++j) {
      const int ilo = std::max(0, j - std::min(U, 2 * Nv));
      const int ihi = std::min(sk - 1, j + std::min(U, 2 * Nv));
      for (int i = ilo; i <= ihi; ++i) {
        const double v = acc(i, j);
        if (v != 0.0 && blk.in_band(i, j)) blk.at(i, j) = v;
      }
    }
  }
  return V;
}

}  // namespace

BandedBlockBanded variable_coefficient(const CoefficientVector& v,
                                       const BasisSpec& spec,
                                       std::shared_ptr<CapContext> ctx) {
  v.validate();
  spec.validate();
  if (v.weighted)
    throw ParameterError("variable coefficients expand in the plain basis");
  if (v.spec.a != spec.a || v.spec.alpha != spec.alpha)
    throw ParameterError("variable coefficient expanded in a different basis");
  if (!ctx) ctx = std::make_shared<CapContext>(spec.alpha);
  const int Nv = coefficient_degree(v);
  if (Nv > spec.N)
    throw DegreeError("variable coefficient degree exceeds the truncation");
  if (rotationally_invariant(v)) return vc_zonly(v, spec, ctx, Nv);
  return vc_clenshaw(v, spec, ctx, Nv);
}

BandedBlockBanded variable_coefficient(
    const std::function<double(const CapPoint&)>& v, const BasisSpec& spec,
    std::shared_ptr<CapContext> ctx) {
  spec.validate();
  if (!ctx) ctx = std::make_shared<CapContext>(spec.alpha);
  int d = std::min(spec.N, 32);
  for (;;) {
    BasisSpec vspec{spec.alpha, spec.a, d};
    CoefficientVector vc = expand(v, vspec, ctx);
    const Eigen::VectorXd norms = block_norms(vc);
    const double mx = std::max(norms.maxCoeff(), 1e-300);
    const bool resolved =
        d >= 2 && norms.tail(std::min(4, d)).maxCoeff() < 1e-12 * mx;
    if (resolved || d >= spec.N) {
      if (!resolved && d >= spec.N && norms[d] > 1e-10 * mx)
        throw DegreeError(
            "variable coefficient not resolved within the truncation degree");
      return variable_coefficient(vc, spec, ctx);
    }
    d = std::min(spec.N, 2 * d + 4);
  }
}

}  // namespace sphcap
