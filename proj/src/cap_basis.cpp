#include "sphcap/cap_basis.hpp"

#include <cmath>

namespace sphcap {

// ---------------------------------------------------------------------------
// CapContext

std::shared_ptr<const GaussRule1D> CapContext::base_rule(double a,
                                                         int min_size) const {
  auto it = bases_.find(a);
  if (it != bases_.end() && it->second->nodes.size() >= min_size)
    return it->second;
  const int grown =
      it == bases_.end()
          ? min_size
          : std::max<int>(min_size, int(it->second->nodes.size() * 3 / 2));
  auto base = std::make_shared<const GaussRule1D>(
      detail::radial_base_rule(alpha_, a, grown));
  bases_[a] = base;
  return base;
}

std::shared_ptr<const Family1D> CapContext::family(double a, int b,
                                                   int n_needed) const {
  const auto key = std::make_pair(a, b);
  auto it = families_.find(key);
  if (it != families_.end() && it->second->n_max() >= n_needed)
    return it->second;
  const int n_max = n_needed + 8;

  // Families of one exponent a share base rules in batches of modes: the
  // batch base carries (z-alpha)^a rho^{b0} and the Stieltjes run absorbs
  // the remaining rho^(b-b0), keeping the grids short at high modes.
  constexpr int kBatchPairs = 32;
  const int b0 = ((b / 2) / kBatchPairs) * kBatchPairs * 2;
  std::shared_ptr<const Family1D> fam;
  if (b0 == 0 || b0 == b) {
    // batch heads come straight off the shared (z-alpha)^a base
    const auto base = base_rule(a, n_max + b / 2 + 2);
    fam = std::make_shared<const Family1D>(WeightParams{alpha_, a, b}, n_max,
                                           *base);
  } else {
    const int m = n_max + (b - b0) / 2 + 2;
    const auto key0 = std::make_tuple(a, b0, -1);
    auto bit = rules_.find(key0);
    if (bit == rules_.end() || bit->second->nodes.size() < m) {
      const auto batch_fam = family(a, b0, m + m / 4);
      rules_[key0] = std::make_shared<const GaussRule1D>(
          batch_fam->gauss(m + m / 4));
      bit = rules_.find(key0);
    }
    fam = std::make_shared<const Family1D>(
        Family1D(recurrence_table(WeightParams{alpha_, a, b}, n_max,
                                  *bit->second, b0)));
  }
  families_[key] = fam;
  return fam;
}

std::shared_ptr<const GaussRule1D> CapContext::rule(double a, int b,
                                                    int m) const {
  const auto key = std::make_tuple(a, b, m);
  auto it = rules_.find(key);
  if (it != rules_.end()) return it->second;
  auto fam = family(a, b, m - 1);
  auto r = std::make_shared<const GaussRule1D>(fam->gauss(m));
  rules_[key] = r;
  return r;
}

// ---------------------------------------------------------------------------
// Pole-safe circular part

void rho_harmonics(double x, double y, int k_max, Eigen::VectorXd& c,
                   Eigen::VectorXd& s) {
  c.resize(k_max + 1);
  s.resize(k_max + 1);
  c[0] = 1.0;
  s[0] = 0.0;
  for (int k = 0; k < k_max; ++k) {
    c[k + 1] = x * c[k] - y * s[k];
    s[k + 1] = x * s[k] + y * c[k];
  }
}

// ---------------------------------------------------------------------------
// RecurrenceCoeffs

RecurrenceCoeffs::RecurrenceCoeffs(const BasisSpec& spec,
                                   const CapContext& ctx) {
  spec.validate();
  N_ = spec.N;
  const int N = N_;
  const double a = spec.a;
  alpha_.assign((N + 1) * (N + 2) / 2, {0, 0, 0, 0, 0, 0});
  gamma_.assign((N + 1) * (N + 2) / 2, {0, 0, 0});

  for (int kap = 0; kap <= N; ++kap) {
    const int m = N + 2 * (kap + 1) + 8;
    const auto rule = ctx.rule(a, 2 * (kap + 1), m);
    const auto lo = ctx.family(a, 2 * kap, N - kap + 1);
    const auto hi = ctx.family(a, 2 * (kap + 1), std::max(N - kap - 1, 0));
    const Eigen::MatrixXd P = lo->eval_table(N - kap + 1, rule->nodes);
    const Eigen::MatrixXd Q =
        hi->eval_table(std::max(N - kap - 1, 0), rule->nodes);
    const Eigen::ArrayXd w = rule->weights.array();
    const double eta = harmonic_eta(kap);
    const double inv_whi = 1.0 / hi->omega();
    const double inv_wlo = 1.0 / lo->omega();

    auto pair_integral = [&](int p, int q) {
      return (P.row(p).transpose().array() * Q.row(q).transpose().array() * w)
          .sum();
    };

    // slots 2, 4, 6: x Q_{n,kap,.} onto modes kap+1
    for (int n = kap; n <= N; ++n) {
      auto& slots = alpha_[pair_index(n, kap)];
      if (n >= kap + 2) slots[1] = eta * inv_whi * pair_integral(n - kap, n - kap - 2);
      if (n >= kap + 1) slots[3] = eta * inv_whi * pair_integral(n - kap, n - kap - 1);
      slots[5] = eta * inv_whi * pair_integral(n - kap, n - kap);
    }
    // slots 1, 3, 5: x Q_{n,kap+1,.} onto mode kap
    for (int n = kap + 1; n <= N; ++n) {
      auto& slots = alpha_[pair_index(n, kap + 1)];
      slots[0] = eta * inv_wlo * pair_integral(n - kap - 1, n - kap - 1);
      slots[2] = eta * inv_wlo * pair_integral(n - kap, n - kap - 1);
      slots[4] = eta * inv_wlo * pair_integral(n - kap + 1, n - kap - 1);
    }
  }

  for (int k = 0; k <= N; ++k) {
    const auto fam = ctx.family(a, 2 * k, std::max(N - k, 0));
    const auto& t = fam->table();
    for (int n = k; n <= N; ++n) {
      auto& g = gamma_[pair_index(n, k)];
      g[0] = n - k >= 1 ? t.betas[n - k - 1] : 0.0;
      g[1] = t.alphas[n - k];
      g[2] = t.betas[n - k];
    }
  }
}

// ---------------------------------------------------------------------------
// CapBasis

CapBasis::CapBasis(const BasisSpec& spec, std::shared_ptr<CapContext> ctx)
    : spec_(spec), ctx_(std::move(ctx)) {
  spec_.validate();
  if (!ctx_ || ctx_->alpha() != spec_.alpha)
    throw ParameterError("basis/context alpha mismatch");
}

CapBasis::CapBasis(const BasisSpec& spec)
    : CapBasis(spec, std::make_shared<CapContext>(spec.alpha)) {}

double CapBasis::eval(int n, int k, int i, const CapPoint& p) const {
  if (!(0 <= k && k <= n && n <= spec_.N) || i < 0 || i > 1 ||
      (k == 0 && i == 1))
    throw ParameterError("basis index out of range");
  const auto fam = ctx_->family(spec_.a, 2 * k, n - k);
  const double radial = fam->eval(n - k, p.z);
  if (k == 0) return radial * harmonic_constant();
  Eigen::VectorXd c, s;
  rho_harmonics(p.x, p.y, k, c, s);
  return radial * (i == 0 ? c[k] : s[k]);
}

Eigen::VectorXd CapBasis::eval_all(const CapPoint& p) const {
  const int N = spec_.N;
  Eigen::VectorXd out(spec_.dimension());
  Eigen::VectorXd c, s;
  rho_harmonics(p.x, p.y, N, c, s);
  Eigen::VectorXd z1(1);
  z1[0] = p.z;
  for (int k = 0; k <= N; ++k) {
    const auto fam = ctx_->family(spec_.a, 2 * k, std::max(N - k, 0));
    const Eigen::MatrixXd R = fam->eval_table(N - k, z1);
    for (int n = k; n <= N; ++n) {
      const double radial = R(n - k, 0);
      if (k == 0) {
        out[layout::degree_major_index(N, n, 0, 0)] =
            radial * harmonic_constant();
      } else {
        out[layout::degree_major_index(N, n, k, 0)] = radial * c[k];
        out[layout::degree_major_index(N, n, k, 1)] = radial * s[k];
      }
    }
  }
  return out;
}

const RecurrenceCoeffs& CapBasis::recurrence_coeffs() const {
  if (!coeffs_) coeffs_ = std::make_unique<RecurrenceCoeffs>(spec_, *ctx_);
  return *coeffs_;
}

namespace {

struct SlotTarget {
  int dm, dj;
};
constexpr SlotTarget kSlotTargets[6] = {{-1, -1}, {-1, +1}, {0, -1},
                                        {0, +1},  {+1, -1}, {+1, +1}};

bool valid_index(int N, int m, int j, int h) {
  return 0 <= j && j <= m && m <= N && h >= 0 && h <= 1 &&
         !(j == 0 && h == 1);
}

}  // namespace

BandedBlockBanded CapBasis::jacobi(Axis axis) const {
  const int N = spec_.N;
  const RecurrenceCoeffs& rc = recurrence_coeffs();

  std::vector<int> sizes(N + 1);
  for (int n = 0; n <= N; ++n) sizes[n] = layout::degree_block_size(n);
  const int sub = axis == Axis::X ? 2 : (axis == Axis::Y ? 3 : 0);
  BandedBlockBanded J(sizes, sizes, 1, 1, sub, sub, Ordering::DegreeMajor);

  for (int n = 0; n <= N; ++n) {
    for (int k = 0; k <= n; ++k) {
      for (int i = 0; i <= (k == 0 ? 0 : 1); ++i) {
        const int row = layout::degree_local(k, i);
        if (axis == Axis::Z) {
          for (int slot = 1; slot <= 3; ++slot) {
            const int m = n + slot - 2;
            if (!valid_index(N, m, k, i)) continue;
            const double v = rc.gamma(n, k, slot);
            if (v != 0.0)
              J.block(n, m).at(row, layout::degree_local(k, i)) = v;
          }
          continue;
        }
        for (int slot = 1; slot <= 6; ++slot) {
          const int m = n + kSlotTargets[slot - 1].dm;
          const int j = k + kSlotTargets[slot - 1].dj;
          const int h = axis == Axis::X ? i : 1 - i;
          if (!valid_index(N, m, j, h)) continue;
          const double v = axis == Axis::X ? rc.alpha(n, k, slot)
                                           : rc.beta(n, k, i, slot);
          if (v != 0.0) J.block(n, m).at(row, layout::degree_local(j, h)) = v;
        }
      }
    }
  }
  return J;
}

// ---------------------------------------------------------------------------
// Clenshaw matrices

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void check_nonzero(double v, const char* what) {
  if (!(std::abs(v) > 1e-300))
    throw DegenerateRecurrenceError(std::string("zero pivot forming ") + what);
}

}  // namespace

const ClenshawMatrices& CapBasis::clenshaw() const {
  if (clenshaw_) return *clenshaw_;
  const int N = spec_.N;
  const RecurrenceCoeffs& rc = recurrence_coeffs();

  auto cm = std::make_unique<ClenshawMatrices>();
  cm->spec = spec_;
  cm->degrees.resize(N + 1);

  for (int n = 0; n <= N; ++n) {
    const int rows = layout::degree_block_size(n);  // 2n+1
    Triplets ta, tb, tc, td;

    for (int k = 0; k <= n; ++k) {
      for (int i = 0; i <= (k == 0 ? 0 : 1); ++i) {
        const int r = layout::degree_local(k, i);
        auto add = [&](Triplets& t, int section, int m, int j, int h,
                       double v) {
          // column index inside the target degree block; the target block
          // m = n+1 legitimately exceeds the truncation for A_n
          if (m < 0 || j < 0 || j > m || h < 0 || h > 1 || (j == 0 && h == 1))
            return;
          if (v == 0.0) return;
          t.emplace_back(section * rows + r, layout::degree_local(j, h), v);
        };
        // x section
        for (int slot : {5, 6})
          add(ta, 0, n + 1, k + kSlotTargets[slot - 1].dj, i,
              rc.alpha(n, k, slot));
        for (int slot : {3, 4})
          add(tb, 0, n, k + kSlotTargets[slot - 1].dj, i,
              rc.alpha(n, k, slot));
        for (int slot : {1, 2})
          add(tc, 0, n - 1, k + kSlotTargets[slot - 1].dj, i,
              rc.alpha(n, k, slot));
        // y section
        for (int slot : {5, 6})
          add(ta, 1, n + 1, k + kSlotTargets[slot - 1].dj, 1 - i,
              rc.beta(n, k, i, slot));
        for (int slot : {3, 4})
          add(tb, 1, n, k + kSlotTargets[slot - 1].dj, 1 - i,
              rc.beta(n, k, i, slot));
        for (int slot : {1, 2})
          add(tc, 1, n - 1, k + kSlotTargets[slot - 1].dj, 1 - i,
              rc.beta(n, k, i, slot));
        // z section
        add(ta, 2, n + 1, k, i, rc.gamma(n, k, 3));
        add(tb, 2, n, k, i, rc.gamma(n, k, 2));
        add(tc, 2, n - 1, k, i, rc.gamma(n, k, 1));
      }
    }

    ClenshawDegree& deg = cm->degrees[n];
    deg.A.resize(3 * rows, 2 * n + 3);
    deg.A.setFromTriplets(ta.begin(), ta.end());
    deg.B.resize(3 * rows, rows);
    deg.B.setFromTriplets(tb.begin(), tb.end());
    deg.C.resize(3 * rows, std::max(2 * n - 1, 0));
    deg.C.setFromTriplets(tc.begin(), tc.end());

    // Left inverse of A_n: the z rows recover modes k <= n, the last two
    // rows recover (n+1, n+1, 0/1) through y and x multiplication.
    const int xoff = 0, yoff = rows, zoff = 2 * rows;
    if (n == 0) {
      const double g = rc.gamma(0, 0, 3);
      const double a6 = rc.alpha(0, 0, 6);
      const double b6 = rc.beta(0, 0, 0, 6);
      check_nonzero(g, "D0");
      check_nonzero(a6, "D0");
      check_nonzero(b6, "D0");
      td.emplace_back(0, zoff, 1.0 / g);
      td.emplace_back(1, xoff, 1.0 / a6);
      td.emplace_back(2, yoff, 1.0 / b6);
    } else {
      for (int k = 0; k <= n; ++k) {
        for (int i = 0; i <= (k == 0 ? 0 : 1); ++i) {
          const double g = rc.gamma(n, k, 3);
          check_nonzero(g, "Dt diagonal");
          td.emplace_back(layout::degree_local(k, i),
                          zoff + layout::degree_local(k, i), 1.0 / g);
        }
      }
      const double a5 = rc.alpha(n, n, 5), a6 = rc.alpha(n, n, 6);
      const double b5 = rc.beta(n, n, 1, 5), b6 = rc.beta(n, n, 1, 6);
      const double gprev = rc.gamma(n, n - 1, 3);
      check_nonzero(a6, "Dt corner");
      check_nonzero(b6, "Dt corner");
      check_nonzero(gprev, "Dt corner");
      // row recovering (n+1, n+1, 0)
      td.emplace_back(layout::degree_local(n + 1, 0),
                      yoff + layout::degree_local(n, 1), 1.0 / b6);
      td.emplace_back(layout::degree_local(n + 1, 0),
                      zoff + layout::degree_local(n - 1, 0),
                      -b5 / (b6 * gprev));
      // row recovering (n+1, n+1, 1)
      td.emplace_back(layout::degree_local(n + 1, 1),
                      xoff + layout::degree_local(n, 1), 1.0 / a6);
      if (n >= 2)
        td.emplace_back(layout::degree_local(n + 1, 1),
                        zoff + layout::degree_local(n - 1, 1),
                        -a5 / (a6 * gprev));
    }
    deg.Dt.resize(2 * n + 3, 3 * rows);
    deg.Dt.setFromTriplets(td.begin(), td.end());

    deg.DBt = Eigen::SparseMatrix<double>((deg.Dt * deg.B).transpose());
    deg.DCt = Eigen::SparseMatrix<double>((deg.Dt * deg.C).transpose());
    deg.Dxt = Eigen::SparseMatrix<double>(
        deg.Dt.middleCols(xoff, rows).transpose());
    deg.Dyt = Eigen::SparseMatrix<double>(
        deg.Dt.middleCols(yoff, rows).transpose());
    deg.Dzt = Eigen::SparseMatrix<double>(
        deg.Dt.middleCols(zoff, rows).transpose());
  }

  clenshaw_ = std::move(cm);
  return *clenshaw_;
}

double CapBasis::evaluate(const CoefficientVector& coeffs,
                          const CapPoint& p) const {
  coeffs.validate();
  if (!(coeffs.spec == spec_))
    throw ParameterError("coefficient vector built for a different basis");
  const CoefficientVector local = coeffs.ordering == Ordering::DegreeMajor
                                      ? coeffs
                                      : reorder(coeffs, Ordering::DegreeMajor);
  const int N = spec_.N;
  const ClenshawMatrices& cm = clenshaw();

  Eigen::VectorXd xi_n1, xi_n2;  // xi_{n+1}, xi_{n+2}
  Eigen::VectorXd xi;
  for (int n = N; n >= 0; --n) {
    xi = local.values.segment(layout::degree_block_offset(n),
                              layout::degree_block_size(n));
    if (xi_n1.size() > 0) {
      const ClenshawDegree& d = cm.degrees[n];
      xi -= d.DBt * xi_n1;
      xi += p.x * (d.Dxt * xi_n1) + p.y * (d.Dyt * xi_n1) +
            p.z * (d.Dzt * xi_n1);
    }
    if (xi_n2.size() > 0) xi -= cm.degrees[n + 1].DCt * xi_n2;
    xi_n2 = std::move(xi_n1);
    xi_n1 = std::move(xi);
  }
  double value = xi_n1[0] * harmonic_constant();
  if (coeffs.weighted)
    value *= std::pow(p.z - spec_.alpha, double(spec_.a));
  return value;
}

// ---------------------------------------------------------------------------
// Convenience wrappers

double eval_Q(const BasisSpec& spec, int n, int k, int i, const CapPoint& p) {
  return CapBasis(spec).eval(n, k, i, p);
}

BandedBlockBanded jacobi_matrix(const BasisSpec& spec, Axis axis) {
  return CapBasis(spec).jacobi(axis);
}

ClenshawMatrices clenshaw_matrices(const BasisSpec& spec) {
  return CapBasis(spec).clenshaw();
}

double evaluate(const CoefficientVector& coeffs, const CapPoint& p) {
  return CapBasis(coeffs.spec).evaluate(coeffs, p);
}

}  // namespace sphcap
