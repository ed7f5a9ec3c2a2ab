#include "sphcap/semiclassical.hpp"

#include <cmath>
#include <limits>

namespace sphcap {

void WeightParams::validate() const {
  if (!(alpha > -1.0 && alpha < 1.0))
    throw ParameterError("weight parameter alpha must lie in (-1, 1)");
  if (!(a >= 0.0) || !std::isfinite(a))
    throw ParameterError("weight parameter a must be non-negative");
  if (b < 0 || b % 2 != 0)
    throw ParameterError("weight parameter b must be a non-negative even integer");
}

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r *= double(n - k + j) / double(j);
  return r;
}

}  // namespace

double normalization(const WeightParams& params) {
  params.validate();
  // Substitute u = x - alpha and expand (1-x^2)^(b/2) = (L-u)^kap (P+u)^kap
  // with L = 1 - alpha, P = 1 + alpha; each term integrates in closed form.
  const int kap = params.b / 2;
  const double L = 1.0 - params.alpha;
  const double P = 1.0 + params.alpha;
  double total = 0.0;
  for (int i = 0; i <= kap; ++i) {
    for (int j = 0; j <= kap; ++j) {
      const double c = ((i % 2) ? -1.0 : 1.0) * binomial(kap, i) *
                       binomial(kap, j) * std::pow(L, kap - i) *
                       std::pow(P, kap - j);
      total += c * std::pow(L, params.a + i + j + 1) / (params.a + i + j + 1);
    }
  }
  return total;
}

namespace detail {

double jacobi_mass(double A, double B) {
  return std::pow(2.0, A + B + 1.0) *
         std::exp(std::lgamma(A + 1.0) + std::lgamma(B + 1.0) -
                  std::lgamma(A + B + 2.0));
}

void jacobi_recurrence(double A, double B, int m, Eigen::VectorXd& diag,
                       Eigen::VectorXd& offdiag) {
  diag.resize(m);
  offdiag.resize(m > 0 ? m - 1 : 0);
  for (int k = 0; k < m; ++k) {
    if (k == 0)
      diag[k] = (B - A) / (A + B + 2.0);
    else
      diag[k] = (B * B - A * A) /
                ((2.0 * k + A + B) * (2.0 * k + A + B + 2.0));
  }
  for (int k = 1; k < m; ++k) {
    const double s = 2.0 * k + A + B;
    const double b2 = 4.0 * k * (k + A) * (k + B) * (k + A + B) /
                      (s * s * (s + 1.0) * (s - 1.0));
    offdiag[k - 1] = std::sqrt(b2);
  }
}

GaussRule1D gauss_from_recurrence(const Eigen::VectorXd& diag,
                                  const Eigen::VectorXd& offdiag, double mass,
                                  int m) {
  if (m < 1) throw ParameterError("gauss rule needs at least one point");
  if (diag.size() < m || offdiag.size() < m - 1)
    throw TableExtentError("recurrence table too short for requested rule");

  GaussRule1D rule;
  if (m == 1) {
    rule.nodes.resize(1);
    rule.weights.resize(1);
    rule.nodes[0] = diag[0];
    rule.weights[0] = mass;
    return rule;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag.head(m), offdiag.head(m - 1),
                            Eigen::EigenvaluesOnly);
  rule.nodes = es.eigenvalues();

  // Weights from the Christoffel function: w_j = mass / sum_n p_n(x_j)^2
  // with p_n orthonormal for the mass-normalized measure (p_0 = 1).
  rule.weights.resize(m);
  for (int j = 0; j < m; ++j) {
    const double x = rule.nodes[j];
    double pm1 = 0.0, p = 1.0, sum = 1.0;
    for (int n = 0; n + 1 < m; ++n) {
      const double pn1 = ((x - diag[n]) * p - (n > 0 ? offdiag[n - 1] : 0.0) * pm1) /
                         offdiag[n];
      pm1 = p;
      p = pn1;
      sum += p * p;
    }
    rule.weights[j] = mass / sum;
  }
  return rule;
}

// Gauss rule for the weight (x-alpha)^a on [alpha, 1], used as the base
// measure of the Stieltjes procedure with the smooth factor (1-x^2)^(b/2)
// absorbed into the discrete weights.  Exact for all moments needed.
GaussRule1D radial_base_rule(double alpha, double a, int m) {
  Eigen::VectorXd d, e;
  jacobi_recurrence(0.0, a, m, d, e);
  const double c1 = (1.0 - alpha) / 2.0;
  const double c0 = (1.0 + alpha) / 2.0;
  d = (c1 * d.array() + c0).matrix();
  e *= c1;
  const double mass = std::pow(c1, a + 1.0) * jacobi_mass(0.0, a);
  return gauss_from_recurrence(d, e, mass, m);
}

}  // namespace detail

RecurrenceTable recurrence_table(const WeightParams& params, int n_max,
                                 const GaussRule1D& base, int base_b) {
  params.validate();
  if (n_max < 0) throw ParameterError("n_max must be non-negative");
  if (base_b < 0 || base_b > params.b || base_b % 2 != 0)
    throw ParameterError("base rule carries an incompatible rho power");
  const int m = static_cast<int>(base.nodes.size());
  if (2 * m - 1 < 2 * n_max + 2 + params.b - base_b)
    throw ParameterError("Stieltjes base rule too small for the family");

  RecurrenceTable table;
  table.params = params;
  table.alphas.resize(n_max + 1);
  table.betas.resize(n_max + 1);

  const Eigen::ArrayXd& x = base.nodes.array();
  Eigen::ArrayXd w = base.weights.array();
  if (params.b > base_b) {
    const Eigen::ArrayXd rho2 = 1.0 - x.square();
    for (int h = 0; h < (params.b - base_b) / 2; ++h) w *= rho2;
  }
  table.omega = w.sum();
  if (!(table.omega > 0.0) || !std::isfinite(table.omega))
    throw AccuracyLossError("weight normalization is not positive");
  w /= table.omega;

  Eigen::ArrayXd pm1 = Eigen::ArrayXd::Zero(m);
  Eigen::ArrayXd p = Eigen::ArrayXd::Ones(m);
  Eigen::ArrayXd r(m);
  const double* xp = base.nodes.data();
  const double* wp = w.data();
  double* pm = pm1.data();
  double* pc = p.data();
  double* rr = r.data();
  double beta_prev = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    double an = 0.0;
    for (int j = 0; j < m; ++j) an += wp[j] * xp[j] * pc[j] * pc[j];
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
      const double rv = (xp[j] - an) * pc[j] - beta_prev * pm[j];
      rr[j] = rv;
      s += wp[j] * rv * rv;
    }
    const double bn = std::sqrt(s);
    if (!(bn > 64.0 * std::numeric_limits<double>::epsilon()) ||
        !std::isfinite(bn))
      throw AccuracyLossError(
          "Stieltjes recurrence lost positivity at degree " +
          std::to_string(n));
    table.alphas[n] = an;
    table.betas[n] = bn;
    const double inv = 1.0 / bn;
    for (int j = 0; j < m; ++j) rr[j] *= inv;
    double* tmp = pm;
    pm = pc;
    pc = rr;
    rr = tmp;
    beta_prev = bn;
  }
  return table;
}

RecurrenceTable recurrence_table(const WeightParams& params, int n_max) {
  params.validate();
  if (n_max < 0) throw ParameterError("n_max must be non-negative");
  const int m = n_max + params.b / 2 + 4;
  return recurrence_table(params, n_max,
                          detail::radial_base_rule(params.alpha, params.a, m));
}

GaussRule1D gauss_rule(const RecurrenceTable& table, int m) {
  if (m < 1) throw ParameterError("gauss rule needs at least one point");
  if (table.n_max() + 1 < m)
    throw TableExtentError("recurrence table too short for " +
                           std::to_string(m) + "-point rule");
  return detail::gauss_from_recurrence(table.alphas, table.betas, table.omega,
                                       m);
}

GaussRule1D gauss_rule(const WeightParams& params, int m) {
  return gauss_rule(recurrence_table(params, m - 1 > 0 ? m - 1 : 0), m);
}

double eval_R(const RecurrenceTable& table, int n, double x,
              int deriv_order) {
  if (n < 0) throw ParameterError("degree must be non-negative");
  if (deriv_order < 0 || deriv_order > 2)
    throw ParameterError("derivative order must be 0, 1 or 2");
  if (n > 0 && table.n_max() < n - 1)
    throw TableExtentError("recurrence table does not extend to degree " +
                           std::to_string(n));

  double r = 1.0, rm1 = 0.0;       // values
  double d = 0.0, dm1 = 0.0;       // first derivatives
  double s = 0.0, sm1 = 0.0;       // second derivatives
  for (int j = 0; j < n; ++j) {
    const double a = table.alphas[j];
    const double b = table.betas[j];
    const double bprev = j > 0 ? table.betas[j - 1] : 0.0;
    const double r1 = ((x - a) * r - bprev * rm1) / b;
    const double d1 = ((x - a) * d + r - bprev * dm1) / b;
    const double s1 = ((x - a) * s + 2.0 * d - bprev * sm1) / b;
    rm1 = r; r = r1;
    dm1 = d; d = d1;
    sm1 = s; s = s1;
  }
  if (deriv_order == 0) return r;
  if (deriv_order == 1) return d;
  return s;
}

void Family1D::eval_tables(int n, const Eigen::VectorXd& x,
                           Eigen::MatrixXd* val, Eigen::MatrixXd* der,
                           Eigen::MatrixXd* der2) const {
  if (n < 0) throw ParameterError("degree must be non-negative");
  if (n > 0 && table_.n_max() < n - 1)
    throw TableExtentError("recurrence table does not extend to degree " +
                           std::to_string(n));
  if (!val) throw ParameterError("value table output is required");
  if (der2 && !der)
    throw ParameterError("second derivatives need the first-derivative table");

  const int npts = static_cast<int>(x.size());
  val->resize(npts, n + 1);
  val->col(0).setOnes();
  if (der) {
    der->resize(npts, n + 1);
    der->col(0).setZero();
  }
  if (der2) {
    der2->resize(npts, n + 1);
    der2->col(0).setZero();
  }
  const auto xs = x.array();
  for (int j = 0; j < n; ++j) {
    const double a = table_.alphas[j];
    const double ib = 1.0 / table_.betas[j];
    const double bprev = j > 0 ? table_.betas[j - 1] : 0.0;
    if (j > 0) {
      val->col(j + 1) =
          ((xs - a) * val->col(j).array() - bprev * val->col(j - 1).array()) *
          ib;
      if (der)
        der->col(j + 1) = ((xs - a) * der->col(j).array() +
                           val->col(j).array() -
                           bprev * der->col(j - 1).array()) *
                          ib;
      if (der2)
        der2->col(j + 1) =
            ((xs - a) * der2->col(j).array() + 2.0 * der->col(j).array() -
             bprev * der2->col(j - 1).array()) *
            ib;
    } else {
      val->col(1) = (xs - a) * ib;
      if (der) der->col(1).setConstant(ib);
      if (der2) der2->col(1).setZero();
    }
  }
}

Eigen::MatrixXd Family1D::eval_table(int n, const Eigen::VectorXd& x,
                                     int deriv_order) const {
  if (deriv_order < 0 || deriv_order > 2)
    throw ParameterError("derivative order must be 0, 1 or 2");
  Eigen::MatrixXd val, der, sec;
  eval_tables(n, x, &val, deriv_order >= 1 ? &der : nullptr,
              deriv_order == 2 ? &sec : nullptr);
  // legacy orientation: one row per degree
  if (deriv_order == 0) return val.transpose();
  if (deriv_order == 1) return der.transpose();
  return sec.transpose();
}

}  // namespace sphcap
