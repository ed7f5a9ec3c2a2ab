#pragma once

#include <Eigen/Dense>

#include "sphcap/errors.hpp"

namespace sphcap {

/// Parameters of the weight (x - alpha)^a * (1 - x^2)^(b/2) on [alpha, 1].
///
/// alpha must lie strictly inside (-1, 1), a must be non-negative and b a
/// non-negative even integer.
struct WeightParams {
  double alpha = 0.0;
  double a = 0.0;
  int b = 0;

  void validate() const;
  bool operator==(const WeightParams&) const = default;
};

/// Coefficients of the orthonormal three-term recurrence
///
///   x R_n(x) = betas[n] R_{n+1}(x) + alphas[n] R_n(x) + betas[n-1] R_{n-1}(x)
///
/// for the family orthonormal under (1/omega) * int_alpha^1 p q w dx, where
/// omega is the total weight integral.  R_0 == 1 under this normalization.
struct RecurrenceTable {
  WeightParams params;
  Eigen::VectorXd alphas;
  Eigen::VectorXd betas;
  double omega = 0.0;

  int n_max() const { return static_cast<int>(alphas.size()) - 1; }
};

/// Gauss nodes/weights for the unnormalized measure w(x) dx on (alpha, 1).
struct GaussRule1D {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// omega = int_alpha^1 (x-alpha)^a (1-x^2)^(b/2) dx, in closed form.
double normalization(const WeightParams& params);

/// Recurrence coefficients alpha_0..alpha_n_max, beta_0..beta_n_max by a
/// discretized Stieltjes procedure on a polynomially exact base rule.
RecurrenceTable recurrence_table(const WeightParams& params, int n_max);

/// Stieltjes run against a supplied base rule whose measure already carries
/// (x-alpha)^a (1-x^2)^(base_b/2); the remaining analytic factor
/// (1-x^2)^((b-base_b)/2) is absorbed into the discrete weights.  The base
/// must satisfy 2*size - 1 >= 2*n_max + 2 + (b - base_b).
RecurrenceTable recurrence_table(const WeightParams& params, int n_max,
                                 const GaussRule1D& base, int base_b = 0);

/// m-point Gauss rule from the recurrence table (Golub--Welsch form);
/// needs the table to extend at least to degree m-1.
GaussRule1D gauss_rule(const RecurrenceTable& table, int m);
GaussRule1D gauss_rule(const WeightParams& params, int m);

/// R_n(x), or its first/second derivative, by forward recurrence.
double eval_R(const RecurrenceTable& table, int n, double x,
              int deriv_order = 0);

/// Immutable univariate family: recurrence table, evaluation and Gauss rules.
class Family1D {
 public:
  Family1D(const WeightParams& params, int n_max)
      : table_(recurrence_table(params, n_max)) {}
  Family1D(const WeightParams& params, int n_max, const GaussRule1D& base)
      : table_(recurrence_table(params, n_max, base)) {}
  explicit Family1D(RecurrenceTable table) : table_(std::move(table)) {}

  const RecurrenceTable& table() const { return table_; }
  const WeightParams& params() const { return table_.params; }
  double omega() const { return table_.omega; }
  int n_max() const { return table_.n_max(); }

  double eval(int n, double x, int deriv_order = 0) const {
    return eval_R(table_, n, x, deriv_order);
  }

  /// Values of R_0..R_n (derivative of order deriv_order) at each x:
  /// result is (n+1) x x.size().
  Eigen::MatrixXd eval_table(int n, const Eigen::VectorXd& x,
                             int deriv_order = 0) const;

  /// One-pass tabulation of values and requested derivatives, stored with
  /// one column per degree: outputs are x.size() x (n+1), so a polynomial's
  /// node values are contiguous.
  void eval_tables(int n, const Eigen::VectorXd& x, Eigen::MatrixXd* val,
                   Eigen::MatrixXd* der = nullptr,
                   Eigen::MatrixXd* der2 = nullptr) const;

  GaussRule1D gauss(int m) const { return gauss_rule(table_, m); }

 private:
  RecurrenceTable table_;
};

namespace detail {

/// Orthonormal recurrence of the Jacobi weight (1-t)^A (1+t)^B on [-1,1]:
/// diag d_0..d_{m-1}, off-diagonal e_0..e_{m-2}.
void jacobi_recurrence(double A, double B, int m, Eigen::VectorXd& diag,
                       Eigen::VectorXd& offdiag);

/// int_{-1}^1 (1-t)^A (1+t)^B dt.
double jacobi_mass(double A, double B);

/// Gauss rule from an orthonormal recurrence (diag, offdiag) whose measure
/// has total mass `mass`: nodes are eigenvalues of the Jacobi matrix, weights
/// come from the Christoffel function.
GaussRule1D gauss_from_recurrence(const Eigen::VectorXd& diag,
                                  const Eigen::VectorXd& offdiag, double mass,
                                  int m);

/// m-point Gauss rule for the weight (x-alpha)^a on [alpha, 1] (a Jacobi
/// weight under the affine map).
GaussRule1D radial_base_rule(double alpha, double a, int m);

}  // namespace detail
}  // namespace sphcap
