#include "sphcap/solvers.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

namespace sphcap {

namespace {
constexpr double kPi = std::numbers::pi;

double seconds_since(
    const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}
}  // namespace

double ThetaSeries::eval(double theta) const {
  if (empty()) return 0.0;
  double out = c[0] * harmonic_constant();
  for (int k = 1; k < c.size(); ++k)
    out += c[k] * std::cos(k * theta) + s[k] * std::sin(k * theta);
  return out;
}

double ThetaSeries::laplacian_numerator(double theta) const {
  double out = 0.0;
  for (int k = 1; k < c.size(); ++k)
    out -= double(k) * k *
           (c[k] * std::cos(k * theta) + s[k] * std::sin(k * theta));
  return out;
}

ThetaSeries theta_series(const std::function<double(double)>& g, int max_k,
                         double tail_tol) {
  const int probe = max_k + 16;
  const int M = std::max(4 * (probe + 1), 256);
  Eigen::VectorXd samples(M);
  for (int m = 0; m < M; ++m) samples[m] = g(2.0 * kPi * m / M);
  const double scale = std::max(samples.cwiseAbs().maxCoeff(), 1e-300);

  Eigen::VectorXd call(probe + 1), sall(probe + 1);
  for (int k = 0; k <= probe; ++k) {
    double ck = 0.0, sk = 0.0;
    for (int m = 0; m < M; ++m) {
      const double th = 2.0 * kPi * m / M;
      ck += samples[m] * std::cos(k * th);
      sk += samples[m] * std::sin(k * th);
    }
    call[k] = 2.0 * ck / M;
    sall[k] = 2.0 * sk / M;
  }
  call[0] *= harmonic_constant();  // coefficient of Y_0 rather than of 1
  sall[0] = 0.0;

  for (int k = max_k + 1; k <= probe; ++k)
    if (std::abs(call[k]) > tail_tol * scale ||
        std::abs(sall[k]) > tail_tol * scale)
      throw BoundaryResolutionError(
          "boundary data has modes beyond degree " + std::to_string(max_k));

  ThetaSeries out;
  out.c = call.head(max_k + 1);
  out.s = sall.head(max_k + 1);
  return out;
}

void PdeProblem::validate() const {
  if (!(alpha > -1.0 && alpha < 1.0))
    throw ParameterError("problem alpha must lie in (-1, 1)");
  if (N < 0) throw ParameterError("problem degree must be >= 0");
  if (!f) throw ParameterError("problem needs a right-hand side");
  if (kind == Kind::Helmholtz && !v)
    throw ParameterError("Helmholtz problems need a coefficient v");
  if (kind == Kind::Biharmonic && boundary)
    throw ParameterError(
        "biharmonic problems support zero Dirichlet+Neumann data only");
}

double PdeSolution::evaluate(const CapPoint& p) const {
  double out = basis->evaluate(coeffs, p);
  if (!lift.empty()) out += lift.eval(p.theta());
  return out;
}

LiftedProblem lift_boundary(const PdeProblem& problem) {
  problem.validate();
  if (problem.kind == PdeProblem::Kind::Biharmonic)
    throw ParameterError("boundary lifting applies to Poisson/Helmholtz");
  LiftedProblem out;
  out.problem = problem;
  if (!problem.boundary) {
    out.series = ThetaSeries{};
    return out;
  }
  out.series = theta_series(problem.boundary, problem.N);
  out.problem.boundary = nullptr;

  const ThetaSeries series = out.series;
  const auto f = problem.f;
  const auto v = problem.v;
  const double k2 = problem.k_wave * problem.k_wave;
  out.problem.f = [f, v, k2, series](const CapPoint& p) {
    const double theta = p.theta();
    double g = f(p) - series.laplacian_numerator(theta) /
                          std::max(1.0 - p.z * p.z, 1e-300);
    if (v && k2 != 0.0) g -= k2 * v(p) * series.eval(theta);
    return g;
  };
  return out;
}

namespace {

PdeSolution run_solve(const PdeProblem& problem,
                      std::shared_ptr<CapContext> ctx, int a_space,
                      const BandedBlockBanded& A, double assemble_seconds,
                      const ThetaSeries& lift) {
  PdeSolution sol;
  auto t0 = std::chrono::steady_clock::now();
  const BasisSpec spec{problem.alpha, a_space, problem.N};
  CoefficientVector rhs = expand(problem.f, spec, ctx);
  sol.expand_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  SolveResult res = solve(A, rhs);
  sol.solve_seconds = seconds_since(t0);

  sol.assemble_seconds = assemble_seconds;
  sol.coeffs = std::move(res.solution);
  sol.coeffs.weighted = true;
  sol.residual_norm = res.residual;
  sol.decoupled = res.decoupled;
  sol.block_norms = block_norms(sol.coeffs);
  sol.lift = lift;
  sol.basis = std::make_shared<CapBasis>(spec, ctx);
  return sol;
}

}  // namespace

PdeSolution solve_poisson(const PdeProblem& problem,
                          std::shared_ptr<CapContext> ctx) {
  problem.validate();
  if (problem.kind != PdeProblem::Kind::Poisson)
    throw ParameterError("solve_poisson expects a Poisson problem");
  if (problem.boundary) {
    PdeProblem h = problem;
    h.kind = PdeProblem::Kind::Helmholtz;
    h.k_wave = 0.0;
    h.v = [](const CapPoint&) { return 0.0; };
    return solve_helmholtz(h, ctx);
  }
  if (!ctx) ctx = std::make_shared<CapContext>(problem.alpha);
  const auto t0 = std::chrono::steady_clock::now();
  const BandedBlockBanded A = assemble(
      {OperatorKind::WeightedLaplacianA1, problem.alpha, 1, 2, problem.N},
      ctx);
  return run_solve(problem, ctx, 1, A, seconds_since(t0), ThetaSeries{});
}

PdeSolution solve_helmholtz(const PdeProblem& problem,
                            std::shared_ptr<CapContext> ctx) {
  problem.validate();
  if (problem.kind != PdeProblem::Kind::Helmholtz)
    throw ParameterError("solve_helmholtz expects a Helmholtz problem");
  if (!ctx) ctx = std::make_shared<CapContext>(problem.alpha);

  PdeProblem local = problem;
  ThetaSeries lift;
  if (problem.boundary) {
    LiftedProblem lifted = lift_boundary(problem);
    local = lifted.problem;
    lift = lifted.series;
  }

  const auto t0 = std::chrono::steady_clock::now();
  BandedBlockBanded A = assemble(
      {OperatorKind::WeightedLaplacianA1, local.alpha, 1, 2, local.N}, ctx);
  if (local.k_wave != 0.0) {
    // factors are built one degree beyond the truncation so the retained
    // entries of the composed conversion equal the untruncated product
    const int Ne = local.N + 1;
    const BasisSpec vspec{local.alpha, 0, Ne};
    BandedBlockBanded V = variable_coefficient(local.v, vspec, ctx);
    const auto [T, Tw] = conversion_pair(local.alpha, 0, Ne, ctx);
    BandedBlockBanded K =
        truncate_fourier(T.multiply(V).multiply(Tw), Ne, local.N);
    K.scale(local.k_wave * local.k_wave);
    A = A.plus(K);
  }
  return run_solve(local, ctx, 1, A, seconds_since(t0), lift);
}

PdeSolution solve_biharmonic(const PdeProblem& problem,
                             std::shared_ptr<CapContext> ctx) {
  problem.validate();
  if (problem.kind != PdeProblem::Kind::Biharmonic)
    throw ParameterError("solve_biharmonic expects a biharmonic problem");
  if (!ctx) ctx = std::make_shared<CapContext>(problem.alpha);
  const auto t0 = std::chrono::steady_clock::now();
  const BandedBlockBanded B = biharmonic(problem.alpha, problem.N, ctx);
  return run_solve(problem, ctx, 2, B, seconds_since(t0), ThetaSeries{});
}

}  // namespace sphcap
