#include "sphcap/transforms.hpp"

#include <cmath>
#include <numbers>

namespace sphcap {

namespace {
constexpr double kPi = std::numbers::pi;
}

CapPoint CapQuadrature::node(int idx) const {
  const int j = idx / M2;
  const int l = idx % M2;
  const double t = z_nodes[j];
  const double r = rho(t);
  return {r * std::cos(thetas[l]), r * std::sin(thetas[l]), t};
}

CapPoint CapQuadrature::antipode(int idx) const {
  CapPoint p = node(idx);
  p.x = -p.x;
  p.y = -p.y;
  return p;
}

CapQuadrature cap_quadrature(const CapContext& ctx, double a, int degree) {
  if (degree < 0) throw ParameterError("quadrature degree must be >= 0");
  CapQuadrature q;
  q.alpha = ctx.alpha();
  q.a = a;
  q.M1 = (degree + 2) / 2;  // ceil((degree+1)/2)
  q.M2 = degree + 1;
  const auto rule = ctx.rule(a, 0, q.M1);
  q.z_nodes = rule->nodes;
  q.z_weights = rule->weights;
  q.thetas.resize(q.M2);
  for (int l = 0; l < q.M2; ++l)
    q.thetas[l] = (2.0 * l + 1.0) * kPi / (2.0 * q.M2);
  return q;
}

CapQuadrature cap_quadrature(const BasisSpec& spec, int degree) {
  spec.validate();
  CapContext ctx(spec.alpha);
  return cap_quadrature(ctx, spec.a, degree);
}

double integrate(const CapQuadrature& q,
                 const std::function<double(const CapPoint&)>& f) {
  double total = 0.0;
  for (int j = 0; j < q.M1; ++j) {
    const double t = q.z_nodes[j];
    const double r = rho(t);
    double column = 0.0;
    for (int l = 0; l < q.M2; ++l) {
      const double x = r * std::cos(q.thetas[l]);
      const double y = r * std::sin(q.thetas[l]);
      column += f({x, y, t}) + f({-x, -y, t});
    }
    total += q.z_weights[j] * column;
  }
  return total * (kPi / q.M2);
}

namespace {

CoefficientVector expand_impl(const CapQuadrature& q,
                              const Eigen::MatrixXd& Fp,
                              const Eigen::MatrixXd& Fm,
                              const BasisSpec& spec,
                              std::shared_ptr<CapContext> ctx) {
  const int N = spec.N;
  const int M1 = q.M1, M2 = q.M2;

  // Stage 1: theta reductions E_{k,i}(j) = sum_l Y_{k,i}(theta_l) *
  // (Fp +/- Fm)(j, l); the antipodal samples enter with parity (-1)^k.
  Eigen::MatrixXd even = Fp + Fm;  // M1 x M2
  Eigen::MatrixXd odd = Fp - Fm;
  Eigen::MatrixXd cosk(N + 1, M2), sink(N + 1, M2);
  for (int l = 0; l < M2; ++l) {
    const double c1 = std::cos(q.thetas[l]), s1 = std::sin(q.thetas[l]);
    cosk(0, l) = 1.0;
    sink(0, l) = 0.0;
    double c = c1, s = s1;
    for (int k = 1; k <= N; ++k) {
      cosk(k, l) = c;
      sink(k, l) = s;
      const double cn = c * c1 - s * s1;
      const double sn = s * c1 + c * s1;
      c = cn;
      s = sn;
    }
  }

  // E_cos(k, j), E_sin(k, j): split the harmonics by mode parity so each
  // parity multiplies only its own sample combination
  const int n_even = N / 2 + 1, n_odd = (N + 1) / 2;
  Eigen::MatrixXd cos_e(n_even, M2), cos_o(n_odd, M2), sin_e(n_even, M2),
      sin_o(n_odd, M2);
  for (int k = 0; k <= N; ++k) {
    if (k % 2 == 0) {
      cos_e.row(k / 2) = cosk.row(k);
      sin_e.row(k / 2) = sink.row(k);
    } else {
      cos_o.row(k / 2) = cosk.row(k);
      sin_o.row(k / 2) = sink.row(k);
    }
  }
  const Eigen::MatrixXd Ece = cos_e * even.transpose();  // n_even x M1
  const Eigen::MatrixXd Eco = cos_o * odd.transpose();
  const Eigen::MatrixXd Ese = sin_e * even.transpose();
  const Eigen::MatrixXd Eso = sin_o * odd.transpose();
  Eigen::MatrixXd Ecos(N + 1, M1), Esin(N + 1, M1);
  for (int k = 0; k <= N; ++k) {
    Ecos.row(k) = (k % 2 == 0) ? Ece.row(k / 2) : Eco.row(k / 2);
    Esin.row(k) = (k % 2 == 0) ? Ese.row(k / 2) : Eso.row(k / 2);
  }

  // Stage 2: radial reductions per mode.
  CoefficientVector out;
  out.spec = spec;
  out.ordering = Ordering::FourierMajor;
  out.weighted = false;
  out.values.setZero(spec.dimension());

  Eigen::VectorXd rhopow = Eigen::VectorXd::Ones(M1);
  Eigen::VectorXd rho_node(M1);
  for (int j = 0; j < M1; ++j) rho_node[j] = rho(q.z_nodes[j]);

  if (!ctx) ctx = std::make_shared<CapContext>(spec.alpha);
  Eigen::MatrixXd R;
  for (int k = 0; k <= N; ++k) {
    const auto fam = ctx->family(spec.a, 2 * k, std::max(N - k, 0));
    fam->eval_tables(N - k, q.z_nodes, &R);
    const double scale = 1.0 / (M2 * fam->omega());
    const double yconst = k == 0 ? harmonic_constant() : 1.0;
    const Eigen::VectorXd wc = (q.z_weights.array() * rhopow.array() *
                                Ecos.row(k).transpose().array())
                                   .matrix();
    const Eigen::VectorXd ccoefs = R.transpose() * wc;
    Eigen::VectorXd scoefs;
    if (k > 0) {
      const Eigen::VectorXd ws = (q.z_weights.array() * rhopow.array() *
                                  Esin.row(k).transpose().array())
                                     .matrix();
      scoefs = R.transpose() * ws;
    }
    for (int n = k; n <= N; ++n) {
      out.values[layout::fourier_major_index(N, n, k, 0)] =
          scale * yconst * ccoefs[n - k];
      if (k > 0)
        out.values[layout::fourier_major_index(N, n, k, 1)] =
            scale * scoefs[n - k];
    }
    rhopow.array() *= rho_node.array();
  }
  return out;
}

}  // namespace

CoefficientVector expand(const std::function<double(const CapPoint&)>& f,
                         const BasisSpec& spec,
                         std::shared_ptr<CapContext> ctx) {
  spec.validate();
  if (!ctx) ctx = std::make_shared<CapContext>(spec.alpha);
  const CapQuadrature q = cap_quadrature(*ctx, spec.a, 2 * spec.N);
  Eigen::MatrixXd Fp(q.M1, q.M2), Fm(q.M1, q.M2);
  for (int j = 0; j < q.M1; ++j) {
    const double t = q.z_nodes[j];
    const double r = rho(t);
    for (int l = 0; l < q.M2; ++l) {
      const double x = r * std::cos(q.thetas[l]);
      const double y = r * std::sin(q.thetas[l]);
      Fp(j, l) = f({x, y, t});
      Fm(j, l) = f({-x, -y, t});
    }
  }
  return expand_impl(q, Fp, Fm, spec, ctx);
}

CoefficientVector expand_samples(const Eigen::VectorXd& values,
                                 const Eigen::VectorXd& antipodal_values,
                                 const BasisSpec& spec,
                                 std::shared_ptr<CapContext> ctx) {
  spec.validate();
  if (!ctx) ctx = std::make_shared<CapContext>(spec.alpha);
  const CapQuadrature q = cap_quadrature(*ctx, spec.a, 2 * spec.N);
  if (values.size() != q.size() || antipodal_values.size() != q.size())
    throw ParameterError("sample count does not match the quadrature grid");
  Eigen::MatrixXd Fp(q.M1, q.M2), Fm(q.M1, q.M2);
  for (int j = 0; j < q.M1; ++j)
    for (int l = 0; l < q.M2; ++l) {
      Fp(j, l) = values[j * q.M2 + l];
      Fm(j, l) = antipodal_values[j * q.M2 + l];
    }
  return expand_impl(q, Fp, Fm, spec, ctx);
}

}  // namespace sphcap
