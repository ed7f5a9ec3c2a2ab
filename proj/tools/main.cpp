// Command-line front end: solve the built-in PDE benchmarks, export operator
// sparsity patterns, run the build+solve timing sweep, and expand/evaluate
// functions on the cap.  Data files are plain CSV/JSON for external plotting.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "sphcap/operators.hpp"
#include "sphcap/solvers.hpp"
#include "sphcap/structured.hpp"
#include "sphcap/transforms.hpp"

using namespace sphcap;
using json = nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

using PointFn = std::function<double(const CapPoint&)>;

PointFn poisson_fig_rhs(double alpha) {
  return [alpha](const CapPoint& p) {
    return -2.0 * std::exp(p.x) * p.y * p.z * (2.0 + p.x) +
           (p.z - alpha) * std::exp(p.x) *
               (p.y * p.y * p.y + p.z * p.z * p.y - 4.0 * p.x * p.y -
                2.0 * p.y);
  };
}

PointFn helmholtz_fig_rhs(double alpha) {
  return [alpha](const CapPoint& p) {
    return p.y * std::exp(p.x) * (p.z - alpha);
  };
}

PointFn biharmonic_fig_rhs() {
  return [](const CapPoint& p) {
    const double arg =
        5.0 * (1.0 - 10.0 * ((p.x - 0.5) * (p.x - 0.5) + p.y * p.y));
    return (1.0 + std::erf(arg)) * (1.0 - p.z * p.z);
  };
}

PointFn eps_family_rhs(double eps) {
  const double c = eps + 1.0 / std::sqrt(3.0);
  return [c](const CapPoint& p) {
    const double dx = p.x - c, dy = p.y - c, dz = p.z - c;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  };
}

PointFn gauss_family_rhs(double eps) {
  const double x0 = 0.7, z0 = 0.2;
  const double y0 = std::sqrt(1.0 - x0 * x0 - z0 * z0);
  return [=](const CapPoint& p) {
    const double dx = p.x - x0, dy = p.y - y0, dz = p.z - z0;
    return std::exp(-eps * (dx * dx + dy * dy + dz * dz));
  };
}

PointFn helmholtz_fig_v() {
  const double x0 = 0.7, z0 = 0.2;
  const double y0 = std::sqrt(1.0 - x0 * x0 - z0 * z0);
  return [=](const CapPoint& p) {
    return 1.0 - (3.0 * (p.x - x0) * (p.x - x0) +
                  5.0 * (p.y - y0) * (p.y - y0) +
                  2.0 * (p.z - z0) * (p.z - z0));
  };
}

json coeffs_to_json(const CoefficientVector& c) {
  json j;
  j["format"] = "sphcap-coeffs";
  j["version"] = 1;
  j["alpha"] = c.spec.alpha;
  j["a"] = c.spec.a;
  j["N"] = c.spec.N;
  j["ordering"] = c.ordering == Ordering::FourierMajor ? "fourier" : "degree";
  j["weighted"] = c.weighted;
  j["values"] = std::vector<double>(c.values.data(),
                                    c.values.data() + c.values.size());
  return j;
}

CoefficientVector coeffs_from_json(const json& j) {
  if (j.value("format", "") != "sphcap-coeffs" || j.value("version", 0) != 1)
    throw InputError("unrecognized coefficient file format/version");
  CoefficientVector c;
  c.spec.alpha = j.at("alpha").get<double>();
  c.spec.a = j.at("a").get<int>();
  c.spec.N = j.at("N").get<int>();
  c.ordering = j.at("ordering").get<std::string>() == "fourier"
                   ? Ordering::FourierMajor
                   : Ordering::DegreeMajor;
  c.weighted = j.at("weighted").get<bool>();
  const auto vals = j.at("values").get<std::vector<double>>();
  c.values = Eigen::Map<const Eigen::VectorXd>(vals.data(), vals.size());
  c.validate();
  return c;
}

void write_coeffs(const CoefficientVector& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out << coeffs_to_json(c).dump(2) << "\n";
}

CoefficientVector read_coeffs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  json j;
  in >> j;
  return coeffs_from_json(j);
}

void write_decay_csv(const Eigen::VectorXd& norms, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out << "degree,norm\n";
  for (int n = 0; n < norms.size(); ++n)
    out << n << "," << fmt17(norms[n]) << "\n";
}

PointFn named_rhs(const std::string& name, double alpha, double eps) {
  if (name == "paper-fig3") return poisson_fig_rhs(alpha);
  if (name == "paper-fig4") return helmholtz_fig_rhs(alpha);
  if (name == "paper-fig5") return biharmonic_fig_rhs();
  if (name == "eps-family") return eps_family_rhs(eps);
  if (name == "gauss-family") return gauss_family_rhs(eps);
  if (name == "one") return [](const CapPoint&) { return 1.0; };
  if (name == "zero") return [](const CapPoint&) { return 0.0; };
  if (name == "exyz")
    return [](const CapPoint& p) { return std::exp(p.x) * p.y * p.z; };
  if (name == "x") return [](const CapPoint& p) { return p.x; };
  if (name == "z") return [](const CapPoint& p) { return p.z; };
  // otherwise a coefficient file evaluated through the Clenshaw recurrence
  const CoefficientVector c = read_coeffs(name);
  auto basis = std::make_shared<CapBasis>(c.spec);
  return [basis, c](const CapPoint& p) { return basis->evaluate(c, p); };
}

PointFn named_v(const std::string& name) {
  if (name == "paper-fig4") return helmholtz_fig_v();
  if (name == "cos-z")
    return [](const CapPoint& p) { return std::cos(p.z); };
  if (name == "one") return [](const CapPoint&) { return 1.0; };
  throw InputError("unknown variable coefficient '" + name + "'");
}

int cmd_solve(const std::string& kind, double alpha, int N,
              const std::string& rhs_name, const std::string& v_name,
              double k_wave, double eps, const std::string& boundary_name,
              const std::string& out_prefix) {
  PdeProblem prob;
  prob.alpha = alpha;
  prob.N = N;
  prob.f = named_rhs(rhs_name, alpha, eps);
  if (boundary_name == "cos-theta")
    prob.boundary = [](double th) { return std::cos(th); };
  else if (!boundary_name.empty() && boundary_name != "none")
    throw InputError("unknown boundary data '" + boundary_name + "'");

  PdeSolution sol;
  if (kind == "poisson") {
    prob.kind = PdeProblem::Kind::Poisson;
    sol = solve_poisson(prob);
  } else if (kind == "helmholtz") {
    prob.kind = PdeProblem::Kind::Helmholtz;
    prob.k_wave = k_wave;
    prob.v = named_v(v_name);
    sol = solve_helmholtz(prob);
  } else {
    prob.kind = PdeProblem::Kind::Biharmonic;
    sol = solve_biharmonic(prob);
  }

  write_coeffs(sol.coeffs, out_prefix + "-coeffs.json");
  write_decay_csv(sol.block_norms, out_prefix + "-decay.csv");
  std::cout << "solved " << kind << " alpha=" << alpha << " N=" << N
            << (sol.decoupled ? " (per-mode solve)" : " (coupled solve)")
            << "\n"
            << "residual " << fmt17(sol.residual_norm) << "\n"
            << "timing expand " << sol.expand_seconds << " s, assemble "
            << sol.assemble_seconds << " s, solve " << sol.solve_seconds
            << " s\n"
            << "wrote " << out_prefix << "-coeffs.json, " << out_prefix
            << "-decay.csv\n";
  return 0;
}

int cmd_spy(const std::string& kind, double alpha, int a, int atilde, int N,
            const std::string& out_path) {
  auto ctx = std::make_shared<CapContext>(alpha);
  BandedBlockBanded M;
  if (kind == "dtheta")
    M = assemble({OperatorKind::Dtheta, alpha, a, atilde, N}, ctx);
  else if (kind == "dphi")
    M = assemble({OperatorKind::Dphi, alpha, a, atilde, N}, ctx);
  else if (kind == "wphi")
    M = assemble({OperatorKind::Wphi, alpha, std::max(a, 1), atilde, N}, ctx);
  else if (kind == "laplacian")
    M = assemble({OperatorKind::Laplacian, alpha, a, atilde, N}, ctx);
  else if (kind == "weighted-laplacian")
    M = assemble(
        {OperatorKind::WeightedLaplacian, alpha, std::max(a, 2), atilde, N},
        ctx);
  else if (kind == "laplacian-w1")
    M = assemble({OperatorKind::WeightedLaplacianA1, alpha, 1, atilde, N},
                 ctx);
  else if (kind == "convert-up")
    M = assemble({OperatorKind::ConvertUp, alpha, a, atilde, N}, ctx);
  else if (kind == "convert-down")
    M = assemble(
        {OperatorKind::ConvertDown, alpha, std::max(a, atilde), atilde, N},
        ctx);
  else if (kind == "rho2-laplacian")
    M = rho2_laplacian(alpha, N, ctx);
  else if (kind == "biharmonic")
    M = biharmonic(alpha, N, ctx);
  else
    throw InputError("unknown operator kind '" + kind + "'");

  std::ofstream out(out_path);
  if (!out) throw InputError("cannot open " + out_path + " for writing");
  out << "row,col,absval\n";
  long nnz = 0;
  for (int bi = 0; bi < M.num_row_blocks(); ++bi)
    for (int bj = std::max(0, bi - M.block_lower());
         bj <= std::min(M.num_col_blocks() - 1, bi + M.block_upper()); ++bj) {
      const BandedMatrix& b = M.block(bi, bj);
      for (int j = 0; j < b.cols(); ++j) {
        const int ilo = std::max(0, j - b.upper());
        const int ihi = std::min(b.rows() - 1, j + b.lower());
        for (int i = ilo; i <= ihi; ++i) {
          const double v = b(i, j);
          if (v == 0.0) continue;
          out << (M.row_offset(bi) + i) << "," << (M.col_offset(bj) + j)
              << "," << fmt17(std::abs(v)) << "\n";
          ++nnz;
        }
      }
    }
  std::cout << kind << ": " << M.rows() << "x" << M.cols()
            << ", block-bandwidths (" << M.block_lower() << ","
            << M.block_upper() << "), sub-block-bandwidths (" << M.sub_lower()
            << "," << M.sub_upper() << "), " << nnz << " stored nonzeros\n"
            << "wrote " << out_path << "\n";
  return 0;
}

int cmd_bench(const std::vector<int>& sizes, double alpha, double k_wave,
              const std::string& out_path) {
  std::vector<double> seconds;
  for (int N : sizes) {
    PdeProblem prob;
    prob.kind = PdeProblem::Kind::Helmholtz;
    prob.alpha = alpha;
    prob.N = N;
    prob.k_wave = k_wave;
    prob.v = [](const CapPoint& p) { return std::cos(p.z); };
    prob.f = poisson_fig_rhs(alpha);
    const auto t0 = std::chrono::steady_clock::now();
    const PdeSolution sol = solve_helmholtz(prob);
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    seconds.push_back(dt);
    std::cout << "N=" << N << "  " << dt << " s  residual "
              << fmt17(sol.residual_norm)
              << (sol.decoupled ? "  (per-mode)" : "  (coupled)") << "\n";
  }

  std::ofstream out(out_path);
  if (!out) throw InputError("cannot open " + out_path + " for writing");
  out << "N,seconds\n";
  for (size_t i = 0; i < sizes.size(); ++i)
    out << sizes[i] << "," << fmt17(seconds[i]) << "\n";
  std::cout << "wrote " << out_path << "\n";

  if (sizes.size() >= 2) {
    // least-squares slope of log(t) against log(N)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(sizes.size());
    for (int i = 0; i < n; ++i) {
      const double lx = std::log(double(sizes[i]));
      const double ly = std::log(std::max(seconds[i], 1e-9));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    std::cout << "log-log slope " << slope << "\n";
  }
  return 0;
}

int cmd_expand(const std::string& fname, double alpha, int a, int N,
               double eps, const std::string& out_path) {
  const CoefficientVector c =
      expand(named_rhs(fname, alpha, eps), {alpha, a, N});
  write_coeffs(c, out_path);
  std::cout << "wrote " << out_path << " (" << c.values.size()
            << " coefficients)\n";
  return 0;
}

int cmd_eval(const std::string& coeff_path, const std::string& points_path,
             const std::string& out_path) {
  const CoefficientVector c = read_coeffs(coeff_path);
  CapBasis basis(c.spec);

  std::ifstream in(points_path);
  if (!in) throw InputError("cannot open " + points_path);
  std::ofstream out(out_path);
  if (!out) throw InputError("cannot open " + out_path + " for writing");
  out << "x,y,z,value\n";

  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    CapPoint p;
    char comma;
    std::istringstream ss(line);
    if (!(ss >> p.x >> comma >> p.y >> comma >> p.z))
      throw InputError("malformed point at row " + std::to_string(row));
    if (!on_cap(p, c.spec.alpha, 1e-10))
      throw InputError("point at row " + std::to_string(row) +
                       " is not on the cap");
    out << fmt17(p.x) << "," << fmt17(p.y) << "," << fmt17(p.z) << ","
        << fmt17(basis.evaluate(c, p)) << "\n";
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse spectral solver for PDEs on spherical caps"};
  app.require_subcommand(1);

  double alpha = 0.2, k_wave = 0.0, eps = 0.1;
  int N = 20, a = 0, atilde = 2;
  std::string rhs = "paper-fig3", vname = "paper-fig4", boundary = "none";
  std::string out = "sphcap-run", path, coeffs, points;
  std::string sizes_arg = "50,100,200";

  auto* solve = app.add_subcommand("solve", "solve a PDE benchmark");
  std::string kind;
  solve->add_option("kind", kind, "poisson | helmholtz | biharmonic")
      ->required()
      ->check(CLI::IsMember({"poisson", "helmholtz", "biharmonic"}));
  solve->add_option("--alpha", alpha, "cap boundary height");
  solve->add_option("--N", N, "truncation degree")->required();
  solve->add_option("--rhs", rhs,
                    "right-hand side: paper-fig3|paper-fig4|paper-fig5|"
                    "eps-family|gauss-family|one|zero or a coefficient file");
  solve->add_option("--v", vname,
                    "Helmholtz coefficient: paper-fig4|cos-z|one");
  solve->add_option("--k", k_wave, "Helmholtz wavenumber");
  solve->add_option("--eps", eps, "family parameter for eps/gauss right sides");
  solve->add_option("--boundary", boundary, "Dirichlet data: none | cos-theta");
  solve->add_option("--out", out, "output file prefix");

  auto* spy = app.add_subcommand("spy", "export an operator sparsity pattern");
  std::string opkind;
  spy->add_option("kind", opkind,
                  "dtheta|dphi|wphi|laplacian|weighted-laplacian|laplacian-w1|"
                  "convert-up|convert-down|rho2-laplacian|biharmonic")
      ->required();
  spy->add_option("--alpha", alpha, "cap boundary height");
  spy->add_option("--N", N, "truncation degree")->required();
  spy->add_option("--a", a, "input-space parameter");
  spy->add_option("--atilde", atilde, "parameter step");
  spy->add_option("--out", path, "output csv")->required();

  auto* bench = app.add_subcommand(
      "bench", "time build+solve of the rotationally invariant Helmholtz");
  bench->add_option("--N", sizes_arg, "comma-separated truncation degrees")
      ->required();
  bench->add_option("--alpha", alpha, "cap boundary height");
  bench->add_option("--k", k_wave, "Helmholtz wavenumber");
  bench->add_option("--out", path, "output csv")->required();

  auto* expandc = app.add_subcommand("expand", "expand a function");
  std::string fname;
  expandc->add_option("--f", fname, "function name or coefficient file")
      ->required();
  expandc->add_option("--alpha", alpha, "cap boundary height");
  expandc->add_option("--a", a, "basis parameter");
  expandc->add_option("--N", N, "truncation degree")->required();
  expandc->add_option("--eps", eps, "family parameter");
  expandc->add_option("--out", path, "output json")->required();

  auto* evalc = app.add_subcommand("eval", "evaluate coefficients at points");
  evalc->add_option("--coeffs", coeffs, "coefficient json")->required();
  evalc->add_option("--points", points, "csv of cap points x,y,z")->required();
  evalc->add_option("--out", path, "output csv")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return cmd_solve(kind, alpha, N, rhs, vname, k_wave, eps, boundary, out);
    if (spy->parsed()) return cmd_spy(opkind, alpha, a, atilde, N, path);
    if (bench->parsed()) {
      std::vector<int> sizes;
      std::stringstream ss(sizes_arg);
      std::string tok;
      while (std::getline(ss, tok, ',')) sizes.push_back(std::stoi(tok));
      if (sizes.empty()) throw InputError("bench needs at least one N");
      return cmd_bench(sizes, alpha, k_wave, path);
    }
    if (expandc->parsed()) return cmd_expand(fname, alpha, a, N, eps, path);
    if (evalc->parsed()) return cmd_eval(coeffs, points, path);
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const SingularSystemError& e) {
    std::cerr << "solver error: " << e.what() << " (mode " << e.mode()
              << ")\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  return 1;
}
