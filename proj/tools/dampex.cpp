// dampex: command-line front end for moments, spectral evaluation,
// expansion polynomials, region norms and report campaigns.
//
// Exit status: 0 success, 1 a report check failed, 2 usage or runtime error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dampex/dampex.hpp"

using namespace dampex;

namespace {

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad ") + what + " entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(std::string(what) + " list is empty");
  return out;
}

/// lo:hi:count per axis, comma separated; a single spec applies to every axis.
std::vector<std::vector<double>> parse_xi_grid(const std::string& s, int n) {
  std::vector<std::vector<double>> axes;
  std::stringstream ss(s);
  std::string spec;
  while (std::getline(ss, spec, ',')) {
    double lo, hi;
    long count;
    char c1, c2;
    std::istringstream in(spec);
    if (!(in >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1 || !in.eof())
      throw ConfigError("bad xi-grid '" + spec + "' (expected lo:hi:count)");
    std::vector<double> axis(count);
    for (long i = 0; i < count; ++i) axis[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    axes.push_back(axis);
  }
  if (axes.size() == 1) axes.resize(n, axes.front());
  if (static_cast<int>(axes.size()) != n)
    throw ConfigError("xi-grid needs 1 or " + std::to_string(n) + " axis specs");
  return axes;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

const InitialDatum& pick(const DataConfig& d, const SpectralSolution& sol, const std::string& which) {
  if (which == "u0") return d.u0;
  if (which == "u1") return d.u1;
  return sol.v();
}

int run_moments(const std::string& data, int max_order, const std::vector<double>& gammas,
                const std::string& which, double tol, const std::string& out) {
  const DataConfig d = load_data_config(data);
  const SpectralSolution sol(d.u0, d.u1);
  const InitialDatum& v = pick(d, sol, which);
  quad::AdaptiveOptions opt;
  opt.relative_tolerance = tol;
  const MomentTable table = moment_table(v, max_order, gammas, opt);
  Json moments = Json::array();
  for (const auto& [alpha, e] : table.entries())
    moments.push_back(Json{{"alpha", alpha.to_vector()}, {"value", e.value}, {"raw", e.raw}, {"exact_zero", e.exact_zero}});
  Json norms = Json::object();
  for (const auto& [g, w] : table.weighted_norms()) norms[fmt(g)] = w;
  const Json j{{"datum", which}, {"dimension", table.dimension()}, {"order", table.order()},
               {"normalization", "(-1)^|alpha| / alpha! * int x^alpha v dx"},
               {"moments", moments}, {"weighted_norms", norms}};
  write_text(out, j.dump(2) + "\n");
  return 0;
}

int run_solve(const std::string& data, const std::string& ts, const std::string& grid, const std::string& rep,
              const std::string& out) {
  const DataConfig d = load_data_config(data);
  const SpectralSolution sol(d.u0, d.u1);
  const Representation r = representation_from_string(rep);
  const auto times = parse_list(ts, "t");
  const auto axes = parse_xi_grid(grid, d.dimension);
  const int n = d.dimension;
  std::ostringstream os;
  os << "t";
  for (int j = 0; j < n; ++j) os << ",xi" << j + 1;
  os << ",re,im\n";
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> xi(n);
  for (double t : times) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      for (int j = 0; j < n; ++j) xi[j] = axes[j][idx[j]];
      const Complex u = sol.evaluate(t, xi, r);
      os << fmt(t);
      for (double x : xi) os << ',' << fmt(x);
      os << ',' << fmt(u.real()) << ',' << fmt(u.imag()) << '\n';
      int j = n - 1;
      while (j >= 0 && ++idx[j] == axes[j].size()) idx[j--] = 0;
      if (j < 0) break;
    }
  }
  write_text(out, os.str());
  return 0;
}

int run_expansion(const std::string& data, const std::string& kind_s, int k, const std::string& print,
                  double t, const std::string& out) {
  const DataConfig d = load_data_config(data);
  const SpectralSolution sol(d.u0, d.u1);
  const ExpansionKind kind = expansion_kind_from_string(kind_s);
  const MomentTable table = MomentTable::from_datum(sol.v(), std::max(k, 0));
  const ExpansionPolynomial p = build(kind, k, table);
  Json j{{"kind", to_string(kind)}, {"k", k}, {"dimension", d.dimension},
         {"structurally_zero", p.is_structurally_zero()}};
  Json terms = Json::array();
  if (print == "terms") {
    for (const auto& term : p.terms())
      terms.push_back(Json{{"coefficient", {term.coefficient.real(), term.coefficient.imag()}},
                           {"moment", term.moment()},
                           {"radial_power", term.radial_power},
                           {"alpha", term.alpha.to_vector()}});
    j["form"] = "coefficient * |xi|^radial_power * xi^alpha";
    Json kernel = Json::array();
    if (t > 0.0) {
      const auto ks = inverse_transform_description(p, t);
      for (const auto& kt : ks.terms)
        kernel.push_back(Json{{"moment", kt.moment}, {"laplacian_power", kt.laplacian_power},
                              {"derivative", kt.derivative.to_vector()}});
      j["physical_space"] = Json{{"t", t}, {"terms", kernel}, {"text", ks.to_string()}};
    }
  } else if (print == "canonical") {
    for (const auto& [beta, c] : p.canonical().coefficients())
      terms.push_back(Json{{"coefficient", {c.real(), c.imag()}}, {"beta", beta.to_vector()}});
    j["form"] = "coefficient * xi^beta";
  } else {
    throw ConfigError("--print must be terms or canonical");
  }
  j["terms"] = terms;
  write_text(out, j.dump(2) + "\n");
  return 0;
}

int run_norm(const std::string& data, const std::string& ts, int k, const std::string& region_s, double tol,
             const std::string& out, std::string format) {
  const DataConfig d = load_data_config(data);
  const SpectralSolution sol(d.u0, d.u1);
  const auto region = FrequencyRegion::parse(d.dimension, region_s);
  NormOptions opt;
  opt.tolerance = tol;
  if (format.empty()) format = out.size() >= 4 && out.substr(out.size() - 4) == ".csv" ? "csv" : "json";
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "t,k,region,value,error_estimate,evaluations\n";
  for (double t : parse_list(ts, "t")) {
    const RegionNorm r = residual_norm(sol, t, k, region, opt);
    rows.push_back(Json{{"t", t}, {"value", r.value}, {"error_estimate", r.error_estimate},
                        {"evaluations", r.evaluations}});
    csv << fmt(t) << ',' << k << ',' << region.to_string() << ',' << fmt(r.value) << ','
        << fmt(r.error_estimate) << ',' << r.evaluations << '\n';
  }
  if (format == "csv") {
    write_text(out, csv.str());
  } else if (format == "json") {
    const Json j{{"quantity", "||u^(t) - A_{k-1} e^{-t|xi|^2}||_2"}, {"k", k}, {"region", region.to_string()},
                 {"tolerance", tol}, {"norms", rows}};
    write_text(out, j.dump(2) + "\n");
  } else {
    throw ConfigError("--format must be json or csv");
  }
  return 0;
}

int run_report_cmd(const std::string& config, const std::string& out_dir, const std::optional<std::uint64_t>& seed) {
  ReportConfig cfg = load_report_config(config);
  if (seed) cfg.seed = *seed;
  const ReportOutcome r = run_report(cfg, out_dir);
  std::cout << "report: " << r.checks - r.failures << "/" << r.checks << " items passed, summary in "
            << (std::filesystem::path(out_dir) / "summary.json").string() << "\n";
  return r.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Damped wave equation: asymptotic expansion and decay-rate verification"};
  app.require_subcommand(1);

  std::string data, out, which = "v";
  int max_order = 4;
  std::vector<double> gammas;
  double tol = 1e-10;
  auto* moments = app.add_subcommand("moments", "Moment table of v = u0 + u1 as JSON");
  moments->add_option("--data", data, "Data config (JSON)")->required()->check(CLI::ExistingFile);
  moments->add_option("--max-order", max_order, "Largest |alpha|")->check(CLI::Range(0, 40));
  moments->add_option("--gamma", gammas, "Weighted L1 exponents to include");
  moments->add_option("--datum", which, "v, u0 or u1")->check(CLI::IsMember({"v", "u0", "u1"}));
  moments->add_option("--tol", tol, "Quadrature tolerance for weighted norms");
  moments->add_option("--out", out, "Output file ('-' for stdout)");

  std::string ts = "1", grid = "0:2:5", rep = "auto";
  auto* solve = app.add_subcommand("solve", "Evaluate u^(t, xi) on a grid as CSV");
  solve->add_option("--data", data, "Data config (JSON)")->required()->check(CLI::ExistingFile);
  solve->add_option("--t", ts, "Comma-separated times");
  solve->add_option("--xi-grid", grid, "lo:hi:count per axis, comma separated");
  solve->add_option("--rep", rep, "auto|mode_split|data_split|mode_split_high|regularized (or 2.1..2.4)");
  solve->add_option("--out", out, "Output CSV ('-' for stdout)");

  std::string kind = "B", print = "terms";
  int k = 0;
  double kernel_t = 0.0;
  auto* expansion = app.add_subcommand("expansion", "Expansion polynomial A_k, B_k, C_k or T_k as JSON");
  expansion->add_option("--data", data, "Data config (JSON)")->required()->check(CLI::ExistingFile);
  expansion->add_option("--kind", kind, "A|B|C|T");
  expansion->add_option("--k", k, "Order");
  expansion->add_option("--print", print, "terms|canonical");
  expansion->add_option("--kernel-t", kernel_t, "Also list the Gauss-kernel derivative form at this t");
  expansion->add_option("--out", out, "Output file ('-' for stdout)");

  std::string region = "full", format;
  double norm_tol = 1e-8;
  auto* norm = app.add_subcommand("norm", "Residual norms ||u^(t) - A_{k-1} e^{-t|xi|^2}|| over a region");
  norm->add_option("--data", data, "Data config (JSON)")->required()->check(CLI::ExistingFile);
  norm->add_option("--t", ts, "Comma-separated times");
  norm->add_option("--k", k, "Expansion order k (residual against A_{k-1})");
  norm->add_option("--region", region, "ball:r | annulus:a,b | ext:r | full");
  norm->add_option("--tol", norm_tol, "Relative tolerance on the squared norm");
  norm->add_option("--out", out, "Output file ('-' for stdout)");
  norm->add_option("--format", format, "json|csv (default from --out extension)");

  std::string config, out_dir = "report";
  std::optional<std::uint64_t> seed;
  auto* report = app.add_subcommand("report", "Run a verification campaign");
  report->add_option("--config", config, "Report config (JSON)")->required()->check(CLI::ExistingFile);
  report->add_option("--out-dir", out_dir, "Output directory");
  report->add_option("--seed", seed, "Seed for random property samples");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*moments) return run_moments(data, max_order, gammas, which, tol, out);
    if (*solve) return run_solve(data, ts, grid, rep, out);
    if (*expansion) return run_expansion(data, kind, k, print, kernel_t, out);
    if (*norm) return run_norm(data, ts, k, region, norm_tol, out, format);
    if (*report) return run_report_cmd(config, out_dir, seed);
  } catch (const std::exception& e) {
    std::cerr << "dampex: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
