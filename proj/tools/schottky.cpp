#include <chrono>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include <schottky/verify.hpp>

#include "report.hpp"

using namespace schottky;
using namespace schottky::cli;

namespace {

struct VerifyArgs
{
  int seeds = 0;  // 0 keeps the config value
  unsigned threads = 0;
  std::string out, csv, config, baselines = SCHOTTKY_DEFAULT_BASELINES;
  bool bless = false;
};

void write_text(const std::string& path, const std::string& text)
{
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::invalid_argument, "cannot write " + path);
  f << text;
}

void emit(const Report& rep, const std::string& out, const std::string& csv)
{
  const std::string text = rep.to_json().dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    write_text(out, text);
  if (!csv.empty()) write_text(csv, rep.to_csv());
}

verify::Config config_for(const VerifyArgs& a)
{
  auto cfg = load_config(a.config);
  if (a.seeds != 0) cfg.seeds = a.seeds;
  if (a.threads != 0) cfg.threads = a.threads;
  if (!cfg.klein_baseline && !a.bless) cfg.klein_baseline = load_klein_baseline(a.baselines);
  verify::validate(cfg);
  return cfg;
}

void bless(const Report& rep, const std::string& path)
{
  for (const auto& s : rep.suites)
    for (const auto& c : s.checks)
      if (c.ref == "klein-formula" && c.value) {
        const Real re = c.value->real();
        const auto f4 = schottky_igusa(SiegelPoint::scalar(4, Complex(0, 0.8)));
        json j = {{"klein_ratio_median",
                   {{"value", {re, 0.0}},
                    {"tolerance", rep.config.klein_tol},
                    {"note", "real part of the median of (det S_4)^2 / chi_68 over projected seeds 1.." +
                                 std::to_string(rep.config.seeds) + "; compared at klein_tol"}}},
                  {"f4_diagonal_0.8i",
                   {{"value", cli::to_json(f4.value)},
                    {"residual", f4.residual()},
                    {"note", "F_4(0.8i I_4): a product of elliptic curves, so only rounding noise is expected; recorded, "
                             "not compared"}}}};
        write_text(path, j.dump(2) + "\n");
        return;
      }
  throw Error(ErrorCode::not_found, "no Klein median to bless");
}

int run_verify(const std::string& name, const std::vector<int>& ids, const VerifyArgs& a)
{
  Report rep;
  rep.command = "verify " + name;
  rep.config = config_for(a);
  verify::Context ctx(rep.config);
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& spec : verify::suites())
    if (ids.empty() || std::find(ids.begin(), ids.end(), spec.id) != ids.end()) {
      rep.suites.push_back(verify::run_suite(spec, ctx));
      const auto& r = rep.suites.back();
      std::cerr << (r.pass() ? "pass " : "FAIL ") << r.id << " " << r.name << "\n";
    }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(rep, a.out, a.csv);
  if (a.bless) bless(rep, a.baselines);
  return rep.pass() ? exit_pass : exit_failed;
}

CMatrix parse_matrix(const std::string& text, int g)
{
  const auto parts = split(text);
  std::vector<Complex> v;
  for (const auto& p : parts) v.push_back(parse_complex(p));
  CMatrix z(g, g);
  if (v.size() == std::size_t(g * g)) {
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) z(i, j) = v[std::size_t(i * g + j)];
  } else if (v.size() == std::size_t(g * (g + 1) / 2)) {
    std::size_t k = 0;
    for (int i = 0; i < g; ++i)
      for (int j = i; j < g; ++j) z(i, j) = z(j, i) = v[k++];
  } else {
    throw Error(ErrorCode::invalid_argument, "--Z needs g*g entries or the g(g+1)/2 upper-triangle entries");
  }
  return z;
}

int theta_eval(int g, const std::string& chr, const std::string& zs, const std::string& zz, Real eps)
{
  if (g < 1 || g > 16) throw Error(ErrorCode::invalid_argument, "--g must be in 1..16");
  const auto bits = split(chr);
  if (bits.size() != std::size_t(2 * g)) throw Error(ErrorCode::invalid_argument, "--char needs 2g bits: a_1..a_g,b_1..b_g");
  std::vector<int> a, b;
  for (int i = 0; i < 2 * g; ++i) {
    const Real x = parse_real(bits[std::size_t(i)]);
    (i < g ? a : b).push_back(static_cast<int>(x));
    if (x != 0 && x != 1) throw Error(ErrorCode::invalid_argument, "characteristic bits must be 0 or 1");
  }
  const auto d = HalfCharacteristic::from_bits(a, b);
  CVector z = CVector::Zero(g);
  if (!zs.empty()) {
    const auto parts = split(zs);
    if (parts.size() == 1 && g > 1 && parse_complex(parts[0]) == Complex(0)) {
      // "--z 0" means the origin in any genus
    } else {
      if (parts.size() != std::size_t(g)) throw Error(ErrorCode::invalid_argument, "--z needs g entries");
      for (int i = 0; i < g; ++i) z(i) = parse_complex(parts[std::size_t(i)]);
    }
  }
  if (!(eps > 0)) throw Error(ErrorCode::invalid_argument, "--eps must be positive");
  const auto point = SiegelPoint::from_matrix(parse_matrix(zz, g));
  const auto jet = theta_jet(d, z, point, eps);
  json j = {{"characteristic", d.to_string()},
            {"parity", d.parity()},
            {"value", cli::to_json(jet.value)},
            {"grad", cli::to_json(jet.grad)},
            {"hess", cli::to_json(jet.hess)},
            {"err_bound", jet.err_bound},
            {"abs_sum", jet.abs_sum},
            {"radius", jet.radius},
            {"terms", jet.terms},
            {"eps", eps},
            {"version", SCHOTTKY_VERSION}};
  std::cout << j.dump(2) << "\n";
  return exit_pass;
}

int locus_project(std::uint64_t seed, const std::string& zz, const VerifyArgs& a)
{
  const auto cfg = config_for(a);
  ProjectionOptions opts;
  opts.tol = cfg.locus_tol;
  opts.eps = cfg.theta_eps;
  const auto start = zz.empty() ? random_siegel_point(seed, 4, cfg.im_low, cfg.im_high) : SiegelPoint::from_matrix(parse_matrix(zz, 4));
  const auto p = project_to_schottky(start, opts, seed);
  Report rep;
  rep.command = "locus project";
  rep.config = cfg;
  verify::SuiteResult s;
  s.id = 6;
  s.name = "Schottky projection";
  auto rec = verify::at_most("|F_4|/scale after " + std::to_string(p.iterations()) + " iterations", "schottky-projection",
                             p.residual, cfg.locus_tol);
  s.checks.push_back(rec);
  rep.suites.push_back(s);
  json log = json::array();
  for (const auto& r : p.log)
    log.push_back({{"iteration", r.iteration}, {"t", cli::to_json(r.t)}, {"residual", r.residual}, {"halvings", r.halvings}});
  rep.extra = {{"seed", seed}, {"start", cli::to_json(start.matrix())}, {"tau", cli::to_json(p.tau.matrix())}, {"log", log}};
  emit(rep, a.out, a.csv);
  return rep.pass() ? exit_pass : exit_failed;
}

int locus_singular(std::uint64_t seed, const VerifyArgs& a)
{
  const auto cfg = config_for(a);
  ProjectionOptions popts;
  popts.tol = cfg.locus_tol;
  popts.eps = cfg.theta_eps;
  const auto p = project_seed(seed, cfg.im_low, cfg.im_high, popts);
  SingularSearchOptions opts;
  opts.tol = cfg.singular_tol;
  opts.eps = cfg.theta_eps;
  const auto found = find_theta_singularity(p.tau, opts);
  const auto s = s4_matrix(p.tau, cfg.theta_eps);
  const auto sigma = sigma_matrix(found.best.e, p.tau, cfg.theta_eps);
  const auto prop = verify_proportionality(s, sigma, cfg.proportionality_tol);
  Report rep;
  rep.command = "locus singular";
  rep.config = cfg;
  verify::SuiteResult r;
  r.id = 8;
  r.name = "singular theta point and proportionality";
  r.checks.push_back(verify::at_most("singular point residual", "theta-singularity", found.best.residual, cfg.singular_tol));
  r.checks.push_back(verify::at_most("S_4 vs sigma minors", "hessian-proportionality", prop.residual, cfg.proportionality_tol));
  rep.suites.push_back(r);
  rep.extra = {{"seed", seed},
               {"tau", cli::to_json(p.tau.matrix())},
               {"e", cli::to_json(found.best.e)},
               {"starts_tried", found.starts_tried},
               {"lambda", cli::to_json(prop.lambda)},
               {"sigma", cli::to_json(sigma.matrix())},
               {"s4", cli::to_json(s.matrix())}};
  emit(rep, a.out, a.csv);
  return rep.pass() ? exit_pass : exit_failed;
}

std::vector<Real> read_branch_points(const std::string& list, const std::string& file)
{
  std::vector<Real> e;
  if (!file.empty()) {
    const auto j = read_json_file(file);
    const auto& arr = j.is_object() ? j.at("branch_points") : j;
    for (const auto& x : arr) e.push_back(x.get<Real>());
  } else {
    for (const auto& s : split(list)) e.push_back(parse_real(s));
  }
  return e;
}

int hyperelliptic_tau(const std::vector<Real>& e, const VerifyArgs& a)
{
  const auto cfg = config_for(a);
  const auto r = period_matrix(HyperellipticCurve(e));
  const int g = r.tau.genus();
  Report rep;
  rep.command = "hyperelliptic tau";
  rep.config = cfg;
  verify::SuiteResult s;
  s.id = g == 1 ? 10 : 9;
  s.name = g == 1 ? "genus-1 period cross-check" : "hyperelliptic period matrix";
  s.checks.push_back(verify::at_most("tau symmetry defect", "hyperelliptic-periods", r.symmetry_defect, cfg.hyper_symmetry_tol));
  json data = {{"branch_points", e},
               {"genus", g},
               {"tau", cli::to_json(r.tau.matrix())},
               {"quad_order", r.quad_order},
               {"quad_change", r.quad_change}};
  if (g == 1) {
    ThetaSeries ts(r.tau, ThetaOptions{cfg.theta_eps});
    const Complex lambda = std::pow(ts.jet({1, 1, 0}, CVector::Zero(1), 0).value / ts.jet({1, 0, 0}, CVector::Zero(1), 0).value, 4);
    const Real cross = ((e[0] - e[1]) * (e[2] - e[3])) / ((e[0] - e[2]) * (e[1] - e[3]));
    s.checks.push_back(verify::at_most("lambda(tau) vs cross-ratio", "genus-one-periods", std::abs(lambda - cross), cfg.cross_ratio_tol));
    data["lambda"] = cli::to_json(lambda);
    data["cross_ratio"] = cross;
  } else {
    const auto split = vanishing_thetanulls(r.tau, cfg.thetanull_floor, cfg.thetanull_ceiling, cfg.theta_eps);
    data["vanishing_thetanulls"] = split.count();
    json chars = json::array();
    for (const auto& d : split.vanishing) chars.push_back(d.to_string());
    data["vanishing_characteristics"] = chars;
    data["f_residual"] = schottky_igusa(r.tau, cfg.theta_eps).residual();
  }
  rep.suites.push_back(s);
  rep.extra = data;
  emit(rep, a.out, a.csv);
  return rep.pass() ? exit_pass : exit_failed;
}

int bench_theta(std::vector<int> genera, std::vector<Real> epsilons, int reps, const std::string& csv)
{
  if (genera.empty()) genera = {1, 2, 3, 4};
  if (epsilons.empty()) epsilons = {1e-6, 1e-9, 1e-13};
  if (reps < 1) throw Error(ErrorCode::invalid_argument, "--reps must be positive");
  json rows = json::array();
  std::ostringstream table;
  table << "g,eps,terms,evals_per_second\n";
  for (int g : genera)
    for (Real eps : epsilons) {
      if (!(eps > 0)) throw Error(ErrorCode::invalid_argument, "--eps must be positive");
      const auto z = random_siegel_point(1, g, 0.5, 0.9);
      const ThetaSeries series(z, ThetaOptions{eps});
      std::mt19937_64 rng(3);
      std::uniform_real_distribution<Real> u(-0.3, 0.3);
      std::size_t terms = 0;
      Complex sink = 0;
      const auto t0 = std::chrono::steady_clock::now();
      for (int r = 0; r < reps; ++r) {
        CVector zv(g);
        for (int i = 0; i < g; ++i) zv(i) = Complex(u(rng), u(rng));
        const auto jet = series.jet({g, 0, 0}, zv, 0);
        terms = jet.terms;
        sink += jet.value;
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const double rate = reps / std::max(secs, 1e-9);
      rows.push_back({{"g", g}, {"eps", eps}, {"terms", terms}, {"evals_per_second", rate}, {"checksum", cli::to_json(sink)}});
      table << g << ',' << eps << ',' << terms << ',' << rate << '\n';
    }
  std::cout << json{{"command", "bench theta"}, {"version", SCHOTTKY_VERSION}, {"rows", rows}}.dump(2) << "\n";
  if (!csv.empty()) write_text(csv, table.str());
  return exit_pass;
}

void add_report_flags(CLI::App* cmd, VerifyArgs& a)
{
  cmd->add_option("--out", a.out, "report JSON path (default stdout)");
  cmd->add_option("--csv", a.csv, "CSV summary path");
  cmd->add_option("--config", a.config, std::string("config JSON (default from $") + config_env + ")");
  cmd->add_option("--baselines", a.baselines, "baselines JSON");
  cmd->add_option("--threads", a.threads, "worker threads");
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Siegel theta functions and the Schottky locus in genus 4"};
  app.set_version_flag("--version", SCHOTTKY_VERSION);
  app.require_subcommand(1);
  std::function<int()> action;

  auto* theta = app.add_subcommand("theta", "theta functions")->require_subcommand(1);
  auto* eval = theta->add_subcommand("eval", "evaluate theta[char](z, Z) and its derivatives");
  int g = 1;
  std::string chr, zs, zz;
  Real eps = 1e-13;
  eval->add_option("--g", g, "genus")->required();
  eval->add_option("--char", chr, "characteristic bits a_1..a_g,b_1..b_g")->required();
  eval->add_option("--z", zs, "z entries, comma separated (default 0)");
  eval->add_option("--Z", zz, "Z entries, row-major or upper triangle")->required();
  eval->add_option("--eps", eps, "truncation tolerance");
  eval->callback([&] { action = [&] { return theta_eval(g, chr, zs, zz, eps); }; });

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "verification suites")->require_subcommand(1);
  const std::vector<std::tuple<std::string, std::string, std::vector<int>>> verify_cmds = {
      {"all", "every acceptance suite", {}},
      {"klein", "Klein formula survey", {7}},
      {"modularity", "modular transformation laws", {12}},
      {"lattice-identity", "lattice theta difference identity", {5}}};
  for (const auto& [name, help, ids] : verify_cmds) {
    auto* cmd = ver->add_subcommand(name, help);
    add_report_flags(cmd, va);
    cmd->add_option("--seeds", va.seeds, "number of projection seeds (1..k)");
    if (name == "all" || name == "klein") cmd->add_flag("--bless", va.bless, "write the measured Klein median to the baselines file");
    cmd->callback([&, name = name, ids = ids] { action = [&, name, ids] { return run_verify(name, ids, va); }; });
  }

  auto* locus = app.add_subcommand("locus", "Schottky locus tools")->require_subcommand(1);
  std::uint64_t seed = 1;
  auto* proj = locus->add_subcommand("project", "project a point onto F_4 = 0");
  proj->add_option("--seed", seed, "random start seed");
  proj->add_option("--Z", zz, "explicit start point (overrides --seed)");
  add_report_flags(proj, va);
  proj->callback([&] { action = [&] { return locus_project(seed, zz, va); }; });
  auto* sing = locus->add_subcommand("singular", "singular theta point and S_4 proportionality at a projected seed");
  sing->add_option("--seed", seed, "projection seed");
  add_report_flags(sing, va);
  sing->callback([&] { action = [&] { return locus_singular(seed, va); }; });

  auto* hyper = app.add_subcommand("hyperelliptic", "hyperelliptic curves")->require_subcommand(1);
  auto* tau = hyper->add_subcommand("tau", "period matrix of y^2 = prod (x - e_i)");
  std::string bp, bp_file;
  auto* bp_opt = tau->add_option("--branch-points", bp, "real branch points, comma separated");
  tau->add_option("--file", bp_file, "JSON file with branch points")->excludes(bp_opt);
  add_report_flags(tau, va);
  tau->callback([&] {
    action = [&] {
      if (bp.empty() && bp_file.empty()) throw Error(ErrorCode::invalid_argument, "need --branch-points or --file");
      return hyperelliptic_tau(read_branch_points(bp, bp_file), va);
    };
  });

  auto* bench = app.add_subcommand("bench", "throughput measurements")->require_subcommand(1);
  auto* bt = bench->add_subcommand("theta", "theta evaluations per second by genus and eps");
  std::vector<int> genera;
  std::vector<Real> epsilons;
  int reps = 200;
  std::string bench_csv;
  bt->add_option("--g", genera, "genera");
  bt->add_option("--eps", epsilons, "truncation tolerances");
  bt->add_option("--reps", reps, "evaluations per row");
  bt->add_option("--csv", bench_csv, "CSV table path");
  bt->callback([&] { action = [&] { return bench_theta(genera, epsilons, reps, bench_csv); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    return action();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }
}
