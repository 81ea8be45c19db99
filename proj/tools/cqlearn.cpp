// cqlearn: run learners on generated instances, verify instance files, export instances.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cqlearn/experiment.hpp"
#include "cqlearn/io.hpp"

namespace {

using namespace cqlearn;

struct RunArgs {
  std::string mode;
  std::string kind;
  bool grid = false;
  bool margin = false;
  std::uint64_t N = 16;
  std::size_t d = 3;
  std::size_t n = 1000;
  std::string eta = "1/8";
  double eps = 0.1;
  double delta = 0.1;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::size_t k = 0;
  std::size_t subsample = 30;
  std::size_t heldout = 10000;
  std::size_t jobs = 0;
  std::string out;
  std::vector<std::string> params;
};

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  T out{};
  if (!(is >> out) || !is.eof()) throw std::invalid_argument("bad value for " + key + ": '" + v + "'");
  return out;
}

/// Applies trailing key=value parameters, e.g. "N=16 d=3 trials=100".
void apply_params(RunArgs& a) {
  for (const auto& p : a.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("expected key=value, got '" + p + "'");
    const std::string key = p.substr(0, eq), v = p.substr(eq + 1);
    if (key == "N") a.N = parse_number<std::uint64_t>(key, v);
    else if (key == "d") a.d = parse_number<std::size_t>(key, v);
    else if (key == "n") a.n = parse_number<std::size_t>(key, v);
    else if (key == "eta") a.eta = v;
    else if (key == "eps") a.eps = parse_number<double>(key, v);
    else if (key == "delta") a.delta = parse_number<double>(key, v);
    else if (key == "trials") a.trials = parse_number<std::size_t>(key, v);
    else if (key == "seed") a.seed = parse_number<std::uint64_t>(key, v);
    else if (key == "k") a.k = parse_number<std::size_t>(key, v);
    else if (key == "subsample") a.subsample = parse_number<std::size_t>(key, v);
    else if (key == "heldout") a.heldout = parse_number<std::size_t>(key, v);
    else if (key == "jobs") a.jobs = parse_number<std::size_t>(key, v);
    else if (key == "kind") a.kind = v;
    else if (key == "out") a.out = v;
    else throw std::invalid_argument("unknown parameter '" + key + "'");
  }
}

ExperimentConfig to_config(const RunArgs& a) {
  ExperimentConfig cfg;
  cfg.mode = parse_mode(a.mode);
  if (a.grid && a.margin) throw std::invalid_argument("--grid and --margin are exclusive");
  cfg.kind = a.grid ? "grid" : a.margin ? "margin" : a.kind;
  if (cfg.kind.empty()) cfg.kind = cfg.mode == Mode::Witness ? "r3" : "grid";
  cfg.grid_n = a.N;
  cfg.d = a.d;
  cfg.n = a.n;
  cfg.eta = parse_rational(a.eta);
  cfg.eps = a.eps;
  cfg.delta = a.delta;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  if (a.k) cfg.k_override = a.k;
  cfg.subsample = a.subsample;
  cfg.heldout = a.heldout;
  cfg.validate();
  return cfg;
}

int cmd_run(RunArgs a) {
  apply_params(a);
  const auto cfg = to_config(a);
  const std::size_t jobs = a.jobs ? a.jobs : default_jobs();
  const auto rows = run_experiment(cfg, jobs);
  for (const auto& r : rows) {
    if (!r.diagnostics.empty()) std::cerr << "trial " << r.trial << ": " << r.diagnostics << '\n';
    if (r.heldout_error) std::cerr << "trial " << r.trial << ": heldout_error=" << *r.heldout_error << '\n';
  }
  if (a.out.empty() || a.out == "-") {
    write_csv(std::cout, cfg, rows);
  } else {
    std::ofstream f(a.out);
    if (!f) throw std::runtime_error("cannot open " + a.out + " for writing");
    write_csv(f, cfg, rows);
  }
  return exit_code(rows);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int verify_instance(const InstanceFile& file) {
  const Instance inst = to_instance(file);
  std::vector<std::string> problems;
  std::vector<PointId> ids(inst.pool.size());
  std::iota(ids.begin(), ids.end(), PointId{0});
  if (!inst.pool.empty()) {
    const auto sys = constraints_of(chain_transcript(inst.hidden, inst.pool, ids), inst.pool);
    if (!feasible(sys)) problems.push_back("labels and comparisons are not realizable");
  }
  if (inst.meta.kind == InstanceMeta::Kind::Grid) {
    for (std::size_t j = 0; j < inst.pool.size(); ++j)
      for (const auto& c : inst.pool[j])
        if (c.get_den() != 1 || sgn(c) < 0 || c > Rational(static_cast<unsigned long>(inst.meta.grid_n))) {
          problems.push_back("point " + std::to_string(j + 1) + " is not in [0, N]^d");
          break;
        }
  }
  if (inst.meta.kind == InstanceMeta::Kind::Margin) {
    const auto rep = margin_report(inst.hidden, inst.pool);
    std::cout << "minimal ratio " << rep.eta.get_str() << " (~" << rep.eta.get_d() << ")\n";
    if (rep.eta < inst.meta.eta)
      problems.push_back("minimal ratio " + rep.eta.get_str() + " below promised " + inst.meta.eta.get_str());
  }
  std::cout << "instance: d=" << file.dim << " n=" << inst.pool.size() << '\n';
  for (const auto& p : problems) std::cout << "  FAIL " << p << '\n';
  std::cout << (problems.empty() ? "ok\n" : "verification failed\n");
  return problems.empty() ? 0 : 1;
}

int cmd_verify(const std::string& path) {
  InstanceFile file;
  try {
    file = parse_instance_file(read_file(path));
  } catch (const ParseError& e) {
    std::cerr << path << ": parse error: " << e.what() << '\n';
    return 2;
  }
  if (file.concepts.empty()) {
    std::cout << "pool: d=" << file.dim << " n=" << file.pool.size() << " (no concept to verify)\n";
    return 0;
  }
  if (file.concepts.size() == 1) return verify_instance(file);
  const auto w = to_witness(file);
  const auto rep = verify_witness(w);
  std::cout << "witness: d=" << file.dim << " n=" << w.n() << " comparisons_checked=" << rep.comparisons_checked;
  if (w.kind == WitnessInstance::Kind::Margin)
    std::cout << " min_margin_sq=" << rep.min_margin_sq.get_str() << " (~" << rep.min_margin_sq.get_d() << ")";
  std::cout << '\n';
  for (const auto& v : rep.violations) std::cout << "  FAIL " << v << '\n';
  std::cout << (rep.clean() ? "clean\n" : "verification failed\n");
  return rep.clean() ? 0 : 1;
}

struct ExportArgs {
  std::string what;
  std::string kind = "r3";
  std::uint64_t N = 8;
  std::size_t d = 2;
  std::size_t n = 10;
  std::string eta = "1/8";
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_export(const ExportArgs& a) {
  std::string text;
  if (a.what == "witness") {
    if (a.kind != "r3" && a.kind != "margin") throw std::invalid_argument("witness kind must be r3 or margin");
    if (a.n < 2) throw std::invalid_argument("witness needs n >= 2");
    text = export_witness(a.kind == "r3" ? gen_lb_r3(a.n) : gen_lb_margin(a.n));
  } else if (a.what == "grid") {
    text = export_instance(gen_grid(a.N, a.d, a.n, a.seed));
  } else if (a.what == "margin") {
    text = export_instance(gen_margin(a.d, a.n, parse_rational(a.eta), a.seed));
  } else {
    throw std::invalid_argument("export target must be witness, grid or margin");
  }
  if (a.out.empty() || a.out == "-") {
    std::cout << text;
  } else {
    std::ofstream f(a.out);
    if (!f) throw std::runtime_error("cannot open " + a.out + " for writing");
    f << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active learning of half spaces with label and comparison queries"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run seeded trials and write one CSV row per trial");
  run_cmd->add_option("mode", run.mode, "learn2d | boost | statistical | witness | infdim-check")->required();
  run_cmd->add_option("params", run.params, "Extra key=value parameters (N=, d=, n=, trials=, seed=, ...)");
  run_cmd->add_option("--kind", run.kind, "Instance kind: grid | margin (boost), r3 | margin (witness)");
  run_cmd->add_flag("--grid", run.grid, "Shorthand for --kind grid");
  run_cmd->add_flag("--margin", run.margin, "Shorthand for --kind margin");
  run_cmd->add_option("--N", run.N, "Grid side N");
  run_cmd->add_option("-d,--d", run.d, "Dimension");
  run_cmd->add_option("-n,--n", run.n, "Pool size");
  run_cmd->add_option("--eta", run.eta, "Minimal ratio for margin instances (p/q)");
  run_cmd->add_option("--eps", run.eps, "Target error (statistical)");
  run_cmd->add_option("--delta", run.delta, "Failure probability (statistical)");
  run_cmd->add_option("--trials", run.trials, "Number of trials");
  run_cmd->add_option("--seed", run.seed, "Base seed");
  run_cmd->add_option("-k,--k", run.k, "Override the suggested inference dimension");
  run_cmd->add_option("--subsample", run.subsample, "Sample size per iteration (learn2d)");
  run_cmd->add_option("--heldout", run.heldout, "Held-out sample size (statistical)");
  run_cmd->add_option("-j,--jobs", run.jobs, "Worker threads (default: CQLEARN_JOBS or all cores)");
  run_cmd->add_option("-o,--out", run.out, "CSV output path (default: stdout)");

  std::string verify_path;
  auto* verify_cmd = app.add_subcommand("verify", "Parse an instance or witness file and verify it");
  verify_cmd->add_option("path", verify_path, "Instance file")->required();

  ExportArgs ex;
  auto* export_cmd = app.add_subcommand("export", "Write a generated instance in the text format");
  export_cmd->add_option("what", ex.what, "witness | grid | margin")->required();
  export_cmd->add_option("--kind", ex.kind, "Witness kind: r3 | margin");
  export_cmd->add_option("--N", ex.N, "Grid side N");
  export_cmd->add_option("-d,--d", ex.d, "Dimension");
  export_cmd->add_option("-n,--n", ex.n, "Pool size or witness size");
  export_cmd->add_option("--eta", ex.eta, "Minimal ratio (p/q)");
  export_cmd->add_option("--seed", ex.seed, "Seed");
  export_cmd->add_option("-o,--out", ex.out, "Output path (default: stdout)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return cmd_run(run);
    if (*verify_cmd) return cmd_verify(verify_path);
    if (*export_cmd) return cmd_export(ex);
  } catch (const Inconsistent& e) {
    std::cerr << "inconsistent: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
