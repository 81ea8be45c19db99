#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cqlearn/instances.hpp"
#include "cqlearn/learners.hpp"
#include "cqlearn/random.hpp"

namespace cqlearn {

enum class Mode : std::uint8_t { Learn2d, Boost, Statistical, Witness, InfdimCheck };

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::Learn2d: return "learn2d";
    case Mode::Boost: return "boost";
    case Mode::Statistical: return "statistical";
    case Mode::Witness: return "witness";
    case Mode::InfdimCheck: return "infdim-check";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  if (s == "learn2d") return Mode::Learn2d;
  if (s == "boost") return Mode::Boost;
  if (s == "statistical") return Mode::Statistical;
  if (s == "witness") return Mode::Witness;
  if (s == "infdim-check") return Mode::InfdimCheck;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

struct ExperimentConfig {
  Mode mode = Mode::Boost;
  std::string kind = "grid";  // grid | margin (boost); r3 | margin (witness)
  std::uint64_t grid_n = 16;
  std::size_t d = 3;
  std::size_t n = 1000;
  Rational eta{1, 8};
  double eps = 0.1;
  double delta = 0.1;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::optional<std::size_t> k_override;
  std::size_t subsample = 30;
  std::size_t heldout = 10000;

  void validate() const {
    auto need = [](bool ok, const char* msg) {
      if (!ok) throw std::invalid_argument(msg);
    };
    need(trials >= 1, "trials must be positive");
    need(!k_override || *k_override >= 1, "k must be positive");
    switch (mode) {
      case Mode::Learn2d:
        need(n >= 1, "n must be positive");
        need(subsample >= 1, "subsample must be positive");
        break;
      case Mode::Boost:
        need(kind == "grid" || kind == "margin", "boost needs --kind grid or margin");
        need(n >= 1 && d >= 1, "n and d must be positive");
        if (kind == "grid") need(grid_n >= 1, "N must be positive");
        else need(sgn(eta) > 0 && eta <= 1, "eta must lie in (0, 1]");
        break;
      case Mode::Statistical:
        need(kind == "grid", "statistical runs on grid distributions (--kind grid)");
        need(grid_n >= 1 && d >= 1, "N and d must be positive");
        need(eps > 0 && eps < 1 && delta > 0 && delta < 1, "eps and delta must lie in (0, 1)");
        need(heldout >= 1, "heldout must be positive");
        break;
      case Mode::Witness:
        need(kind == "r3" || kind == "margin", "witness needs --kind r3 or margin");
        need(n >= 2, "witness needs n >= 2");
        break;
      case Mode::InfdimCheck:
        need(grid_n >= 1 && d >= 1, "N and d must be positive");
        break;
    }
  }
};

/// One CSV row. Fields left unset print as empty cells.
struct TrialRow {
  std::size_t trial = 0;
  std::string mode;
  std::optional<std::size_t> d;
  std::string n_or_eta;
  std::optional<std::size_t> n;
  std::optional<std::size_t> k;
  std::optional<std::uint64_t> label_queries;
  std::optional<std::uint64_t> comparison_queries;
  std::optional<std::uint64_t> iterations;
  std::optional<std::uint64_t> resamples;
  std::size_t soundness_violations = 0;
  double wall_ms = 0;

  // Not part of the CSV.
  std::optional<double> heldout_error;
  std::vector<std::uint64_t> iteration_queries;
  std::vector<std::size_t> dis_sizes;
  std::string diagnostics;
  bool failed = false;
};

inline constexpr const char* kCsvColumns =
    "trial,mode,d,N_or_eta,n,k,label_queries,comparison_queries,total_queries,iterations,resamples,"
    "soundness_violations,wall_ms";

namespace detail {

/// n uniform points of the unit square at resolution 2^-20, lifted, with a random line through it.
inline Instance random_halfplane_instance(std::size_t n, Rng& rng) {
  constexpr std::uint64_t kRes = std::uint64_t{1} << 20;
  auto coord = [&] { return ratio(static_cast<unsigned long>(uniform_below(rng, kRes)), kRes); };
  Instance inst;
  inst.pool.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RationalVector x(3);
    x[0] = coord();
    x[1] = coord();
    x[2] = 1;
    inst.pool.push_back(std::move(x));
  }
  const Rational px = coord(), py = coord();
  long a = 0, b = 0;
  while (a == 0 && b == 0) {
    a = static_cast<long>(uniform_int(rng, -100, 100));
    b = static_cast<long>(uniform_int(rng, -100, 100));
  }
  inst.hidden = LinearConcept(RationalVector{Rational(a), Rational(b), Rational(-(a * px + b * py))});
  return inst;
}

inline void fill_from_report(TrialRow& row, const RunReport& rep) {
  row.label_queries = rep.stats.label_count;
  row.comparison_queries = rep.stats.compare_count;
  row.iterations = rep.iterations;
  row.resamples = rep.resamples;
  row.iteration_queries = rep.iteration_queries;
  row.dis_sizes = rep.dis_sizes;
}

}  // namespace detail

inline TrialRow run_trial(const ExperimentConfig& cfg, std::size_t trial) {
  TrialRow row;
  row.trial = trial;
  row.mode = to_string(cfg.mode);
  const std::uint64_t seed = derive_seed(cfg.seed, trial);
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (cfg.mode) {
      case Mode::Learn2d: {
        Rng rng(seed);
        const auto inst = detail::random_halfplane_instance(cfg.n, rng);
        SimulatedOracle oracle(inst.hidden, inst.pool);
        const auto rep = learn_2d(inst.pool, oracle, cfg.subsample, derive_seed(seed, 1));
        row.d = 2;
        row.n = inst.pool.size();
        detail::fill_from_report(row, rep);
        row.soundness_violations = soundness_violations(rep, inst.hidden, inst.pool);
        break;
      }
      case Mode::Boost: {
        const auto inst = cfg.kind == "grid" ? gen_grid(cfg.grid_n, cfg.d, cfg.n, seed)
                                             : gen_margin(cfg.d, cfg.n, cfg.eta, seed);
        const std::size_t k = cfg.k_override.value_or(inst.meta.suggested_k);
        SimulatedOracle oracle(inst.hidden, inst.pool);
        BoostConfig bc;
        bc.k = k;
        bc.rng_seed = derive_seed(seed, 1);
        const auto rep = boost(inst.pool, oracle, bc);
        row.d = cfg.d;
        row.n_or_eta = cfg.kind == "grid" ? std::to_string(cfg.grid_n) : to_string(cfg.eta);
        row.n = inst.pool.size();
        row.k = k;
        detail::fill_from_report(row, rep);
        row.soundness_violations = soundness_violations(rep, inst.hidden, inst.pool);
        break;
      }
      case Mode::Statistical: {
        Rng rng(seed);
        Pool reference;
        for (int i = 0; i < 256; ++i) reference.push_back(random_grid_point(rng, cfg.grid_n, cfg.d));
        const LinearConcept hidden = random_grid_concept(rng, reference, cfg.d, cfg.grid_n);
        const std::size_t k = cfg.k_override.value_or(grid_suggested_k(cfg.grid_n, cfg.d));
        BoostConfig bc;
        bc.k = k;
        const auto gn = cfg.grid_n;
        const auto dd = cfg.d;
        const auto res = learn_statistical(
            [gn, dd](Rng& r) { return random_grid_point(r, gn, dd); }, cfg.d, cfg.eps, cfg.delta,
            [&hidden](std::span<const RationalVector> pool) { return SimulatedOracle(hidden, pool); }, bc,
            derive_seed(seed, 2));
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < cfg.heldout; ++i) {
          const auto x = random_grid_point(rng, cfg.grid_n, cfg.d);
          wrong += res.learned.label_of(x) != hidden.label_of(x);
        }
        row.d = cfg.d;
        row.n_or_eta = std::to_string(cfg.grid_n);
        row.n = res.sample.size();
        row.k = k;
        detail::fill_from_report(row, res.report);
        row.soundness_violations = soundness_violations(res.report, hidden, res.pool);
        row.heldout_error = static_cast<double>(wrong) / static_cast<double>(cfg.heldout);
        break;
      }
      case Mode::Witness: {
        const auto w = cfg.kind == "r3" ? gen_lb_r3(cfg.n) : gen_lb_margin(cfg.n);
        const auto rep = verify_witness(w);
        row.d = w.pool.front().dim();
        row.n = w.n();
        row.soundness_violations = rep.violations.size();
        std::ostringstream os;
        os << "witness kind=" << cfg.kind << " n=" << w.n();
        if (w.kind == WitnessInstance::Kind::R3) os << " M=" << w.base.get_str();
        os << " comparisons_checked=" << rep.comparisons_checked;
        if (w.kind == WitnessInstance::Kind::Margin)
          os << " min_margin_sq=" << rep.min_margin_sq.get_str() << " (~" << rep.min_margin_sq.get_d() << ")";
        os << (rep.clean() ? " clean" : " VIOLATIONS");
        for (const auto& v : rep.violations) os << "\n  " << v;
        row.diagnostics = os.str();
        break;
      }
      case Mode::InfdimCheck: {
        const std::size_t k = cfg.k_override.value_or(grid_suggested_k(cfg.grid_n, cfg.d));
        const auto inst = gen_grid(cfg.grid_n, cfg.d, k, seed);
        std::vector<PointId> ids(inst.pool.size());
        std::iota(ids.begin(), ids.end(), PointId{0});
        std::size_t tried = 0;
        const auto found = first_self_inferable(inst.hidden, inst.pool, ids, &tried);
        row.d = cfg.d;
        row.n_or_eta = std::to_string(cfg.grid_n);
        row.n = inst.pool.size();
        row.k = k;
        row.iterations = tried;
        row.soundness_violations = found ? 0 : 1;
        break;
      }
    }
  } catch (const std::exception& e) {
    row.failed = true;
    row.diagnostics = std::string("trial failed: ") + e.what();
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

/// Default worker count: CQLEARN_JOBS if set, else the hardware concurrency.
inline std::size_t default_jobs() {
  if (const char* env = std::getenv("CQLEARN_JOBS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  const auto hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

/// Runs all trials on up to `jobs` threads; rows come back in trial order.
inline std::vector<TrialRow> run_experiment(const ExperimentConfig& cfg, std::size_t jobs) {
  cfg.validate();
  std::vector<TrialRow> rows(cfg.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < cfg.trials;) rows[t] = run_trial(cfg, t);
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, cfg.trials));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return rows;
}

inline void write_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<TrialRow>& rows) {
  os << "# cqlearn rng=" << kRngName << " seed=" << cfg.seed << " mode=" << to_string(cfg.mode) << '\n';
  os << kCsvColumns << '\n';
  auto opt = [&](const auto& v) {
    if (v) os << *v;
    os << ',';
  };
  for (const auto& r : rows) {
    os << r.trial << ',' << r.mode << ',';
    opt(r.d);
    os << r.n_or_eta << ',';
    opt(r.n);
    opt(r.k);
    opt(r.label_queries);
    opt(r.comparison_queries);
    if (r.label_queries && r.comparison_queries) os << (*r.label_queries + *r.comparison_queries);
    os << ',';
    opt(r.iterations);
    opt(r.resamples);
    os << r.soundness_violations << ',';
    std::ostringstream ms;
    ms.setf(std::ios::fixed);
    ms.precision(3);
    ms << r.wall_ms;
    os << ms.str() << '\n';
  }
}

/// 0 iff no trial failed and no soundness violation or certificate failure occurred.
inline int exit_code(const std::vector<TrialRow>& rows) {
  for (const auto& r : rows)
    if (r.failed || r.soundness_violations != 0) return 1;
  return 0;
}

}  // namespace cqlearn
