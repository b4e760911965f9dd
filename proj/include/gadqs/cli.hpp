#pragma once

// Command-line driver. run() parses argv, executes one command and returns
// the process exit code: 0 ok, 2 config error, 3 runtime error, 4 search
// space above the brute-force cap.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gadqs/arch.hpp"
#include "gadqs/errors.hpp"
#include "gadqs/io.hpp"
#include "gadqs/models.hpp"
#include "gadqs/parallel.hpp"
#include "gadqs/synth.hpp"

namespace gadqs::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kRuntimeError = 3, kSearchSpaceCap = 4 };

using json = nlohmann::json;

struct TimeGrid {
  double start = 0.0;
  double stop = 2.0;
  double step = 0.05;
};

/// Parses "start:stop:step".
inline TimeGrid parse_time_grid(const std::string& s) {
  TimeGrid g;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  if (!(in >> g.start >> c1 >> g.stop >> c2 >> g.step) || c1 != ':' || c2 != ':' || !in.eof())
    throw ConfigInvalid("t-grid must look like start:stop:step, got '" + s + "'");
  synth::time_grid(g.start, g.stop, g.step);
  return g;
}

inline synth::Alphabet parse_alphabet(const std::string& s) {
  synth::Alphabet out;
  std::istringstream in(s);
  for (std::string tok; std::getline(in, tok, ',');) out.push_back(gate_type_from_string(tok));
  if (out.empty()) throw ConfigInvalid("gate alphabet is empty");
  return out;
}

/// Fixed delta, or the calibrated delta* for the reference best-gate error of n.
struct DeltaChoice {
  double delta = 0.0;
  std::optional<arch::Calibration> calibration;

  json to_json() const {
    json j = {{"delta_star", delta}};
    if (calibration)
      j["calibration"] = {{"target_best_gate_error", calibration->target},
                          {"achieved", calibration->achieved},
                          {"samples", calibration->samples},
                          {"seed", calibration->seed}};
    else
      j["calibration"] = nullptr;
    return j;
  }
};

inline DeltaChoice resolve_delta(std::optional<double> delta, int n, NormKind norm) {
  if (delta) {
    if (!(*delta >= 0.0)) throw ConfigInvalid("delta must be non-negative");
    return {*delta, std::nullopt};
  }
  const auto target = arch::reference_best_gate_error(n);
  if (!target) throw ConfigInvalid("no calibration target for n = " + std::to_string(n) + "; pass --delta");
  auto cal = arch::calibrate_delta(n, *target, 1000, arch::kCalibrationSeed, norm);
  return {cal.delta_star, cal};
}

inline json circuit_json(const synth::Circuit& c) {
  json out = json::array();
  for (const auto& g : c) {
    json e = {{"kind", to_string(g.gate.type)}, {"qubits", g.qubits}};
    if (g.gate.has_angle()) e["angle"] = g.gate.angle;
    out.push_back(std::move(e));
  }
  return out;
}

namespace detail {

struct GaFlags {
  ga::GaConfig config;
  std::string scope = "offspring";

  void attach(CLI::App* app) {
    app->add_option("--generations", config.max_generations, "GA generation budget")->capture_default_str();
    app->add_option("--mutation-rate", config.mutation_rate, "GA mutation rate")->capture_default_str();
    app->add_option("--restart-after", config.restart_after, "stagnant generations before a restart, 0 = never")
        ->capture_default_str();
    app->add_option("--target-fitness", config.target_fitness, "stop once the best fitness is this low")
        ->capture_default_str();
    app->add_option("--angle-sigma", config.angle_sigma, "largest angle-jitter width")->capture_default_str();
    app->add_option("--mutation-scope", scope, "offspring or all")
        ->check(CLI::IsMember({"offspring", "all"}))
        ->capture_default_str();
  }

  ga::GaConfig resolve(std::uint64_t seed, unsigned threads) const {
    ga::GaConfig c = config;
    c.scope = scope == "all" ? ga::MutationScope::all : ga::MutationScope::offspring;
    c.seed = seed;
    c.threads = threads;
    c.validate();
    return c;
  }
};

struct Output {
  std::string path;  // empty: the command's output stream

  template <class Fn>
  void write(std::ostream& fallback, Fn&& fn) const {
    if (path.empty() || path == "-") {
      fn(fallback);
      return;
    }
    auto f = io::open_output(path);
    fn(f);
  }
};

inline void write_json(std::ostream& os, const json& j) { os << j.dump(2) << '\n'; }

}  // namespace detail

/// Executes one command line. `argv[0]` is the program name.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Genetic-algorithm digital quantum simulation experiments", "gadqs"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI configuration file; command-line flags take precedence");
  unsigned threads = default_threads();
  app.add_option("--threads", threads, "worker threads (outputs do not depend on it)");
  app.set_version_flag("--version", io::kToolVersion);

  std::function<void()> action;

  // trotter-compare
  auto* tc = app.add_subcommand("trotter-compare", "GA sequences versus one and two Trotter steps");
  struct {
    std::uint64_t seed = 0;
    std::string model = "both";
    ModelSpec spec;
    std::string grid = "0:2:0.05";
    int block_size = 2;
    std::size_t restarts = 5;
    std::string objective = "state";
    bool reuse = false;
    std::string out_dir = ".";
    detail::GaFlags ga{synth::default_chain_config()};
  } tco;
  tc->add_option("--seed", tco.seed, "master seed")->required();
  tc->add_option("--model", tco.model, "ising, heisenberg or both")
      ->check(CLI::IsMember({"ising", "heisenberg", "both"}))
      ->capture_default_str();
  tc->add_option("--spins", tco.spec.spins, "chain length N")->capture_default_str();
  tc->add_option("--coupling", tco.spec.coupling, "J")->capture_default_str();
  tc->add_option("--field", tco.spec.field, "B")->capture_default_str();
  tc->add_option("--t-grid", tco.grid, "start:stop:step")->capture_default_str();
  tc->add_option("--block-size", tco.block_size, "qubits per Trotter block")->capture_default_str();
  tc->add_option("--restarts", tco.restarts, "independent GA runs per time point; best is kept")
      ->capture_default_str();
  tc->add_option("--objective", tco.objective, "state, unitary or blockwise")
      ->check(CLI::IsMember({"state", "unitary", "blockwise"}))
      ->capture_default_str();
  tc->add_flag("--reuse-block", tco.reuse, "one circuit shared by every block");
  tc->add_option("--out-dir", tco.out_dir, "directory for trotter_<model>.csv, '-' for the output stream")
      ->capture_default_str();
  tco.ga.attach(tc);
  tc->callback([&] {
    action = [&] {
      const TimeGrid g = parse_time_grid(tco.grid);
      const auto times = synth::time_grid(g.start, g.stop, g.step);
      std::vector<ModelKind> models;
      if (tco.model != "heisenberg") models.push_back(ModelKind::ising);
      if (tco.model != "ising") models.push_back(ModelKind::heisenberg);
      for (ModelKind m : models) {
        ModelSpec spec = tco.spec;
        spec.model = m;
        spec.validate();
        auto opt = synth::default_compare_options(m);
        opt.block_size = tco.block_size;
        opt.restarts = tco.restarts;
        opt.chain.objective = synth::chain_objective_from_string(tco.objective);
        opt.chain.reuse_block = tco.reuse;
        opt.ga = tco.ga.resolve(tco.seed, 1);
        opt.threads = threads;
        TrotterPlan{g.stop, 1, tco.block_size}.validate(spec.spins);
        const auto rows = synth::compare_with_trotter(spec, times, opt);

        const json config = {{"model", to_string(m)},
                             {"spins", spec.spins},
                             {"coupling", spec.coupling},
                             {"field", spec.field},
                             {"initial_state", "|0...0>"},
                             {"t_grid", {{"start", g.start}, {"stop", g.stop}, {"step", g.step}}},
                             {"block_size", opt.block_size},
                             {"budget_per_block",
                              {{"cphase", opt.chain.budget.two_qubit}, {"single_qubit", opt.chain.budget.single_qubit}}},
                             {"objective", tco.objective},
                             {"reuse_block", tco.reuse},
                             {"restarts", opt.restarts},
                             {"ga", io::ga_budget_json(opt.ga)}};
        auto emit = [&](std::ostream& os) {
          io::CsvWriter csv(os);
          csv.comment(io::metadata("trotter-compare", tco.seed, config));
          csv.header({"t", "e_trotter_l1", "e_trotter_l2", "e_ga", "cphase_ga", "single_ga"});
          for (const auto& r : rows) {
            csv.cell(r.t).cell(r.e_trotter_l1).cell(r.e_trotter_l2).cell(r.e_ga).cell(r.cphase_ga).cell(r.single_ga);
            csv.end_row();
          }
        };
        if (tco.out_dir == "-") {
          emit(out);
        } else {
          std::filesystem::create_directories(tco.out_dir);
          auto f = io::open_output((std::filesystem::path(tco.out_dir) / ("trotter_" + to_string(m) + ".csv")).string());
          emit(f);
        }
      }
    };
  });

  // synth-block
  auto* sb = app.add_subcommand("synth-block", "synthesize one Trotter block unitary");
  struct {
    std::uint64_t seed = 0;
    std::string model = "ising";
    ModelSpec spec;
    double t = 0.1;
    int steps = 1;
    int block_size = 2;
    int block = 0;
    std::optional<int> two_qubit, single_qubit;
    std::string alphabet = "rx,ry,rz,cphase";
    std::string norm = "frobenius";
    bool phase_invariant = false;
    bool polish = false;
    detail::Output output;
    detail::GaFlags ga;
  } sbo;
  sb->add_option("--seed", sbo.seed, "master seed")->required();
  sb->add_option("--model", sbo.model, "ising or heisenberg")
      ->check(CLI::IsMember({"ising", "heisenberg"}))
      ->capture_default_str();
  sb->add_option("--spins", sbo.spec.spins, "chain length N")->capture_default_str();
  sb->add_option("--coupling", sbo.spec.coupling, "J")->capture_default_str();
  sb->add_option("--field", sbo.spec.field, "B")->capture_default_str();
  sb->add_option("--t", sbo.t, "evolution time")->capture_default_str();
  sb->add_option("--steps", sbo.steps, "Trotter steps l")->capture_default_str();
  sb->add_option("--block-size", sbo.block_size, "qubits per block")->capture_default_str();
  sb->add_option("--block", sbo.block, "block index")->capture_default_str();
  sb->add_option("--two-qubit", sbo.two_qubit, "two-qubit gates in the circuit");
  sb->add_option("--single-qubit", sbo.single_qubit, "single-qubit gates in the circuit");
  sb->add_option("--alphabet", sbo.alphabet, "comma-separated gate kinds")->capture_default_str();
  sb->add_option("--norm", sbo.norm, "frobenius or spectral")
      ->check(CLI::IsMember({"frobenius", "spectral"}))
      ->capture_default_str();
  sb->add_flag("--phase-invariant", sbo.phase_invariant, "ignore the global phase in the residual");
  sb->add_flag("--polish", sbo.polish, "coordinate search on the best angles after the GA");
  sb->add_option("--out", sbo.output.path, "JSON output file (default: output stream)");
  sbo.ga.attach(sb);
  sb->callback([&] {
    action = [&] {
      ModelSpec spec = sbo.spec;
      spec.model = model_kind_from_string(sbo.model);
      const TrotterPlan plan{sbo.t, sbo.steps, sbo.block_size};
      const auto blocks = block_hamiltonians(spec, plan);
      if (sbo.block < 0 || sbo.block >= static_cast<int>(blocks.size()))
        throw ConfigInvalid("block index outside [0, " + std::to_string(blocks.size()) + ")");
      synth::GateBudget budget = synth::default_budget(spec.model);
      if (sbo.two_qubit) budget.two_qubit = *sbo.two_qubit;
      if (sbo.single_qubit) budget.single_qubit = *sbo.single_qubit;
      const auto targets = block_targets(spec, plan);
      synth::SynthesisProblem p{targets[static_cast<std::size_t>(sbo.block)], sbo.block_size, budget,
                                parse_alphabet(sbo.alphabet), norm_kind_from_string(sbo.norm), sbo.phase_invariant};
      const ga::GaConfig cfg = sbo.ga.resolve(sbo.seed, threads);
      const auto res = synth::synthesize_block(p, cfg, sbo.polish);
      const json config = {{"model", sbo.model},
                           {"spins", spec.spins},
                           {"coupling", spec.coupling},
                           {"field", spec.field},
                           {"t", sbo.t},
                           {"steps", sbo.steps},
                           {"block_size", sbo.block_size},
                           {"block", sbo.block},
                           {"budget", {{"two_qubit", budget.two_qubit}, {"single_qubit", budget.single_qubit}}},
                           {"alphabet", sbo.alphabet},
                           {"norm", sbo.norm},
                           {"phase_invariant", sbo.phase_invariant},
                           {"polish", sbo.polish},
                           {"ga", io::ga_budget_json(cfg)}};
      const auto& b = blocks[static_cast<std::size_t>(sbo.block)];
      const json j = {{"metadata", io::metadata("synth-block", sbo.seed, config)},
                      {"block", {{"index", sbo.block}, {"first_qubit", b.first}, {"width", b.width}}},
                      {"residual", res.residual},
                      {"polished", res.polished},
                      {"generations", res.history.empty() ? 0 : res.history.back().generation},
                      {"circuit", circuit_json(res.circuit)}};
      sbo.output.write(out, [&](std::ostream& os) { detail::write_json(os, j); });
    };
  });

  // arch-search / arch-brute / resilience share these
  struct ArchFlags {
    std::uint64_t seed = 0;
    int q = 4;
    int n = 3;
    std::optional<double> delta;
    std::string norm = "frobenius";
    detail::Output output;

    void attach(CLI::App* a) {
      a->add_option("--seed", seed, "master seed")->required();
      a->add_option("--q", q, "total qubits (2 system + ancillas)")->capture_default_str();
      a->add_option("--n", n, "imperfect CNOT gates")->capture_default_str();
      a->add_option("--delta", delta, "perturbation strength (default: calibrated delta*)");
      a->add_option("--norm", norm, "channel distance norm")
          ->check(CLI::IsMember({"frobenius", "spectral"}))
          ->capture_default_str();
      a->add_option("--out", output.path, "JSON output file (default: output stream)");
    }

    json config() const {
      return {{"q", q}, {"n", n}, {"delta", delta ? json(*delta) : json(nullptr)}, {"norm", norm}};
    }
  };

  auto result_json = [](const arch::ArchitectureResult& r) {
    return json{{"architecture", arch::to_json(r.architecture)},
                {"epsilon", r.epsilon},
                {"best_gate_eta", r.best_gate_eta},
                {"improved", r.improved},
                {"improvement", r.improvement()}};
  };

  auto* as = app.add_subcommand("arch-search", "GA search for an integrated CNOT architecture");
  ArchFlags aso;
  detail::GaFlags as_ga{arch::default_search_config()};
  aso.attach(as);
  as_ga.attach(as);
  as->callback([&] {
    action = [&] {
      const NormKind norm = norm_kind_from_string(aso.norm);
      const DeltaChoice d = resolve_delta(aso.delta, aso.n, norm);
      const GateSet gates = draw_gate_set(aso.n, d.delta, derive_seed(aso.seed, {0}), aso.q, norm);
      const ga::GaConfig cfg = as_ga.resolve(derive_seed(aso.seed, {0, 1}), threads);
      const auto found = arch::ga_search(aso.q, gates, cfg);
      json config = aso.config();
      config["delta_star"] = d.delta;
      config["ga"] = io::ga_budget_json(cfg);
      json j = {{"metadata", io::metadata("arch-search", aso.seed, config)}, {"gate_set", to_json(gates)}};
      j.update(d.to_json());
      j.update(result_json(found.result));
      aso.output.write(out, [&](std::ostream& os) { detail::write_json(os, j); });
    };
  });

  auto* ab = app.add_subcommand("arch-brute", "exhaustive architecture search");
  ArchFlags abo;
  std::uint64_t cap = arch::kDefaultBruteForceCap;
  std::string distribution_path;
  abo.attach(ab);
  ab->add_option("--cap", cap, "largest search space to enumerate")->capture_default_str();
  ab->add_option("--distribution", distribution_path, "CSV file receiving every epsilon in enumeration order");
  ab->callback([&] {
    action = [&] {
      const NormKind norm = norm_kind_from_string(abo.norm);
      // refuse before calibrating when the space is too large anyway
      const auto total = arch::count_architectures(abo.q, abo.n);
      if (total > cap) throw SearchSpaceTooLarge(total.str(), std::to_string(cap));
      const DeltaChoice d = resolve_delta(abo.delta, abo.n, norm);
      const GateSet gates = draw_gate_set(abo.n, d.delta, derive_seed(abo.seed, {0}), abo.q, norm);
      const auto res = arch::brute_force_search(abo.q, gates, !distribution_path.empty(), cap, threads);
      json config = abo.config();
      config["delta_star"] = d.delta;
      config["cap"] = cap;
      json meta = io::metadata("arch-brute", abo.seed, config);
      json j = {{"metadata", meta}, {"gate_set", to_json(gates)}, {"evaluations", res.evaluations},
                {"count", total.str()}};
      j.update(d.to_json());
      j.update(result_json(res.best));
      abo.output.write(out, [&](std::ostream& os) { detail::write_json(os, j); });
      if (!distribution_path.empty()) {
        auto f = io::open_output(distribution_path);
        io::CsvWriter csv(f);
        csv.comment(meta);
        csv.header({"index", "epsilon"});
        for (std::size_t i = 0; i < res.distribution.size(); ++i) {
          csv.cell(i).cell(res.distribution[i]);
          csv.end_row();
        }
      }
    };
  });

  auto* rs = app.add_subcommand("resilience", "fraction of gate sets an architecture improves on");
  ArchFlags rso;
  detail::GaFlags rs_ga{arch::default_search_config()};
  std::size_t runs = 1000;
  std::string protocol = "per-run";
  double bin_width = 0.1;
  std::string records_path;
  rso.attach(rs);
  rs_ga.attach(rs);
  rs->add_option("--runs", runs, "independent gate sets")->capture_default_str();
  rs->add_option("--protocol", protocol, "per-run or fixed-architecture")
      ->check(CLI::IsMember({"per-run", "fixed-architecture"}))
      ->capture_default_str();
  rs->add_option("--bin-width", bin_width, "improvement histogram bin width")->capture_default_str();
  rs->add_option("--csv", records_path, "CSV file receiving one row per run");
  rs->callback([&] {
    action = [&] {
      const NormKind norm = norm_kind_from_string(rso.norm);
      if (norm != NormKind::frobenius && !rso.delta)
        throw ConfigInvalid("delta calibration targets are Frobenius values; pass --delta with --norm spectral");
      const DeltaChoice d = resolve_delta(rso.delta, rso.n, norm);
      arch::ResilienceOptions opt;
      opt.protocol = arch::resilience_protocol_from_string(protocol);
      opt.q = rso.q;
      opt.n = rso.n;
      opt.runs = runs;
      opt.delta = d.delta;
      opt.seed = rso.seed;
      opt.ga = rs_ga.resolve(0, 1);
      opt.threads = threads;
      if (!(bin_width > 0.0) || bin_width > 2.0) throw ConfigInvalid("bin width must lie in (0, 2]");
      opt.bin_width = bin_width;
      const auto s = arch::resilience_experiment(opt);

      json config = rso.config();
      config["delta_star"] = d.delta;
      config["runs"] = runs;
      config["protocol"] = protocol;
      config["bin_width"] = bin_width;
      config["ga"] = io::ga_budget_json(opt.ga);
      const json meta = io::metadata("resilience", rso.seed, config);
      json hist = json::array();
      for (const auto& b : s.histogram) hist.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
      json j = {{"metadata", meta},
                {"q", s.q},
                {"n", s.n},
                {"runs", s.runs},
                {"protocol", s.protocol},
                {"generations", s.generations},
                {"fraction_improved", s.fraction_improved},
                {"mean_best_gate_error", s.mean_best_gate_error},
                {"mean_arch_error", s.mean_arch_error},
                {"mean_improvement", s.mean_improvement},
                {"improvement_of_means", s.improvement_of_means},
                {"histogram", hist}};
      j.update(d.to_json());
      rso.output.write(out, [&](std::ostream& os) { detail::write_json(os, j); });
      if (!records_path.empty()) {
        auto f = io::open_output(records_path);
        io::CsvWriter csv(f);
        csv.comment(meta);
        csv.header({"run", "gate_seed", "epsilon", "best_gate_eta", "improvement", "improved", "architecture"});
        for (const auto& r : s.records) {
          csv.cell(r.run).cell(std::to_string(r.gate_seed)).cell(r.epsilon).cell(r.best_gate_eta)
              .cell(r.improvement).cell(r.improved).cell("\"" + arch::to_json(r.architecture).dump() + "\"");
          csv.end_row();
        }
      }
    };
  });

  auto* ct = app.add_subcommand("count", "number of architectures (q^2 - q)^n n!");
  int count_q = 4, count_n = 3;
  ct->add_option("--q", count_q, "total qubits")->capture_default_str();
  ct->add_option("--n", count_n, "gates")->capture_default_str();
  ct->callback([&] { action = [&] { out << arch::count_architectures(count_q, count_n).str() << '\n'; }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  } catch (const ConfigInvalid& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (threads == 0) throw ConfigInvalid("--threads must be positive");
    action();
  } catch (const SearchSpaceTooLarge& e) {
    err << "error: " << e.what() << '\n' << "P = " << e.count() << '\n';
    return kSearchSpaceCap;
  } catch (const ConfigInvalid& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

}  // namespace gadqs::cli
