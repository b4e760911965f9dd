#pragma once

// Integrated-CNOT architectures: n imperfect CNOTs placed on ordered
// (control, target) pairs of q qubits. Qubits 0 and 1 are the system
// control and target; qubits 2..q-1 are ancillas prepared in |0> and traced
// out at the end.

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "gadqs/errors.hpp"
#include "gadqs/ga.hpp"
#include "gadqs/gates.hpp"
#include "gadqs/parallel.hpp"
#include "gadqs/qcore.hpp"

namespace gadqs::arch {

using BigInt = boost::multiprecision::cpp_int;

struct Placement {
  int gate = 0;
  int control = 0;
  int target = 1;

  friend auto operator<=>(const Placement&, const Placement&) = default;
};

struct Architecture {
  int q = 2;
  std::vector<Placement> placements;  // placement 0 acts first

  std::size_t n() const noexcept { return placements.size(); }

  void validate() const {
    if (q < 2) throw ConfigInvalid("architecture needs q >= 2");
    std::vector<bool> seen(placements.size(), false);
    for (const auto& p : placements) {
      if (p.gate < 0 || p.gate >= static_cast<int>(placements.size()))
        throw IndexOutOfRange("gate index " + std::to_string(p.gate) + " out of range");
      if (seen[static_cast<std::size_t>(p.gate)])
        throw DuplicateTarget("gate " + std::to_string(p.gate) + " placed twice");
      seen[static_cast<std::size_t>(p.gate)] = true;
      if (p.control == p.target) throw DuplicateTarget("control equals target");
      if (p.control < 0 || p.control >= q || p.target < 0 || p.target >= q)
        throw IndexOutOfRange("placement qubit outside [0, q)");
    }
  }

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

inline nlohmann::json to_json(const Architecture& a) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : a.placements) out.push_back({p.gate, p.control, p.target});
  return out;
}

inline Architecture architecture_from_json(const nlohmann::json& j, int q) {
  Architecture a;
  a.q = q;
  for (const auto& p : j) a.placements.push_back({p.at(0).get<int>(), p.at(1).get<int>(), p.at(2).get<int>()});
  a.validate();
  return a;
}

/// P = (q^2 - q)^n n!.
inline BigInt count_architectures(int q, int n) {
  if (q < 2 || n < 1) throw ConfigInvalid("count_architectures needs q >= 2 and n >= 1");
  BigInt pairs = q * (q - 1);
  BigInt out = 1;
  for (int i = 0; i < n; ++i) out *= pairs;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

/// Full q-qubit unitary of the placements (for checks; the channel path
/// below only propagates the four system columns).
inline ComplexMatrix integrated_unitary(const Architecture& arch, const GateSet& gates) {
  ComplexMatrix v = identity(Eigen::Index{1} << arch.q);
  for (const auto& p : arch.placements)
    apply_two_qubit(gates.gates.at(static_cast<std::size_t>(p.gate)).matrix, p.control, p.target, arch.q, v);
  return v;
}

inline QuantumChannel integrated_channel(const Architecture& arch, const GateSet& gates) {
  if (arch.n() != gates.size()) throw DimensionMismatch("architecture and gate set sizes differ");
  arch.validate();
  const Eigen::Index dim = Eigen::Index{1} << arch.q;
  const Eigen::Index ancillas = dim / 4;
  ComplexMatrix iso = ComplexMatrix::Zero(dim, 4);
  for (Eigen::Index s = 0; s < 4; ++s) iso(s * ancillas, s) = 1.0;
  for (const auto& p : arch.placements)
    apply_two_qubit(gates.gates[static_cast<std::size_t>(p.gate)].matrix, p.control, p.target, arch.q, iso);
  return kraus_from_isometry(iso, arch.q);
}

/// Relative margin below which epsilon and the best gate error count as tied.
/// Architectures that route the best gate alone through the system reproduce
/// its channel exactly, and rounding must not count that as an improvement.
inline constexpr double kImprovementMargin = 1e-9;

struct ArchitectureResult {
  Architecture architecture;
  double epsilon = 0.0;
  double best_gate_eta = 0.0;
  bool improved = false;

  double improvement() const {
    return best_gate_eta > 0.0 ? (best_gate_eta - epsilon) / best_gate_eta : 0.0;
  }
};

inline bool is_improvement(double epsilon, double best_eta) {
  return epsilon < best_eta * (1.0 - kImprovementMargin);
}

inline ArchitectureResult epsilon(const Architecture& arch, const GateSet& gates) {
  ArchitectureResult r;
  r.architecture = arch;
  r.epsilon = channel_distance(integrated_channel(arch, gates), cnot_channel(), gates.norm);
  r.best_gate_eta = gates.best_eta();
  r.improved = is_improvement(r.epsilon, r.best_gate_eta);
  return r;
}

namespace detail {

inline std::vector<std::pair<int, int>> ordered_pairs(int q) {
  std::vector<std::pair<int, int>> out;
  for (int c = 0; c < q; ++c)
    for (int t = 0; t < q; ++t)
      if (c != t) out.emplace_back(c, t);
  return out;
}

// Frobenius or spectral distance of the traced circuit to the CNOT channel,
// computed from the propagated isometry without allocating a channel object.
class EpsilonKernel {
public:
  explicit EpsilonKernel(const GateSet& gates) : gates_(gates), ideal_(cnot_channel().superop()) {}

  double operator()(int q, const std::vector<Placement>& placements) const {
    const Eigen::Index dim = Eigen::Index{1} << q;
    const Eigen::Index ancillas = dim / 4;
    ComplexMatrix iso = ComplexMatrix::Zero(dim, 4);
    for (Eigen::Index s = 0; s < 4; ++s) iso(s * ancillas, s) = 1.0;
    for (const auto& p : placements)
      apply_two_qubit(gates_.gates[static_cast<std::size_t>(p.gate)].matrix, p.control, p.target, q, iso);
    ComplexMatrix super = -ideal_;
    Eigen::Matrix4cd k;
    for (Eigen::Index m = 0; m < ancillas; ++m) {
      for (Eigen::Index r = 0; r < 4; ++r) k.row(r) = iso.row(r * ancillas + m);
      for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j)
          super.block<4, 4>(i * 4, j * 4).noalias() += k(i, j) * k.conjugate();
    }
    return matrix_norm(super, gates_.norm);
  }

private:
  const GateSet& gates_;
  ComplexMatrix ideal_;
};

}  // namespace detail

struct BruteForceResult {
  ArchitectureResult best;
  std::uint64_t evaluations = 0;
  std::vector<double> distribution;  // every epsilon, in enumeration order, when requested
};

inline constexpr std::uint64_t kDefaultBruteForceCap = 10'000'000;

/// Exhaustive search over every gate order and (control, target) assignment.
/// Ties in epsilon go to the lexicographically smallest placement list.
inline BruteForceResult brute_force_search(int q, const GateSet& gates, bool keep_distribution = false,
                                           std::uint64_t cap = kDefaultBruteForceCap, unsigned threads = 1) {
  const int n = static_cast<int>(gates.size());
  const BigInt total = count_architectures(q, n);
  if (total > cap) throw SearchSpaceTooLarge(total.str(), std::to_string(cap));

  const auto pairs = detail::ordered_pairs(q);
  std::vector<std::vector<int>> orders;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  do orders.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));

  std::uint64_t per_order = 1;
  for (int i = 0; i < n; ++i) per_order *= pairs.size();

  struct Local {
    double eps = std::numeric_limits<double>::infinity();
    std::vector<Placement> placements;
    std::uint64_t count = 0;
  };
  std::vector<Local> locals(orders.size());
  BruteForceResult result;
  if (keep_distribution) result.distribution.resize(static_cast<std::size_t>(orders.size() * per_order));
  const detail::EpsilonKernel kernel(gates);

  parallel_for(orders.size(), threads, [&](std::size_t o) {
    Local& local = locals[o];
    std::vector<Placement> placements(static_cast<std::size_t>(n));
    std::vector<std::size_t> digits(static_cast<std::size_t>(n), 0);
    for (std::uint64_t code = 0; code < per_order; ++code) {
      std::uint64_t c = code;
      for (int i = n - 1; i >= 0; --i) {
        digits[static_cast<std::size_t>(i)] = c % pairs.size();
        c /= pairs.size();
      }
      for (int i = 0; i < n; ++i) {
        const auto& pr = pairs[digits[static_cast<std::size_t>(i)]];
        placements[static_cast<std::size_t>(i)] = {orders[o][static_cast<std::size_t>(i)], pr.first, pr.second};
      }
      const double e = kernel(q, placements);
      ++local.count;
      if (keep_distribution) result.distribution[o * per_order + code] = e;
      if (e < local.eps || (e == local.eps && placements < local.placements)) {
        local.eps = e;
        local.placements = placements;
      }
    }
  });

  const Local* best = &locals.front();
  for (const auto& l : locals) {
    result.evaluations += l.count;
    if (l.eps < best->eps || (l.eps == best->eps && l.placements < best->placements)) best = &l;
  }
  Architecture a{q, best->placements};
  result.best = epsilon(a, gates);
  return result;
}

/// Placement genome for the GA: gene i = placement i (kind = gate index,
/// slot_a = control, slot_b = target). Crossover and mutation keep every
/// gate index present exactly once.
class ArchitectureProblem {
public:
  ArchitectureProblem(int q, const GateSet& gates) : q_(q), gates_(gates), kernel_(gates), pairs_(detail::ordered_pairs(q)) {
    if (q < 2) throw ConfigInvalid("q must be >= 2");
  }

  std::size_t genome_length() const { return gates_.size(); }

  ga::Gene random_gene(std::size_t, Rng& rng) const {
    const auto& pr = pairs_[uniform_index(rng, pairs_.size())];
    return {static_cast<int>(uniform_index(rng, gates_.size())), pr.first, pr.second, std::nullopt};
  }

  ga::Genome random_genome(Rng& rng) const {
    std::vector<int> order(gates_.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    ga::Genome g;
    for (int gate : order) {
      const auto& pr = pairs_[uniform_index(rng, pairs_.size())];
      g.push_back({gate, pr.first, pr.second, std::nullopt});
    }
    return g;
  }

  /// Order crossover: the first `split` placements come from the higher
  /// parent; the remaining gate indices follow the lower parent's relative
  /// order, with control/target taken positionally from the lower parent.
  ga::Genome crossover(const ga::Genome& higher, const ga::Genome& lower, std::size_t split, Rng&) const {
    const std::size_t n = higher.size();
    split = std::min(split, n);
    ga::Genome child(higher.begin(), higher.begin() + static_cast<std::ptrdiff_t>(split));
    std::vector<bool> used(n, false);
    for (const auto& g : child) used[static_cast<std::size_t>(g.kind)] = true;
    std::size_t pos = split;
    for (const auto& g : lower) {
      if (used[static_cast<std::size_t>(g.kind)]) continue;
      used[static_cast<std::size_t>(g.kind)] = true;
      child.push_back({g.kind, lower[pos].slot_a, lower[pos].slot_b, std::nullopt});
      ++pos;
    }
    return child;
  }

  /// With probability `rate`, picks a random contiguous span of placements
  /// and applies one move per position: swap with another placement,
  /// reassign its (control, target) pair uniformly, or copy the pair of
  /// another placement (gate pairs on the same wires compose to near
  /// identity, which is how ancilla copy/uncopy patterns arise).
  void mutate(ga::Genome& g, double rate, Rng& rng) const {
    if (g.empty() || !(uniform01(rng) < rate)) return;
    const std::size_t start = uniform_index(rng, g.size());
    const std::size_t len = 1 + uniform_index(rng, g.size() - start);
    for (std::size_t i = start; i < start + len; ++i) {
      const std::size_t move = g.size() > 1 ? uniform_index(rng, 3) : 1;
      if (move == 1) {
        const auto& pr = pairs_[uniform_index(rng, pairs_.size())];
        g[i].slot_a = pr.first;
        g[i].slot_b = pr.second;
        continue;
      }
      std::size_t j = uniform_index(rng, g.size() - 1);
      if (j >= i) ++j;
      if (move == 0) {
        std::swap(g[i], g[j]);
      } else {
        g[i].slot_a = g[j].slot_a;
        g[i].slot_b = g[j].slot_b;
      }
    }
  }

  /// Replaces repeated gate indices by the missing ones (in increasing
  /// order) and redraws invalid qubit pairs.
  void repair(ga::Genome& g, Rng& rng) const {
    const std::size_t n = gates_.size();
    g.resize(n, ga::Gene{0, 0, 1, std::nullopt});
    std::vector<bool> used(n, false);
    std::vector<std::size_t> duplicates;
    for (std::size_t i = 0; i < n; ++i) {
      const int k = g[i].kind;
      if (k < 0 || k >= static_cast<int>(n) || used[static_cast<std::size_t>(k)]) duplicates.push_back(i);
      else used[static_cast<std::size_t>(k)] = true;
    }
    std::size_t next = 0;
    for (std::size_t i : duplicates) {
      while (used[next]) ++next;
      g[i].kind = static_cast<int>(next);
      used[next] = true;
    }
    for (auto& gene : g) {
      const int t = gene.slot_b.value_or(-1);
      if (gene.slot_a < 0 || gene.slot_a >= q_ || t < 0 || t >= q_ || t == gene.slot_a) {
        const auto& pr = pairs_[uniform_index(rng, pairs_.size())];
        gene.slot_a = pr.first;
        gene.slot_b = pr.second;
      }
      gene.angle.reset();
    }
  }

  double fitness(const ga::Genome& g) const { return kernel_(q_, placements(g)); }

  std::vector<Placement> placements(const ga::Genome& g) const {
    std::vector<Placement> out;
    out.reserve(g.size());
    for (const auto& gene : g) out.push_back({gene.kind, gene.slot_a, gene.slot_b.value_or(-1)});
    return out;
  }

  Architecture decode(const ga::Genome& g) const {
    Architecture a{q_, placements(g)};
    a.validate();
    return a;
  }

private:
  int q_;
  const GateSet& gates_;
  detail::EpsilonKernel kernel_;
  std::vector<std::pair<int, int>> pairs_;
};

struct GaSearchResult {
  ArchitectureResult result;
  std::vector<ga::GenerationStats> history;
};

inline GaSearchResult ga_search(int q, const GateSet& gates, const ga::GaConfig& config) {
  ArchitectureProblem problem(q, gates);
  auto evolved = ga::evolve(problem, config);
  return {epsilon(problem.decode(evolved.best.genome), gates), std::move(evolved.history)};
}

/// Defaults for architecture search: no target stop, 2000 generations,
/// restarts after 20 generations without improvement.
inline ga::GaConfig default_search_config() {
  ga::GaConfig c;
  c.max_generations = 2000;
  c.target_fitness = 0.0;
  c.mutation_rate = 0.8;
  c.restart_after = 20;
  return c;
}

// Mean error of the best of n gates, averaged over 1000 draws, reported for
// q = 4 and n = 3, 5, 7 (the q = 5, n = 7 column repeats the n = 7 value).
inline std::optional<double> reference_best_gate_error(int n) {
  switch (n) {
    case 3: return 0.1271;
    case 5: return 0.1205;
    case 7: return 0.1150;
    default: return std::nullopt;
  }
}

/// Mean over `samples` draws of min_i eta_i for n gates at strength delta.
/// Draw s uses the same seeds for every delta, so the estimate is a smooth
/// increasing function of delta.
inline double mean_best_eta(int n, double delta, int samples, std::uint64_t seed, NormKind norm = NormKind::frobenius) {
  double sum = 0.0;
  for (int s = 0; s < samples; ++s)
    sum += draw_gate_set(n, delta, derive_seed(seed, {static_cast<std::uint64_t>(s)}), 2, norm).best_eta();
  return sum / samples;
}

struct Calibration {
  double delta_star = 0.0;
  double achieved = 0.0;
  double target = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::uint64_t kCalibrationSeed = 20160121;

/// Bisection for delta* with mean_best_eta(n, delta*) = target.
inline Calibration calibrate_delta(int n, double target, int samples = 1000, std::uint64_t seed = kCalibrationSeed,
                                   NormKind norm = NormKind::frobenius) {
  if (!(target > 0.0)) throw ConfigInvalid("calibration target must be positive");
  double lo = 0.0;
  double hi = 0.05;
  while (mean_best_eta(n, hi, samples, seed, norm) < target) {
    lo = hi;
    hi *= 2;
    if (hi > 10.0) throw ConfigInvalid("calibration target is out of reach");
  }
  for (int it = 0; it < 40 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_best_eta(n, mid, samples, seed, norm) < target ? lo : hi) = mid;
  }
  const double d = 0.5 * (lo + hi);
  return {d, mean_best_eta(n, d, samples, seed, norm), target, samples, seed};
}

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

struct RunRecord {
  std::size_t run = 0;
  std::uint64_t gate_seed = 0;
  double epsilon = 0.0;
  double best_gate_eta = 0.0;
  double improvement = 0.0;
  bool improved = false;
  Architecture architecture;
};

struct ResilienceSummary {
  std::string protocol = "per-run";
  int q = 4;
  int n = 3;
  double delta = 0.0;
  std::size_t runs = 0;
  std::size_t generations = 0;
  double fraction_improved = 0.0;
  double mean_best_gate_error = 0.0;
  double mean_arch_error = 0.0;
  double mean_improvement = 0.0;       // mean of per-run (eta - eps) / eta
  double improvement_of_means = 0.0;   // (mean eta - mean eps) / mean eta
  std::vector<HistogramBin> histogram;
  std::vector<RunRecord> records;
};

/// per_run: every run searches an architecture for its own gate set.
/// fixed_architecture: one architecture is searched on a design gate set and
/// then evaluated, unchanged, on every run's fresh gate set.
enum class ResilienceProtocol { per_run, fixed_architecture };

inline std::string to_string(ResilienceProtocol p) {
  return p == ResilienceProtocol::per_run ? "per-run" : "fixed-architecture";
}

inline ResilienceProtocol resilience_protocol_from_string(const std::string& s) {
  if (s == "per-run") return ResilienceProtocol::per_run;
  if (s == "fixed-architecture") return ResilienceProtocol::fixed_architecture;
  throw ConfigInvalid("unknown resilience protocol '" + s + "'");
}

struct ResilienceOptions {
  ResilienceProtocol protocol = ResilienceProtocol::per_run;
  int q = 4;
  int n = 3;
  std::size_t runs = 1000;
  double delta = 0.03;
  std::uint64_t seed = 0;
  ga::GaConfig ga = default_search_config();
  unsigned threads = 1;
  double bin_width = 0.1;
};

/// Improvement histogram over [-1, 1) in bins of `width`; values outside are
/// clamped into the end bins.
inline std::vector<HistogramBin> improvement_histogram(const std::vector<RunRecord>& records, double width) {
  const auto bins = static_cast<std::size_t>(std::llround(2.0 / width));
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) out[b] = {-1.0 + static_cast<double>(b) * width, -1.0 + static_cast<double>(b + 1) * width, 0};
  for (const auto& r : records) {
    auto b = static_cast<long long>(std::floor((r.improvement + 1.0) / width));
    b = std::clamp<long long>(b, 0, static_cast<long long>(bins) - 1);
    ++out[static_cast<std::size_t>(b)].count;
  }
  return out;
}

inline constexpr std::uint64_t kDesignStream = 0x64657369676eULL;

/// Draws a fresh gate set per run (seed derive_seed(seed, {run})) and
/// aggregates. Per-run searches use GA seed derive_seed(seed, {run, 1}); the
/// fixed protocol designs on gate seed derive_seed(seed, {kDesignStream}) with
/// GA seed derive_seed(seed, {kDesignStream, 1}).
inline ResilienceSummary resilience_experiment(const ResilienceOptions& opt) {
  if (opt.runs < 1) throw ConfigInvalid("resilience needs at least one run");
  std::vector<RunRecord> records(opt.runs);
  std::optional<Architecture> fixed;
  if (opt.protocol == ResilienceProtocol::fixed_architecture) {
    const GateSet design = draw_gate_set(opt.n, opt.delta, derive_seed(opt.seed, {kDesignStream}), opt.q);
    ga::GaConfig cfg = opt.ga;
    cfg.seed = derive_seed(opt.seed, {kDesignStream, 1});
    cfg.threads = opt.threads;
    fixed = ga_search(opt.q, design, cfg).result.architecture;
  }
  parallel_for(opt.runs, opt.threads, [&](std::size_t r) {
    const std::uint64_t gate_seed = derive_seed(opt.seed, {r});
    const GateSet gates = draw_gate_set(opt.n, opt.delta, gate_seed, opt.q);
    ArchitectureResult found;
    if (fixed) {
      found = epsilon(*fixed, gates);
    } else {
      ga::GaConfig cfg = opt.ga;
      cfg.seed = derive_seed(opt.seed, {r, 1});
      cfg.threads = 1;
      found = ga_search(opt.q, gates, cfg).result;
    }
    records[r] = {r, gate_seed, found.epsilon, found.best_gate_eta, found.improvement(), found.improved,
                  found.architecture};
  });

  ResilienceSummary s;
  s.protocol = to_string(opt.protocol);
  s.q = opt.q;
  s.n = opt.n;
  s.delta = opt.delta;
  s.runs = opt.runs;
  s.generations = opt.ga.max_generations;
  std::size_t improved = 0;
  for (const auto& r : records) {
    improved += r.improved ? 1 : 0;
    s.mean_best_gate_error += r.best_gate_eta;
    s.mean_arch_error += r.epsilon;
    s.mean_improvement += r.improvement;
  }
  const auto runs = static_cast<double>(opt.runs);
  s.fraction_improved = static_cast<double>(improved) / runs;
  s.mean_best_gate_error /= runs;
  s.mean_arch_error /= runs;
  s.mean_improvement /= runs;
  s.improvement_of_means = (s.mean_best_gate_error - s.mean_arch_error) / s.mean_best_gate_error;
  s.histogram = improvement_histogram(records, opt.bin_width);
  s.records = std::move(records);
  return s;
}

}  // namespace gadqs::arch
