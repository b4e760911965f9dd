#pragma once

// Problem-agnostic genetic algorithm: hierarchical breeding, span mutation
// with angle jitter, and elitist merged selection.
//
// A problem type supplies
//   std::size_t genome_length() const;
//   Gene random_gene(std::size_t position, Rng&) const;
//   double fitness(const Genome&) const;            // lower is better
// and may override the defaults with
//   Genome random_genome(Rng&) const;
//   Genome crossover(const Genome& higher, const Genome& lower, std::size_t split, Rng&) const;
//   void mutate(Genome&, double rate, Rng&) const;
//   void repair(Genome&, Rng&) const;

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "gadqs/errors.hpp"
#include "gadqs/parallel.hpp"
#include "gadqs/qcore.hpp"
#include "gadqs/rng.hpp"

namespace gadqs::ga {

struct Gene {
  int kind = 0;
  int slot_a = 0;
  std::optional<int> slot_b;
  std::optional<double> angle;

  friend bool operator==(const Gene&, const Gene&) = default;
  friend bool operator<(const Gene& l, const Gene& r) {
    return std::tie(l.kind, l.slot_a, l.slot_b, l.angle) < std::tie(r.kind, r.slot_a, r.slot_b, r.angle);
  }
};

using Genome = std::vector<Gene>;

struct Individual {
  Genome genome;
  double fitness = std::numeric_limits<double>::infinity();
  std::size_t born = 0;  // generation of birth; older wins ties
};

struct MutationSchedule {
  bool enabled = false;
  double rate_high = 0.8;
  double rate_low = 0.2;
  std::size_t stagnation = 25;
};

/// Which individuals receive mutation. `all` also adds mutated copies of the
/// current parents to the selection pool; the unmutated parents stay in it.
enum class MutationScope { offspring, all };

struct GaConfig {
  std::size_t population = 4;
  std::size_t offspring = 9;
  std::vector<std::size_t> participation{6, 5, 4, 3};
  double mutation_rate = 0.8;
  MutationSchedule schedule;
  MutationScope scope = MutationScope::offspring;
  double angle_sigma = 0.1;
  // Jitter width is angle_sigma * 10^-u with u ~ U[0, angle_decades).
  double angle_decades = 6.0;
  std::size_t max_generations = 2000;
  double target_fitness = 1e-3;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  // Drop exact genome duplicates from the merged pool before truncation.
  bool unique_selection = true;
  // After this many generations without improvement every individual but
  // the best is replaced by a fresh random genome. 0 disables restarts.
  std::size_t restart_after = 0;

  void validate() const {
    const auto total = std::accumulate(participation.begin(), participation.end(), std::size_t{0});
    if (total % 2 != 0) throw ConfigInvalid("participation counts must sum to an even number");
    if (total != 2 * offspring)
      throw ConfigInvalid("participation counts must sum to twice the offspring size");
    if (participation.size() != population)
      throw ConfigInvalid("one participation count is needed per population member");
    if (population == 0) throw ConfigInvalid("population must be positive");
    if (mutation_rate < 0.0 || mutation_rate > 1.0) throw ConfigInvalid("mutation rate must lie in [0, 1]");
    if (schedule.enabled && (schedule.rate_high < 0.0 || schedule.rate_high > 1.0 ||
                             schedule.rate_low < 0.0 || schedule.rate_low > 1.0))
      throw ConfigInvalid("scheduled mutation rates must lie in [0, 1]");
  }
};

struct GenerationStats {
  std::size_t generation = 0;
  double best = 0.0;
  double mean = 0.0;
};

struct EvolveResult {
  Individual best;
  std::vector<GenerationStats> history;
  bool reached_target = false;
};

template <class P>
concept GeneticProblem = requires(const P& p, const Genome& g, Rng& rng, std::size_t i) {
  { p.genome_length() } -> std::convertible_to<std::size_t>;
  { p.random_gene(i, rng) } -> std::same_as<Gene>;
  { p.fitness(g) } -> std::convertible_to<double>;
};

namespace detail {

template <class P>
concept HasRandomGenome = requires(const P& p, Rng& rng) {
  { p.random_genome(rng) } -> std::same_as<Genome>;
};
template <class P>
concept HasCrossover = requires(const P& p, const Genome& g, std::size_t s, Rng& rng) {
  { p.crossover(g, g, s, rng) } -> std::same_as<Genome>;
};
template <class P>
concept HasMutate = requires(const P& p, Genome& g, double r, Rng& rng) { p.mutate(g, r, rng); };
template <class P>
concept HasRepair = requires(const P& p, Genome& g, Rng& rng) { p.repair(g, rng); };

// Stream tags for derive_seed; keep distinct.
inline constexpr std::uint64_t kInitStream = 0x1ULL << 62;
inline constexpr std::uint64_t kBreedStream = 0x2ULL << 62;
inline constexpr std::uint64_t kRestartStream = 0x3ULL << 62;

inline double wrap_angle(double a) {
  a = std::fmod(a, 2 * kPi);
  if (a < 0) a += 2 * kPi;
  if (a >= 2 * kPi) a = 0.0;
  return a;
}

}  // namespace detail

template <GeneticProblem P>
void repair(const P& problem, Genome& g, Rng& rng) {
  if constexpr (detail::HasRepair<P>) problem.repair(g, rng);
}

template <GeneticProblem P>
Genome random_genome(const P& problem, Rng& rng) {
  Genome g;
  if constexpr (detail::HasRandomGenome<P>) {
    g = problem.random_genome(rng);
  } else {
    const std::size_t n = problem.genome_length();
    g.reserve(n);
    for (std::size_t i = 0; i < n; ++i) g.push_back(problem.random_gene(i, rng));
  }
  repair(problem, g, rng);
  return g;
}

/// Genes contributed by the higher-ranked parent of a pair:
/// round(L * w_hi / (w_hi + w_lo)).
inline std::size_t crossover_split(std::size_t length, std::size_t w_hi, std::size_t w_lo) {
  return static_cast<std::size_t>(
      std::llround(static_cast<double>(length) * static_cast<double>(w_hi) / static_cast<double>(w_hi + w_lo)));
}

/// Pairs of parent ranks (higher rank first) drawn by shuffling a multiset
/// holding rank r participation[r] times.
inline std::vector<std::pair<std::size_t, std::size_t>> breeding_pairs(const GaConfig& config, Rng& rng) {
  config.validate();
  std::vector<std::size_t> slots;
  for (std::size_t r = 0; r < config.participation.size(); ++r)
    slots.insert(slots.end(), config.participation[r], r);
  std::shuffle(slots.begin(), slots.end(), rng);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i + 1 < slots.size(); i += 2)
    pairs.emplace_back(std::min(slots[i], slots[i + 1]), std::max(slots[i], slots[i + 1]));
  return pairs;
}

/// Produces config.offspring genomes from a fitness-sorted parent list.
template <GeneticProblem P>
std::vector<Genome> breed(const std::vector<Individual>& parents, const GaConfig& config, const P& problem,
                          Rng& rng) {
  if (parents.size() != config.population)
    throw ConfigInvalid("breed: parent count differs from the configured population");
  std::vector<Genome> children;
  for (auto [hi, lo] : breeding_pairs(config, rng)) {
    const Genome& a = parents[hi].genome;
    const Genome& b = parents[lo].genome;
    const std::size_t split =
        crossover_split(a.size(), config.participation[hi], config.participation[lo]);
    Genome child;
    if constexpr (detail::HasCrossover<P>) {
      child = problem.crossover(a, b, split, rng);
    } else {
      child.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(std::min(split, a.size())));
      for (std::size_t i = child.size(); i < b.size(); ++i) child.push_back(b[i]);
    }
    repair(problem, child, rng);
    children.push_back(std::move(child));
  }
  return children;
}

/// With probability `rate` replaces a random contiguous span by fresh genes;
/// each angle gene is independently jittered with probability `rate`.
template <GeneticProblem P>
void mutate(const P& problem, Genome& g, double rate, const GaConfig& config, Rng& rng) {
  if constexpr (detail::HasMutate<P>) {
    problem.mutate(g, rate, rng);
  } else {
    if (!g.empty() && uniform01(rng) < rate) {
      const std::size_t start = uniform_index(rng, g.size());
      const std::size_t len = 1 + uniform_index(rng, g.size() - start);
      for (std::size_t i = start; i < start + len; ++i) g[i] = problem.random_gene(i, rng);
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& gene : g) {
      if (!gene.angle || !(uniform01(rng) < rate)) continue;
      const double sigma = config.angle_sigma * std::pow(10.0, -config.angle_decades * uniform01(rng));
      gene.angle = detail::wrap_angle(*gene.angle + sigma * normal(rng));
    }
  }
  repair(problem, g, rng);
}

inline bool ranks_before(const Individual& l, const Individual& r) {
  if (l.fitness != r.fitness) return l.fitness < r.fitness;
  if (l.born != r.born) return l.born < r.born;
  return l.genome < r.genome;
}

/// Merges parents and offspring, keeps the config.population best.
inline std::vector<Individual> select(const std::vector<Individual>& parents,
                                      const std::vector<Individual>& offspring, const GaConfig& config) {
  std::vector<Individual> pool;
  pool.reserve(parents.size() + offspring.size());
  pool.insert(pool.end(), parents.begin(), parents.end());
  pool.insert(pool.end(), offspring.begin(), offspring.end());
  std::stable_sort(pool.begin(), pool.end(), ranks_before);
  if (!config.unique_selection) {
    pool.resize(std::min(pool.size(), config.population));
    return pool;
  }
  std::vector<Individual> next;
  std::vector<bool> taken(pool.size(), false);
  for (std::size_t i = 0; i < pool.size() && next.size() < config.population; ++i) {
    const bool seen = std::any_of(next.begin(), next.end(),
                                  [&](const Individual& o) { return o.genome == pool[i].genome; });
    if (!seen) {
      next.push_back(pool[i]);
      taken[i] = true;
    }
  }
  // top up with duplicates when the pool holds too few distinct genomes
  for (std::size_t i = 0; i < pool.size() && next.size() < config.population; ++i)
    if (!taken[i]) next.push_back(pool[i]);
  std::stable_sort(next.begin(), next.end(), ranks_before);
  return next;
}

template <GeneticProblem P>
double evaluate(const P& problem, const Genome& g) {
  const double f = problem.fitness(g);
  return std::isfinite(f) ? f : std::numeric_limits<double>::max();
}

namespace detail {

class RateSchedule {
public:
  explicit RateSchedule(const GaConfig& c) : config_(c) {}

  double rate(std::size_t generation) const {
    if (!config_.schedule.enabled) return config_.mutation_rate;
    return high_ && generation <= config_.max_generations / 2 ? config_.schedule.rate_high
                                                               : config_.schedule.rate_low;
  }

  void observe(bool improved) {
    stale_ = improved ? 0 : stale_ + 1;
    if (config_.schedule.enabled && stale_ >= config_.schedule.stagnation) high_ = false;
  }

private:
  const GaConfig& config_;
  std::size_t stale_ = 0;
  bool high_ = true;
};

inline GenerationStats stats_of(std::size_t gen, const std::vector<Individual>& pop) {
  double sum = 0.0;
  for (const auto& i : pop) sum += i.fitness;
  return {gen, pop.front().fitness, sum / static_cast<double>(pop.size())};
}

}  // namespace detail

/// Runs breeding / mutation / selection cycles until the best fitness reaches
/// config.target_fitness or config.max_generations cycles have run. Child i of
/// generation g mutates with the stream derive_seed(seed, {g, i}), so results
/// do not depend on config.threads.
template <GeneticProblem P>
EvolveResult evolve(const P& problem, const GaConfig& config) {
  config.validate();
  std::vector<Individual> population(config.population);
  parallel_for(population.size(), config.threads, [&](std::size_t i) {
    Rng r = make_rng(config.seed, {detail::kInitStream, i});
    population[i].genome = random_genome(problem, r);
    population[i].fitness = evaluate(problem, population[i].genome);
  });
  std::stable_sort(population.begin(), population.end(), ranks_before);

  EvolveResult result;
  result.history.push_back(detail::stats_of(0, population));
  Rng breed_rng = make_rng(config.seed, {detail::kBreedStream});
  detail::RateSchedule schedule(config);
  std::size_t stale = 0;

  for (std::size_t gen = 1; gen <= config.max_generations; ++gen) {
    if (population.front().fitness <= config.target_fitness) break;
    const double rate = schedule.rate(gen);
    const double previous_best = population.front().fitness;

    std::vector<Genome> genomes = breed(population, config, problem, breed_rng);
    if (config.scope == MutationScope::all)
      for (const auto& p : population) genomes.push_back(p.genome);
    std::vector<Individual> children(genomes.size());
    parallel_for(children.size(), config.threads, [&](std::size_t i) {
      Rng r = make_rng(config.seed, {gen, i});
      mutate(problem, genomes[i], rate, config, r);
      children[i].genome = std::move(genomes[i]);
      children[i].fitness = evaluate(problem, children[i].genome);
      children[i].born = gen;
    });
    population = select(population, children, config);
    const bool improved = population.front().fitness < previous_best;
    schedule.observe(improved);
    stale = improved ? 0 : stale + 1;
    if (config.restart_after > 0 && stale >= config.restart_after) {
      parallel_for(population.size() - 1, config.threads, [&](std::size_t i) {
        Rng r = make_rng(config.seed, {detail::kRestartStream, gen, i});
        auto& ind = population[i + 1];
        ind.genome = random_genome(problem, r);
        ind.fitness = evaluate(problem, ind.genome);
        ind.born = gen;
      });
      std::stable_sort(population.begin(), population.end(), ranks_before);
      stale = 0;
    }
    result.history.push_back(detail::stats_of(gen, population));
  }
  result.best = population.front();
  result.reached_target = result.best.fitness <= config.target_fitness;
  return result;
}

}  // namespace gadqs::ga
