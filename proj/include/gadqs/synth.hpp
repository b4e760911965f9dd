#pragma once

// GA synthesis of gate sequences for local Trotter blocks and for whole
// spin-chain evolutions, and the comparison against Trotter baselines.
//
// Gene encoding: kind indexes the gate alphabet, slot_a is the (first)
// qubit, slot_b = slot_a + 1 for two-qubit gates (nearest neighbours only),
// angle is present for parametrized gates. Gene 0 acts first in time.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gadqs/errors.hpp"
#include "gadqs/ga.hpp"
#include "gadqs/gates.hpp"
#include "gadqs/models.hpp"
#include "gadqs/parallel.hpp"
#include "gadqs/qcore.hpp"

namespace gadqs::synth {

using Alphabet = std::vector<GateKind::Type>;

inline Alphabet default_alphabet() {
  using T = GateKind::Type;
  return {T::rot_x, T::rot_y, T::rot_z, T::cphase};
}

/// Exact number of gates of each class in one block circuit.
struct GateBudget {
  int two_qubit = 1;
  int single_qubit = 2;

  int total() const noexcept { return two_qubit + single_qubit; }
};

/// Per-block budgets whose totals over the four blocks of a five-spin chain
/// are 4 CPHASE + 8 rotations (Ising) and 4 CPHASE + 16 rotations (Heisenberg).
inline GateBudget default_budget(ModelKind model) {
  return model == ModelKind::ising ? GateBudget{1, 2} : GateBudget{1, 4};
}

struct SynthesisProblem {
  ComplexMatrix target;
  int qubits = 2;
  GateBudget budget;
  Alphabet allowed = default_alphabet();
  NormKind norm = NormKind::frobenius;
  bool phase_invariant = false;

  void validate() const {
    if (qubits < 1 || qubits > 4) throw ConfigInvalid("block synthesis supports 1 to 4 qubits");
    if (target.rows() != (Eigen::Index{1} << qubits) || !is_unitary(target))
      throw ConfigInvalid("synthesis target must be a unitary on 2^k states");
    if (budget.two_qubit < 0 || budget.single_qubit < 0) throw ConfigInvalid("gate budget must be non-negative");
  }
};

struct CircuitGate {
  GateKind gate;
  std::vector<int> qubits;
};

using Circuit = std::vector<CircuitGate>;

inline Circuit decode_genes(const ga::Genome& genome, int qubits, const Alphabet& alphabet) {
  Circuit out;
  out.reserve(genome.size());
  for (const auto& g : genome) {
    if (g.kind < 0 || g.kind >= static_cast<int>(alphabet.size()))
      throw InvalidGene("gene kind " + std::to_string(g.kind) + " outside the alphabet");
    GateKind kind{alphabet[static_cast<std::size_t>(g.kind)], g.angle.value_or(0.0)};
    if (kind.has_angle() && !g.angle) throw InvalidGene("parametrized gate without an angle");
    CircuitGate cg{kind, {g.slot_a}};
    if (kind.arity() == 2) {
      if (!g.slot_b) throw InvalidGene("two-qubit gene without a second slot");
      cg.qubits.push_back(*g.slot_b);
    }
    for (int q : cg.qubits)
      if (q < 0 || q >= qubits) throw InvalidGene("gene slot outside the register");
    if (cg.qubits.size() == 2 && cg.qubits[0] == cg.qubits[1]) throw InvalidGene("gene acts twice on one qubit");
    out.push_back(std::move(cg));
  }
  return out;
}

/// Applies the circuit (gate 0 first) to the columns of m.
inline void apply_circuit(const Circuit& c, int num_qubits, ComplexMatrix& m, int offset = 0) {
  int targets[2];
  for (const auto& g : c) {
    for (std::size_t i = 0; i < g.qubits.size(); ++i) targets[i] = g.qubits[i] + offset;
    apply_gate(g.gate.matrix(), std::span<const int>(targets, g.qubits.size()), num_qubits, m);
  }
}

inline ComplexMatrix circuit_unitary(const Circuit& c, int qubits) {
  ComplexMatrix m = identity(Eigen::Index{1} << qubits);
  apply_circuit(c, qubits, m);
  return m;
}

/// W = G_{L-1} ... G_1 G_0 for genes G_0 .. G_{L-1}.
inline ComplexMatrix decode_circuit(const ga::Genome& genome, int qubits, const Alphabet& alphabet = default_alphabet()) {
  return circuit_unitary(decode_genes(genome, qubits, alphabet), qubits);
}


inline GateCounts count_gates(const Circuit& c) {
  GateCounts n;
  for (const auto& g : c) (g.gate.arity() == 2 ? n.cphase : n.single_qubit) += 1;
  return n;
}

/// W multiplied by the global phase that brings it closest to u.
inline ComplexMatrix align_phase(const ComplexMatrix& u, const ComplexMatrix& w) {
  const Complex tr = (u.adjoint() * w).trace();
  if (std::abs(tr) == 0.0) return w;
  return w * std::conj(tr / std::abs(tr));
}

/// ||u - w||, or its minimum over a global phase of w when phase_invariant.
inline double residual(const ComplexMatrix& u, const ComplexMatrix& w, NormKind norm = NormKind::frobenius,
                       bool phase_invariant = false) {
  if (u.rows() != w.rows() || u.cols() != w.cols()) throw DimensionMismatch("residual: shape mismatch");
  if (!phase_invariant) return matrix_norm(u - w, norm);
  if (norm == NormKind::frobenius) {
    const double v = u.squaredNorm() + w.squaredNorm() - 2.0 * std::abs((u.adjoint() * w).trace());
    return std::sqrt(std::max(0.0, v));
  }
  // trace alignment is exact for Frobenius only; keep the better of the two
  return std::min(matrix_norm(u - w, norm), matrix_norm(u - align_phase(u, w), norm));
}

namespace detail {

/// Random genes and repair for one block segment of fixed width and budget.
class SegmentCodec {
 public:
  SegmentCodec(int qubits, GateBudget budget, Alphabet alphabet)
      : qubits_(qubits), budget_(budget), alphabet_(std::move(alphabet)) {
    for (std::size_t i = 0; i < alphabet_.size(); ++i)
      (GateKind{alphabet_[i]}.arity() == 2 ? two_ : single_).push_back(static_cast<int>(i));
    if (alphabet_.empty()) throw ConfigInvalid("gate alphabet is empty");
    if (budget_.two_qubit > 0 && two_.empty()) throw ConfigInvalid("budget needs a two-qubit gate in the alphabet");
    if (budget_.single_qubit > 0 && single_.empty())
      throw ConfigInvalid("budget needs a single-qubit gate in the alphabet");
    if (budget_.two_qubit > 0 && qubits_ < 2) throw ConfigInvalid("two-qubit gates need at least two qubits");
  }

  std::size_t length() const noexcept { return static_cast<std::size_t>(budget_.total()); }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  int qubits() const noexcept { return qubits_; }
  GateBudget budget() const noexcept { return budget_; }

  ga::Gene random_gene(Rng& rng) const {
    const bool two = single_.empty() || (!two_.empty() && qubits_ >= 2 && uniform01(rng) < fraction_two());
    return two ? random_two(rng) : random_single(rng);
  }

  ga::Gene random_single(Rng& rng) const {
    ga::Gene g;
    g.kind = single_[uniform_index(rng, single_.size())];
    g.slot_a = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(qubits_)));
    g.angle = random_angle(rng);
    return g;
  }

  ga::Gene random_two(Rng& rng) const {
    ga::Gene g;
    g.kind = two_[uniform_index(rng, two_.size())];
    g.slot_a = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(qubits_ - 1)));
    g.slot_b = g.slot_a + 1;
    if (GateKind{alphabet_[static_cast<std::size_t>(g.kind)]}.has_angle()) g.angle = random_angle(rng);
    return g;
  }

  /// Makes every gene valid and enforces the exact class counts on
  /// [first, first + length()).
  void repair(ga::Genome& g, std::size_t first, Rng& rng) const {
    const std::size_t last = first + length();
    if (g.size() < last) throw InvalidGene("genome shorter than its segments");
    std::vector<std::size_t> twos, singles;
    for (std::size_t i = first; i < last; ++i) {
      auto& gene = g[i];
      if (gene.kind < 0 || gene.kind >= static_cast<int>(alphabet_.size())) {
        gene = random_gene(rng);
      }
      const GateKind kind{alphabet_[static_cast<std::size_t>(gene.kind)]};
      if (kind.arity() == 2) {
        gene.slot_a = std::clamp(gene.slot_a, 0, qubits_ - 2);
        gene.slot_b = gene.slot_a + 1;
        twos.push_back(i);
      } else {
        gene.slot_a = std::clamp(gene.slot_a, 0, qubits_ - 1);
        gene.slot_b.reset();
        singles.push_back(i);
      }
      if (!kind.has_angle()) gene.angle.reset();
      else if (!gene.angle) gene.angle = random_angle(rng);
      else gene.angle = ga::detail::wrap_angle(*gene.angle);
    }
    const auto want = static_cast<std::size_t>(budget_.two_qubit);
    while (twos.size() > want) {
      const std::size_t k = uniform_index(rng, twos.size());
      g[twos[k]] = random_single(rng);
      singles.push_back(twos[k]);
      twos.erase(twos.begin() + static_cast<std::ptrdiff_t>(k));
    }
    while (twos.size() < want) {
      const std::size_t k = uniform_index(rng, singles.size());
      g[singles[k]] = random_two(rng);
      twos.push_back(singles[k]);
      singles.erase(singles.begin() + static_cast<std::ptrdiff_t>(k));
    }
  }

 private:
  static double random_angle(Rng& rng) { return 2.0 * kPi * uniform01(rng); }
  double fraction_two() const {
    return static_cast<double>(budget_.two_qubit) / std::max(1, budget_.total());
  }

  int qubits_;
  GateBudget budget_;
  Alphabet alphabet_;
  std::vector<int> two_, single_;
};

inline ga::Genome segment(const ga::Genome& g, std::size_t index, std::size_t length) {
  const auto first = g.begin() + static_cast<std::ptrdiff_t>(index * length);
  return ga::Genome(first, first + static_cast<std::ptrdiff_t>(length));
}

}  // namespace detail

/// Synthesis of one block unitary: fitness R = ||U_j - W_j||.
class BlockProblem {
 public:
  explicit BlockProblem(SynthesisProblem problem)
      : problem_((problem.validate(), std::move(problem))),
        codec_(problem_.qubits, problem_.budget, problem_.allowed) {}

  const SynthesisProblem& problem() const noexcept { return problem_; }
  std::size_t genome_length() const noexcept { return codec_.length(); }
  ga::Gene random_gene(std::size_t, Rng& rng) const { return codec_.random_gene(rng); }
  void repair(ga::Genome& g, Rng& rng) const { codec_.repair(g, 0, rng); }

  ComplexMatrix decode(const ga::Genome& g) const { return decode_circuit(g, problem_.qubits, problem_.allowed); }

  double fitness(const ga::Genome& g) const {
    return residual(problem_.target, decode(g), problem_.norm, problem_.phase_invariant);
  }

 private:
  SynthesisProblem problem_;
  detail::SegmentCodec codec_;
};

/// Cyclic coordinate search on the angle genes; never worsens the fitness.
template <ga::GeneticProblem P>
ga::Individual polish_angles(const P& problem, ga::Individual ind, double step = 0.1, double min_step = 1e-10,
                             std::size_t max_evaluations = 20000) {
  std::size_t evals = 0;
  while (step >= min_step && evals < max_evaluations) {
    bool improved = false;
    for (auto& gene : ind.genome) {
      if (!gene.angle) continue;
      const double base = *gene.angle;
      for (double sign : {1.0, -1.0}) {
        gene.angle = ga::detail::wrap_angle(base + sign * step);
        const double f = problem.fitness(ind.genome);
        ++evals;
        if (f < ind.fitness) {
          ind.fitness = f;
          improved = true;
          break;
        }
        gene.angle = base;
      }
    }
    if (!improved) step *= 0.5;
  }
  return ind;
}

struct SynthesisResult {
  Circuit circuit;
  ga::Genome genome;
  ComplexMatrix w;  // phase-aligned to the target when phase_invariant
  double residual = 0.0;
  ComplexMatrix eta_matrix;  // w - target
  std::vector<ga::GenerationStats> history;
  bool polished = false;
};

inline SynthesisResult synthesize_block(const SynthesisProblem& problem, const ga::GaConfig& config,
                                        bool polish = false) {
  BlockProblem bp(problem);
  auto run = ga::evolve(bp, config);
  ga::Individual best = run.best;
  if (polish) best = polish_angles(bp, best);

  SynthesisResult out;
  out.genome = best.genome;
  out.circuit = decode_genes(best.genome, problem.qubits, problem.allowed);
  out.w = circuit_unitary(out.circuit, problem.qubits);
  if (problem.phase_invariant) out.w = align_phase(problem.target, out.w);
  out.residual = best.fitness;
  out.eta_matrix = out.w - problem.target;
  out.history = std::move(run.history);
  out.polished = polish;
  return out;
}

/// U_GA assembled from local W_j, with its error budget against U_I and U_T.
struct AssembledEvolution {
  ComplexMatrix u_ga;
  ComplexMatrix u_t;
  ComplexMatrix u_i;
  double xi = 0.0;               // ||U_I - U_GA||
  double digital_error = 0.0;    // ||U_I - U_T||
  double synthesis_error = 0.0;  // ||U_T - U_GA||
  double state_error = 0.0;      // 1 - |<U_I psi|U_GA psi>|^2

  bool satisfies_triangle(double tol = 1e-10) const { return xi <= digital_error + synthesis_error + tol; }
};

inline AssembledEvolution assemble_uga(const std::vector<ComplexMatrix>& locals, const ModelSpec& spec,
                                       const TrotterPlan& plan, NormKind norm = NormKind::frobenius) {
  AssembledEvolution a;
  a.u_ga = assemble_blocks(locals, spec, plan);
  a.u_t = trotter_evolution(spec, plan);
  a.u_i = exact_evolution(spec, plan.time);
  a.xi = matrix_norm(a.u_i - a.u_ga, norm);
  a.digital_error = matrix_norm(a.u_i - a.u_t, norm);
  a.synthesis_error = matrix_norm(a.u_t - a.u_ga, norm);
  a.state_error = gadqs::state_error(a.u_i, a.u_ga, basis_state(a.u_i.rows()));
  return a;
}

/// How a whole-chain evolution is optimized.
///   state:     one genome holds every block; fitness 1 - |<U_I psi0|U_GA psi0>|^2
///   unitary:   one genome holds every block; fitness ||U_I - U_GA||
///   blockwise: each block is synthesized alone against its U_j
enum class ChainObjective { state, unitary, blockwise };

inline std::string to_string(ChainObjective o) {
  switch (o) {
    case ChainObjective::state: return "state";
    case ChainObjective::unitary: return "unitary";
    case ChainObjective::blockwise: return "blockwise";
  }
  return "?";
}

inline ChainObjective chain_objective_from_string(const std::string& s) {
  if (s == "state") return ChainObjective::state;
  if (s == "unitary") return ChainObjective::unitary;
  if (s == "blockwise") return ChainObjective::blockwise;
  throw ConfigInvalid("unknown chain objective '" + s + "'");
}

struct ChainOptions {
  GateBudget budget;
  Alphabet allowed = default_alphabet();
  ChainObjective objective = ChainObjective::state;
  // One circuit shared by every block (translation invariance).
  bool reuse_block = false;
  NormKind norm = NormKind::frobenius;
  bool phase_invariant = false;
};

/// Whole-chain synthesis: the genome is one segment per block (or a single
/// shared segment with reuse_block) and U_GA = (W_1 ... W_alpha)^l.
class ChainProblem {
 public:
  ChainProblem(ModelSpec spec, TrotterPlan plan, ChainOptions options)
      : spec_((spec.validate(), spec)),
        plan_((plan.validate(spec_.spins), plan)),
        options_(std::move(options)),
        codec_(plan_.block_size, options_.budget, options_.allowed) {
    for (const auto& b : block_hamiltonians(spec_, plan_)) offsets_.push_back(b.first);
    u_i_ = exact_evolution(spec_, plan_.time);
    reference_ = u_i_.col(0);
  }

  std::size_t segments() const noexcept { return options_.reuse_block ? 1 : offsets_.size(); }
  std::size_t blocks() const noexcept { return offsets_.size(); }
  std::size_t genome_length() const noexcept { return segments() * codec_.length(); }
  ga::Gene random_gene(std::size_t, Rng& rng) const { return codec_.random_gene(rng); }
  void repair(ga::Genome& g, Rng& rng) const {
    for (std::size_t s = 0; s < segments(); ++s) codec_.repair(g, s * codec_.length(), rng);
  }

  /// Local circuit of block j.
  Circuit block_circuit(const ga::Genome& g, std::size_t j) const {
    const std::size_t s = options_.reuse_block ? 0 : j;
    return decode_genes(detail::segment(g, s, codec_.length()), plan_.block_size, options_.allowed);
  }

  std::vector<ComplexMatrix> locals(const ga::Genome& g) const {
    std::vector<ComplexMatrix> out;
    for (std::size_t j = 0; j < blocks(); ++j) out.push_back(circuit_unitary(block_circuit(g, j), plan_.block_size));
    return out;
  }

  GateCounts counts(const ga::Genome& g) const {
    GateCounts total;
    for (std::size_t j = 0; j < blocks(); ++j) {
      const auto c = count_gates(block_circuit(g, j));
      total.cphase += c.cphase;
      total.single_qubit += c.single_qubit;
    }
    return total;
  }

  /// Applies U_GA to the columns of m; the last block of a step acts first.
  void apply(const ga::Genome& g, ComplexMatrix& m) const {
    std::vector<Circuit> circuits;
    for (std::size_t j = 0; j < blocks(); ++j) circuits.push_back(block_circuit(g, j));
    for (int s = 0; s < plan_.steps; ++s)
      for (std::size_t j = blocks(); j-- > 0;) apply_circuit(circuits[j], spec_.spins, m, offsets_[j]);
  }

  double fitness(const ga::Genome& g) const {
    if (options_.objective == ChainObjective::unitary) {
      ComplexMatrix u = identity(u_i_.rows());
      apply(g, u);
      return residual(u_i_, u, options_.norm, options_.phase_invariant);
    }
    ComplexMatrix psi = ComplexMatrix::Zero(u_i_.rows(), 1);
    psi(0, 0) = 1.0;
    apply(g, psi);
    return 1.0 - std::norm(reference_.dot(psi.col(0)));
  }

  const ModelSpec& spec() const noexcept { return spec_; }
  const TrotterPlan& plan() const noexcept { return plan_; }
  const ChainOptions& options() const noexcept { return options_; }

 private:
  ModelSpec spec_;
  TrotterPlan plan_;
  ChainOptions options_;
  detail::SegmentCodec codec_;
  std::vector<int> offsets_;
  ComplexMatrix u_i_;
  ComplexVector reference_;
};

struct ChainSynthesisResult {
  std::vector<Circuit> circuits;  // one per block
  std::vector<ComplexMatrix> locals;
  double fitness = 0.0;
  double state_error = 0.0;
  GateCounts counts;
  std::vector<ga::GenerationStats> history;
};

/// Runs `restarts` independent searches (seeds derive_seed(config.seed, {r}))
/// and keeps the best. Restarts run in parallel on `threads`.
inline ChainSynthesisResult synthesize_chain(const ModelSpec& spec, const TrotterPlan& plan,
                                             const ChainOptions& options, const ga::GaConfig& config,
                                             std::size_t restarts = 1, unsigned threads = 1) {
  if (restarts == 0) throw ConfigInvalid("at least one GA run is required");
  ChainSynthesisResult out;
  const ComplexMatrix u_i = exact_evolution(spec, plan.time);
  const ComplexVector psi0 = basis_state(u_i.rows());

  if (options.objective == ChainObjective::blockwise) {
    const auto targets = block_targets(spec, plan);
    const std::size_t distinct = options.reuse_block ? 1 : targets.size();
    std::vector<SynthesisResult> best(distinct);
    std::vector<double> best_fit(distinct, std::numeric_limits<double>::infinity());
    std::vector<std::vector<SynthesisResult>> runs(distinct, std::vector<SynthesisResult>(restarts));
    parallel_for(distinct * restarts, threads, [&](std::size_t i) {
      const std::size_t j = i / restarts, r = i % restarts;
      ga::GaConfig c = config;
      c.seed = derive_seed(config.seed, {j, r});
      c.threads = 1;
      // with reuse the interior block (first one) is the template
      runs[j][r] = synthesize_block({targets[j], plan.block_size, options.budget, options.allowed, options.norm,
                                     options.phase_invariant},
                                    c);
    });
    for (std::size_t j = 0; j < distinct; ++j)
      for (auto& run : runs[j])
        if (run.residual < best_fit[j]) {
          best_fit[j] = run.residual;
          best[j] = std::move(run);
        }
    for (std::size_t j = 0; j < targets.size(); ++j) {
      const auto& b = best[options.reuse_block ? 0 : j];
      out.circuits.push_back(b.circuit);
      out.locals.push_back(b.w);
      const auto c = count_gates(b.circuit);
      out.counts.cphase += c.cphase;
      out.counts.single_qubit += c.single_qubit;
    }
    out.fitness = *std::max_element(best_fit.begin(), best_fit.end());
    out.history = best[0].history;
  } else {
    ChainProblem problem(spec, plan, options);
    std::vector<ga::EvolveResult> runs(restarts);
    parallel_for(restarts, threads, [&](std::size_t r) {
      ga::GaConfig c = config;
      c.seed = derive_seed(config.seed, {r});
      c.threads = 1;
      runs[r] = ga::evolve(problem, c);
    });
    std::size_t pick = 0;
    for (std::size_t r = 1; r < restarts; ++r)
      if (runs[r].best.fitness < runs[pick].best.fitness) pick = r;
    const auto& g = runs[pick].best.genome;
    for (std::size_t j = 0; j < problem.blocks(); ++j) out.circuits.push_back(problem.block_circuit(g, j));
    out.locals = problem.locals(g);
    out.fitness = runs[pick].best.fitness;
    out.counts = problem.counts(g);
    out.history = std::move(runs[pick].history);
  }
  out.state_error = gadqs::state_error(u_i, assemble_blocks(out.locals, spec, plan), psi0);
  return out;
}

struct TrotterComparisonRow {
  double t = 0.0;
  double e_trotter_l1 = 0.0;
  double e_trotter_l2 = 0.0;
  double e_ga = 0.0;
  int cphase_ga = 0;
  int single_ga = 0;
};

inline ga::GaConfig default_chain_config() {
  ga::GaConfig c;
  c.max_generations = 2000;
  c.target_fitness = 1e-12;
  c.mutation_rate = 0.8;
  return c;
}

struct CompareOptions {
  int block_size = 2;
  ChainOptions chain;
  std::size_t restarts = 5;
  ga::GaConfig ga = default_chain_config();
  unsigned threads = 1;
};

inline CompareOptions default_compare_options(ModelKind model) {
  CompareOptions o;
  o.chain.budget = default_budget(model);
  return o;
}

/// E(t) for the one- and two-step Trotter baselines and for the GA sequence
/// with one step, on |0...0>. Row i searches with seed derive_seed(ga.seed, {i}).
inline std::vector<TrotterComparisonRow> compare_with_trotter(const ModelSpec& spec, const std::vector<double>& times,
                                                              const CompareOptions& options) {
  spec.validate();
  std::vector<TrotterComparisonRow> rows(times.size());
  const ComplexVector psi0 = basis_state(Eigen::Index{1} << spec.spins);
  parallel_for(times.size(), options.threads, [&](std::size_t i) {
    const double t = times[i];
    auto& row = rows[i];
    row.t = t;
    const ComplexMatrix u_i = exact_evolution(spec, t);
    row.e_trotter_l1 = state_error(u_i, trotter_evolution(spec, {t, 1, options.block_size}), psi0);
    row.e_trotter_l2 = state_error(u_i, trotter_evolution(spec, {t, 2, options.block_size}), psi0);
    ga::GaConfig c = options.ga;
    c.seed = derive_seed(options.ga.seed, {i});
    const auto syn = synthesize_chain(spec, {t, 1, options.block_size}, options.chain, c, options.restarts, 1);
    row.e_ga = syn.state_error;
    row.cphase_ga = syn.counts.cphase;
    row.single_ga = syn.counts.single_qubit;
  });
  return rows;
}

/// start, start + step, ... up to and including stop (within 1e-9 step).
inline std::vector<double> time_grid(double start, double stop, double step) {
  if (!(step > 0.0) || stop < start) throw ConfigInvalid("time grid needs step > 0 and stop >= start");
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

}  // namespace gadqs::synth
