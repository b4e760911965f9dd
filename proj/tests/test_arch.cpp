#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <numeric>
#include <set>
#include <vector>

#include "gadqs/arch.hpp"
#include "oracles.hpp"

using namespace gadqs;
using namespace gadqs::arch;

namespace {

/// Superoperator of rho -> tr_anc[V (rho (x) |0><0|) V^dagger], column by column.
oracle::M channel_superop(const oracle::M& v, int q) {
  oracle::M s(16, 16);
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) {
      oracle::M e = oracle::M::Zero(4, 4);
      e(i, j) = 1.0;
      s.col(i * 4 + j) = oracle::vec(oracle::ancilla_channel(v, q, e));
    }
  return s;
}

oracle::M circuit_oracle(const Architecture& a, const GateSet& gates) {
  oracle::M v = oracle::M::Identity(Eigen::Index{1} << a.q, Eigen::Index{1} << a.q);
  for (const auto& p : a.placements)
    v = oracle::embed(gates.gates[static_cast<std::size_t>(p.gate)].matrix, {p.control, p.target}, a.q) * v;
  return v;
}

double epsilon_oracle(const Architecture& a, const GateSet& gates) {
  const oracle::M c = oracle::cnot();
  return (channel_superop(circuit_oracle(a, gates), a.q) - oracle::kron(c, c.conjugate())).norm();
}

/// Perfect CNOTs as reversible bit maps: does the circuit send every system
/// input s, with ancillas 0, to CNOT(s) with ancillas back at 0?
bool composes_to_cnot(const Architecture& a) {
  for (int s = 0; s < 4; ++s) {
    std::array<int, 5> b{(s >> 1) & 1, s & 1, 0, 0, 0};
    for (const auto& p : a.placements) b[static_cast<std::size_t>(p.target)] ^= b[static_cast<std::size_t>(p.control)];
    if (b[0] != ((s >> 1) & 1) || b[1] != (((s >> 1) ^ s) & 1)) return false;
    for (int k = 2; k < a.q; ++k)
      if (b[static_cast<std::size_t>(k)] != 0) return false;
  }
  return true;
}

std::vector<Architecture> all_architectures(int q, int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int c = 0; c < q; ++c)
    for (int t = 0; t < q; ++t)
      if (c != t) pairs.emplace_back(c, t);
  std::vector<Architecture> out;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  do {
    std::size_t codes = 1;
    for (int i = 0; i < n; ++i) codes *= pairs.size();
    for (std::size_t code = 0; code < codes; ++code) {
      Architecture a{q, {}};
      a.placements.resize(static_cast<std::size_t>(n));
      std::size_t c = code;
      for (int i = n - 1; i >= 0; --i) {
        const auto& pr = pairs[c % pairs.size()];
        c /= pairs.size();
        a.placements[static_cast<std::size_t>(i)] = {order[static_cast<std::size_t>(i)], pr.first, pr.second};
      }
      out.push_back(std::move(a));
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

Architecture random_architecture(int q, int n, Rng& rng) {
  Architecture a{q, {}};
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (int g : order) {
    const int c = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(q)));
    int t = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(q - 1)));
    if (t >= c) ++t;
    a.placements.push_back({g, c, t});
  }
  return a;
}

}  // namespace

TEST(Count, Examples) {
  EXPECT_EQ(count_architectures(2, 1), 2);
  EXPECT_EQ(count_architectures(4, 3), 10368);
  EXPECT_EQ(count_architectures(4, 7).str(), "180592312320");
  EXPECT_EQ(count_architectures(5, 7), BigInt(20) * 20 * 20 * 20 * 20 * 20 * 20 * 5040);
  EXPECT_GT(count_architectures(5, 12), BigInt(std::numeric_limits<std::uint64_t>::max()));
  EXPECT_THROW(count_architectures(1, 3), ConfigInvalid);
  EXPECT_THROW(count_architectures(4, 0), ConfigInvalid);
}

TEST(Count, MatchesEnumeration) {
  for (auto [q, n] : {std::pair{2, 1}, {3, 2}, {4, 2}, {4, 3}}) {
    const auto all = all_architectures(q, n);
    EXPECT_EQ(BigInt(all.size()), count_architectures(q, n));
    std::set<std::vector<Placement>> distinct;
    for (const auto& a : all) distinct.insert(a.placements);
    EXPECT_EQ(distinct.size(), all.size());
  }
}

TEST(Architecture, Validation) {
  EXPECT_NO_THROW((Architecture{3, {{1, 0, 2}, {0, 2, 1}}}.validate()));
  EXPECT_THROW((Architecture{3, {{0, 0, 2}, {0, 2, 1}}}.validate()), DuplicateTarget);
  EXPECT_THROW((Architecture{3, {{0, 1, 1}}}.validate()), DuplicateTarget);
  EXPECT_THROW((Architecture{3, {{0, 0, 3}}}.validate()), IndexOutOfRange);
  EXPECT_THROW((Architecture{3, {{2, 0, 1}}}.validate()), IndexOutOfRange);
}

TEST(Architecture, JsonRoundTrip) {
  const Architecture a{4, {{2, 0, 3}, {0, 3, 1}, {1, 1, 0}}};
  const auto j = to_json(a);
  EXPECT_EQ(j.dump(), "[[2,0,3],[0,3,1],[1,1,0]]");
  EXPECT_EQ(architecture_from_json(nlohmann::json::parse(j.dump()), 4), a);
  EXPECT_THROW(architecture_from_json(nlohmann::json::parse("[[0,0,0]]"), 4), DuplicateTarget);
}

TEST(IntegratedChannel, SingleGateIsCnot) {
  const auto gates = draw_gate_set(1, 0.0, 1, 2);
  const auto ch = integrated_channel({2, {{0, 0, 1}}}, gates);
  EXPECT_LT(channel_distance(ch, cnot_channel()), 1e-12);
  EXPECT_EQ(epsilon({2, {{0, 0, 1}}}, gates).epsilon, 0.0);
  EXPECT_FALSE(epsilon({2, {{0, 0, 1}}}, gates).improved);
}

TEST(IntegratedChannel, TwoCnotsCancel) {
  const auto gates = draw_gate_set(2, 0.0, 1, 3);
  const auto ch = integrated_channel({3, {{0, 0, 1}, {1, 0, 1}}}, gates);
  EXPECT_LT(channel_distance(ch, superop_from_unitary(identity(4))), 1e-12);
}

TEST(IntegratedChannel, MatchesPartialTraceOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int q = 2 + trial % 3, n = 1 + trial % 4;
    const auto gates = draw_gate_set(n, 0.08, 500 + static_cast<std::uint64_t>(trial), q);
    const auto a = random_architecture(q, n, rng);
    const auto ch = integrated_channel(a, gates);
    EXPECT_LT(ch.trace_preservation_defect(), 1e-10);
    const oracle::M rho = oracle::random_density(4, static_cast<std::uint64_t>(trial));
    const oracle::M expect = oracle::ancilla_channel(circuit_oracle(a, gates), q, rho);
    EXPECT_LT(matrix_norm(ch.apply(rho) - expect), 1e-12);
    EXPECT_NEAR(epsilon(a, gates).epsilon, epsilon_oracle(a, gates), 1e-10);
    EXPECT_LT(matrix_norm(integrated_unitary(a, gates) - circuit_oracle(a, gates)), 1e-12);
  }
}

TEST(IntegratedChannel, SizeMismatch) {
  EXPECT_THROW(integrated_channel({2, {{0, 0, 1}}}, draw_gate_set(2, 0.0, 1)), DimensionMismatch);
}

// Every q = 4, n = 3 perfect-gate architecture: zero error exactly when the
// circuit, run as a reversible bit map, computes CNOT and restores the ancillas.
TEST(Epsilon, PerfectGateExhaustiveOracle) {
  const auto gates = draw_gate_set(3, 0.0, 1, 4);
  const auto all = all_architectures(4, 3);
  ASSERT_EQ(all.size(), 10368u);
  std::size_t exact = 0;
  for (const auto& a : all) {
    const bool zero = epsilon(a, gates).epsilon < 1e-9;
    EXPECT_EQ(zero, composes_to_cnot(a)) << to_json(a).dump();
    exact += zero ? 1 : 0;
  }
  EXPECT_GT(exact, 0u);
}

TEST(Epsilon, TargetNeverTouchedIsFarFromCnot) {
  const auto gates = draw_gate_set(1, 0.0, 1, 3);
  double lowest = 1e9;
  for (const auto& a : all_architectures(3, 1)) {
    if (a.placements[0].control == 1 || a.placements[0].target == 1) continue;
    const double e = epsilon(a, gates).epsilon;
    EXPECT_NEAR(e, epsilon_oracle(a, gates), 1e-12);
    lowest = std::min(lowest, e);
  }
  // copying the control onto the ancilla dephases it: ||S_deph - S_cnot||_F^2 = 8 + 16 - 2 * 4
  EXPECT_NEAR(lowest, 4.0, 1e-12);
  EXPECT_GT(lowest, 1.0);
}

TEST(Epsilon, ReproducibleAndImprovedFlag) {
  const auto gates = draw_gate_set(3, 0.05, 99, 4);
  const Architecture a{4, {{0, 0, 2}, {2, 0, 1}, {1, 0, 2}}};
  const auto r1 = epsilon(a, gates), r2 = epsilon(a, gates);
  EXPECT_EQ(r1.epsilon, r2.epsilon);
  EXPECT_EQ(r1.improved, r1.epsilon < r1.best_gate_eta * (1 - kImprovementMargin));
  EXPECT_EQ(r1.best_gate_eta, gates.best_eta());
  EXPECT_NEAR(r1.improvement(), (r1.best_gate_eta - r1.epsilon) / r1.best_gate_eta, 1e-15);
}

TEST(Epsilon, BestGateAloneIsNotAnImprovement) {
  const auto gates = draw_gate_set(3, 0.05, 7, 4);
  std::size_t best = 0;
  for (std::size_t i = 0; i < gates.size(); ++i)
    if (gates.gates[i].eta < gates.gates[best].eta) best = i;
  // the other two gates cancel on an ancilla pair that starts in |00>
  Architecture a{4, {}};
  for (std::size_t i = 0; i < 3; ++i)
    a.placements.push_back(i == best ? Placement{static_cast<int>(i), 0, 1} : Placement{static_cast<int>(i), 2, 3});
  const auto r = epsilon(a, gates);
  EXPECT_NEAR(r.epsilon, r.best_gate_eta, 1e-12);
  EXPECT_FALSE(r.improved);
}

TEST(Epsilon, AncillaRelabelInvariance) {
  Rng rng(4);
  auto swap23 = [](int x) { return x == 2 ? 3 : x == 3 ? 2 : x; };
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    const auto gates = draw_gate_set(n, 0.06, 900 + static_cast<std::uint64_t>(trial), 4);
    const auto a = random_architecture(4, n, rng);
    Architecture b = a;
    for (auto& p : b.placements) p = {p.gate, swap23(p.control), swap23(p.target)};
    EXPECT_NEAR(epsilon(a, gates).epsilon, epsilon(b, gates).epsilon, 1e-12);
  }
}

TEST(BruteForce, TwoQubitsOneGate) {
  const auto gates = draw_gate_set(1, 0.03, 12, 2);
  const auto r = brute_force_search(2, gates, true);
  EXPECT_EQ(r.evaluations, 2u);
  ASSERT_EQ(r.distribution.size(), 2u);
  EXPECT_EQ(r.best.architecture, (Architecture{2, {{0, 0, 1}}}));
  EXPECT_NEAR(r.best.epsilon, gates.best_eta(), 1e-12);
  EXPECT_GT(std::max(r.distribution[0], r.distribution[1]), 1.0);
}

TEST(BruteForce, FourQubitsThreeGates) {
  const auto gates = draw_gate_set(3, 0.045, 3, 4);
  const auto r = brute_force_search(4, gates, true);
  EXPECT_EQ(r.evaluations, 10368u);
  ASSERT_EQ(r.distribution.size(), 10368u);
  EXPECT_EQ(r.best.epsilon, *std::min_element(r.distribution.begin(), r.distribution.end()));

  // same enumeration order as the oracle list; spot checks against the partial-trace oracle
  const auto all = all_architectures(4, 3);
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_NEAR(r.distribution[i], epsilon(all[i], gates).epsilon, 1e-12);
  for (std::size_t i = 0; i < all.size(); i += 997) EXPECT_NEAR(r.distribution[i], epsilon_oracle(all[i], gates), 1e-10);
}

TEST(BruteForce, DeterministicAcrossThreads) {
  const auto gates = draw_gate_set(3, 0.0, 3, 4);  // many exact ties
  const auto a = brute_force_search(4, gates, true, kDefaultBruteForceCap, 1);
  const auto b = brute_force_search(4, gates, true, kDefaultBruteForceCap, 3);
  EXPECT_EQ(a.best.architecture, b.best.architecture);
  EXPECT_EQ(a.distribution, b.distribution);
  EXPECT_LT(a.best.epsilon, 1e-9);
}

TEST(BruteForce, TieGoesToSmallestPlacementList) {
  const auto gates = draw_gate_set(2, 0.0, 3, 3);
  const auto r = brute_force_search(3, gates, true);
  std::vector<Placement> smallest;
  bool found = false;
  const auto all = all_architectures(3, 2);
  for (std::size_t i = 0; i < all.size(); ++i)
    if (r.distribution[i] == r.best.epsilon && (!found || all[i].placements < smallest)) {
      smallest = all[i].placements;
      found = true;
    }
  ASSERT_TRUE(found);
  EXPECT_EQ(r.best.architecture.placements, smallest);
}

TEST(BruteForce, CapIsEnforced) {
  EXPECT_THROW(brute_force_search(4, draw_gate_set(7, 0.04, 1, 4)), SearchSpaceTooLarge);
  EXPECT_THROW(brute_force_search(4, draw_gate_set(3, 0.04, 1, 4), false, 10000), SearchSpaceTooLarge);
  EXPECT_NO_THROW(brute_force_search(4, draw_gate_set(3, 0.04, 1, 4), false, 10368));
}

TEST(ArchitectureProblem, OperatorsKeepPermutation) {
  const auto gates = draw_gate_set(5, 0.04, 8, 4);
  const ArchitectureProblem p(4, gates);
  Rng rng(77);
  auto check = [&](const ga::Genome& g) {
    const auto a = p.decode(g);
    std::vector<int> idx;
    for (const auto& pl : a.placements) idx.push_back(pl.gate);
    std::sort(idx.begin(), idx.end());
    EXPECT_EQ(idx, (std::vector<int>{0, 1, 2, 3, 4}));
  };
  for (int trial = 0; trial < 300; ++trial) {
    const auto x = p.random_genome(rng), y = p.random_genome(rng);
    check(x);
    const std::size_t split = uniform_index(rng, 6);
    auto child = p.crossover(x, y, split, rng);
    check(child);
    for (std::size_t i = 0; i < split; ++i) EXPECT_EQ(child[i], x[i]);
    p.mutate(child, 1.0, rng);
    check(child);
    ga::Genome broken;
    for (int i = 0; i < 5; ++i) broken.push_back(p.random_gene(0, rng));
    broken[0].slot_b = broken[0].slot_a;
    p.repair(broken, rng);
    check(broken);
  }
}

TEST(ArchitectureProblem, OrderCrossoverFollowsLowerParent) {
  const auto gates = draw_gate_set(4, 0.04, 8, 4);
  const ArchitectureProblem p(4, gates);
  Rng rng(1);
  const ga::Genome hi{{2, 0, 1, {}}, {0, 1, 2, {}}, {3, 2, 3, {}}, {1, 3, 0, {}}};
  const ga::Genome lo{{1, 0, 2, {}}, {3, 2, 0, {}}, {0, 3, 1, {}}, {2, 1, 3, {}}};
  const auto child = p.crossover(hi, lo, 2, rng);
  // prefix [2, 0] from hi; then lo's order of {1, 3} with lo's wires at positions 2, 3
  const ga::Genome expect{{2, 0, 1, {}}, {0, 1, 2, {}}, {1, 3, 1, {}}, {3, 1, 3, {}}};
  EXPECT_EQ(child, expect);
}

TEST(GaSearch, NeverBeatsBruteForce) {
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto gates = draw_gate_set(3, 0.045, 40 + s, 4);
    const double brute = brute_force_search(4, gates).best.epsilon;
    auto c = default_search_config();
    c.seed = s;
    c.max_generations = 300;
    const auto r = ga_search(4, gates, c);
    EXPECT_GE(r.result.epsilon, brute - 1e-12);
    EXPECT_NO_THROW(r.result.architecture.validate());
    EXPECT_EQ(r.result.epsilon, epsilon(r.result.architecture, gates).epsilon);
  }
}

TEST(GaSearch, PerfectGatesReachZero) {
  for (int n = 1; n <= 5; ++n) {
    const auto gates = draw_gate_set(n, 0.0, 5, 4);
    auto c = default_search_config();
    c.seed = static_cast<std::uint64_t>(n);
    c.target_fitness = 1e-12;
    EXPECT_LT(ga_search(4, gates, c).result.epsilon, 1e-9) << "n=" << n;
  }
}

TEST(GaSearch, DeterministicAcrossThreads) {
  const auto gates = draw_gate_set(5, 0.045, 6, 4);
  auto c = default_search_config();
  c.seed = 10;
  c.max_generations = 100;
  const auto a = ga_search(4, gates, c);
  c.threads = 3;
  const auto b = ga_search(4, gates, c);
  EXPECT_EQ(a.result.architecture, b.result.architecture);
  EXPECT_EQ(a.result.epsilon, b.result.epsilon);
}

TEST(Calibration, ReachesReferenceBestGateError) {
  ASSERT_TRUE(reference_best_gate_error(3));
  EXPECT_FALSE(reference_best_gate_error(4));
  for (int n : {3, 5, 7}) {
    const double target = *reference_best_gate_error(n);
    const auto c = calibrate_delta(n, target, 200);
    EXPECT_NEAR(c.achieved, target, 0.02 * target) << "n=" << n;
    EXPECT_GT(c.delta_star, 0.0);
    EXPECT_EQ(c.seed, kCalibrationSeed);
    EXPECT_LT(mean_best_eta(n, 0.5 * c.delta_star, 200, kCalibrationSeed), c.achieved);
  }
  EXPECT_THROW(calibrate_delta(3, -1.0), ConfigInvalid);
}

TEST(Resilience, SummaryConsistency) {
  ResilienceOptions o;
  o.n = 3;
  o.runs = 12;
  o.delta = 0.045;
  o.seed = 3;
  o.ga.max_generations = 60;
  const auto s = resilience_experiment(o);
  ASSERT_EQ(s.records.size(), 12u);
  std::size_t total = 0, improved = 0;
  double eta = 0, eps = 0;
  for (const auto& b : s.histogram) total += b.count;
  EXPECT_EQ(total, 12u);
  EXPECT_EQ(s.histogram.size(), 20u);
  for (const auto& r : s.records) {
    EXPECT_EQ(r.improved, is_improvement(r.epsilon, r.best_gate_eta));
    EXPECT_EQ(r.gate_seed, derive_seed(3, {r.run}));
    EXPECT_NEAR(r.best_gate_eta, draw_gate_set(3, 0.045, r.gate_seed, 4).best_eta(), 1e-15);
    improved += r.improved;
    eta += r.best_gate_eta;
    eps += r.epsilon;
  }
  EXPECT_DOUBLE_EQ(s.fraction_improved, improved / 12.0);
  EXPECT_NEAR(s.mean_best_gate_error, eta / 12, 1e-15);
  EXPECT_NEAR(s.mean_arch_error, eps / 12, 1e-15);
  EXPECT_EQ(s.protocol, "per-run");
  EXPECT_EQ(s.generations, 60u);
}

TEST(Resilience, DeterministicAcrossThreads) {
  ResilienceOptions o;
  o.n = 5;
  o.runs = 6;
  o.delta = 0.045;
  o.seed = 8;
  o.ga.max_generations = 40;
  const auto a = resilience_experiment(o);
  o.threads = 3;
  const auto b = resilience_experiment(o);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].epsilon, b.records[i].epsilon);
    EXPECT_EQ(a.records[i].architecture, b.records[i].architecture);
  }
  EXPECT_EQ(a.mean_improvement, b.mean_improvement);
}

TEST(Resilience, FixedArchitectureProtocol) {
  ResilienceOptions o;
  o.protocol = ResilienceProtocol::fixed_architecture;
  o.n = 5;
  o.runs = 10;
  o.delta = 0.045;
  o.seed = 2;
  o.ga.max_generations = 60;
  const auto s = resilience_experiment(o);
  EXPECT_EQ(s.protocol, "fixed-architecture");
  for (const auto& r : s.records) {
    EXPECT_EQ(r.architecture, s.records[0].architecture);
    EXPECT_EQ(r.epsilon, epsilon(r.architecture, draw_gate_set(5, 0.045, r.gate_seed, 4)).epsilon);
  }
  EXPECT_EQ(resilience_protocol_from_string(to_string(ResilienceProtocol::fixed_architecture)),
            ResilienceProtocol::fixed_architecture);
  EXPECT_THROW(resilience_protocol_from_string("shared"), ConfigInvalid);
}

TEST(Resilience, HistogramClampsEnds) {
  std::vector<RunRecord> records(3);
  records[0].improvement = -5.0;
  records[1].improvement = 0.05;
  records[2].improvement = 1.0;
  const auto h = improvement_histogram(records, 0.5);
  ASSERT_EQ(h.size(), 4u);
  EXPECT_EQ(h[0].count, 1u);
  EXPECT_EQ(h[2].count, 1u);
  EXPECT_EQ(h[3].count, 1u);
  EXPECT_DOUBLE_EQ(h[1].lo, -0.5);
}

TEST(Resilience, RejectsZeroRuns) {
  ResilienceOptions o;
  o.runs = 0;
  EXPECT_THROW(resilience_experiment(o), ConfigInvalid);
}
