#pragma once

// Open nearest-neighbour spin chains
//   Ising:      H = J sum Z_i Z_{i+1} + B sum X_i
//   Heisenberg: H = J sum (X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}) + B sum X_i
// and their exact and blocked Trotter evolutions.

#include <string>
#include <utility>
#include <vector>

#include "gadqs/gates.hpp"
#include "gadqs/qcore.hpp"

namespace gadqs {

enum class ModelKind { ising, heisenberg };

inline std::string to_string(ModelKind m) { return m == ModelKind::ising ? "ising" : "heisenberg"; }

inline ModelKind model_kind_from_string(const std::string& s) {
  if (s == "ising") return ModelKind::ising;
  if (s == "heisenberg") return ModelKind::heisenberg;
  throw ConfigInvalid("unknown model '" + s + "'");
}

inline constexpr int kDefaultMaxSpins = 12;

struct ModelSpec {
  ModelKind model = ModelKind::ising;
  int spins = 5;
  double coupling = 2.0;  // J
  double field = 1.0;     // B

  void validate(int max_spins = kDefaultMaxSpins) const {
    if (spins < 2) throw ConfigInvalid("model needs at least 2 spins");
    if (spins > max_spins)
      throw ConfigInvalid("model with " + std::to_string(spins) + " spins exceeds the dense cap of " +
                          std::to_string(max_spins));
  }
};

struct TrotterPlan {
  double time = 0.0;
  int steps = 1;       // l
  int block_size = 2;  // k

  int blocks(int spins) const { return (spins - 1 + block_size - 2) / (block_size - 1); }

  void validate(int spins) const {
    if (steps < 1) throw ConfigInvalid("Trotter steps must be >= 1");
    if (block_size < 2 || block_size > spins) throw ConfigInvalid("block size must lie in [2, N]");
  }
};

/// A local piece of the chain Hamiltonian acting on qubits
/// [first, first + width).
struct HamiltonianBlock {
  int first = 0;
  int width = 2;
  ComplexMatrix h;

  std::vector<int> qubits() const {
    std::vector<int> q(static_cast<std::size_t>(width));
    for (int i = 0; i < width; ++i) q[static_cast<std::size_t>(i)] = first + i;
    return q;
  }
};

namespace detail {

inline ComplexMatrix site_operator(const ComplexMatrix& op, int site, int width) {
  const int t[] = {site};
  return embed_gate(op, std::span<const int>(t), width);
}

// Bond term between local sites a and a+1 of a width-qubit register.
inline ComplexMatrix bond_term(const ModelSpec& spec, int a, int width) {
  auto zz = [&](Axis ax) {
    const int t[] = {a, a + 1};
    return embed_gate(kron(pauli(ax), pauli(ax)), std::span<const int>(t), width);
  };
  ComplexMatrix h = spec.coupling * zz(Axis::z);
  if (spec.model == ModelKind::heisenberg) h += spec.coupling * (zz(Axis::x) + zz(Axis::y));
  return h;
}

}  // namespace detail

inline ComplexMatrix build_hamiltonian(const ModelSpec& spec, int max_spins = kDefaultMaxSpins) {
  spec.validate(max_spins);
  const Eigen::Index dim = Eigen::Index{1} << spec.spins;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i + 1 < spec.spins; ++i) h += detail::bond_term(spec, i, spec.spins);
  for (int i = 0; i < spec.spins; ++i)
    h += spec.field * detail::site_operator(pauli(Axis::x), i, spec.spins);
  return h;
}

/// Partition of the chain Hamiltonian into alpha = ceil((N-1)/(k-1)) blocks
/// of k qubits. Each bond goes to the first block containing it, each field
/// term travels with the bond to its right, and the last block also takes the
/// field on the final site. The embedded blocks sum to H exactly.
inline std::vector<HamiltonianBlock> block_hamiltonians(const ModelSpec& spec, const TrotterPlan& plan) {
  spec.validate();
  plan.validate(spec.spins);
  const int k = plan.block_size;
  const int alpha = plan.blocks(spec.spins);
  std::vector<HamiltonianBlock> blocks;
  for (int j = 0; j < alpha; ++j) {
    HamiltonianBlock b;
    b.first = std::min(j * (k - 1), spec.spins - k);
    b.width = k;
    const Eigen::Index dim = Eigen::Index{1} << k;
    b.h = ComplexMatrix::Zero(dim, dim);
    blocks.push_back(std::move(b));
  }
  for (int i = 0; i + 1 < spec.spins; ++i) {
    auto& b = blocks[static_cast<std::size_t>(std::min(i / (k - 1), alpha - 1))];
    b.h += detail::bond_term(spec, i - b.first, k);
    b.h += spec.field * detail::site_operator(pauli(Axis::x), i - b.first, k);
  }
  auto& last = blocks.back();
  last.h += spec.field * detail::site_operator(pauli(Axis::x), spec.spins - 1 - last.first, k);
  return blocks;
}

/// U_I = exp(-i H t).
inline ComplexMatrix exact_evolution(const ModelSpec& spec, double t) {
  return herm_expm(build_hamiltonian(spec), Complex(0.0, -t));
}

/// U_j = exp(-i H_j t / l), one 2^k x 2^k matrix per block.
inline std::vector<ComplexMatrix> block_targets(const ModelSpec& spec, const TrotterPlan& plan) {
  std::vector<ComplexMatrix> out;
  for (const auto& b : block_hamiltonians(spec, plan))
    out.push_back(herm_expm(b.h, Complex(0.0, -plan.time / plan.steps)));
  return out;
}

/// (W_1 W_2 ... W_alpha)^l with every local W_j placed on its block.
inline ComplexMatrix assemble_blocks(const std::vector<ComplexMatrix>& locals, const ModelSpec& spec,
                                     const TrotterPlan& plan) {
  const auto blocks = block_hamiltonians(spec, plan);
  if (locals.size() != blocks.size())
    throw DimensionMismatch("expected one local unitary per block");
  const Eigen::Index dim = Eigen::Index{1} << spec.spins;
  ComplexMatrix step = identity(dim);
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const auto q = blocks[j].qubits();
    if (locals[j].rows() != (Eigen::Index{1} << blocks[j].width))
      throw DimensionMismatch("local unitary does not match block width");
    step = step * embed_gate(locals[j], q, spec.spins);
  }
  ComplexMatrix out = identity(dim);
  for (int s = 0; s < plan.steps; ++s) out = out * step;
  return out;
}

/// U_T = (prod_j U_j)^l.
inline ComplexMatrix trotter_evolution(const ModelSpec& spec, const TrotterPlan& plan) {
  return assemble_blocks(block_targets(spec, plan), spec, plan);
}

struct GateCounts {
  int cphase = 0;
  int single_qubit = 0;

  int total() const noexcept { return cphase + single_qubit; }
  friend bool operator==(const GateCounts&, const GateCounts&) = default;
};

/// Per-Trotter-step cost of the standard CPHASE + rotation compilation.
inline GateCounts reference_gate_counts(ModelKind model, int spins) {
  if (spins < 2) throw ConfigInvalid("reference_gate_counts needs N >= 2");
  if (model == ModelKind::ising) return {spins - 1, 3 * spins - 2};
  return {3 * (spins - 1), 11 * spins - 6};
}

}  // namespace gadqs
