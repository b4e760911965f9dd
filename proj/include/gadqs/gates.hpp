#pragma once

// Ideal gate library and the imperfect-CNOT model
//   W = exp(i (pi/2 H_CNOT + delta H_R)),  H_R Hermitian with ||H_R||_2 = 1.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "gadqs/qcore.hpp"

namespace gadqs {

enum class Axis { x, y, z };

inline ComplexMatrix pauli(Axis axis) {
  ComplexMatrix m(2, 2);
  switch (axis) {
    case Axis::x: m << 0, 1, 1, 0; break;
    case Axis::y: m << 0, -kI, kI, 0; break;
    case Axis::z: m << 1, 0, 0, -1; break;
  }
  return m;
}

/// R_axis(theta) = exp(-i theta sigma_axis / 2).
inline ComplexMatrix rotation(Axis axis, double theta) {
  return std::cos(theta / 2) * identity(2) - kI * std::sin(theta / 2) * pauli(axis);
}

inline ComplexMatrix cphase(double phi) {
  ComplexMatrix m = identity(4);
  m(3, 3) = std::polar(1.0, phi);
  return m;
}

inline ComplexMatrix cnot() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

/// One entry of the ideal gate alphabet.
struct GateKind {
  enum class Type { rot_x, rot_y, rot_z, cphase, cnot };

  Type type = Type::rot_x;
  double angle = 0.0;

  int arity() const noexcept { return type == Type::cphase || type == Type::cnot ? 2 : 1; }
  bool has_angle() const noexcept { return type != Type::cnot; }

  ComplexMatrix matrix() const {
    switch (type) {
      case Type::rot_x: return rotation(Axis::x, angle);
      case Type::rot_y: return rotation(Axis::y, angle);
      case Type::rot_z: return rotation(Axis::z, angle);
      case Type::cphase: return cphase(angle);
      case Type::cnot: return cnot();
    }
    return identity(2);
  }
};

inline std::string to_string(GateKind::Type t) {
  switch (t) {
    case GateKind::Type::rot_x: return "rx";
    case GateKind::Type::rot_y: return "ry";
    case GateKind::Type::rot_z: return "rz";
    case GateKind::Type::cphase: return "cphase";
    case GateKind::Type::cnot: return "cnot";
  }
  return "?";
}

inline GateKind::Type gate_type_from_string(const std::string& s) {
  if (s == "rx") return GateKind::Type::rot_x;
  if (s == "ry") return GateKind::Type::rot_y;
  if (s == "rz") return GateKind::Type::rot_z;
  if (s == "cphase") return GateKind::Type::cphase;
  if (s == "cnot") return GateKind::Type::cnot;
  throw ConfigInvalid("unknown gate type '" + s + "'");
}

/// H_CNOT = 1/2 [(1 + Z) (x) 1 + (1 - Z) (x) X]; exp(i pi/2 H_CNOT) = i CNOT.
inline ComplexMatrix cnot_hamiltonian() {
  const ComplexMatrix id = identity(2);
  const ComplexMatrix z = pauli(Axis::z);
  return 0.5 * (kron(id + z, id) + kron(id - z, pauli(Axis::x)));
}

inline const QuantumChannel& cnot_channel() {
  static const QuantumChannel channel = superop_from_unitary(cnot());
  return channel;
}

struct ImperfectGate {
  ComplexMatrix matrix;
  double delta = 0.0;
  std::uint64_t seed = 0;
  double eta = 0.0;
};

inline ImperfectGate imperfect_cnot(double delta, std::uint64_t seed,
                                    NormKind norm = NormKind::frobenius) {
  if (!(delta >= 0.0)) throw ConfigInvalid("imperfect_cnot: delta must be non-negative");
  ImperfectGate g;
  if (delta > 0.0)
    g.matrix = herm_expm((kPi / 2) * cnot_hamiltonian() + delta * random_hermitian(4, seed), kI);
  else
    g.matrix = kI * cnot();
  g.delta = delta;
  g.seed = seed;
  g.eta = channel_distance(superop_from_unitary(g.matrix), cnot_channel(), norm);
  return g;
}

/// n independently drawn imperfect CNOTs; gate i uses seed derive_seed(seed, {i}).
/// `deltas` may hold one global value or one value per gate.
struct GateSet {
  std::uint64_t seed = 0;
  std::vector<double> deltas;
  int q = 2;
  NormKind norm = NormKind::frobenius;
  std::vector<ImperfectGate> gates;

  std::size_t size() const noexcept { return gates.size(); }

  double best_eta() const {
    double best = gates.empty() ? 0.0 : gates.front().eta;
    for (const auto& g : gates) best = std::min(best, g.eta);
    return best;
  }
};

inline GateSet draw_gate_set(int n, std::vector<double> deltas, std::uint64_t seed, int q = 2,
                             NormKind norm = NormKind::frobenius) {
  if (n < 1) throw ConfigInvalid("gate set needs n >= 1");
  if (deltas.size() != 1 && deltas.size() != static_cast<std::size_t>(n))
    throw ConfigInvalid("delta list must have one entry or one per gate");
  GateSet set;
  set.seed = seed;
  set.deltas = std::move(deltas);
  set.q = q;
  set.norm = norm;
  for (int i = 0; i < n; ++i) {
    const double d = set.deltas.size() == 1 ? set.deltas.front() : set.deltas[static_cast<std::size_t>(i)];
    set.gates.push_back(imperfect_cnot(d, derive_seed(seed, {static_cast<std::uint64_t>(i)}), norm));
  }
  return set;
}

inline GateSet draw_gate_set(int n, double delta, std::uint64_t seed, int q = 2,
                             NormKind norm = NormKind::frobenius) {
  return draw_gate_set(n, std::vector<double>{delta}, seed, q, norm);
}

inline nlohmann::json to_json(const GateSet& set) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : set.gates) gates.push_back({{"seed", g.seed}, {"delta", g.delta}, {"eta", g.eta}});
  return {{"seed", set.seed},
          {"delta", set.deltas.size() == 1 ? nlohmann::json(set.deltas.front()) : nlohmann::json(set.deltas)},
          {"n", set.size()},
          {"q", set.q},
          {"norm", to_string(set.norm)},
          {"gates", gates}};
}

/// Rebuilds a gate set from its JSON record and checks the stored errors.
inline GateSet gate_set_from_json(const nlohmann::json& j) {
  std::vector<double> deltas;
  if (j.at("delta").is_array()) deltas = j.at("delta").get<std::vector<double>>();
  else deltas.push_back(j.at("delta").get<double>());
  GateSet set = draw_gate_set(j.at("n").get<int>(), deltas, j.at("seed").get<std::uint64_t>(),
                              j.at("q").get<int>(),
                              norm_kind_from_string(j.value("norm", std::string("frobenius"))));
  if (j.contains("gates")) {
    const auto& gates = j.at("gates");
    for (std::size_t i = 0; i < set.size() && i < gates.size(); ++i)
      if (gates[i].at("eta").get<double>() != set.gates[i].eta)
        throw ConfigInvalid("gate set record does not replay: eta mismatch at gate " + std::to_string(i));
  }
  return set;
}

}  // namespace gadqs
