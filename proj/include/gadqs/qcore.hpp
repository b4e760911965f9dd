#pragma once

// Dense complex linear algebra and quantum-channel primitives.
//
// Qubit ordering: qubit 0 is the most significant bit of a basis index.
// Superoperators act on row-major vectorized density matrices, so that
// kron(U, conj(U)) * vec(rho) == vec(U rho U^dagger).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gadqs/errors.hpp"
#include "gadqs/rng.hpp"

namespace gadqs {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

enum class NormKind { frobenius, spectral };

inline std::string to_string(NormKind n) {
  return n == NormKind::frobenius ? "frobenius" : "spectral";
}

inline NormKind norm_kind_from_string(const std::string& s) {
  if (s == "frobenius") return NormKind::frobenius;
  if (s == "spectral") return NormKind::spectral;
  throw ConfigInvalid("unknown norm '" + s + "'");
}

inline ComplexMatrix identity(Eigen::Index dim) { return ComplexMatrix::Identity(dim, dim); }

inline double spectral_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

inline double matrix_norm(const ComplexMatrix& m, NormKind kind = NormKind::frobenius) {
  return kind == NormKind::frobenius ? m.norm() : spectral_norm(m);
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = 1e-10) {
  return m.rows() == m.cols() && (m - m.adjoint()).norm() < tol;
}

inline bool is_unitary(const ComplexMatrix& m, double tol = 1e-10) {
  return m.rows() == m.cols() && (m.adjoint() * m - identity(m.rows())).norm() < tol;
}

inline bool all_finite(const ComplexMatrix& m) {
  return m.array().real().isFinite().all() && m.array().imag().isFinite().all();
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// exp(scale * h) for Hermitian h, through its eigendecomposition.
inline ComplexMatrix herm_expm(const ComplexMatrix& h, Complex scale) {
  if (!is_hermitian(h)) throw NonHermitianInput("herm_expm: generator is not Hermitian");
  if (scale == Complex{0.0, 0.0}) return identity(h.rows());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
  const ComplexMatrix& v = eig.eigenvectors();
  ComplexVector phases =
      (scale * eig.eigenvalues().cast<Complex>().array()).exp().matrix();
  return v * phases.asDiagonal() * v.adjoint();
}

namespace detail {

inline void check_targets(std::span<const int> targets, int num_qubits) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= num_qubits)
      throw IndexOutOfRange("qubit index " + std::to_string(targets[i]) + " outside [0, " +
                            std::to_string(num_qubits) + ")");
    for (std::size_t j = 0; j < i; ++j)
      if (targets[i] == targets[j])
        throw DuplicateTarget("qubit " + std::to_string(targets[i]) + " listed twice");
  }
}

// Bit position (from the least significant end) of a qubit.
inline int bit_of(int qubit, int num_qubits) { return num_qubits - 1 - qubit; }

}  // namespace detail

/// Lifts u to the full register: acts on `targets` (targets[0] is the most
/// significant index of u) and as identity on every other qubit.
inline ComplexMatrix embed_gate(const ComplexMatrix& u, std::span<const int> targets,
                                int num_qubits) {
  detail::check_targets(targets, num_qubits);
  const auto k = static_cast<int>(targets.size());
  if (u.rows() != (Eigen::Index{1} << k) || u.cols() != u.rows())
    throw DimensionMismatch("embed_gate: gate dimension does not match target count");

  const std::uint64_t full = std::uint64_t{1} << num_qubits;
  std::uint64_t mask = 0;
  for (int t : targets) mask |= std::uint64_t{1} << detail::bit_of(t, num_qubits);

  auto scatter = [&](std::uint64_t local) {
    std::uint64_t bits = 0;
    for (int i = 0; i < k; ++i)
      if (local >> (k - 1 - i) & 1U) bits |= std::uint64_t{1} << detail::bit_of(targets[i], num_qubits);
    return bits;
  };
  auto gather = [&](std::uint64_t index) {
    std::uint64_t local = 0;
    for (int i = 0; i < k; ++i)
      local = (local << 1) | (index >> detail::bit_of(targets[i], num_qubits) & 1U);
    return local;
  };

  std::vector<std::uint64_t> pattern(std::size_t{1} << k);
  for (std::uint64_t r = 0; r < pattern.size(); ++r) pattern[r] = scatter(r);

  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(full),
                                          static_cast<Eigen::Index>(full));
  for (std::uint64_t col = 0; col < full; ++col) {
    const std::uint64_t rest = col & ~mask;
    const auto lc = static_cast<Eigen::Index>(gather(col));
    for (std::uint64_t r = 0; r < pattern.size(); ++r)
      out(static_cast<Eigen::Index>(rest | pattern[r]), static_cast<Eigen::Index>(col)) =
          u(static_cast<Eigen::Index>(r), lc);
  }
  return out;
}

inline ComplexMatrix embed_gate(const ComplexMatrix& u, std::initializer_list<int> targets,
                                int num_qubits) {
  return embed_gate(u, std::span<const int>(targets.begin(), targets.size()), num_qubits);
}

/// In-place m <- embed_gate(u, {a, b}, n) * m for a 4x4 u, without building
/// the full embedding. m has 2^n rows and any number of columns.
inline void apply_two_qubit(const ComplexMatrix& u, int a, int b, int num_qubits,
                            ComplexMatrix& m) {
  const std::uint64_t ba = std::uint64_t{1} << detail::bit_of(a, num_qubits);
  const std::uint64_t bb = std::uint64_t{1} << detail::bit_of(b, num_qubits);
  const std::uint64_t full = std::uint64_t{1} << num_qubits;
  Complex in[4];
  for (std::uint64_t base = 0; base < full; ++base) {
    if (base & (ba | bb)) continue;
    const Eigen::Index idx[4] = {static_cast<Eigen::Index>(base),
                                 static_cast<Eigen::Index>(base | bb),
                                 static_cast<Eigen::Index>(base | ba),
                                 static_cast<Eigen::Index>(base | ba | bb)};
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (int r = 0; r < 4; ++r) in[r] = m(idx[r], c);
      for (int r = 0; r < 4; ++r)
        m(idx[r], c) = u(r, 0) * in[0] + u(r, 1) * in[1] + u(r, 2) * in[2] + u(r, 3) * in[3];
    }
  }
}

/// In-place m <- embed_gate(u, targets, n) * m for any gate width.
inline void apply_gate(const ComplexMatrix& u, std::span<const int> targets, int num_qubits, ComplexMatrix& m) {
  if (targets.size() == 2) {
    apply_two_qubit(u, targets[0], targets[1], num_qubits, m);
    return;
  }
  const auto k = static_cast<int>(targets.size());
  const std::uint64_t local = std::uint64_t{1} << k;
  std::vector<std::uint64_t> offsets(local, 0);
  std::uint64_t mask = 0;
  for (std::uint64_t r = 0; r < local; ++r)
    for (int i = 0; i < k; ++i)
      if (r >> (k - 1 - i) & 1U) offsets[r] |= std::uint64_t{1} << detail::bit_of(targets[i], num_qubits);
  for (int t : targets) mask |= std::uint64_t{1} << detail::bit_of(t, num_qubits);
  const std::uint64_t full = std::uint64_t{1} << num_qubits;
  ComplexVector in(static_cast<Eigen::Index>(local));
  for (std::uint64_t base = 0; base < full; ++base) {
    if (base & mask) continue;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (std::uint64_t r = 0; r < local; ++r) in(static_cast<Eigen::Index>(r)) = m(static_cast<Eigen::Index>(base | offsets[r]), c);
      for (std::uint64_t r = 0; r < local; ++r) {
        Complex acc = 0.0;
        for (std::uint64_t i = 0; i < local; ++i)
          acc += u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) * in(static_cast<Eigen::Index>(i));
        m(static_cast<Eigen::Index>(base | offsets[r]), c) = acc;
      }
    }
  }
}

/// A completely positive trace-preserving map on a system of dimension
/// system_dim, stored either as Kraus operators or as a superoperator.
class QuantumChannel {
public:
  using Kraus = std::vector<ComplexMatrix>;

  static QuantumChannel from_kraus(Kraus ops) {
    if (ops.empty()) throw DimensionMismatch("channel needs at least one Kraus operator");
    const auto d = ops.front().rows();
    for (const auto& k : ops)
      if (k.rows() != d || k.cols() != d)
        throw DimensionMismatch("Kraus operators must share one square dimension");
    return QuantumChannel(std::move(ops), d);
  }

  static QuantumChannel from_superop(ComplexMatrix s, Eigen::Index system_dim) {
    if (s.rows() != system_dim * system_dim || s.cols() != s.rows())
      throw DimensionMismatch("superoperator dimension must be system_dim^2");
    return QuantumChannel(std::move(s), system_dim);
  }

  Eigen::Index system_dim() const noexcept { return system_dim_; }
  bool is_kraus() const noexcept { return std::holds_alternative<Kraus>(rep_); }
  const Kraus& kraus() const { return std::get<Kraus>(rep_); }

  ComplexMatrix superop() const {
    if (auto* s = std::get_if<ComplexMatrix>(&rep_)) return *s;
    const auto d2 = system_dim_ * system_dim_;
    ComplexMatrix out = ComplexMatrix::Zero(d2, d2);
    for (const auto& k : kraus()) out += kron(k, k.conjugate());
    return out;
  }

  /// ||sum_m K_m^dagger K_m - I||_F; zero for a trace-preserving Kraus set.
  double trace_preservation_defect() const {
    ComplexMatrix acc = ComplexMatrix::Zero(system_dim_, system_dim_);
    for (const auto& k : kraus()) acc += k.adjoint() * k;
    return (acc - identity(system_dim_)).norm();
  }

  ComplexMatrix apply(const ComplexMatrix& rho) const {
    if (is_kraus()) {
      ComplexMatrix out = ComplexMatrix::Zero(system_dim_, system_dim_);
      for (const auto& k : kraus()) out += k * rho * k.adjoint();
      return out;
    }
    ComplexVector v(system_dim_ * system_dim_);
    for (Eigen::Index i = 0; i < system_dim_; ++i)
      for (Eigen::Index j = 0; j < system_dim_; ++j) v(i * system_dim_ + j) = rho(i, j);
    ComplexVector w = std::get<ComplexMatrix>(rep_) * v;
    ComplexMatrix out(system_dim_, system_dim_);
    for (Eigen::Index i = 0; i < system_dim_; ++i)
      for (Eigen::Index j = 0; j < system_dim_; ++j) out(i, j) = w(i * system_dim_ + j);
    return out;
  }

private:
  QuantumChannel(std::variant<Kraus, ComplexMatrix> rep, Eigen::Index d)
      : rep_(std::move(rep)), system_dim_(d) {}

  std::variant<Kraus, ComplexMatrix> rep_;
  Eigen::Index system_dim_;
};

inline QuantumChannel superop_from_unitary(const ComplexMatrix& u) {
  if (!is_unitary(u)) throw NotUnitary("superop_from_unitary: input is not unitary");
  return QuantumChannel::from_superop(kron(u, u.conjugate()), u.rows());
}

/// Kraus operators of the system channel obtained from an isometry
/// V (I_sys (x) |0...0>) given as its 2^q x 2^system_qubits column block.
inline QuantumChannel kraus_from_isometry(const ComplexMatrix& iso, int q, int system_qubits = 2) {
  if (q < system_qubits || iso.rows() != (Eigen::Index{1} << q) ||
      iso.cols() != (Eigen::Index{1} << system_qubits))
    throw DimensionMismatch("kraus_from_isometry: shape does not match qubit counts");
  const Eigen::Index ancillas = Eigen::Index{1} << (q - system_qubits);
  const Eigen::Index sys = Eigen::Index{1} << system_qubits;
  QuantumChannel::Kraus ops;
  ops.reserve(static_cast<std::size_t>(ancillas));
  for (Eigen::Index m = 0; m < ancillas; ++m) {
    ComplexMatrix k(sys, sys);
    for (Eigen::Index r = 0; r < sys; ++r) k.row(r) = iso.row(r * ancillas + m);
    ops.push_back(std::move(k));
  }
  return QuantumChannel::from_kraus(std::move(ops));
}

/// Traces out ancillas 2..q-1 (prepared in |0>) of a q-qubit unitary.
inline QuantumChannel kraus_from_ancilla_circuit(const ComplexMatrix& v, int q,
                                                 int system_qubits = 2) {
  if (q < system_qubits || v.rows() != (Eigen::Index{1} << q) || v.cols() != v.rows())
    throw DimensionMismatch("kraus_from_ancilla_circuit: matrix is not 2^q x 2^q");
  const Eigen::Index ancillas = Eigen::Index{1} << (q - system_qubits);
  const Eigen::Index sys = Eigen::Index{1} << system_qubits;
  ComplexMatrix iso(v.rows(), sys);
  for (Eigen::Index s = 0; s < sys; ++s) iso.col(s) = v.col(s * ancillas);
  return kraus_from_isometry(iso, q, system_qubits);
}

inline double channel_distance(const QuantumChannel& e1, const QuantumChannel& e2,
                               NormKind kind = NormKind::frobenius) {
  if (e1.system_dim() != e2.system_dim())
    throw DimensionMismatch("channel_distance: system dimensions differ");
  return matrix_norm(e1.superop() - e2.superop(), kind);
}

/// GUE draw rescaled to unit spectral norm. Deterministic in `seed`.
inline ComplexMatrix random_hermitian(Eigen::Index dim, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {0x4855ULL}));
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix a(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      a(i, j) = Complex(re, im);
    }
  ComplexMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h, Eigen::EigenvaluesOnly);
  const double scale = eig.eigenvalues().cwiseAbs().maxCoeff();
  h /= scale;
  // restore exact Hermiticity after the division
  return 0.5 * (h + h.adjoint()).eval();
}

/// 1 - |<psi| a^dagger b |psi>|^2.
inline double state_error(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexVector& psi) {
  const Complex overlap = (a * psi).dot(b * psi);
  return 1.0 - std::norm(overlap);
}

inline ComplexVector basis_state(Eigen::Index dim, Eigen::Index index = 0) {
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return v;
}

}  // namespace gadqs
