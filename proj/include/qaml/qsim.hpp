// Copyright 2026 The QAML Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Dense statevector kernel: register layouts, kets, controlled single-qubit
 * gates, inner products, Z⊗Z expectations and measurement branching.
 *
 * Bit order: qubit 0 is the most significant bit of the amplitude index.
 */
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qaml::qsim {

using Complex = std::complex<double>;

/// Row-major 2x2 matrix {m00, m01, m10, m11}.
using Matrix2 = std::array<Complex, 4>;

inline constexpr double kTolerance = 1e-10;
inline constexpr std::size_t kDefaultQubitCap = 24;

/**
 * @brief Qubit allocation for the sample register, the two ancillas and the
 * optional batch index register.
 *
 * Qubits are laid out as [sample 0..N-1][ancilla1][ancilla2][index 0..k-1];
 * a sample-only layout omits both ancillas.
 */
struct RegisterLayout {
    std::size_t sample_qubits = 0;
    bool has_ancillas = false;
    std::size_t index_qubits = 0;

    static RegisterLayout sample_only(std::size_t n) { return {n, false, 0}; }
    static RegisterLayout triplet(std::size_t n, std::size_t index = 0) {
        return {n, true, index};
    }

    [[nodiscard]] std::size_t total_qubits() const {
        return sample_qubits + (has_ancillas ? 2 : 0) + index_qubits;
    }
    [[nodiscard]] std::size_t dimension() const {
        return std::size_t{1} << total_qubits();
    }
    [[nodiscard]] std::size_t ancilla1() const {
        require_ancillas();
        return sample_qubits;
    }
    [[nodiscard]] std::size_t ancilla2() const {
        require_ancillas();
        return sample_qubits + 1;
    }
    [[nodiscard]] std::size_t index_qubit(std::size_t k) const {
        if (k >= index_qubits) {
            throw std::out_of_range("index qubit " + std::to_string(k) +
                                    " not in layout");
        }
        return sample_qubits + (has_ancillas ? 2 : 0) + k;
    }

    /// Throws when the layout exceeds the simulability cap.
    void validate(std::size_t cap = kDefaultQubitCap) const {
        if (total_qubits() == 0) {
            throw std::invalid_argument("register layout has no qubits");
        }
        if (total_qubits() > cap) {
            throw std::invalid_argument(
                "register layout needs " + std::to_string(total_qubits()) +
                " qubits, cap is " + std::to_string(cap));
        }
    }

    bool operator==(const RegisterLayout &) const = default;

  private:
    void require_ancillas() const {
        if (!has_ancillas) {
            throw std::logic_error("layout has no ancilla registers");
        }
    }
};

/// Amplitude-index mask selecting qubit `q` in an `n`-qubit register.
[[nodiscard]] inline std::size_t bit_mask(std::size_t n, std::size_t q) {
    return std::size_t{1} << (n - 1 - q);
}

struct GateOp;

/**
 * @brief Normalized complex amplitude vector over a RegisterLayout.
 *
 * Immutable once built; operations return new kets.
 */
class Ket {
  public:
    /// Computational basis state |index⟩.
    static Ket basis(const RegisterLayout &layout, std::size_t index = 0) {
        layout.validate();
        if (index >= layout.dimension()) {
            throw std::out_of_range("basis index out of range");
        }
        std::vector<Complex> amps(layout.dimension());
        amps[index] = 1.0;
        return Ket(layout, std::move(amps));
    }

    /// Wraps amplitudes that must already have unit norm.
    static Ket from_amplitudes(const RegisterLayout &layout,
                               std::vector<Complex> amps) {
        layout.validate();
        if (amps.size() != layout.dimension()) {
            throw std::invalid_argument(
                "amplitude count " + std::to_string(amps.size()) +
                " does not match layout dimension " +
                std::to_string(layout.dimension()));
        }
        const double n = squared_norm(amps);
        if (std::abs(std::sqrt(n) - 1.0) > kTolerance) {
            throw std::invalid_argument("ket amplitudes are not normalized");
        }
        return Ket(layout, std::move(amps));
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    static Ket normalize(const RegisterLayout &layout,
                         std::vector<Complex> amps) {
        layout.validate();
        if (amps.size() != layout.dimension()) {
            throw std::invalid_argument("amplitude count does not match layout");
        }
        const double n = std::sqrt(squared_norm(amps));
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw std::invalid_argument("cannot normalize a zero vector");
        }
        for (auto &a : amps) {
            a /= n;
        }
        return Ket(layout, std::move(amps));
    }

    [[nodiscard]] const RegisterLayout &layout() const { return layout_; }
    [[nodiscard]] std::size_t qubit_count() const {
        return layout_.total_qubits();
    }
    [[nodiscard]] std::span<const Complex> amplitudes() const {
        return amps_;
    }
    [[nodiscard]] Complex operator[](std::size_t i) const { return amps_[i]; }
    [[nodiscard]] std::size_t size() const { return amps_.size(); }
    [[nodiscard]] double norm() const { return std::sqrt(squared_norm(amps_)); }

    static double squared_norm(std::span<const Complex> amps) {
        double s = 0.0;
        for (const auto &a : amps) {
            s += std::norm(a);
        }
        return s;
    }

  private:
    Ket(RegisterLayout layout, std::vector<Complex> amps)
        : layout_(layout), amps_(std::move(amps)) {}

    friend Ket apply_gate(const Ket &, const GateOp &);
    friend Ket apply_gates(Ket, std::span<const GateOp>);
    friend Ket remove_qubit(const Ket &, std::size_t, int);
    friend Ket reinterpret(const Ket &, const RegisterLayout &);

    RegisterLayout layout_;
    std::vector<Complex> amps_;
};

struct Control {
    std::size_t qubit = 0;
    int polarity = 1; ///< fires when the control qubit reads this bit
    bool operator==(const Control &) const = default;
};

enum class GateKind { single, controlled };

/// 2x2 unitary on `target`, optionally conditioned on control qubits.
struct GateOp {
    GateKind kind = GateKind::single;
    std::size_t target = 0;
    std::vector<Control> controls;
    Matrix2 matrix{1.0, 0.0, 0.0, 1.0};

    static GateOp single(std::size_t target, const Matrix2 &m) {
        return {GateKind::single, target, {}, m};
    }
    static GateOp controlled(std::size_t target, std::vector<Control> controls,
                             const Matrix2 &m) {
        GateOp g{GateKind::controlled, target, std::move(controls), m};
        if (g.controls.empty()) {
            g.kind = GateKind::single;
        }
        return g;
    }

    /// Same gate with additional controls appended.
    [[nodiscard]] GateOp with_controls(std::span<const Control> extra) const {
        GateOp g = *this;
        g.controls.insert(g.controls.end(), extra.begin(), extra.end());
        if (!g.controls.empty()) {
            g.kind = GateKind::controlled;
        }
        return g;
    }

    [[nodiscard]] GateOp adjoint() const {
        GateOp g = *this;
        g.matrix = {std::conj(matrix[0]), std::conj(matrix[2]),
                    std::conj(matrix[1]), std::conj(matrix[3])};
        return g;
    }

    [[nodiscard]] bool is_unitary(double tol = kTolerance) const {
        const auto &m = matrix;
        const Complex a = std::norm(m[0]) + std::norm(m[2]);
        const Complex b = std::conj(m[0]) * m[1] + std::conj(m[2]) * m[3];
        const Complex d = std::norm(m[1]) + std::norm(m[3]);
        return std::abs(a - 1.0) <= tol && std::abs(b) <= tol &&
               std::abs(d - 1.0) <= tol;
    }
};

namespace gates {

/// RY(θ) = exp(-iθY/2).
inline Matrix2 ry(double theta) {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    return {c, -s, s, c};
}

inline Matrix2 hadamard() {
    const double r = std::numbers::sqrt2 / 2;
    return {r, r, r, -r};
}

inline Matrix2 pauli_z() { return {1.0, 0.0, 0.0, -1.0}; }
inline Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

/// CZ expressed as Z on `b` controlled by `a`.
inline GateOp cz(std::size_t a, std::size_t b) {
    return GateOp::controlled(b, {{a, 1}}, pauli_z());
}

} // namespace gates

/// Sequence of gates conjugated and reversed, i.e. the inverse circuit.
inline std::vector<GateOp> adjoint(std::span<const GateOp> circuit) {
    std::vector<GateOp> out;
    out.reserve(circuit.size());
    for (auto it = circuit.rbegin(); it != circuit.rend(); ++it) {
        out.push_back(it->adjoint());
    }
    return out;
}

namespace detail {

inline void check_gate(const GateOp &g, std::size_t n) {
    if (g.target >= n) {
        throw std::out_of_range("gate target " + std::to_string(g.target) +
                                " out of range for " + std::to_string(n) +
                                " qubits");
    }
    for (const auto &c : g.controls) {
        if (c.qubit >= n) {
            throw std::out_of_range("gate control " + std::to_string(c.qubit) +
                                    " out of range");
        }
        if (c.qubit == g.target) {
            throw std::invalid_argument("gate target is also a control");
        }
        if (c.polarity != 0 && c.polarity != 1) {
            throw std::invalid_argument("control polarity must be 0 or 1");
        }
    }
    if (!g.is_unitary()) {
        throw std::invalid_argument("gate matrix is not unitary");
    }
}

inline void apply_in_place(std::vector<Complex> &amps, std::size_t n,
                           const GateOp &g) {
    check_gate(g, n);
    const std::size_t tmask = bit_mask(n, g.target);
    std::size_t cmask = 0;
    std::size_t cval = 0;
    for (const auto &c : g.controls) {
        const std::size_t m = bit_mask(n, c.qubit);
        cmask |= m;
        if (c.polarity == 1) {
            cval |= m;
        }
    }
    const auto &m = g.matrix;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & tmask) != 0 || (i & cmask) != cval) {
            continue;
        }
        const std::size_t j = i | tmask;
        const Complex a0 = amps[i];
        const Complex a1 = amps[j];
        amps[i] = m[0] * a0 + m[1] * a1;
        amps[j] = m[2] * a0 + m[3] * a1;
    }
}

} // namespace detail

/// Returns U·state; the input is left untouched.
inline Ket apply_gate(const Ket &state, const GateOp &gate) {
    std::vector<Complex> amps = state.amps_;
    detail::apply_in_place(amps, state.qubit_count(), gate);
    return Ket(state.layout_, std::move(amps));
}

inline Ket apply_gates(Ket state, std::span<const GateOp> circuit) {
    for (const auto &g : circuit) {
        detail::apply_in_place(state.amps_, state.qubit_count(), g);
    }
    return state;
}

/// ⟨a|b⟩, conjugate-linear in `a`.
inline Complex inner_product(const Ket &a, const Ket &b) {
    if (!(a.layout() == b.layout())) {
        throw std::invalid_argument("inner product of kets with different layouts");
    }
    Complex s = 0.0;
    const auto x = a.amplitudes();
    const auto y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += std::conj(x[i]) * y[i];
    }
    return s;
}

/// ⟨Z_q1 Z_q2⟩ for two distinct qubits.
inline double expectation_zz(const Ket &state, std::size_t q1, std::size_t q2) {
    const std::size_t n = state.qubit_count();
    if (q1 >= n || q2 >= n) {
        throw std::out_of_range("expectation qubit out of range");
    }
    if (q1 == q2) {
        throw std::invalid_argument("expectation_zz needs two distinct qubits");
    }
    const std::size_t m1 = bit_mask(n, q1);
    const std::size_t m2 = bit_mask(n, q2);
    double e = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const bool odd = ((i & m1) != 0) != ((i & m2) != 0);
        e += odd ? -std::norm(amps[i]) : std::norm(amps[i]);
    }
    return e;
}

struct Branch {
    double probability = 0.0;
    Ket state;
    int outcome = -1; ///< result of the most recent measurement, if any
};

/// Outcome-weighted collection of post-measurement states.
struct BranchEnsemble {
    std::vector<Branch> branches;

    [[nodiscard]] double total_probability() const {
        double s = 0.0;
        for (const auto &b : branches) {
            s += b.probability;
        }
        return s;
    }
};

inline constexpr double kDropProbability = 1e-14;

/// Projective Z measurement of qubit `q`; outcome-0 branch first.
inline BranchEnsemble measure_branch(const Ket &state, std::size_t q) {
    const std::size_t n = state.qubit_count();
    if (q >= n) {
        throw std::out_of_range("measured qubit out of range");
    }
    const std::size_t m = bit_mask(n, q);
    BranchEnsemble out;
    for (int outcome = 0; outcome < 2; ++outcome) {
        std::vector<Complex> amps(state.size());
        double p = 0.0;
        for (std::size_t i = 0; i < amps.size(); ++i) {
            if (((i & m) != 0) == (outcome == 1)) {
                amps[i] = state[i];
                p += std::norm(state[i]);
            }
        }
        if (p < kDropProbability) {
            continue;
        }
        out.branches.push_back(
            {p, Ket::normalize(state.layout(), std::move(amps)), outcome});
    }
    return out;
}

/**
 * @brief Drops qubit `q` from a sample-only ket in which it has the definite
 * value `outcome`.
 */
inline Ket remove_qubit(const Ket &state, std::size_t q, int outcome) {
    const auto &layout = state.layout();
    if (layout.has_ancillas || layout.index_qubits != 0) {
        throw std::invalid_argument("remove_qubit needs a sample-only layout");
    }
    const std::size_t n = state.qubit_count();
    if (q >= n || n < 2) {
        throw std::out_of_range("removed qubit out of range");
    }
    const std::size_t low_bits = n - 1 - q; // bits below q
    const std::size_t low_mask = (std::size_t{1} << low_bits) - 1;
    std::vector<Complex> amps(std::size_t{1} << (n - 1));
    for (std::size_t k = 0; k < amps.size(); ++k) {
        const std::size_t hi = (k & ~low_mask) << 1;
        const std::size_t lo = k & low_mask;
        const std::size_t full =
            hi | lo | (outcome == 1 ? (std::size_t{1} << low_bits) : 0);
        amps[k] = state[full];
    }
    return Ket::normalize(RegisterLayout::sample_only(n - 1), std::move(amps));
}

/// Same amplitudes viewed under another layout of equal qubit count.
inline Ket reinterpret(const Ket &state, const RegisterLayout &layout) {
    if (layout.total_qubits() != state.qubit_count()) {
        throw std::invalid_argument("reinterpret changes qubit count");
    }
    return Ket(layout, state.amps_);
}

/// Tensor product |a⟩⊗|b⟩ of two sample-only kets.
inline Ket tensor(const Ket &a, const Ket &b) {
    std::vector<Complex> amps(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            amps[i * b.size() + j] = a[i] * b[j];
        }
    }
    return Ket::normalize(
        RegisterLayout::sample_only(a.qubit_count() + b.qubit_count()),
        std::move(amps));
}

} // namespace qaml::qsim
