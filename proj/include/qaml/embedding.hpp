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
 * Angle encoding of classical samples and preparation of the
 * margin-weighted triplet superposition over two ancilla qubits.
 *
 * Ancilla pattern (ancilla1, ancilla2) of a prepared triplet, before
 * normalization:
 *
 *   |00⟩: ½(φa + m·φn)      |01⟩: ½c·φn
 *   |10⟩: ½(φa − m·φp)      |11⟩: ½c·φp
 *
 * with m = α/√(α²+1) and c = 1/√(α²+1).
 */
#pragma once

#include "qaml/qsim.hpp"

#include <bit>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qaml {

/// Feature vector with a class label; features live in [−1, 1] after scaling.
struct Sample {
    std::vector<double> features;
    int label = 0;

    [[nodiscard]] std::size_t dimension() const { return features.size(); }
};

struct Triplet {
    Sample anchor;
    Sample positive;
    Sample negative;

    [[nodiscard]] std::size_t dimension() const { return anchor.dimension(); }

    /// Throws unless labels and dimensions form a valid triplet.
    void validate() const {
        if (positive.dimension() != anchor.dimension() ||
            negative.dimension() != anchor.dimension()) {
            throw std::invalid_argument("triplet members differ in dimension");
        }
        if (anchor.dimension() == 0) {
            throw std::invalid_argument("triplet has empty features");
        }
        if (anchor.label != positive.label) {
            throw std::invalid_argument("anchor and positive labels differ");
        }
        if (anchor.label == negative.label) {
            throw std::invalid_argument("anchor and negative share a label");
        }
    }
};

/// Margin parameter α with its derived separation α/√(α²+1).
struct MarginSpec {
    double alpha = 1.0;
    double margin = std::numbers::sqrt2 / 2;

    static MarginSpec from_alpha(double alpha) {
        if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
            throw std::invalid_argument("margin alpha must be finite and >= 0");
        }
        return {alpha, alpha / std::sqrt(alpha * alpha + 1.0)};
    }

    /// Amplitude weight 1/√(α²+1) on the ancilla2 = 1 branches.
    [[nodiscard]] double branch_weight() const {
        return 1.0 / std::sqrt(alpha * alpha + 1.0);
    }
};

namespace embedding {

using qsim::Complex;
using qsim::GateOp;
using qsim::Ket;
using qsim::RegisterLayout;

inline void check_range(std::span<const double> x) {
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!(x[j] >= -1.0 && x[j] <= 1.0)) {
            throw std::domain_error("feature " + std::to_string(j) + " = " +
                                    std::to_string(x[j]) +
                                    " outside [-1, 1]");
        }
    }
}

/**
 * Product state ⊗_j [cos(πx_j/2)|0⟩ + sin(πx_j/2)|1⟩] for any real features.
 * Gradient evaluations shift features outside [−1, 1], so no range check.
 */
inline Ket encode_features(std::span<const double> x) {
    if (x.empty()) {
        throw std::invalid_argument("cannot encode an empty feature vector");
    }
    std::vector<Complex> amps(std::size_t{1} << x.size(), Complex{1.0});
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        double a = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double half = std::numbers::pi * x[j] / 2;
            a *= (i & qsim::bit_mask(n, j)) ? std::sin(half) : std::cos(half);
        }
        amps[i] = a;
    }
    return Ket::normalize(RegisterLayout::sample_only(n), std::move(amps));
}

inline Ket encode_sample(const Sample &x) {
    check_range(x.features);
    return encode_features(x.features);
}

/// RY(πx_j) on sample qubit j, for each feature.
inline std::vector<GateOp> encoding_gates(std::span<const double> x) {
    std::vector<GateOp> gates;
    gates.reserve(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        gates.push_back(GateOp::single(j, qsim::gates::ry(std::numbers::pi * x[j])));
    }
    return gates;
}

/// U₁(x) as a gate list; applied to |0…0⟩ it reproduces encode_sample(x).
inline std::vector<GateOp> encoding_unitary(const Sample &x) {
    check_range(x.features);
    return encoding_gates(x.features);
}

/// Triplet state together with its pre-normalization squared norm.
struct PreparedTriplet {
    Ket state;
    double z_norm = 1.0;
};

namespace detail {

/// Writes one triplet's ancilla pattern into `amps` at index slice `slot`
/// and returns the slice's squared norm.
inline double inject_triplet(std::vector<Complex> &amps, const Ket &a,
                             const Ket &p, const Ket &n, const MarginSpec &m,
                             std::size_t index_qubits, std::size_t slot,
                             double scale) {
    const double mm = m.margin;
    const double c = m.branch_weight();
    const std::size_t shift = index_qubits;
    double z = 0.0;
    for (std::size_t s = 0; s < a.size(); ++s) {
        const Complex branch[4] = {
            0.5 * (a[s] + mm * n[s]), // |00⟩
            0.5 * c * n[s],           // |01⟩
            0.5 * (a[s] - mm * p[s]), // |10⟩
            0.5 * c * p[s],           // |11⟩
        };
        for (std::size_t anc = 0; anc < 4; ++anc) {
            z += std::norm(branch[anc]);
            amps[(((s << 2) | anc) << shift) | slot] = scale * branch[anc];
        }
    }
    return z;
}

inline void check_member_states(const Ket &a, const Ket &p, const Ket &n) {
    if (!(a.layout() == p.layout()) || !(a.layout() == n.layout()) ||
        a.layout().has_ancillas || a.layout().index_qubits != 0) {
        throw std::invalid_argument(
            "triplet member states must share one sample-only layout");
    }
}

} // namespace detail

/// Triplet superposition from already-encoded member states.
inline PreparedTriplet prepare_from_states(const Ket &anchor,
                                           const Ket &positive,
                                           const Ket &negative,
                                           const MarginSpec &m) {
    detail::check_member_states(anchor, positive, negative);
    const auto layout = RegisterLayout::triplet(anchor.qubit_count());
    layout.validate();
    std::vector<Complex> amps(layout.dimension());
    const double z =
        detail::inject_triplet(amps, anchor, positive, negative, m, 0, 0, 1.0);
    return {Ket::normalize(layout, std::move(amps)), z};
}

/// Amplitude-injected triplet state; see the file comment for the pattern.
inline PreparedTriplet prepare_triplet_superposition(const Triplet &t,
                                                     const MarginSpec &m) {
    if (t.positive.dimension() != t.anchor.dimension() ||
        t.negative.dimension() != t.anchor.dimension()) {
        throw std::invalid_argument("triplet members differ in dimension");
    }
    if (m.alpha < 0.0) {
        throw std::invalid_argument("margin alpha must be >= 0");
    }
    return prepare_from_states(encode_features(t.anchor.features),
                               encode_features(t.positive.features),
                               encode_features(t.negative.features), m);
}

/**
 * @brief Re-encoding U₁ conditioned on the ancilla pattern:
 * U₁(xa) when ancilla2 = 0, U₁(xn) on (0,1), U₁(xp) on (1,1).
 *
 * `extra` controls are appended to every gate (used for the batch index).
 */
inline std::vector<GateOp>
reencode_gates(std::span<const double> xa, std::span<const double> xp,
               std::span<const double> xn, const RegisterLayout &layout,
               std::span<const qsim::Control> extra = {}) {
    if (xp.size() != xa.size() || xn.size() != xa.size() ||
        xa.size() != layout.sample_qubits) {
        throw std::invalid_argument("re-encoding dimension mismatch");
    }
    const std::size_t a1 = layout.ancilla1();
    const std::size_t a2 = layout.ancilla2();
    std::vector<GateOp> out;
    out.reserve(3 * xa.size());
    auto emit = [&](std::span<const double> x, std::vector<qsim::Control> ctl) {
        ctl.insert(ctl.end(), extra.begin(), extra.end());
        for (std::size_t j = 0; j < x.size(); ++j) {
            out.push_back(GateOp::controlled(
                j, ctl, qsim::gates::ry(std::numbers::pi * x[j])));
        }
    };
    emit(xa, {{a2, 0}});
    emit(xn, {{a1, 0}, {a2, 1}});
    emit(xp, {{a1, 1}, {a2, 1}});
    return out;
}

inline std::vector<GateOp> controlled_reencode(const Triplet &t) {
    return reencode_gates(t.anchor.features, t.positive.features,
                          t.negative.features,
                          RegisterLayout::triplet(t.dimension()));
}

inline constexpr std::size_t kMaxSuperposedBatch = 4;

/// Controls selecting index-register value `slot`.
inline std::vector<qsim::Control> index_controls(const RegisterLayout &layout,
                                                 std::size_t slot) {
    std::vector<qsim::Control> ctl;
    for (std::size_t k = 0; k < layout.index_qubits; ++k) {
        const int bit = static_cast<int>((slot >> (layout.index_qubits - 1 - k)) & 1U);
        ctl.push_back({layout.index_qubit(k), bit});
    }
    return ctl;
}

struct PreparedBatch {
    Ket state;
    std::vector<double> z_norms; ///< per triplet, in index order
};

/**
 * @brief Index-register superposition (1/√m) Σ_d |triplet_d⟩|d⟩, each slice
 * holding that triplet's normalized pattern.
 */
inline PreparedBatch prepare_batch_superposition(std::span<const Triplet> batch,
                                                 const MarginSpec &m) {
    const std::size_t size = batch.size();
    if (size == 0 || !std::has_single_bit(size)) {
        throw std::invalid_argument("superposed batch size must be a power of two");
    }
    if (size > kMaxSuperposedBatch) {
        throw std::invalid_argument("superposed batch size " +
                                    std::to_string(size) + " exceeds cap of " +
                                    std::to_string(kMaxSuperposedBatch));
    }
    const std::size_t dim = batch.front().dimension();
    for (const auto &t : batch) {
        if (t.dimension() != dim || t.positive.dimension() != dim ||
            t.negative.dimension() != dim) {
            throw std::invalid_argument("batch members differ in dimension");
        }
    }
    const std::size_t index_qubits = std::bit_width(size) - 1;
    const auto layout = RegisterLayout::triplet(dim, index_qubits);
    layout.validate();
    std::vector<Complex> amps(layout.dimension());
    std::vector<double> zs;
    const double slice = 1.0 / std::sqrt(static_cast<double>(size));
    for (std::size_t d = 0; d < size; ++d) {
        const auto &t = batch[d];
        const Ket a = encode_features(t.anchor.features);
        const Ket p = encode_features(t.positive.features);
        const Ket n = encode_features(t.negative.features);
        // First pass measures the slice norm, second writes it normalized.
        std::vector<Complex> scratch(layout.dimension());
        const double z = detail::inject_triplet(scratch, a, p, n, m,
                                                index_qubits, d, 1.0);
        detail::inject_triplet(amps, a, p, n, m, index_qubits, d,
                               slice / std::sqrt(z));
        zs.push_back(z);
    }
    return {Ket::normalize(layout, std::move(amps)), std::move(zs)};
}

} // namespace embedding
} // namespace qaml
