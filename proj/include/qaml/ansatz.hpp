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
 * Layered hardware-efficient ansatz W(θ) on the sample register and the
 * measurement-based dimension-reduction channel.
 *
 * Each layer applies the even-start pairs (0,1),(2,3),… followed by the
 * odd-start pairs (1,2),(3,4),…; a module on (i, i+1) is RY(θa)⊗RY(θb)
 * followed by CZ.
 */
#pragma once

#include "qaml/embedding.hpp"
#include "qaml/qsim.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qaml {

/// Neighbor pairs of one ansatz layer, even-start pairs first.
inline std::vector<std::pair<std::size_t, std::size_t>>
module_pairs(std::size_t qubits) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i + 1 < qubits; i += 2) {
        pairs.emplace_back(i, i + 1);
    }
    for (std::size_t i = 1; i + 1 < qubits; i += 2) {
        pairs.emplace_back(i, i + 1);
    }
    return pairs;
}

/**
 * @brief Angles θ[layer][module][2] of W(θ), stored flat.
 *
 * `identity` replaces W(θ) by the identity; kernel checks use it to isolate
 * the encoding.
 */
struct AnsatzParams {
    std::size_t qubit_count = 0;
    std::size_t layers = 0;
    std::vector<double> angles;
    bool identity = false;

    [[nodiscard]] std::size_t modules_per_layer() const {
        return module_pairs(qubit_count).size();
    }
    [[nodiscard]] std::size_t expected_size() const {
        return layers * modules_per_layer() * 2;
    }
    [[nodiscard]] double angle(std::size_t layer, std::size_t module,
                               std::size_t slot) const {
        return angles.at((layer * modules_per_layer() + module) * 2 + slot);
    }

    void validate() const {
        if (qubit_count == 0) {
            throw std::invalid_argument("ansatz needs at least one qubit");
        }
        if (angles.size() != expected_size()) {
            throw std::invalid_argument(
                "ansatz angle count " + std::to_string(angles.size()) +
                " does not match " + std::to_string(expected_size()) + " for " +
                std::to_string(qubit_count) + " qubits x " +
                std::to_string(layers) + " layers");
        }
        for (double a : angles) {
            if (!std::isfinite(a)) {
                throw std::invalid_argument("ansatz angle is not finite");
            }
        }
    }

    static AnsatzParams zeros(std::size_t qubits, std::size_t layers) {
        AnsatzParams p{qubits, layers, {}, false};
        p.angles.assign(p.expected_size(), 0.0);
        return p;
    }

    static AnsatzParams identity_map(std::size_t qubits) {
        return {qubits, 0, {}, true};
    }

    /// Angles uniform in [−π, π).
    template <class Rng>
    static AnsatzParams random(std::size_t qubits, std::size_t layers, Rng &rng) {
        AnsatzParams p = zeros(qubits, layers);
        std::uniform_real_distribution<double> dist(-std::numbers::pi,
                                                    std::numbers::pi);
        for (auto &a : p.angles) {
            a = dist(rng);
        }
        return p;
    }
};

namespace ansatz {

using qsim::GateOp;
using qsim::Ket;

inline std::vector<GateOp> build_ansatz(const AnsatzParams &p) {
    p.validate();
    std::vector<GateOp> gates;
    if (p.identity) {
        return gates;
    }
    const auto pairs = module_pairs(p.qubit_count);
    gates.reserve(p.layers * pairs.size() * 3);
    for (std::size_t k = 0; k < p.layers; ++k) {
        for (std::size_t mod = 0; mod < pairs.size(); ++mod) {
            const auto [i, j] = pairs[mod];
            gates.push_back(GateOp::single(i, qsim::gates::ry(p.angle(k, mod, 0))));
            gates.push_back(GateOp::single(j, qsim::gates::ry(p.angle(k, mod, 1))));
            gates.push_back(qsim::gates::cz(i, j));
        }
    }
    return gates;
}

/// g(x) = U₁(x)·W(θ)·|φ(x)⟩ for features of any real value.
inline Ket embed_features(std::span<const double> x, const AnsatzParams &p) {
    if (x.size() != p.qubit_count) {
        throw std::invalid_argument("sample dimension " + std::to_string(x.size()) +
                                    " does not match ansatz width " +
                                    std::to_string(p.qubit_count));
    }
    Ket state = embedding::encode_features(x);
    state = qsim::apply_gates(std::move(state), build_ansatz(p));
    return qsim::apply_gates(std::move(state), embedding::encoding_gates(x));
}

inline Ket embed_sample(const Sample &x, const AnsatzParams &p) {
    embedding::check_range(x.features);
    return embed_features(x.features, p);
}

/// Per layer, per qubit pair: RY angles applied after outcome 0 and 1.
struct ReductionParams {
    std::vector<std::vector<std::pair<double, double>>> controlled_angles;

    [[nodiscard]] std::size_t layers() const { return controlled_angles.size(); }

    /// Angle table shaped for `qubits` input qubits and `layers` halvings.
    static ReductionParams uniform(std::size_t qubits, std::size_t layers,
                                   double angle0, double angle1) {
        ReductionParams r;
        for (std::size_t k = 0; k < layers; ++k) {
            qubits /= 2;
            r.controlled_angles.emplace_back(qubits, std::make_pair(angle0, angle1));
        }
        return r;
    }
};

/**
 * @brief Halves the sample register once per layer: CZ on each pair (2i,2i+1),
 * measure qubit 2i, rotate qubit 2i+1 by RY(P⁰) or RY(P¹) on the outcome, and
 * drop the measured qubit.
 *
 * Returns the ensemble over all outcome strings.
 */
inline qsim::BranchEnsemble dimension_reduction(const Ket &state,
                                                const ReductionParams &r) {
    const auto &layout = state.layout();
    if (layout.has_ancillas || layout.index_qubits != 0) {
        throw std::invalid_argument("dimension reduction acts on a sample-only ket");
    }
    const std::size_t n = layout.sample_qubits;
    const std::size_t factor = std::size_t{1} << r.layers();
    if (n % factor != 0 || n / factor == 0) {
        throw std::invalid_argument("2^layers = " + std::to_string(factor) +
                                    " does not divide " + std::to_string(n) +
                                    " sample qubits");
    }
    qsim::BranchEnsemble ens{{{1.0, state}}};
    std::size_t width = n;
    for (std::size_t k = 0; k < r.layers(); ++k) {
        const std::size_t pairs = width / 2;
        if (r.controlled_angles[k].size() != pairs) {
            throw std::invalid_argument("reduction layer " + std::to_string(k) +
                                        " needs " + std::to_string(pairs) +
                                        " angle pairs");
        }
        for (auto &b : ens.branches) {
            for (std::size_t i = 0; i < pairs; ++i) {
                b.state = qsim::apply_gate(b.state, qsim::gates::cz(2 * i, 2 * i + 1));
            }
        }
        // Measure pairs from the last one so earlier qubit indices stay put.
        for (std::size_t i = pairs; i-- > 0;) {
            const std::size_t measured = 2 * i;
            const auto [angle0, angle1] = r.controlled_angles[k][i];
            qsim::BranchEnsemble next;
            for (const auto &b : ens.branches) {
                for (auto &out : qsim::measure_branch(b.state, measured).branches) {
                    const int bit = out.outcome;
                    const double angle = bit == 0 ? angle0 : angle1;
                    Ket rotated = qsim::apply_gate(
                        out.state, GateOp::single(measured + 1, qsim::gates::ry(angle)));
                    next.branches.push_back(
                        {b.probability * out.probability,
                         qsim::remove_qubit(rotated, measured, bit), bit});
                }
            }
            ens = std::move(next);
        }
        width = pairs;
    }
    return ens;
}

} // namespace ansatz
} // namespace qaml
