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
 * Adversarial anchors: per-feature RY(2β_j) rotations along the anchor
 * loss gradient, applied only where ancilla2 = |0⟩.
 */
#pragma once

#include "qaml/embedding.hpp"
#include "qaml/grad.hpp"
#include "qaml/metric.hpp"
#include "qaml/qsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qaml {

enum class PNorm { l1, l2, linf };

/// small_angle: β = λ∇; literal_arccos: β = arccos(clamp(1 + λ∇, −1, 1)).
enum class AngleMode { small_angle, literal_arccos };

/// both: perturb the prepared anchor and its re-encoding;
/// reencode_only: perturb the re-encoding position alone.
enum class PerturbStage { both, reencode_only };

struct AdversarialConfig {
    std::vector<double> lambda;
    double bound = 0.1;
    PNorm p_norm = PNorm::linf;
    AngleMode angle_mode = AngleMode::small_angle;
    PerturbStage stage = PerturbStage::both;
    AnchorShift gradient_mode = AnchorShift::input_shift;

    /// λ = 0.1 on every feature, bounded in ∞-norm by 0.1.
    static AdversarialConfig defaults(std::size_t features) {
        AdversarialConfig cfg;
        cfg.lambda.assign(features, 0.1);
        return cfg;
    }

    [[nodiscard]] double lambda_norm() const {
        double s = 0.0;
        for (double l : lambda) {
            switch (p_norm) {
            case PNorm::l1: s += std::abs(l); break;
            case PNorm::l2: s += l * l; break;
            case PNorm::linf: s = std::max(s, std::abs(l)); break;
            }
        }
        return p_norm == PNorm::l2 ? std::sqrt(s) : s;
    }

    void validate() const {
        if (!(bound > 0.0)) {
            throw std::invalid_argument("adversarial bound must be positive");
        }
        if (lambda_norm() > bound * (1.0 + 1e-12)) {
            throw std::invalid_argument("adversarial strength norm " +
                                        std::to_string(lambda_norm()) +
                                        " exceeds bound " + std::to_string(bound));
        }
    }
};

namespace adversarial {

using qsim::GateOp;
using qsim::Ket;

namespace detail {
inline std::atomic<std::uint64_t> &counter() {
    static std::atomic<std::uint64_t> calls{0};
    return calls;
}
} // namespace detail

/// Number of adversarial rotations built by this process.
inline std::uint64_t invocation_count() { return detail::counter().load(); }

/// Half-angles β_j of the per-feature rotations.
inline std::vector<double> rotation_half_angles(const GradientVec &grad,
                                                const AdversarialConfig &cfg) {
    if (grad.target != GradTarget::anchor_features) {
        throw std::invalid_argument("adversarial rotation needs an anchor-feature gradient");
    }
    if (grad.size() != cfg.lambda.size()) {
        throw std::invalid_argument("gradient length " + std::to_string(grad.size()) +
                                    " does not match lambda length " +
                                    std::to_string(cfg.lambda.size()));
    }
    cfg.validate();
    std::vector<double> beta(grad.size());
    for (std::size_t j = 0; j < beta.size(); ++j) {
        const double step = cfg.lambda[j] * grad.partials[j];
        beta[j] = cfg.angle_mode == AngleMode::small_angle
                      ? step
                      : std::acos(std::clamp(1.0 + step, -1.0, 1.0));
    }
    return beta;
}

/// V(λ∇) = ⊗_j RY(2β_j) on sample qubit j.
inline std::vector<GateOp> build_adversarial_rotation(const GradientVec &grad,
                                                      const AdversarialConfig &cfg) {
    const auto beta = rotation_half_angles(grad, cfg);
    detail::counter().fetch_add(1);
    std::vector<GateOp> gates;
    for (std::size_t j = 0; j < beta.size(); ++j) {
        gates.push_back(GateOp::single(j, qsim::gates::ry(2.0 * beta[j])));
    }
    return gates;
}

/// Conditions every gate of `v` on ancilla2 = |0⟩.
inline std::vector<GateOp> controlled_adversarial(std::span<const GateOp> v,
                                                  const qsim::RegisterLayout &layout) {
    const std::size_t n = layout.sample_qubits;
    const qsim::Control on_zero{layout.ancilla2(), 0};
    std::vector<GateOp> out;
    out.reserve(v.size());
    for (const auto &g : v) {
        bool touches_ancilla = g.target >= n;
        for (const auto &c : g.controls) {
            touches_ancilla = touches_ancilla || c.qubit >= n;
        }
        if (touches_ancilla) {
            throw std::invalid_argument("adversarial gate touches a non-sample qubit");
        }
        out.push_back(g.with_controls(std::span(&on_zero, 1)));
    }
    return out;
}

/// V(λ∇)|φ(x)⟩; unit norm because V is unitary.
inline Ket adversarial_anchor_state(const Sample &x, const GradientVec &grad,
                                    const AdversarialConfig &cfg) {
    return qsim::apply_gates(embedding::encode_sample(x),
                             build_adversarial_rotation(grad, cfg));
}

/**
 * @brief Triplet circuit with the anchor replaced by its adversarial
 * counterpart. The re-encoding becomes V′U₁(xa); with PerturbStage::both the
 * prepared anchor is V|φa⟩ as well.
 */
inline metric::TripletCircuit adversarial_circuit(const Triplet &t,
                                                  const GradientVec &grad,
                                                  const AdversarialConfig &cfg,
                                                  const MarginSpec &m) {
    t.validate();
    const auto v = build_adversarial_rotation(grad, cfg);
    const Ket natural = embedding::encode_features(t.anchor.features);
    const Ket anchor =
        cfg.stage == PerturbStage::both ? qsim::apply_gates(natural, v) : natural;
    auto prep = embedding::prepare_from_states(
        anchor, embedding::encode_features(t.positive.features),
        embedding::encode_features(t.negative.features), m);
    const auto &layout = prep.state.layout();
    auto gates = embedding::reencode_gates(t.anchor.features, t.positive.features,
                                           t.negative.features, layout);
    const auto perturb = controlled_adversarial(v, layout);
    gates.insert(gates.end(), perturb.begin(), perturb.end());
    return {std::move(prep.state), prep.z_norm, std::move(gates)};
}

/// Anchor gradient at the current θ followed by the adversarial circuit.
inline metric::TripletCircuit make_adversarial(const Triplet &t, const AnsatzParams &p,
                                               const AdversarialConfig &cfg,
                                               const MarginSpec &m) {
    const auto g = grad::anchor_gradient(t, p, m, cfg.gradient_mode);
    return adversarial_circuit(t, g, cfg, m);
}

} // namespace adversarial
} // namespace qaml
