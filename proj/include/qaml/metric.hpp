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
 * Interference readout of the triplet circuit and the hinge triplet loss.
 *
 * The circuit is: prepared triplet state → W(θ) on the sample register →
 * ancilla-controlled re-encoding → H on ancilla2 → ⟨Z₁Z₂⟩. At α = 0 the
 * readout equals ½(S_an − S_ap) with S the real overlaps of the embeddings
 * g(x) = U₁(x)W(θ)|φ(x)⟩.
 */
#pragma once

#include "qaml/ansatz.hpp"
#include "qaml/embedding.hpp"
#include "qaml/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qaml {

struct LossReport {
    double expectation = 0.0;
    double loss = 0.0;
    double s_ap = 0.0;
    double s_an = 0.0;
    double z_norm = 1.0;
    /// Readout minus the reference closed form (S_an − S_ap − margin)/(4√(α²+1)).
    double calibration_residual = 0.0;
};

enum class BatchMode { classical_average, superposed };

namespace metric {

using qsim::GateOp;
using qsim::Ket;

/// Readout constant c in ⟨Z₁Z₂⟩ = c·(S_an − S_ap) at α = 0.
inline constexpr double kInterferenceConstant = 0.5;

/**
 * @brief Prepared triplet (or superposed batch) plus the ancilla-controlled
 * gates that follow W(θ). The θ-independent part is built once and reused
 * across shifted evaluations.
 */
struct TripletCircuit {
    Ket prepared;
    double z_norm = 1.0;
    std::vector<GateOp> post_ansatz;

    /// ⟨Z₁Z₂⟩ after running W(θ), the post-ansatz gates and H on ancilla2.
    [[nodiscard]] double expectation(const AnsatzParams &p) const {
        const auto &layout = prepared.layout();
        if (p.qubit_count != layout.sample_qubits) {
            throw std::invalid_argument("ansatz width does not match sample register");
        }
        Ket state = qsim::apply_gates(prepared, ansatz::build_ansatz(p));
        state = qsim::apply_gates(std::move(state), post_ansatz);
        state = qsim::apply_gate(
            state, GateOp::single(layout.ancilla2(), qsim::gates::hadamard()));
        return qsim::expectation_zz(state, layout.ancilla1(), layout.ancilla2());
    }
};

/// Natural triplet circuit for features of any real value.
inline TripletCircuit triplet_circuit(std::span<const double> xa,
                                      std::span<const double> xp,
                                      std::span<const double> xn,
                                      const MarginSpec &m) {
    if (xp.size() != xa.size() || xn.size() != xa.size()) {
        throw std::invalid_argument("triplet members differ in dimension");
    }
    auto prep = embedding::prepare_from_states(embedding::encode_features(xa),
                                               embedding::encode_features(xp),
                                               embedding::encode_features(xn), m);
    auto reencode =
        embedding::reencode_gates(xa, xp, xn, prep.state.layout());
    return {std::move(prep.state), prep.z_norm, std::move(reencode)};
}

inline TripletCircuit triplet_circuit(const Triplet &t, const MarginSpec &m) {
    t.validate();
    return triplet_circuit(t.anchor.features, t.positive.features,
                           t.negative.features, m);
}

/// One circuit over an index-register superposition of up to four triplets.
inline TripletCircuit superposed_circuit(std::span<const Triplet> batch,
                                         const MarginSpec &m) {
    for (const auto &t : batch) {
        t.validate();
    }
    auto prep = embedding::prepare_batch_superposition(batch, m);
    const auto &layout = prep.state.layout();
    std::vector<GateOp> gates;
    double z_mean = 0.0;
    for (std::size_t d = 0; d < batch.size(); ++d) {
        const auto ctl = embedding::index_controls(layout, d);
        auto g = embedding::reencode_gates(batch[d].anchor.features,
                                           batch[d].positive.features,
                                           batch[d].negative.features, layout, ctl);
        gates.insert(gates.end(), g.begin(), g.end());
        z_mean += prep.z_norms[d];
    }
    z_mean /= static_cast<double>(batch.size());
    return {std::move(prep.state), z_mean, std::move(gates)};
}

inline double measure_triplet_expectation(const Triplet &t, const AnsatzParams &p,
                                          const MarginSpec &m) {
    p.validate();
    if (t.dimension() != p.qubit_count) {
        throw std::invalid_argument("triplet dimension does not match ansatz width");
    }
    return triplet_circuit(t, m).expectation(p);
}

/// [4√(α²+1)·expectation]₊
inline double triplet_loss(double expectation, const MarginSpec &m) {
    return std::max(0.0, 4.0 * std::sqrt(m.alpha * m.alpha + 1.0) * expectation);
}

/// d loss / d expectation, with subgradient 0 at the kink.
inline double triplet_loss_slope(double expectation, const MarginSpec &m) {
    return expectation > 0.0 ? 4.0 * std::sqrt(m.alpha * m.alpha + 1.0) : 0.0;
}

struct InnerProducts {
    double s_ap = 0.0;
    double s_an = 0.0;
};

/// Re⟨g(xa)|g(xp)⟩ and Re⟨g(xa)|g(xn)⟩ from directly simulated embeddings.
inline InnerProducts oracle_inner_products(const Triplet &t, const AnsatzParams &p) {
    const Ket ga = ansatz::embed_features(t.anchor.features, p);
    const Ket gp = ansatz::embed_features(t.positive.features, p);
    const Ket gn = ansatz::embed_features(t.negative.features, p);
    return {qsim::inner_product(ga, gp).real(), qsim::inner_product(ga, gn).real()};
}

/// Reference closed form (S_an − S_ap − margin)/(4√(α²+1)), kept for comparison.
inline double reference_closed_form(double s_ap, double s_an, const MarginSpec &m) {
    return (s_an - s_ap - m.margin) / (4.0 * std::sqrt(m.alpha * m.alpha + 1.0));
}

/**
 * @brief Batch loss: hinge applied to the mean readout over the batch.
 *
 * Classical-average mode runs one circuit per triplet; superposed mode runs
 * a single index-register circuit (power-of-two batch of at most four).
 * Oracle overlaps and Z are batch means.
 */
inline LossReport batch_loss(std::span<const Triplet> batch, const AnsatzParams &p,
                             const MarginSpec &m,
                             BatchMode mode = BatchMode::classical_average) {
    if (batch.empty()) {
        throw std::invalid_argument("batch loss of an empty batch");
    }
    p.validate();
    LossReport r;
    const double count = static_cast<double>(batch.size());
    if (mode == BatchMode::superposed) {
        const auto circuit = superposed_circuit(batch, m);
        r.expectation = circuit.expectation(p);
        r.z_norm = circuit.z_norm;
    } else {
        double z = 0.0;
        double e = 0.0;
        for (const auto &t : batch) {
            const auto circuit = triplet_circuit(t, m);
            e += circuit.expectation(p);
            z += circuit.z_norm;
        }
        r.expectation = e / count;
        r.z_norm = z / count;
    }
    for (const auto &t : batch) {
        const auto s = oracle_inner_products(t, p);
        r.s_ap += s.s_ap / count;
        r.s_an += s.s_an / count;
    }
    r.loss = triplet_loss(r.expectation, m);
    r.calibration_residual = r.expectation - reference_closed_form(r.s_ap, r.s_an, m);
    return r;
}

/// 1 − |u·v| / (‖u‖‖v‖)
inline double angular_distance(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("angular distance of vectors of different size");
    }
    double dot = 0.0;
    double nu = 0.0;
    double nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) {
        throw std::invalid_argument("angular distance of a zero-norm vector");
    }
    return 1.0 - std::abs(dot) / (std::sqrt(nu) * std::sqrt(nv));
}

/// Classical reference [D(ga,gp) − D(ga,gn) + μ]₊ with the angular distance.
inline double classical_triplet_loss(std::span<const double> ga,
                                     std::span<const double> gp,
                                     std::span<const double> gn, double mu) {
    return std::max(0.0, angular_distance(ga, gp) - angular_distance(ga, gn) + mu);
}

} // namespace metric
} // namespace qaml
