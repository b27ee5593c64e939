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
 * Shift-rule and finite-difference gradients, generic over the loss
 * callable, plus the triplet-loss gradients used by training and the
 * adversarial generator.
 */
#pragma once

#include "qaml/ansatz.hpp"
#include "qaml/embedding.hpp"
#include "qaml/metric.hpp"

#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qaml {

enum class GradMethod { input_shift, exact_shift, finite_diff };
enum class GradTarget { theta, anchor_features };

/// Input-shift variant for anchor features.
enum class AnchorShift { input_shift, exact };

struct GradientVec {
    std::vector<double> partials;
    GradMethod method = GradMethod::exact_shift;
    GradTarget target = GradTarget::theta;

    [[nodiscard]] std::size_t size() const { return partials.size(); }
    [[nodiscard]] double norm() const {
        double s = 0.0;
        for (double g : partials) {
            s += g * g;
        }
        return std::sqrt(s);
    }
};

template <class F>
concept VectorFunction = std::invocable<F, std::span<const double>> &&
    std::convertible_to<std::invoke_result_t<F, std::span<const double>>, double>;

namespace grad {

namespace detail {

template <VectorFunction F>
double eval_finite(F &f, std::span<const double> v) {
    const double y = f(v);
    if (!std::isfinite(y)) {
        throw std::runtime_error("loss evaluation returned a non-finite value");
    }
    return y;
}

/// ½[f(v + s·e_k) − f(v − s·e_k)] scaled by `factor`.
template <VectorFunction F>
double two_point(F &f, std::vector<double> &v, std::size_t k, double shift,
                 double factor) {
    const double orig = v[k];
    v[k] = orig + shift;
    const double plus = eval_finite(f, v);
    v[k] = orig - shift;
    const double minus = eval_finite(f, v);
    v[k] = orig;
    return factor * (plus - minus);
}

} // namespace detail

/**
 * @brief ∂f/∂θ_k = ½[f(θ_k + π/2) − f(θ_k − π/2)] for every angle.
 *
 * Exact when f is a + b·cos θ_k + c·sin θ_k in each angle, which holds for
 * an expectation value with θ_k entering through a single RY.
 */
template <VectorFunction F>
GradientVec grad_theta(F &&loss_at, std::span<const double> theta) {
    std::vector<double> v(theta.begin(), theta.end());
    GradientVec g{{}, GradMethod::exact_shift, GradTarget::theta};
    g.partials.reserve(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        g.partials.push_back(detail::two_point(loss_at, v, k, std::numbers::pi / 2, 0.5));
    }
    return g;
}

/**
 * @brief Input-feature gradient by two shifted evaluations per feature.
 *
 * input_shift: ½[L(x + (π/2)e_j) − L(x − (π/2)e_j)], the ±π/2 rule of the
 * adversarial generator; only a direction heuristic for RY(πx) encodings.
 * exact: (π/2)[L(x + ½e_j) − L(x − ½e_j)], the derivative of any
 * a + b·cos(πx_j) + c·sin(πx_j).
 */
template <VectorFunction F>
GradientVec grad_anchor(F &&loss_at, std::span<const double> x, AnchorShift mode) {
    std::vector<double> v(x.begin(), x.end());
    const bool input = mode == AnchorShift::input_shift;
    const double shift = input ? std::numbers::pi / 2 : 0.5;
    const double factor = input ? 0.5 : std::numbers::pi / 2;
    GradientVec g{{}, input ? GradMethod::input_shift : GradMethod::exact_shift,
                  GradTarget::anchor_features};
    for (std::size_t j = 0; j < v.size(); ++j) {
        g.partials.push_back(detail::two_point(loss_at, v, j, shift, factor));
    }
    return g;
}

/// Central differences with step h.
template <VectorFunction F>
GradientVec finite_diff(F &&loss_at, std::span<const double> v, double h,
                        GradTarget target = GradTarget::theta) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("finite-difference step must be positive");
    }
    std::vector<double> w(v.begin(), v.end());
    GradientVec g{{}, GradMethod::finite_diff, target};
    for (std::size_t k = 0; k < w.size(); ++k) {
        g.partials.push_back(detail::two_point(loss_at, w, k, h, 0.5 / h));
    }
    return g;
}

/**
 * @brief ∂f/∂v_k for f whose dependence on v_k is a trigonometric polynomial
 * with frequencies ω₀, 2ω₀, …, Rω₀.
 *
 * Uses the 2R equidistant shifts t_μ = (2μ−1)π/(2R), μ = 1…2R, in the
 * scaled variable t = ω₀v_k:
 *   f'(t) = Σ_μ f(t + t_μ)·(−1)^{μ−1} / (4R·sin²(t_μ/2)).
 */
template <VectorFunction F>
double equidistant_shift_derivative(F &&f, std::span<const double> v, std::size_t k,
                                    double omega0, std::size_t frequencies) {
    if (k >= v.size() || frequencies == 0 || !(omega0 > 0.0)) {
        throw std::invalid_argument("bad equidistant shift request");
    }
    std::vector<double> w(v.begin(), v.end());
    const double r = static_cast<double>(frequencies);
    double d = 0.0;
    for (std::size_t mu = 1; mu <= 2 * frequencies; ++mu) {
        const double t = (2.0 * static_cast<double>(mu) - 1.0) * std::numbers::pi / (2.0 * r);
        w[k] = v[k] + t / omega0;
        const double s = std::sin(t / 2);
        const double sign = (mu % 2 == 1) ? 1.0 : -1.0;
        d += detail::eval_finite(f, w) * sign / (4.0 * r * s * s);
    }
    return omega0 * d;
}

/// Mean readout, hinge loss and exact θ-gradient of a batch of circuits.
struct ThetaGradient {
    double expectation = 0.0;
    double loss = 0.0;
    GradientVec gradient;
};

/**
 * @brief θ-gradient of [K·mean readout]₊ over `circuits`.
 *
 * The shift rule runs on the readout itself (exact: each θ_k enters one RY);
 * the hinge is applied by the chain rule with subgradient 0 at the kink.
 */
inline ThetaGradient theta_loss_gradient(std::span<const metric::TripletCircuit> circuits,
                                         const AnsatzParams &p, const MarginSpec &m) {
    if (circuits.empty()) {
        throw std::invalid_argument("gradient of an empty batch");
    }
    p.validate();
    const double count = static_cast<double>(circuits.size());
    auto mean_readout = [&](std::span<const double> theta) {
        AnsatzParams q = p;
        q.angles.assign(theta.begin(), theta.end());
        double e = 0.0;
        for (const auto &c : circuits) {
            e += c.expectation(q);
        }
        return e / count;
    };
    ThetaGradient out;
    out.expectation = mean_readout(p.angles);
    out.loss = metric::triplet_loss(out.expectation, m);
    const double slope = metric::triplet_loss_slope(out.expectation, m);
    if (slope == 0.0) {
        out.gradient = {std::vector<double>(p.angles.size(), 0.0),
                        GradMethod::exact_shift, GradTarget::theta};
        return out;
    }
    out.gradient = grad_theta(mean_readout, p.angles);
    for (auto &g : out.gradient.partials) {
        g *= slope;
    }
    return out;
}

/// Per-triplet loss L(θ, xa, xp, xn) as a function of the anchor features.
inline auto anchor_loss_function(const Triplet &t, const AnsatzParams &p,
                                 const MarginSpec &m) {
    return [&t, &p, m](std::span<const double> xa) {
        return metric::triplet_loss(
            metric::triplet_circuit(xa, t.positive.features, t.negative.features, m)
                .expectation(p),
            m);
    };
}

/**
 * @brief Gradient of the per-triplet loss with respect to the anchor
 * features.
 *
 * input_shift: the ±π/2 input shift applied to the loss.
 *
 * exact: the anchor enters the readout E = N/Z through its prepared
 * encoding and its controlled re-encoding. In each feature the
 * unnormalized readout N has frequencies {π/2, π} and the preparation norm
 * Z has frequency π/2, so N' uses the four-point equidistant rule, Z' the
 * two-point rule, and the quotient rule gives E'. The hinge enters by the
 * chain rule.
 */
inline GradientVec anchor_gradient(const Triplet &t, const AnsatzParams &p,
                                   const MarginSpec &m, AnchorShift mode) {
    t.validate();
    p.validate();
    if (mode == AnchorShift::input_shift) {
        return grad_anchor(anchor_loss_function(t, p, m), t.anchor.features,
                           AnchorShift::input_shift);
    }
    auto circuit_at = [&](std::span<const double> xa) {
        return metric::triplet_circuit(xa, t.positive.features, t.negative.features, m);
    };
    const auto base = circuit_at(t.anchor.features);
    const double e0 = base.expectation(p);
    const double z0 = base.z_norm;
    GradientVec g{std::vector<double>(t.dimension(), 0.0), GradMethod::exact_shift,
                  GradTarget::anchor_features};
    const double slope = metric::triplet_loss_slope(e0, m);
    if (slope == 0.0) {
        return g;
    }
    auto numerator = [&](std::span<const double> xa) {
        const auto c = circuit_at(xa);
        return c.expectation(p) * c.z_norm;
    };
    auto norm = [&](std::span<const double> xa) { return circuit_at(xa).z_norm; };
    constexpr double kHalfFrequency = std::numbers::pi / 2;
    for (std::size_t j = 0; j < t.dimension(); ++j) {
        const double dn =
            equidistant_shift_derivative(numerator, t.anchor.features, j, kHalfFrequency, 2);
        const double dz =
            equidistant_shift_derivative(norm, t.anchor.features, j, kHalfFrequency, 1);
        const double de = (dn * z0 - e0 * z0 * dz) / (z0 * z0);
        g.partials[j] = slope * de;
    }
    return g;
}

} // namespace grad
} // namespace qaml
