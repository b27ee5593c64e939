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
 * Self-checks run by `qaml gradcheck`: shift-rule gradients against finite
 * differences, the α = 0 interference constant, encoding kernels and batch
 * linearity.
 */
#pragma once

#include "qaml/ansatz.hpp"
#include "qaml/embedding.hpp"
#include "qaml/grad.hpp"
#include "qaml/metric.hpp"
#include "qaml/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace qaml::verify {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

inline constexpr double kFiniteDiffStep = 1e-5;
inline constexpr double kGradientTolerance = 1e-6;

/// Uniform features in [−1, 1] for one sample of the given label.
template <class Rng>
Sample random_sample(std::size_t n, int label, Rng &rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Sample s;
    s.label = label;
    for (std::size_t i = 0; i < n; ++i) {
        s.features.push_back(u(rng));
    }
    return s;
}

template <class Rng>
Triplet random_triplet(std::size_t n, Rng &rng) {
    return {random_sample(n, 0, rng), random_sample(n, 0, rng), random_sample(n, 1, rng)};
}

/// Largest elementwise |a − b|.
inline double max_abs_diff(const GradientVec &a, const GradientVec &b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a.partials[i] - b.partials[i]));
    }
    return d;
}

/**
 * @brief θ and anchor gradients against central differences on seeded
 * hinge-active configurations with N ∈ {2, 4}, l ∈ {2, 4}, α ∈ {0, 1}.
 */
inline CheckResult check_gradients(std::size_t configs = 20, std::uint64_t seed = 7) {
    std::mt19937_64 rng(seed);
    double worst_theta = 0.0;
    double worst_anchor = 0.0;
    std::size_t done = 0;
    for (std::size_t attempt = 0; done < configs && attempt < 100 * configs; ++attempt) {
        const std::size_t n = (done % 2 == 0) ? 2 : 4;
        const std::size_t layers = (done / 2) % 2 == 0 ? 2 : 4;
        const double alpha = (done / 4) % 2 == 0 ? 0.0 : 1.0;
        const auto t = random_triplet(n, rng);
        const auto p = AnsatzParams::random(n, layers, rng);
        const auto m = MarginSpec::from_alpha(alpha);
        const auto circuit = metric::triplet_circuit(t, m);
        // Keep clear of the hinge kink so central differences stay one-sided.
        if (circuit.expectation(p) < 1e-3) {
            continue;
        }
        const std::vector<metric::TripletCircuit> batch{circuit};
        const auto shift = grad::theta_loss_gradient(batch, p, m);
        auto theta_loss = [&](std::span<const double> theta) {
            AnsatzParams q = p;
            q.angles.assign(theta.begin(), theta.end());
            return metric::triplet_loss(circuit.expectation(q), m);
        };
        const auto fd = grad::finite_diff(theta_loss, p.angles, kFiniteDiffStep);
        worst_theta = std::max(worst_theta, max_abs_diff(shift.gradient, fd));

        const auto anchor = grad::anchor_gradient(t, p, m, AnchorShift::exact);
        const auto anchor_fd =
            grad::finite_diff(grad::anchor_loss_function(t, p, m), t.anchor.features,
                              kFiniteDiffStep, GradTarget::anchor_features);
        worst_anchor = std::max(worst_anchor, max_abs_diff(anchor, anchor_fd));
        ++done;
    }
    std::ostringstream os;
    os << done << " configs, max |theta err| " << worst_theta << ", max |anchor err| "
       << worst_anchor;
    return {"gradients", done == configs && worst_theta < kGradientTolerance &&
                             worst_anchor < kGradientTolerance,
            os.str()};
}

/// Per-case constants c = E / (S_an − S_ap) at α = 0.
struct ConstantFit {
    double mean = 0.0;
    double spread = 0.0; ///< max − min over cases
    std::size_t cases = 0;
};

inline ConstantFit fit_interference_constant(std::size_t cases = 50, std::uint64_t seed = 11) {
    std::mt19937_64 rng(seed);
    const auto m = MarginSpec::from_alpha(0.0);
    std::vector<double> c;
    while (c.size() < cases) {
        const std::size_t n = 2 + c.size() % 3;
        const auto t = random_triplet(n, rng);
        const auto p = AnsatzParams::random(n, 2 + c.size() % 2, rng);
        const auto s = metric::oracle_inner_products(t, p);
        const double diff = s.s_an - s.s_ap;
        if (std::abs(diff) < 0.05) {
            continue;
        }
        c.push_back(metric::measure_triplet_expectation(t, p, m) / diff);
    }
    ConstantFit f;
    f.cases = c.size();
    for (double v : c) {
        f.mean += v / static_cast<double>(c.size());
    }
    const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    f.spread = *hi - *lo;
    return f;
}

inline CheckResult check_interference_constant() {
    const auto f = fit_interference_constant();
    std::ostringstream os;
    os.precision(12);
    os << "c = " << f.mean << " over " << f.cases << " cases, spread " << f.spread;
    return {"interference constant", f.spread < 1e-10, os.str()};
}

/// Single- and double-encoding overlaps against Π cos(πΔ/2) and Π cos(πΔ).
inline CheckResult check_kernels(std::size_t pairs = 100, std::uint64_t seed = 13) {
    std::mt19937_64 rng(seed);
    const double pi = std::numbers::pi;
    double worst = 0.0;
    for (std::size_t k = 0; k < pairs; ++k) {
        const std::size_t n = 1 + k % 4;
        const auto x = random_sample(n, 0, rng);
        const auto y = random_sample(n, 0, rng);
        double single = 1.0;
        double twice = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = x.features[j] - y.features[j];
            single *= std::cos(pi * d / 2);
            twice *= std::cos(pi * d);
        }
        const auto id = AnsatzParams::identity_map(n);
        const double got_single = qsim::inner_product(embedding::encode_sample(x),
                                                      embedding::encode_sample(y))
                                      .real();
        const double got_twice = qsim::inner_product(ansatz::embed_sample(x, id),
                                                     ansatz::embed_sample(y, id))
                                     .real();
        worst = std::max({worst, std::abs(got_single - single), std::abs(got_twice - twice)});
    }
    std::ostringstream os;
    os << pairs << " pairs, max err " << worst;
    return {"encoding kernels", worst < 1e-10, os.str()};
}

/// Superposed two-triplet readout against the mean of the single readouts.
inline CheckResult check_batch_linearity(std::size_t cases = 10, std::uint64_t seed = 17) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (std::size_t k = 0; k < cases; ++k) {
        const std::size_t n = 2 + k % 2;
        const std::vector<Triplet> batch{random_triplet(n, rng), random_triplet(n, rng)};
        const auto p = AnsatzParams::random(n, 2, rng);
        const auto m = MarginSpec::from_alpha(k % 2 == 0 ? 0.0 : 1.0);
        const double joint = metric::superposed_circuit(batch, m).expectation(p);
        const double mean = 0.5 * (metric::measure_triplet_expectation(batch[0], p, m) +
                                   metric::measure_triplet_expectation(batch[1], p, m));
        worst = std::max(worst, std::abs(joint - mean));
    }
    std::ostringstream os;
    os << cases << " batches, max err " << worst;
    return {"batch linearity", worst < 1e-9, os.str()};
}

inline std::vector<CheckResult> run_all() {
    return {check_gradients(), check_interference_constant(), check_kernels(),
            check_batch_linearity()};
}

} // namespace qaml::verify
