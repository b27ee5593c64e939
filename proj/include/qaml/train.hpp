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
 * RMSProp training of the ansatz angles, optionally alternating natural and
 * adversarial iterations, and the text checkpoint format.
 */
#pragma once

#include "qaml/adversarial.hpp"
#include "qaml/ansatz.hpp"
#include "qaml/data.hpp"
#include "qaml/grad.hpp"
#include "qaml/metric.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qaml {

struct OptimizerState {
    std::vector<double> second_moment;
    double decay = 0.9;
    double learning_rate = 0.01;
    double epsilon = 1e-8;

    void validate() const {
        if (!(decay > 0.0 && decay < 1.0)) {
            throw std::invalid_argument("rmsprop decay must lie in (0, 1)");
        }
        if (!(learning_rate > 0.0)) {
            throw std::invalid_argument("rmsprop learning rate must be positive");
        }
        for (double v : second_moment) {
            if (!(v >= 0.0)) {
                throw std::invalid_argument("rmsprop second moment must be >= 0");
            }
        }
    }
};

enum class Schedule { natural_only, alternating };

struct TrainConfig {
    std::size_t epochs = 1000;
    std::size_t triplets_per_epoch = 1;
    /// Superposed mode groups each epoch's triplets into circuits of this size.
    std::size_t batch_size = 1;
    BatchMode batch_mode = BatchMode::classical_average;
    Schedule schedule = Schedule::natural_only;
    std::uint64_t seed = 0;
    double alpha = 1.0;
    std::size_t layers = 4;
    OptimizerState optimizer{};
    AdversarialConfig adversarial{}; ///< empty lambda means defaults(N)

    void validate() const {
        if (triplets_per_epoch == 0 || layers == 0 || batch_size == 0) {
            throw std::invalid_argument("training counts must be >= 1");
        }
        if (batch_mode == BatchMode::superposed && triplets_per_epoch % batch_size != 0) {
            throw std::invalid_argument("triplets per epoch must be a multiple of batch size");
        }
        optimizer.validate();
    }
};

enum class StepMode { natural, adversarial };

inline const char *to_string(StepMode m) {
    return m == StepMode::natural ? "natural" : "adversarial";
}

struct TrainLogEntry {
    std::size_t iteration = 0;
    StepMode mode = StepMode::natural;
    double loss = 0.0;
    double expectation = 0.0;
    double grad_norm = 0.0;
};

struct TrainResult {
    AnsatzParams initial;
    AnsatzParams params;
    OptimizerState optimizer;
    std::vector<TrainLogEntry> log;
    std::size_t adversarial_steps = 0;
};

namespace train {

/// v′ = γv + (1−γ)g², p′ = p − η·g/(√v′ + ε).
inline std::pair<std::vector<double>, OptimizerState>
rmsprop_step(std::vector<double> params, std::span<const double> grad, OptimizerState st) {
    if (params.size() != grad.size()) {
        throw std::invalid_argument("rmsprop: parameter and gradient lengths differ");
    }
    if (st.second_moment.empty()) {
        st.second_moment.assign(params.size(), 0.0);
    }
    if (st.second_moment.size() != params.size()) {
        throw std::invalid_argument("rmsprop: optimizer state length mismatch");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grad[i];
        if (!std::isfinite(g)) {
            throw std::runtime_error("rmsprop: non-finite gradient at index " +
                                     std::to_string(i));
        }
        auto &v = st.second_moment[i];
        v = st.decay * v + (1.0 - st.decay) * g * g;
        params[i] -= st.learning_rate * g / (std::sqrt(v) + st.epsilon);
    }
    return {std::move(params), std::move(st)};
}

/// Initial angles, uniform in [−π, π) from the run seed.
inline AnsatzParams initial_params(std::size_t qubits, std::size_t layers, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return AnsatzParams::random(qubits, layers, rng);
}

/// Triplet stream seed derived from the run seed.
inline std::uint64_t triplet_seed(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      0x7452u};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (std::uint64_t{words[0]} << 32) | words[1];
}

namespace detail {

inline std::vector<metric::TripletCircuit> circuits_for(std::span<const Triplet> triplets,
                                                        const TrainConfig &cfg,
                                                        const MarginSpec &m) {
    std::vector<metric::TripletCircuit> out;
    if (cfg.batch_mode == BatchMode::superposed) {
        for (std::size_t i = 0; i < triplets.size(); i += cfg.batch_size) {
            out.push_back(metric::superposed_circuit(triplets.subspan(i, cfg.batch_size), m));
        }
    } else {
        for (const auto &t : triplets) {
            out.push_back(metric::triplet_circuit(t, m));
        }
    }
    return out;
}

} // namespace detail

/**
 * @brief Trains θ for `cfg.epochs` iterations, one sampled batch each.
 *
 * With Schedule::alternating every odd iteration replaces each anchor by its
 * adversarial counterpart built from the anchor gradient at the current θ.
 */
inline TrainResult train(const TrainConfig &cfg, const DatasetSplit &split) {
    cfg.validate();
    if (split.train.empty()) {
        throw DataError("training set is empty");
    }
    const std::size_t n = split.dimension();
    const auto margin = MarginSpec::from_alpha(cfg.alpha);
    AdversarialConfig adv = cfg.adversarial;
    if (adv.lambda.empty()) {
        adv.lambda = AdversarialConfig::defaults(n).lambda;
    }
    if (cfg.schedule == Schedule::alternating) {
        adv.validate();
    }

    TrainResult out;
    out.initial = initial_params(n, cfg.layers, cfg.seed);
    out.params = out.initial;
    out.optimizer = cfg.optimizer;
    out.optimizer.second_moment.assign(out.params.angles.size(), 0.0);
    std::mt19937_64 rng(triplet_seed(cfg.seed));

    for (std::size_t it = 0; it < cfg.epochs; ++it) {
        const auto triplets = data::sample_triplets(std::span<const Sample>(split.train),
                                                    cfg.triplets_per_epoch, rng);
        const bool adversarial_step = cfg.schedule == Schedule::alternating && it % 2 == 1;
        std::vector<metric::TripletCircuit> circuits;
        if (adversarial_step) {
            for (const auto &t : triplets) {
                circuits.push_back(adversarial::make_adversarial(t, out.params, adv, margin));
            }
            ++out.adversarial_steps;
        } else {
            circuits = detail::circuits_for(triplets, cfg, margin);
        }
        const auto g = grad::theta_loss_gradient(circuits, out.params, margin);
        if (!std::isfinite(g.loss) || !std::isfinite(g.gradient.norm())) {
            throw std::runtime_error("non-finite loss at iteration " + std::to_string(it));
        }
        out.log.push_back({it, adversarial_step ? StepMode::adversarial : StepMode::natural,
                           g.loss, g.expectation, g.gradient.norm()});
        auto [angles, st] = rmsprop_step(std::move(out.params.angles), g.gradient.partials,
                                         std::move(out.optimizer));
        out.params.angles = std::move(angles);
        out.optimizer = std::move(st);
    }
    return out;
}

inline void write_log_csv(std::ostream &os, std::span<const TrainLogEntry> log) {
    os << "iteration,mode,loss,expectation,grad_norm\n" << std::setprecision(17);
    for (const auto &e : log) {
        os << e.iteration << ',' << to_string(e.mode) << ',' << e.loss << ',' << e.expectation
           << ',' << e.grad_norm << '\n';
    }
}

inline constexpr const char *kCheckpointTag = "qaml-checkpoint";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    AnsatzParams params;
    OptimizerState optimizer;
    std::size_t iteration = 0;
    std::uint64_t seed = 0;
};

/**
 * @brief Plain-text checkpoint:
 *
 *     qaml-checkpoint 1
 *     seed <u64>
 *     iteration <count>
 *     qubits <N>
 *     layers <l>
 *     decay <real>
 *     learning_rate <real>
 *     epsilon <real>
 *     theta <count> <values...>
 *     second_moment <count> <values...>
 *
 * Reals are written in hexfloat so values round-trip exactly.
 */
inline void write_checkpoint(std::ostream &os, const Checkpoint &c) {
    os << kCheckpointTag << ' ' << kCheckpointVersion << '\n';
    os << "seed " << c.seed << '\n';
    os << "iteration " << c.iteration << '\n';
    os << "qubits " << c.params.qubit_count << '\n';
    os << "layers " << c.params.layers << '\n';
    os << std::hexfloat;
    os << "decay " << c.optimizer.decay << '\n';
    os << "learning_rate " << c.optimizer.learning_rate << '\n';
    os << "epsilon " << c.optimizer.epsilon << '\n';
    auto vec = [&os](const char *key, const std::vector<double> &v) {
        os << key << ' ' << std::dec << v.size() << std::hexfloat;
        for (double x : v) {
            os << ' ' << x;
        }
        os << '\n';
    };
    vec("theta", c.params.angles);
    vec("second_moment", c.optimizer.second_moment);
    os << std::defaultfloat;
}

inline Checkpoint read_checkpoint(std::istream &is) {
    std::string tag;
    int version = 0;
    if (!(is >> tag >> version) || tag != kCheckpointTag) {
        throw FormatError("not a qaml checkpoint");
    }
    if (version != kCheckpointVersion) {
        throw FormatError("unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint c;
    // Hexfloat extraction via operator>> is unreliable in libstdc++; use strtod.
    auto real = [&is](const char *key) {
        std::string k, v;
        if (!(is >> k >> v) || k != key) {
            throw FormatError(std::string("checkpoint: expected ") + key);
        }
        char *end = nullptr;
        const double x = std::strtod(v.c_str(), &end);
        if (end == v.c_str() || *end != '\0') {
            throw FormatError(std::string("checkpoint: bad value for ") + key);
        }
        return x;
    };
    auto count = [&is](const char *key) {
        std::string k;
        std::uint64_t v = 0;
        if (!(is >> k >> v) || k != key) {
            throw FormatError(std::string("checkpoint: expected ") + key);
        }
        return v;
    };
    auto vec = [&is](const char *key) {
        std::string k;
        std::size_t n = 0;
        if (!(is >> k >> n) || k != key) {
            throw FormatError(std::string("checkpoint: expected ") + key);
        }
        std::vector<double> v(n);
        for (auto &x : v) {
            std::string tok;
            if (!(is >> tok)) {
                throw FormatError(std::string("checkpoint: truncated ") + key);
            }
            char *end = nullptr;
            x = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0') {
                throw FormatError(std::string("checkpoint: bad value in ") + key);
            }
        }
        return v;
    };
    c.seed = count("seed");
    c.iteration = count("iteration");
    c.params.qubit_count = count("qubits");
    c.params.layers = count("layers");
    c.optimizer.decay = real("decay");
    c.optimizer.learning_rate = real("learning_rate");
    c.optimizer.epsilon = real("epsilon");
    c.params.angles = vec("theta");
    c.optimizer.second_moment = vec("second_moment");
    try {
        c.params.validate();
        c.optimizer.validate();
    } catch (const std::invalid_argument &e) {
        throw FormatError(std::string("checkpoint: ") + e.what());
    }
    return c;
}

} // namespace train
} // namespace qaml
