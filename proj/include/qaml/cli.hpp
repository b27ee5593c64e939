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
 * The `qaml` command line: train, eval, gradcheck and report.
 *
 * Settings come from built-in defaults, then an optional INI config file,
 * then flags; later sources win. Config grammar (all keys optional):
 *
 *     [run]          seed, out
 *     [data]         dataset (iris|mnist), mnist_images, mnist_labels,
 *                    train_per_class, test_per_class, pca_components
 *     [train]        epochs, alpha, layers, schedule (natural|alternating),
 *                    triplets_per_epoch, learning_rate
 *     [adversarial]  lambda, gradient (input_shift|exact), angle (small|arccos),
 *                    stage (both|reencode_only)
 *     [eval]         epsilon
 *
 * Exit codes: 0 success, 1 usage, 2 data or format, 3 verification failure.
 */
#pragma once

#include "qaml/data.hpp"
#include "qaml/eval.hpp"
#include "qaml/train.hpp"
#include "qaml/verify.hpp"

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qaml::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kVerification = 3 };

/// Fully resolved settings for one invocation.
struct Settings {
    std::uint64_t seed = 0;
    std::string out = "qaml_out";
    std::string dataset = "iris";
    std::string mnist_images;
    std::string mnist_labels;
    std::optional<std::size_t> train_per_class;
    std::optional<std::size_t> test_per_class;
    std::optional<std::size_t> pca_components;
    std::size_t epochs = 1000;
    double alpha = 1.0;
    std::size_t layers = 4;
    std::string schedule = "natural";
    std::size_t triplets_per_epoch = 1;
    double learning_rate = 0.01;
    double lambda = 0.1;
    std::string gradient = "input_shift";
    std::string angle = "small";
    std::string stage = "both";
    double epsilon = 0.02;
};

/// Values given on the command line; unset ones defer to the file.
struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> dataset;
    std::optional<std::string> mnist_images;
    std::optional<std::string> mnist_labels;
    std::optional<std::size_t> epochs;
    std::optional<double> alpha;
    std::optional<std::size_t> layers;
    std::optional<std::string> schedule;
    std::optional<double> epsilon;
};

namespace detail {

template <class T>
void take(const boost::property_tree::ptree &pt, const char *key, T &dst) {
    if (const auto child = pt.get_child_optional(key)) {
        dst = child->get_value<T>();
    }
}

template <class T>
void take(const boost::property_tree::ptree &pt, const char *key, std::optional<T> &dst) {
    if (const auto child = pt.get_child_optional(key)) {
        dst = child->get_value<T>();
    }
}

template <class T>
void override_with(const std::optional<T> &src, T &dst) {
    if (src) {
        dst = *src;
    }
}

inline void require_choice(const std::string &what, const std::string &value,
                           std::initializer_list<const char *> choices) {
    for (const char *c : choices) {
        if (value == c) {
            return;
        }
    }
    throw std::invalid_argument("unknown " + what + " '" + value + "'");
}

/// Opens `path` for writing or throws DataError.
inline void write_file(const std::filesystem::path &path,
                       const std::function<void(std::ostream &)> &body) {
    std::ofstream os(path);
    if (!os) {
        throw DataError("cannot write " + path.string());
    }
    body(os);
    if (!os) {
        throw DataError("write failed for " + path.string());
    }
}

inline std::ifstream open_input(const std::string &path) {
    std::ifstream is(path);
    if (!is) {
        throw DataError("cannot open " + path);
    }
    return is;
}

} // namespace detail

/// Reads an INI config file into `s`; malformed values raise FormatError.
inline void apply_config_file(const std::string &path, Settings &s) {
    boost::property_tree::ptree pt;
    try {
        boost::property_tree::ini_parser::read_ini(path, pt);
        detail::take(pt, "run.seed", s.seed);
        detail::take(pt, "run.out", s.out);
        detail::take(pt, "data.dataset", s.dataset);
        detail::take(pt, "data.mnist_images", s.mnist_images);
        detail::take(pt, "data.mnist_labels", s.mnist_labels);
        detail::take(pt, "data.train_per_class", s.train_per_class);
        detail::take(pt, "data.test_per_class", s.test_per_class);
        detail::take(pt, "data.pca_components", s.pca_components);
        detail::take(pt, "train.epochs", s.epochs);
        detail::take(pt, "train.alpha", s.alpha);
        detail::take(pt, "train.layers", s.layers);
        detail::take(pt, "train.schedule", s.schedule);
        detail::take(pt, "train.triplets_per_epoch", s.triplets_per_epoch);
        detail::take(pt, "train.learning_rate", s.learning_rate);
        detail::take(pt, "adversarial.lambda", s.lambda);
        detail::take(pt, "adversarial.gradient", s.gradient);
        detail::take(pt, "adversarial.angle", s.angle);
        detail::take(pt, "adversarial.stage", s.stage);
        detail::take(pt, "eval.epsilon", s.epsilon);
    } catch (const boost::property_tree::ptree_error &e) {
        throw FormatError("config " + path + ": " + e.what());
    }
}

/// Defaults, then the config file, then flags.
inline Settings resolve(const Overrides &o) {
    Settings s;
    if (!o.config.empty()) {
        if (!std::filesystem::exists(o.config)) {
            throw DataError("config file not found: " + o.config);
        }
        apply_config_file(o.config, s);
    }
    detail::override_with(o.seed, s.seed);
    detail::override_with(o.out, s.out);
    detail::override_with(o.dataset, s.dataset);
    detail::override_with(o.mnist_images, s.mnist_images);
    detail::override_with(o.mnist_labels, s.mnist_labels);
    detail::override_with(o.epochs, s.epochs);
    detail::override_with(o.alpha, s.alpha);
    detail::override_with(o.layers, s.layers);
    detail::override_with(o.schedule, s.schedule);
    detail::override_with(o.epsilon, s.epsilon);
    detail::require_choice("dataset", s.dataset, {"iris", "mnist"});
    detail::require_choice("schedule", s.schedule, {"natural", "alternating"});
    detail::require_choice("gradient", s.gradient, {"input_shift", "exact"});
    detail::require_choice("angle", s.angle, {"small", "arccos"});
    detail::require_choice("stage", s.stage, {"both", "reencode_only"});
    return s;
}

inline data::DataConfig data_config(const Settings &s) {
    data::DataConfig cfg = s.dataset == "mnist"
                               ? data::DataConfig::mnist(s.mnist_images, s.mnist_labels)
                               : data::DataConfig::iris();
    if (cfg.kind == data::DatasetKind::mnist &&
        (s.mnist_images.empty() || s.mnist_labels.empty())) {
        throw std::invalid_argument("mnist needs --mnist-images and --mnist-labels");
    }
    cfg.train_per_class = s.train_per_class.value_or(cfg.train_per_class);
    cfg.test_per_class = s.test_per_class.value_or(cfg.test_per_class);
    cfg.pca_components = s.pca_components.value_or(cfg.pca_components);
    cfg.seed = s.seed;
    return cfg;
}

inline TrainConfig train_config(const Settings &s, std::size_t features) {
    TrainConfig cfg;
    cfg.epochs = s.epochs;
    cfg.seed = s.seed;
    cfg.alpha = s.alpha;
    cfg.layers = s.layers;
    cfg.triplets_per_epoch = s.triplets_per_epoch;
    cfg.schedule = s.schedule == "alternating" ? Schedule::alternating : Schedule::natural_only;
    cfg.optimizer.learning_rate = s.learning_rate;
    cfg.adversarial = AdversarialConfig::defaults(features);
    std::fill(cfg.adversarial.lambda.begin(), cfg.adversarial.lambda.end(), s.lambda);
    cfg.adversarial.bound = std::max(cfg.adversarial.bound, s.lambda);
    cfg.adversarial.gradient_mode = s.gradient == "exact" ? AnchorShift::exact : AnchorShift::input_shift;
    cfg.adversarial.angle_mode =
        s.angle == "arccos" ? AngleMode::literal_arccos : AngleMode::small_angle;
    cfg.adversarial.stage = s.stage == "reencode_only" ? PerturbStage::reencode_only
                                                       : PerturbStage::both;
    return cfg;
}

/// train: dataset → checkpoint, train_log.csv and the preprocessed splits.
inline int run_train(const Settings &s, std::ostream &out) {
    const auto split = data::load_dataset(data_config(s));
    const auto cfg = train_config(s, split.dimension());
    const auto result = train::train(cfg, split);
    const std::filesystem::path dir(s.out);
    std::filesystem::create_directories(dir);
    detail::write_file(dir / "checkpoint.txt", [&](std::ostream &os) {
        train::write_checkpoint(os, {result.params, result.optimizer, cfg.epochs, cfg.seed});
    });
    detail::write_file(dir / "train_log.csv",
                       [&](std::ostream &os) { train::write_log_csv(os, result.log); });
    detail::write_file(dir / "train_split.csv",
                       [&](std::ostream &os) { data::write_samples_csv(os, split.train); });
    detail::write_file(dir / "test_split.csv",
                       [&](std::ostream &os) { data::write_samples_csv(os, split.test); });
    out << "trained " << cfg.epochs << " epochs (" << result.adversarial_steps
        << " adversarial); final loss "
        << (result.log.empty() ? 0.0 : result.log.back().loss) << "; wrote " << dir.string()
        << '\n';
    return kOk;
}

/// eval: checkpoint + split → similarity.csv, metrics.csv, robustness.csv.
inline int run_eval(const Settings &s, const std::string &checkpoint_path, std::ostream &out) {
    auto is = detail::open_input(checkpoint_path);
    const auto ckpt = train::read_checkpoint(is);
    auto dcfg = data_config(s);
    dcfg.seed = ckpt.seed;
    const auto split = data::load_dataset(dcfg);
    if (split.dimension() != ckpt.params.qubit_count) {
        throw DataError("checkpoint width " + std::to_string(ckpt.params.qubit_count) +
                        " does not match dataset dimension " +
                        std::to_string(split.dimension()));
    }
    const auto before = train::initial_params(ckpt.params.qubit_count, ckpt.params.layers,
                                              ckpt.seed);
    const auto test_after = eval::similarity_matrix(split.test, ckpt.params);
    eval::MetricsTable table{
        eval::average_inner_products(eval::similarity_matrix(split.train, before)),
        eval::average_inner_products(eval::similarity_matrix(split.test, before)),
        eval::average_inner_products(eval::similarity_matrix(split.train, ckpt.params)),
        eval::average_inner_products(test_after)};
    const auto robust = eval::epsilon_robust_accuracy(test_after, s.epsilon);
    const std::filesystem::path dir(s.out);
    std::filesystem::create_directories(dir);
    detail::write_file(dir / "similarity.csv",
                       [&](std::ostream &os) { eval::write_similarity_csv(os, test_after); });
    detail::write_file(dir / "metrics.csv",
                       [&](std::ostream &os) { eval::write_metrics_csv(os, table); });
    detail::write_file(dir / "robustness.csv",
                       [&](std::ostream &os) { eval::write_robustness_csv(os, robust); });
    eval::write_metrics_csv(out, table);
    out << "epsilon " << s.epsilon << " robust accuracy " << robust.accuracy << '\n';
    return kOk;
}

/// gradcheck: runs the self-checks; exit 3 if any fails.
inline int run_gradcheck(std::ostream &out) {
    bool ok = true;
    for (const auto &r : verify::run_all()) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        ok = ok && r.passed;
    }
    return ok ? kOk : kVerification;
}

/// Diverging blue-white-red colour for an overlap in [−1, 1].
inline std::array<unsigned char, 3> heat_colour(double v) {
    const double t = std::clamp(v, -1.0, 1.0);
    const auto ch = [](double x) {
        return static_cast<unsigned char>(std::lround(255.0 * std::clamp(x, 0.0, 1.0)));
    };
    return t >= 0 ? std::array{ch(1.0), ch(1.0 - t), ch(1.0 - t)}
                  : std::array{ch(1.0 + t), ch(1.0 + t), ch(1.0)};
}

/// Binary PPM heatmap with `scale` pixels per matrix entry.
inline void write_heatmap_ppm(std::ostream &os, const SimilarityMatrix &m, std::size_t scale) {
    const std::size_t side = m.size() * scale;
    os << "P6\n" << side << ' ' << side << "\n255\n";
    for (std::size_t y = 0; y < side; ++y) {
        for (std::size_t x = 0; x < side; ++x) {
            const auto c = heat_colour(m.at(y / scale, x / scale));
            os.write(reinterpret_cast<const char *>(c.data()), 3);
        }
    }
}

/// Long-form heatmap data: one "row,col,value" line per entry.
inline void write_heatmap_csv(std::ostream &os, const SimilarityMatrix &m) {
    os << "row,col,row_label,col_label,value\n" << std::setprecision(17);
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) {
            os << i << ',' << j << ',' << m.labels[i] << ',' << m.labels[j] << ','
               << m.at(i, j) << '\n';
        }
    }
}

/// report: similarity.csv → heatmap.csv and, on request, a PPM image.
inline int run_report(const Settings &s, const std::string &similarity_path,
                      const std::string &image_path, std::ostream &out) {
    auto is = detail::open_input(similarity_path);
    const auto m = eval::read_similarity_csv(is);
    const std::filesystem::path dir(s.out);
    std::filesystem::create_directories(dir);
    detail::write_file(dir / "heatmap.csv",
                       [&](std::ostream &os) { write_heatmap_csv(os, m); });
    if (!image_path.empty()) {
        std::ofstream img(image_path, std::ios::binary);
        if (!img) {
            throw DataError("cannot write " + image_path);
        }
        write_heatmap_ppm(img, m, 8);
    }
    out << "rendered " << m.size() << "x" << m.size() << " heatmap\n";
    return kOk;
}

inline void add_shared_flags(CLI::App &cmd, Overrides &o) {
    cmd.add_option("--config", o.config, "INI config file");
    cmd.add_option("--seed", o.seed, "run seed");
    cmd.add_option("--out", o.out, "output directory");
    cmd.add_option("--dataset", o.dataset, "iris or mnist")
        ->check(CLI::IsMember({"iris", "mnist"}));
    cmd.add_option("--mnist-images", o.mnist_images, "IDX image file");
    cmd.add_option("--mnist-labels", o.mnist_labels, "IDX label file");
    cmd.add_option("--epochs", o.epochs, "training iterations");
    cmd.add_option("--alpha", o.alpha, "margin parameter")->check(CLI::NonNegativeNumber);
    cmd.add_option("--layers", o.layers, "ansatz layers")->check(CLI::PositiveNumber);
    cmd.add_option("--schedule", o.schedule, "natural or alternating")
        ->check(CLI::IsMember({"natural", "alternating"}));
    cmd.add_option("--epsilon", o.epsilon, "robustness threshold");
}

/// Parses argv and dispatches; returns the process exit code.
inline int run_cli(int argc, const char *const *argv, std::ostream &out = std::cout,
                   std::ostream &err = std::cerr) {
    CLI::App app{"Quantum adversarial metric learning on a statevector simulator", "qaml"};
    app.require_subcommand(1);
    Overrides o;
    std::string checkpoint;
    std::string similarity;
    std::string image;
    auto *train_cmd = app.add_subcommand("train", "train and write a checkpoint and log");
    auto *eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on its split");
    auto *check_cmd = app.add_subcommand("gradcheck", "run gradient and oracle self-checks");
    auto *report_cmd = app.add_subcommand("report", "render similarity heatmap data");
    for (auto *cmd : {train_cmd, eval_cmd, report_cmd}) {
        add_shared_flags(*cmd, o);
    }
    eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
    report_cmd->add_option("--similarity", similarity, "similarity CSV")->required();
    report_cmd->add_option("--image", image, "optional PPM image path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }
    try {
        if (check_cmd->parsed()) {
            return run_gradcheck(out);
        }
        const auto s = resolve(o);
        if (train_cmd->parsed()) {
            return run_train(s, out);
        }
        if (eval_cmd->parsed()) {
            return run_eval(s, checkpoint, out);
        }
        return run_report(s, similarity, image, out);
    } catch (const DataError &e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::filesystem::filesystem_error &e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::invalid_argument &e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kUsage;
    } catch (const std::domain_error &e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kData;
    }
}

} // namespace qaml::cli
