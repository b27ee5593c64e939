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
 * Dataset ingestion and preprocessing: the embedded Iris table, MNIST IDX
 * files, PCA by cyclic Jacobi, per-feature scaling to [−1, 1] and seeded
 * triplet mining.
 *
 * Preprocessing order is PCA (fit on train) then scaling (fit on train).
 */
#pragma once

#include "qaml/embedding.hpp"
#include "qaml/iris_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qaml {

/// Unreadable, malformed or inconsistent input data.
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class FormatError : public DataError {
  public:
    using DataError::DataError;
};

struct DatasetSplit {
    std::vector<Sample> train;
    std::vector<Sample> test;
    std::map<int, std::string> class_names;

    [[nodiscard]] std::size_t dimension() const {
        return train.empty() ? 0 : train.front().dimension();
    }
};

/// Rows of the principal axes, orthonormal, with nonincreasing variances.
struct PcaModel {
    std::vector<double> mean;
    std::vector<std::vector<double>> components;
    std::vector<double> variances;
};

namespace data {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset,
                               const std::string &path) {
    if (offset + 4 > bytes.size()) {
        throw FormatError("truncated IDX header in " + path);
    }
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

inline std::string hex32(std::uint32_t v) {
    std::ostringstream os;
    os << "0x" << std::hex << std::setw(8) << std::setfill('0') << v;
    return os.str();
}

inline void check_magic(std::uint32_t got, std::uint32_t want, const std::string &path) {
    if (got != want) {
        throw FormatError("bad IDX magic " + hex32(got) + " in " + path + " (expected " +
                          hex32(want) + ")");
    }
}

template <class Rng>
std::vector<std::size_t> shuffled_indices(std::size_t n, Rng &rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
}

} // namespace detail

struct IdxImages {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::vector<std::uint8_t>> images;
};

/// Parses a big-endian IDX3 unsigned-byte image file.
inline IdxImages parse_idx_images(std::span<const std::uint8_t> bytes,
                                  const std::string &path = "<memory>") {
    detail::check_magic(detail::read_be32(bytes, 0, path), kIdxImageMagic, path);
    const std::size_t count = detail::read_be32(bytes, 4, path);
    IdxImages out;
    out.rows = detail::read_be32(bytes, 8, path);
    out.cols = detail::read_be32(bytes, 12, path);
    const std::size_t px = out.rows * out.cols;
    if (bytes.size() < 16 + count * px) {
        throw FormatError("truncated IDX image data in " + path + ": header declares " +
                          std::to_string(count) + " images");
    }
    out.images.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto *begin = bytes.data() + 16 + i * px;
        out.images.emplace_back(begin, begin + px);
    }
    return out;
}

inline std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes,
                                                  const std::string &path = "<memory>") {
    detail::check_magic(detail::read_be32(bytes, 0, path), kIdxLabelMagic, path);
    const std::size_t count = detail::read_be32(bytes, 4, path);
    if (bytes.size() < 8 + count) {
        throw FormatError("truncated IDX label data in " + path + ": header declares " +
                          std::to_string(count) + " labels");
    }
    return {bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(count)};
}

/**
 * @brief Iris with classes numbered 1 (setosa), 2 (versicolor), 3
 * (virginica). Each class is shuffled with `seed`; the first
 * `train_per_class` rows train, the rest test.
 */
inline DatasetSplit load_iris(std::pair<int, int> classes = {2, 3},
                              std::size_t train_per_class = 30,
                              std::uint64_t seed = 0) {
    const auto valid = [](int c) { return c >= 1 && c <= 3; };
    if (!valid(classes.first) || !valid(classes.second) || classes.first == classes.second) {
        throw std::invalid_argument("iris classes must be two distinct values in 1..3");
    }
    if (train_per_class > 50) {
        throw std::invalid_argument("iris has 50 rows per class; requested " +
                                    std::to_string(train_per_class) + " for training");
    }
    DatasetSplit split;
    const std::map<int, std::string> names{{1, "setosa"}, {2, "versicolor"}, {3, "virginica"}};
    std::mt19937_64 rng(seed);
    for (int c : {classes.first, classes.second}) {
        split.class_names[c] = names.at(c);
        const auto order = detail::shuffled_indices(50, rng);
        for (std::size_t k = 0; k < order.size(); ++k) {
            const auto &row = ::qaml::data::detail::kIrisTable[(c - 1) * 50 + order[k]];
            Sample s{{row.begin(), row.end()}, c};
            (k < train_per_class ? split.train : split.test).push_back(std::move(s));
        }
    }
    return split;
}

/**
 * @brief Two-class MNIST subset from IDX files with pixels scaled to [0, 1].
 * Per class, a seeded shuffle assigns the first `per_class_train` images to
 * train and the next `per_class_test` to test.
 */
inline DatasetSplit load_mnist_idx(const std::string &image_path,
                                   const std::string &label_path,
                                   std::pair<int, int> classes = {0, 1},
                                   std::size_t per_class_train = 50,
                                   std::size_t per_class_test = 50,
                                   std::uint64_t seed = 0) {
    if (classes.first == classes.second) {
        throw std::invalid_argument("mnist classes must differ");
    }
    const auto image_bytes = detail::read_file(image_path);
    const auto label_bytes = detail::read_file(label_path);
    const auto images = parse_idx_images(image_bytes, image_path);
    const auto labels = parse_idx_labels(label_bytes, label_path);
    if (images.images.size() != labels.size()) {
        throw FormatError("image count " + std::to_string(images.images.size()) +
                          " does not match label count " + std::to_string(labels.size()));
    }
    DatasetSplit split;
    std::mt19937_64 rng(seed);
    for (int c : {classes.first, classes.second}) {
        split.class_names[c] = std::to_string(c);
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == c) {
                members.push_back(i);
            }
        }
        if (members.size() < per_class_train + per_class_test) {
            throw DataError("class " + std::to_string(c) + " has " +
                            std::to_string(members.size()) + " images, need " +
                            std::to_string(per_class_train + per_class_test));
        }
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t k = 0; k < per_class_train + per_class_test; ++k) {
            const auto &img = images.images[members[k]];
            Sample s;
            s.label = c;
            s.features.reserve(img.size());
            for (auto px : img) {
                s.features.push_back(static_cast<double>(px) / 255.0);
            }
            (k < per_class_train ? split.train : split.test).push_back(std::move(s));
        }
    }
    return split;
}

/// Eigenpairs of a symmetric matrix, eigenvalues descending.
struct EigenSystem {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors; ///< vectors[i] pairs with values[i]
};

inline constexpr double kJacobiThreshold = 1e-12;
inline constexpr int kJacobiMaxSweeps = 100;

/// Cyclic Jacobi rotations on a row-major n×n symmetric matrix.
inline EigenSystem symmetric_eigen(std::vector<double> a, std::size_t n) {
    if (a.size() != n * n) {
        throw std::invalid_argument("matrix storage does not match dimension");
    }
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        v[i * n + i] = 1.0;
    }
    auto at = [n](std::vector<double> &m, std::size_t r, std::size_t c) -> double & {
        return m[r * n + c];
    };
    double scale = 0.0;
    for (double x : a) {
        scale += x * x;
    }
    scale = std::max(1.0, std::sqrt(scale));
    for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += 2.0 * at(a, p, q) * at(a, p, q);
            }
        }
        if (std::sqrt(off) < kJacobiThreshold * scale) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(a, p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(a, k, p);
                    const double akq = at(a, k, q);
                    at(a, k, p) = c * akp - s * akq;
                    at(a, k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(a, p, k);
                    const double aqk = at(a, q, k);
                    at(a, p, k) = c * apk - s * aqk;
                    at(a, q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = at(v, k, p);
                    const double vkq = at(v, k, q);
                    at(v, k, p) = c * vkp - s * vkq;
                    at(v, k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a[i * n + i] > a[j * n + j]; });
    EigenSystem es;
    for (std::size_t i : order) {
        es.values.push_back(a[i * n + i]);
        std::vector<double> col(n);
        for (std::size_t k = 0; k < n; ++k) {
            col[k] = v[k * n + i];
        }
        es.vectors.push_back(std::move(col));
    }
    return es;
}

/**
 * @brief PCA of the rows of X keeping k components.
 *
 * Covariance uses the n−1 normalization. When samples are fewer than
 * features the n×n Gram matrix is diagonalized instead and its eigenvectors
 * are mapped back. Each component's largest-magnitude entry is positive.
 */
inline PcaModel pca_fit(std::span<const std::vector<double>> X, std::size_t k) {
    if (X.size() < 2) {
        throw std::invalid_argument("pca needs at least two samples");
    }
    const std::size_t d = X.front().size();
    const std::size_t n = X.size();
    if (k == 0 || k > d) {
        throw std::invalid_argument("pca components k = " + std::to_string(k) +
                                    " must be in 1.." + std::to_string(d));
    }
    PcaModel model;
    model.mean.assign(d, 0.0);
    for (const auto &row : X) {
        if (row.size() != d) {
            throw std::invalid_argument("pca rows differ in dimension");
        }
        for (std::size_t j = 0; j < d; ++j) {
            model.mean[j] += row[j] / static_cast<double>(n);
        }
    }
    std::vector<std::vector<double>> centered(n, std::vector<double>(d));
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            centered[i][j] = X[i][j] - model.mean[j];
            total += centered[i][j] * centered[i][j];
        }
    }
    if (total == 0.0) {
        throw DataError("pca of degenerate data: all samples identical");
    }
    const double denom = static_cast<double>(n - 1);
    if (n < d) {
        std::vector<double> gram(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                double s = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    s += centered[i][c] * centered[j][c];
                }
                gram[i * n + j] = gram[j * n + i] = s / denom;
            }
        }
        const auto es = symmetric_eigen(std::move(gram), n);
        for (std::size_t c = 0; c < k; ++c) {
            const double lambda = es.values[c];
            if (!(lambda > 1e-12 * total)) {
                throw DataError("pca requested more components than the data rank");
            }
            std::vector<double> comp(d, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    comp[j] += centered[i][j] * es.vectors[c][i];
                }
            }
            const double norm = std::sqrt(denom * lambda);
            for (auto &x : comp) {
                x /= norm;
            }
            model.components.push_back(std::move(comp));
            model.variances.push_back(lambda);
        }
    } else {
        std::vector<double> cov(d * d, 0.0);
        for (const auto &row : centered) {
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = i; j < d; ++j) {
                    cov[i * d + j] += row[i] * row[j] / denom;
                }
            }
        }
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                cov[i * d + j] = cov[j * d + i];
            }
        }
        const auto es = symmetric_eigen(std::move(cov), d);
        for (std::size_t c = 0; c < k; ++c) {
            model.components.push_back(es.vectors[c]);
            model.variances.push_back(std::max(0.0, es.values[c]));
        }
    }
    for (auto &comp : model.components) {
        const auto big = std::max_element(comp.begin(), comp.end(), [](double a, double b) {
            return std::abs(a) < std::abs(b);
        });
        if (*big < 0) {
            for (auto &x : comp) {
                x = -x;
            }
        }
    }
    return model;
}

inline std::vector<double> pca_apply(const PcaModel &model, std::span<const double> x) {
    if (x.size() != model.mean.size()) {
        throw std::invalid_argument("pca input dimension mismatch");
    }
    std::vector<double> out;
    out.reserve(model.components.size());
    for (const auto &comp : model.components) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            s += comp[j] * (x[j] - model.mean[j]);
        }
        out.push_back(s);
    }
    return out;
}

/// Per-feature affine map taking the fitted min to −1 and max to +1.
struct FeatureScaler {
    std::vector<double> lo;
    std::vector<double> hi;

    static FeatureScaler fit(std::span<const Sample> train) {
        if (train.empty()) {
            throw std::invalid_argument("cannot fit a scaler on no samples");
        }
        FeatureScaler s;
        s.lo = train.front().features;
        s.hi = train.front().features;
        for (const auto &x : train) {
            if (x.dimension() != s.lo.size()) {
                throw std::invalid_argument("samples differ in dimension");
            }
            for (std::size_t j = 0; j < x.dimension(); ++j) {
                s.lo[j] = std::min(s.lo[j], x.features[j]);
                s.hi[j] = std::max(s.hi[j], x.features[j]);
            }
        }
        for (std::size_t j = 0; j < s.lo.size(); ++j) {
            if (s.lo[j] == s.hi[j]) {
                std::clog << "warning: feature " << j << " is constant; mapped to 0\n";
            }
        }
        return s;
    }

    /// Values outside the fitted range clamp to ±1; constant features map to 0.
    [[nodiscard]] std::vector<double> apply(std::span<const double> x) const {
        if (x.size() != lo.size()) {
            throw std::invalid_argument("scaler input dimension mismatch");
        }
        std::vector<double> out(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (lo[j] == hi[j]) {
                out[j] = 0.0;
                continue;
            }
            out[j] = std::clamp(2.0 * ((x[j] - lo[j]) / (hi[j] - lo[j])) - 1.0, -1.0, 1.0);
        }
        return out;
    }
};

/// Fits the scaler on train and maps both halves into [−1, 1].
inline DatasetSplit scale_to_range(DatasetSplit split) {
    const auto scaler = FeatureScaler::fit(split.train);
    for (auto *part : {&split.train, &split.test}) {
        for (auto &s : *part) {
            s.features = scaler.apply(s.features);
        }
    }
    return split;
}

/// Fits PCA on train and projects both halves onto k components.
inline DatasetSplit reduce_with_pca(DatasetSplit split, std::size_t k) {
    std::vector<std::vector<double>> rows;
    rows.reserve(split.train.size());
    for (const auto &s : split.train) {
        rows.push_back(s.features);
    }
    const auto model = pca_fit(rows, k);
    for (auto *part : {&split.train, &split.test}) {
        for (auto &s : *part) {
            s.features = pca_apply(model, s.features);
        }
    }
    return split;
}

/**
 * @brief Uniform triplet mining: anchor uniform over `pool`, positive
 * uniform over the anchor's class minus the anchor, negative uniform over
 * the other classes.
 */
template <class Rng>
std::vector<Triplet> sample_triplets(std::span<const Sample> pool, std::size_t n, Rng &rng) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        by_class[pool[i].label].push_back(i);
    }
    if (by_class.size() < 2) {
        throw DataError("triplet mining needs at least two classes");
    }
    for (const auto &[label, members] : by_class) {
        if (members.size() < 2) {
            throw DataError("class " + std::to_string(label) +
                            " has fewer than two members");
        }
    }
    std::vector<Triplet> out;
    out.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t a =
            std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng);
        const auto &same = by_class.at(pool[a].label);
        std::size_t p = a;
        while (p == a) {
            p = same[std::uniform_int_distribution<std::size_t>(0, same.size() - 1)(rng)];
        }
        const std::size_t others = pool.size() - same.size();
        std::size_t pick = std::uniform_int_distribution<std::size_t>(0, others - 1)(rng);
        std::size_t neg = 0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (pool[i].label != pool[a].label && pick-- == 0) {
                neg = i;
                break;
            }
        }
        out.push_back({pool[a], pool[p], pool[neg]});
    }
    return out;
}

inline std::vector<Triplet> sample_triplets(const DatasetSplit &split, std::size_t n,
                                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return sample_triplets(std::span<const Sample>(split.train), n, rng);
}

/// Header f0..f{N-1},label then one sample per line.
inline void write_samples_csv(std::ostream &os, std::span<const Sample> samples) {
    const std::size_t d = samples.empty() ? 0 : samples.front().dimension();
    for (std::size_t j = 0; j < d; ++j) {
        os << 'f' << j << ',';
    }
    os << "label\n";
    os << std::setprecision(17);
    for (const auto &s : samples) {
        for (double x : s.features) {
            os << x << ',';
        }
        os << s.label << '\n';
    }
}

enum class DatasetKind { iris, mnist };

/// Everything needed to rebuild a preprocessed split deterministically.
struct DataConfig {
    DatasetKind kind = DatasetKind::iris;
    std::pair<int, int> classes{2, 3};
    std::size_t train_per_class = 30;
    std::size_t test_per_class = 20;
    std::size_t pca_components = 0; ///< 0 keeps the raw features
    std::string mnist_images;
    std::string mnist_labels;
    std::uint64_t seed = 0;

    static DataConfig iris() { return {}; }
    static DataConfig mnist(std::string images, std::string labels) {
        return {DatasetKind::mnist, {0, 1}, 50, 50, 2, std::move(images), std::move(labels), 0};
    }
};

/// Load, optionally reduce with PCA, and scale into [−1, 1].
inline DatasetSplit load_dataset(const DataConfig &cfg) {
    DatasetSplit split;
    if (cfg.kind == DatasetKind::iris) {
        if (cfg.train_per_class + cfg.test_per_class > 50) {
            throw std::invalid_argument("iris split oversubscribes a 50-row class");
        }
        split = load_iris(cfg.classes, cfg.train_per_class, cfg.seed);
        // Keep the requested number of test rows per class.
        std::map<int, std::size_t> kept;
        std::erase_if(split.test, [&](const Sample &s) {
            return kept[s.label]++ >= cfg.test_per_class;
        });
    } else {
        split = load_mnist_idx(cfg.mnist_images, cfg.mnist_labels, cfg.classes,
                               cfg.train_per_class, cfg.test_per_class, cfg.seed);
    }
    if (cfg.pca_components > 0 && cfg.pca_components < split.dimension()) {
        split = reduce_with_pca(std::move(split), cfg.pca_components);
    }
    return scale_to_range(std::move(split));
}

} // namespace data
} // namespace qaml
