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
 * Separation metrics on embedded samples: similarity matrices, same/cross
 * class averages and ε-robust accuracy, with their CSV forms.
 */
#pragma once

#include "qaml/ansatz.hpp"
#include "qaml/data.hpp"
#include "qaml/embedding.hpp"
#include "qaml/qsim.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qaml {

/// Re⟨g(x_i)|g(x_j)⟩ over a labeled sample list, row-major.
struct SimilarityMatrix {
    std::vector<int> labels;
    std::vector<double> values;

    [[nodiscard]] std::size_t size() const { return labels.size(); }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const {
        return values[i * labels.size() + j];
    }
};

struct RobustnessReport {
    double epsilon = 0.0;
    std::vector<bool> robust_flags;
    double accuracy = 0.0;
};

struct ClassAverages {
    double d_in = 0.0;  ///< mean over same-class pairs i ≠ j
    double d_out = 0.0; ///< mean over cross-class pairs
};

namespace eval {

inline SimilarityMatrix similarity_matrix(std::span<const Sample> samples,
                                          const AnsatzParams &p) {
    if (samples.empty()) {
        throw std::invalid_argument("similarity matrix of no samples");
    }
    std::vector<qsim::Ket> g;
    g.reserve(samples.size());
    SimilarityMatrix m;
    for (const auto &s : samples) {
        g.push_back(ansatz::embed_sample(s, p));
        m.labels.push_back(s.label);
    }
    const std::size_t n = samples.size();
    m.values.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        m.values[i * n + i] = qsim::inner_product(g[i], g[i]).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = qsim::inner_product(g[i], g[j]).real();
            m.values[i * n + j] = v;
            m.values[j * n + i] = v;
        }
    }
    return m;
}

namespace detail {
inline void require_two_classes(const SimilarityMatrix &m) {
    if (std::set<int>(m.labels.begin(), m.labels.end()).size() < 2) {
        throw std::invalid_argument("metric needs at least two classes");
    }
}
} // namespace detail

inline ClassAverages average_inner_products(const SimilarityMatrix &m) {
    detail::require_two_classes(m);
    double in = 0.0;
    double out = 0.0;
    std::size_t n_in = 0;
    std::size_t n_out = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = i + 1; j < m.size(); ++j) {
            if (m.labels[i] == m.labels[j]) {
                in += m.at(i, j);
                ++n_in;
            } else {
                out += m.at(i, j);
                ++n_out;
            }
        }
    }
    return {n_in ? in / static_cast<double>(n_in) : 0.0, out / static_cast<double>(n_out)};
}

/**
 * @brief A sample is ε-robust when every cross-class sample's overlap with
 * it is at most ε; accuracy is the robust fraction.
 */
inline RobustnessReport epsilon_robust_accuracy(const SimilarityMatrix &m, double epsilon) {
    if (!(epsilon > -1.0 && epsilon < 1.0)) {
        throw std::invalid_argument("epsilon must lie in (-1, 1)");
    }
    detail::require_two_classes(m);
    RobustnessReport r;
    r.epsilon = epsilon;
    std::size_t robust = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        bool ok = true;
        for (std::size_t j = 0; j < m.size() && ok; ++j) {
            ok = m.labels[j] == m.labels[i] || m.at(i, j) <= epsilon;
        }
        r.robust_flags.push_back(ok);
        robust += ok ? 1 : 0;
    }
    r.accuracy = static_cast<double>(robust) / static_cast<double>(m.size());
    return r;
}

/// Header "label,s0,s1,…", then one row per sample: its label and overlaps.
inline void write_similarity_csv(std::ostream &os, const SimilarityMatrix &m) {
    os << "label";
    for (std::size_t j = 0; j < m.size(); ++j) {
        os << ",s" << j;
    }
    os << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < m.size(); ++i) {
        os << m.labels[i];
        for (std::size_t j = 0; j < m.size(); ++j) {
            os << ',' << m.at(i, j);
        }
        os << '\n';
    }
}

inline SimilarityMatrix read_similarity_csv(std::istream &is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("label", 0) != 0) {
        throw FormatError("similarity csv: missing header");
    }
    SimilarityMatrix m;
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        try {
            std::getline(ls, cell, ',');
            m.labels.push_back(std::stoi(cell));
            while (std::getline(ls, cell, ',')) {
                row.push_back(std::stod(cell));
            }
        } catch (const std::logic_error &) {
            throw FormatError("similarity csv: bad cell '" + cell + "'");
        }
        rows.push_back(std::move(row));
    }
    for (const auto &row : rows) {
        if (row.size() != rows.size()) {
            throw FormatError("similarity csv: matrix is not square");
        }
        m.values.insert(m.values.end(), row.begin(), row.end());
    }
    return m;
}

inline void write_robustness_csv(std::ostream &os, const RobustnessReport &r) {
    os << "sample,robust\n";
    for (std::size_t i = 0; i < r.robust_flags.size(); ++i) {
        os << i << ',' << (r.robust_flags[i] ? 1 : 0) << '\n';
    }
    os << std::setprecision(17) << "# epsilon=" << r.epsilon << " accuracy=" << r.accuracy
       << '\n';
}

/// Before/after d_i and d_o for the training and test halves.
struct MetricsTable {
    ClassAverages train_before;
    ClassAverages test_before;
    ClassAverages train_after;
    ClassAverages test_after;
};

inline void write_metrics_csv(std::ostream &os, const MetricsTable &t) {
    os << "stage,d_i_train,d_i_test,d_o_train,d_o_test\n" << std::setprecision(17);
    os << "before," << t.train_before.d_in << ',' << t.test_before.d_in << ','
       << t.train_before.d_out << ',' << t.test_before.d_out << '\n';
    os << "after," << t.train_after.d_in << ',' << t.test_after.d_in << ','
       << t.train_after.d_out << ',' << t.test_after.d_out << '\n';
}

} // namespace eval
} // namespace qaml
