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

#pragma once

#include "qaml/qaml.hpp"

#include <complex>
#include <cstddef>
#include <random>
#include <vector>

namespace qaml::testing_util {

/// Haar-ish random normalized state on a sample-only register.
inline qsim::Ket random_ket(std::size_t qubits, std::mt19937_64 &rng) {
  std::normal_distribution<double> g;
  std::vector<qsim::Complex> amps(std::size_t{1} << qubits);
  for (auto &a : amps) {
    a = {g(rng), g(rng)};
  }
  return qsim::Ket::normalize(qsim::RegisterLayout::sample_only(qubits), std::move(amps));
}

/// Random unitary 2x2 from three Euler angles and a phase.
inline qsim::Matrix2 random_unitary(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(-3.14159, 3.14159);
  const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
  const qsim::Complex i{0.0, 1.0};
  const qsim::Complex ph = std::exp(i * d);
  return {ph * std::exp(i * (-b - c) / 2.0) * std::cos(a / 2),
          -ph * std::exp(i * (-b + c) / 2.0) * std::sin(a / 2),
          ph * std::exp(i * (b - c) / 2.0) * std::sin(a / 2),
          ph * std::exp(i * (b + c) / 2.0) * std::cos(a / 2)};
}

inline Sample random_sample(std::size_t n, int label, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Sample s;
  s.label = label;
  for (std::size_t i = 0; i < n; ++i) {
    s.features.push_back(u(rng));
  }
  return s;
}

inline Triplet random_triplet(std::size_t n, std::mt19937_64 &rng) {
  return {random_sample(n, 0, rng), random_sample(n, 0, rng), random_sample(n, 1, rng)};
}

}  // namespace qaml::testing_util
