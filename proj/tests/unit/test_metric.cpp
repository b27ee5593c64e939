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
#include "qaml/metric.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace qaml::metric {
namespace {

using testing_util::random_sample;
using testing_util::random_triplet;

constexpr double kPi = 3.14159265358979323846;

TEST(TripletLoss, HingeValues) {
  EXPECT_DOUBLE_EQ(triplet_loss(-0.3, MarginSpec::from_alpha(1)), 0.0);
  EXPECT_NEAR(triplet_loss(0.1, MarginSpec::from_alpha(0)), 0.4, 1e-15);
  EXPECT_NEAR(triplet_loss(0.1, MarginSpec::from_alpha(1)), 0.565685, 1e-6);
}

TEST(TripletLoss, NeverNegative) {
  for (double e = -1.0; e <= 1.0; e += 0.05) {
    EXPECT_GE(triplet_loss(e, MarginSpec::from_alpha(2.0)), 0.0);
  }
}

TEST(MeasureExpectation, EqualMembersAlphaZeroIsZero) {
  std::mt19937_64 rng(401);
  const auto x = random_sample(3, 0, rng);
  const Triplet t{x, x, {x.features, 1}};
  const auto p = AnsatzParams::random(3, 2, rng);
  EXPECT_NEAR(measure_triplet_expectation(t, p, MarginSpec::from_alpha(0)), 0.0, 1e-12);
}

TEST(MeasureExpectation, AlphaZeroIsHalfOverlapDifference) {
  std::mt19937_64 rng(402);
  for (int k = 0; k < 50; ++k) {
    const auto t = random_triplet(2 + k % 3, rng);
    const auto p = AnsatzParams::random(t.dimension(), 2, rng);
    const auto s = oracle_inner_products(t, p);
    EXPECT_NEAR(measure_triplet_expectation(t, p, MarginSpec::from_alpha(0)),
                kInterferenceConstant * (s.s_an - s.s_ap), 1e-9);
  }
}

TEST(MeasureExpectation, GeneralAlphaMatchesBranchExpansion) {
  // E·Z = (c/2)[S_an − S_ap + m(T_n + T_p)] with T_x = Re<U(xa)W φx | U(xx)W φx>.
  std::mt19937_64 rng(403);
  for (int k = 0; k < 20; ++k) {
    const auto t = random_triplet(2, rng);
    const auto p = AnsatzParams::random(2, 3, rng);
    const auto m = MarginSpec::from_alpha(0.5 + k * 0.1);
    const auto wphi = [&](const Sample &x) {
      return qsim::apply_gates(embedding::encode_sample(x), ansatz::build_ansatz(p));
    };
    const auto reenc = [&](qsim::Ket k0, const Sample &x) {
      return qsim::apply_gates(std::move(k0), embedding::encoding_unitary(x));
    };
    const auto s = oracle_inner_products(t, p);
    const double tn =
        qsim::inner_product(reenc(wphi(t.negative), t.anchor), reenc(wphi(t.negative), t.negative)).real();
    const double tp =
        qsim::inner_product(reenc(wphi(t.positive), t.anchor), reenc(wphi(t.positive), t.positive)).real();
    const double z = embedding::prepare_triplet_superposition(t, m).z_norm;
    const double expect = 0.5 * m.branch_weight() * (s.s_an - s.s_ap + m.margin * (tn + tp)) / z;
    EXPECT_NEAR(measure_triplet_expectation(t, p, m), expect, 1e-12);
  }
}

TEST(MeasureExpectation, SwappingPositiveAndNegativeNegates) {
  std::mt19937_64 rng(404);
  for (int k = 0; k < 10; ++k) {
    const auto t = random_triplet(3, rng);
    const auto p = AnsatzParams::random(3, 2, rng);
    const Triplet swapped{{t.anchor.features, 0}, {t.negative.features, 0}, {t.positive.features, 1}};
    const auto m = MarginSpec::from_alpha(0);
    EXPECT_NEAR(measure_triplet_expectation(t, p, m), -measure_triplet_expectation(swapped, p, m),
                1e-10);
  }
}

TEST(MeasureExpectation, IncreasingInAnchorNegativeOverlap) {
  // Identity ansatz, one feature: S_an = cos(π(xa − xn)) grows as xn nears xa.
  const auto id = AnsatzParams::identity_map(1);
  const auto m = MarginSpec::from_alpha(0);
  double prev = -2.0;
  for (double xn = 0.9; xn >= 0.0; xn -= 0.1) {
    const Triplet t{{{0.0}, 0}, {{0.3}, 0}, {{xn}, 1}};
    const double e = measure_triplet_expectation(t, id, m);
    EXPECT_GT(e, prev);
    prev = e;
  }
}

TEST(OracleInnerProducts, PositiveEqualsAnchor) {
  std::mt19937_64 rng(405);
  const auto a = random_sample(3, 0, rng);
  const Triplet t{a, a, random_sample(3, 1, rng)};
  EXPECT_NEAR(oracle_inner_products(t, AnsatzParams::random(3, 2, rng)).s_ap, 1.0, 1e-12);
}

TEST(OracleInnerProducts, IdentityAnsatzSingleCoordinateShift) {
  const Triplet t{{{0.2, 0.5}, 0}, {{0.2, 0.1}, 0}, {{0.7, 0.5}, 1}};
  const auto s = oracle_inner_products(t, AnsatzParams::identity_map(2));
  EXPECT_NEAR(s.s_ap, std::cos(kPi * 0.4), 1e-12);
  EXPECT_NEAR(s.s_an, std::cos(kPi * 0.5), 1e-12);
}

TEST(BatchLoss, SingleTripletMatchesTripletPath) {
  std::mt19937_64 rng(406);
  const std::vector<Triplet> batch{random_triplet(2, rng)};
  const auto p = AnsatzParams::random(2, 2, rng);
  const auto m = MarginSpec::from_alpha(1);
  const auto r = batch_loss(batch, p, m);
  const double e = measure_triplet_expectation(batch[0], p, m);
  EXPECT_EQ(r.expectation, e);
  EXPECT_EQ(r.loss, triplet_loss(e, m));
}

TEST(BatchLoss, SuperposedMatchesClassicalAverage) {
  std::mt19937_64 rng(407);
  const std::vector<Triplet> batch{random_triplet(2, rng), random_triplet(2, rng)};
  const auto p = AnsatzParams::random(2, 2, rng);
  const auto m = MarginSpec::from_alpha(1);
  EXPECT_NEAR(batch_loss(batch, p, m, BatchMode::superposed).expectation,
              batch_loss(batch, p, m, BatchMode::classical_average).expectation, 1e-9);
}

TEST(BatchLoss, IdenticalTripletsMatchSingle) {
  std::mt19937_64 rng(408);
  const auto t = random_triplet(3, rng);
  const std::vector<Triplet> batch{t, t, t};
  const auto p = AnsatzParams::random(3, 2, rng);
  const auto m = MarginSpec::from_alpha(1);
  EXPECT_NEAR(batch_loss(batch, p, m).expectation, measure_triplet_expectation(t, p, m), 1e-14);
}

TEST(BatchLoss, CalibrationResidualAgainstPrintedForm) {
  std::mt19937_64 rng(409);
  const std::vector<Triplet> batch{random_triplet(2, rng)};
  const auto p = AnsatzParams::random(2, 2, rng);
  const auto m = MarginSpec::from_alpha(0);
  const auto r = batch_loss(batch, p, m);
  // At α = 0 the reference form is ¼(S_an − S_ap), half the simulated readout.
  EXPECT_NEAR(r.calibration_residual, 0.25 * (r.s_an - r.s_ap), 1e-12);
}

TEST(BatchLoss, ErrorsOnEmptyOrOversizedBatch) {
  std::mt19937_64 rng(410);
  const auto p = AnsatzParams::random(2, 1, rng);
  const auto m = MarginSpec::from_alpha(1);
  EXPECT_THROW(batch_loss(std::vector<Triplet>{}, p, m), std::invalid_argument);
  const std::vector<Triplet> eight(8, random_triplet(2, rng));
  EXPECT_THROW(batch_loss(eight, p, m, BatchMode::superposed), std::invalid_argument);
}

TEST(ClassicalTripletLoss, ReferenceValues) {
  const std::vector<double> u{1.0, 0.0};
  const std::vector<double> v{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  const std::vector<double> w{0.0, 1.0};
  EXPECT_NEAR(angular_distance(u, v), 0.29289, 1e-5);
  EXPECT_DOUBLE_EQ(classical_triplet_loss(u, u, w, 0.0), 0.0);
  EXPECT_NEAR(classical_triplet_loss(u, u, u, 0.5), 0.5, 1e-15);
}

TEST(ClassicalTripletLoss, ScaleInvariant) {
  const std::vector<double> a{0.3, -1.2, 0.5};
  const std::vector<double> p{0.1, -0.9, 0.7};
  const std::vector<double> n{-0.8, 0.2, 0.4};
  const std::vector<double> a3{0.9, -3.6, 1.5};
  EXPECT_NEAR(classical_triplet_loss(a, p, n, 0.3), classical_triplet_loss(a3, p, n, 0.3), 1e-14);
}

TEST(ClassicalTripletLoss, ZeroVectorThrows) {
  const std::vector<double> z{0.0, 0.0};
  const std::vector<double> u{1.0, 0.0};
  EXPECT_THROW(angular_distance(z, u), std::invalid_argument);
}

}  // namespace
}  // namespace qaml::metric
