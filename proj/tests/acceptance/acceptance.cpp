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
// Acceptance run: one PASS/FAIL line per criterion; nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qaml/cli.hpp"
#include "qaml/qaml.hpp"
#include "qaml/verify.hpp"

namespace {

namespace fs = std::filesystem;
using namespace qaml;

constexpr std::uint64_t kSeeds = 5;
constexpr double kEpsilon = 0.02;

struct Outcome {
  double d_in = 0.0;
  double d_out = 0.0;
  double accuracy = 0.0;
};

struct Sweep {
  std::vector<Outcome> qml;
  std::vector<Outcome> qaml;
};

bool report(int index, const std::string &name, bool passed, const std::string &detail) {
  std::cout << (passed ? "PASS" : "FAIL") << " [" << index << "] " << name << ": " << detail
            << std::endl;
  return passed;
}

template <class F>
std::string list(const std::vector<Outcome> &v, F field) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    os << (i ? " " : "") << field(v[i]);
  }
  os << ']';
  return os.str();
}

Outcome train_and_measure(const cli::Settings &s) {
  const auto split = data::load_dataset(cli::data_config(s));
  const auto result = train::train(cli::train_config(s, split.dimension()), split);
  const auto m = eval::similarity_matrix(split.test, result.params);
  const auto avg = eval::average_inner_products(m);
  return {avg.d_in, avg.d_out, eval::epsilon_robust_accuracy(m, kEpsilon).accuracy};
}

Sweep sweep(cli::Settings base) {
  Sweep out;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    base.seed = seed;
    base.schedule = "natural";
    out.qml.push_back(train_and_measure(base));
    base.schedule = "alternating";
    out.qaml.push_back(train_and_measure(base));
  }
  return out;
}

std::size_t count_if_index(std::size_t n, auto pred) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) {
    c += pred(i) ? 1 : 0;
  }
  return c;
}

double mean(const std::vector<Outcome> &v, double Outcome::*field) {
  double s = 0.0;
  for (const auto &o : v) {
    s += o.*field;
  }
  return s / static_cast<double>(v.size());
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << x;
  return os.str();
}

bool criterion_mechanics() {
  std::mt19937_64 rng(8);
  double worst_norm = 0.0;
  std::size_t ascent_cases = 0;
  std::size_t ascent_ok = 0;
  double worst_drop = 0.0;
  bool blocks_identical = true;
  for (int k = 0; ascent_cases < 20 && k < 2000; ++k) {
    const std::size_t n = 2 + k % 3;
    const auto t = verify::random_triplet(n, rng);
    const auto p = AnsatzParams::random(n, 2, rng);
    const auto m = MarginSpec::from_alpha(k % 2 == 0 ? 0.0 : 1.0);

    auto cfg = AdversarialConfig::defaults(n);
    const auto g = grad::anchor_gradient(t, p, m, cfg.gradient_mode);
    worst_norm = std::max(worst_norm, std::abs(adversarial::adversarial_anchor_state(
                                                   t.anchor, g, cfg).norm() - 1.0));
    const auto circuit = adversarial::adversarial_circuit(t, g, cfg, m);
    const auto full = qsim::apply_gates(circuit.prepared, circuit.post_ansatz);
    worst_norm = std::max(worst_norm, std::abs(full.norm() - 1.0));

    const auto &layout = circuit.prepared.layout();
    const auto before = qsim::apply_gates(
        circuit.prepared, embedding::reencode_gates(t.anchor.features, t.positive.features,
                                                    t.negative.features, layout));
    const auto v = adversarial::build_adversarial_rotation(g, cfg);
    const auto after = qsim::apply_gates(before, adversarial::controlled_adversarial(v, layout));
    const std::size_t a2 = std::size_t{1} << (layout.total_qubits() - 1 - layout.ancilla2());
    for (std::size_t i = 0; i < before.size(); ++i) {
      if ((i & a2) != 0 && after[i] != before[i]) {
        blocks_identical = false;
      }
    }

    const double natural = metric::triplet_loss(metric::measure_triplet_expectation(t, p, m), m);
    if (natural < 1e-3) {
      continue;
    }
    cfg.lambda.assign(n, 1e-3);
    cfg.angle_mode = AngleMode::small_angle;
    cfg.gradient_mode = AnchorShift::exact;
    const double adv = metric::triplet_loss(adversarial::make_adversarial(t, p, cfg, m).expectation(p), m);
    ++ascent_cases;
    ascent_ok += adv >= natural - 1e-9 ? 1 : 0;
    worst_drop = std::max(worst_drop, natural - adv);
  }
  std::ostringstream os;
  os << "max |norm-1| " << worst_norm << ", ascent " << ascent_ok << "/" << ascent_cases
     << " (max drop " << worst_drop << "), ancilla2=1 blocks "
     << (blocks_identical ? "identical" : "modified");
  return report(8, "adversarial mechanics",
                worst_norm < 1e-10 && ascent_cases == 20 && ascent_ok == ascent_cases &&
                    blocks_identical,
                os.str());
}

std::string slurp(const fs::path &p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

bool criterion_determinism() {
  const fs::path root = fs::temp_directory_path() / "qaml_acceptance_determinism";
  fs::remove_all(root);
  std::vector<std::string> mismatched;
  std::size_t compared = 0;
  bool ran = true;
  for (const char *dataset : {"iris", "mnist"}) {
    for (const char *run : {"a", "b"}) {
      const auto out = (root / dataset / run).string();
      std::vector<std::string> common{"--dataset", dataset,  "--seed",   "3",
                                      "--epochs",  "60",     "--schedule", "alternating",
                                      "--out",     out};
      if (std::string(dataset) == "mnist") {
        common.insert(common.end(), {"--mnist-images", QAML_DATA_DIR "/mnist01/images-idx3-ubyte",
                                     "--mnist-labels", QAML_DATA_DIR "/mnist01/labels-idx1-ubyte"});
      }
      for (const char *sub : {"train", "eval"}) {
        std::vector<std::string> args{"qaml", sub};
        args.insert(args.end(), common.begin(), common.end());
        if (std::string(sub) == "eval") {
          args.insert(args.end(), {"--checkpoint", out + "/checkpoint.txt"});
        }
        std::vector<const char *> argv;
        for (const auto &a : args) {
          argv.push_back(a.c_str());
        }
        std::ostringstream sink;
        ran = ran && cli::run_cli(static_cast<int>(argv.size()), argv.data(), sink, sink) == 0;
      }
    }
    for (const auto &entry : fs::directory_iterator(root / dataset / "a")) {
      const auto name = entry.path().filename();
      ++compared;
      if (slurp(entry.path()) != slurp(root / dataset / "b" / name)) {
        mismatched.push_back(std::string(dataset) + "/" + name.string());
      }
    }
  }
  fs::remove_all(root);
  std::ostringstream os;
  os << compared << " files compared across two datasets, " << mismatched.size() << " differ";
  for (const auto &f : mismatched) {
    os << ' ' << f;
  }
  return report(9, "determinism", ran && compared >= 14 && mismatched.empty(), os.str());
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  bool all = true;

  const auto grads = verify::check_gradients();
  all &= report(1, "gradient correctness", grads.passed, grads.detail);

  const auto fit = verify::fit_interference_constant();
  {
    std::mt19937_64 rng(11);
    const auto t = verify::random_triplet(2, rng);
    const auto p = AnsatzParams::random(2, 2, rng);
    const auto s = metric::oracle_inner_products(t, p);
    const double reference =
        metric::reference_closed_form(s.s_ap, s.s_an, MarginSpec::from_alpha(0.0)) /
        (s.s_an - s.s_ap);
    std::ostringstream os;
    os << std::setprecision(15) << "fitted c = " << fit.mean << " over " << fit.cases
       << " cases, spread " << std::setprecision(3) << fit.spread
       << "; reference closed form implies c = " << reference;
    all &= report(2, "oracle/circuit equivalence", fit.spread < 1e-10, os.str());
  }

  const auto kernels = verify::check_kernels();
  all &= report(3, "encoding kernels", kernels.passed, kernels.detail);

  const auto linear = verify::check_batch_linearity();
  all &= report(4, "batch linearity", linear.passed, linear.detail);

  cli::Settings iris_settings;
  const auto iris = sweep(iris_settings);
  {
    const double qml_mean = mean(iris.qml, &Outcome::d_out);
    const auto better = count_if_index(kSeeds, [&](std::size_t i) {
      return iris.qaml[i].d_out < iris.qml[i].d_out;
    });
    const auto d_out = [](const Outcome &o) { return o.d_out; };
    all &= report(5, "Iris reproduction", qml_mean <= -0.20 && better >= 4,
                  "mean QML test d_o " + fmt(qml_mean) + " (need <= -0.20); QAML below QML on " +
                      std::to_string(better) + "/5 seeds (need >= 4); QML d_o " +
                      list(iris.qml, d_out) + " QAML d_o " + list(iris.qaml, d_out));
  }

  cli::Settings mnist_settings;
  mnist_settings.dataset = "mnist";
  mnist_settings.mnist_images = QAML_DATA_DIR "/mnist01/images-idx3-ubyte";
  mnist_settings.mnist_labels = QAML_DATA_DIR "/mnist01/labels-idx1-ubyte";
  const auto mnist = sweep(mnist_settings);
  {
    const double qml_mean = mean(mnist.qml, &Outcome::d_out);
    const auto better = count_if_index(kSeeds, [&](std::size_t i) {
      return mnist.qaml[i].d_out < mnist.qml[i].d_out;
    });
    double min_in = 1.0;
    for (const auto *v : {&mnist.qml, &mnist.qaml}) {
      for (const auto &o : *v) {
        min_in = std::min(min_in, o.d_in);
      }
    }
    const auto d_out = [](const Outcome &o) { return o.d_out; };
    all &= report(6, "MNIST reproduction", qml_mean <= -0.50 && better >= 4 && min_in >= 0.60,
                  "mean QML test d_o " + fmt(qml_mean) + " (need <= -0.50); QAML below QML on " +
                      std::to_string(better) + "/5 seeds (need >= 4); min d_i " + fmt(min_in) +
                      " (need >= 0.60); QML d_o " + list(mnist.qml, d_out) + " QAML d_o " +
                      list(mnist.qaml, d_out));
  }

  {
    const auto at_least = [](const Sweep &s) {
      return count_if_index(kSeeds,
                            [&](std::size_t i) { return s.qaml[i].accuracy >= s.qml[i].accuracy; });
    };
    const auto iris_ok = at_least(iris);
    const auto mnist_ok = at_least(mnist);
    const double mnist_qaml = mean(mnist.qaml, &Outcome::accuracy);
    const auto acc = [](const Outcome &o) { return o.accuracy; };
    all &= report(7, "epsilon-robustness at 0.02",
                  iris_ok >= 4 && mnist_ok >= 4 && mnist_qaml >= 0.92,
                  "QAML >= QML on Iris " + std::to_string(iris_ok) + "/5, MNIST " +
                      std::to_string(mnist_ok) + "/5 (need >= 4 each); mean QAML MNIST accuracy " +
                      fmt(mnist_qaml) + " (need >= 0.92); Iris QML " + list(iris.qml, acc) +
                      " QAML " + list(iris.qaml, acc) + "; MNIST QML " + list(mnist.qml, acc) +
                      " QAML " + list(mnist.qaml, acc));
  }

  all &= criterion_mechanics();
  all &= criterion_determinism();

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << "acceptance finished in " << fmt(seconds) << " s: "
            << (all ? "all criteria passed" : "some criteria failed") << std::endl;
  return all ? 0 : 1;
}
