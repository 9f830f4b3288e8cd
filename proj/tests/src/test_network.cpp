#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "slt/errors.hpp"
#include "slt/network.hpp"
#include "slt/rng.hpp"

using namespace slt;

namespace {

// Independent reference forward pass: plain nested loops, no shared code with
// the library's Eigen path beyond the layout contract (weight i of layer l at
// layer_weight_offset(l) + source*out_width + dest).
std::vector<double> reference_forward(const ParamVector& p, const BitMask* mask,
                                      const std::vector<double>& input) {
  std::vector<double> h = input;
  const auto& arch = p.arch;
  for (int l = 0; l < arch.layer_count(); ++l) {
    const int in_w = arch.width(l);
    const int out_w = arch.width(l + 1);
    const int w_off = arch.layer_weight_offset(l);
    const int b_off = arch.layer_bias_offset(l);
    std::vector<double> next(static_cast<size_t>(out_w));
    for (int c = 0; c < out_w; ++c) {
      double acc = p.biases[static_cast<size_t>(b_off + c)];
      for (int r = 0; r < in_w; ++r) {
        const int wi = w_off + r * out_w + c;
        const double gate = mask ? static_cast<double>(mask->bits[static_cast<size_t>(wi)]) : 1.0;
        acc += h[static_cast<size_t>(r)] * gate * p.weights[static_cast<size_t>(wi)];
      }
      next[static_cast<size_t>(c)] = acc;
    }
    if (l + 1 < arch.layer_count())
      for (double& v : next) v = std::max(0.0, v);
    h = std::move(next);
  }
  return h;
}

Eigen::MatrixXd row(const std::vector<double>& v) {
  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = v[i];
  return m;
}

Dataset tiny_dataset(const NetworkArch& arch, int n, std::uint64_t seed) {
  Dataset d;
  d.features.resize(n, arch.input_width());
  d.labels.resize(static_cast<size_t>(n));
  d.class_count = arch.output_width();
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < arch.input_width(); ++j)
      d.features(i, j) = rng.uniform(-2.0, 2.0);
    d.labels[static_cast<size_t>(i)] = rng.below_int(d.class_count);
  }
  return d;
}

}  // namespace

TEST_SUITE("network") {

TEST_CASE("uniform init fills expected counts within bounds, reproducibly") {
  const NetworkArch arch{2, 20, 2};
  const ParamVector p = init_network(arch, InitScheme::uniform(-1.0, 1.0), 7);
  CHECK(p.weights.size() == 80);
  CHECK(p.biases.size() == 22);
  for (double w : p.weights) {
    CHECK(w >= -1.0);
    CHECK(w <= 1.0);
  }
  for (double b : p.biases) {
    CHECK(b >= -1.0);
    CHECK(b <= 1.0);
  }
  const ParamVector q = init_network(arch, InitScheme::uniform(-1.0, 1.0), 7);
  CHECK(p.weights == q.weights);
  CHECK(p.biases == q.biases);
}

TEST_CASE("degenerate uniform interval gives all zeros") {
  const ParamVector p = init_network(NetworkArch{2, 2}, InitScheme::uniform(0.0, 0.0), 0);
  for (double w : p.weights) CHECK(w == 0.0);
  for (double b : p.biases) CHECK(b == 0.0);
}

TEST_CASE("different seeds give different parameters") {
  const NetworkArch arch{2, 3, 2};
  const ParamVector a = init_network(arch, InitScheme::uniform(-1.0, 1.0), 1);
  const ParamVector b = init_network(arch, InitScheme::uniform(-1.0, 1.0), 2);
  CHECK(a.weights != b.weights);
}

TEST_CASE("inverted uniform interval is rejected") {
  CHECK_THROWS_AS(init_network(NetworkArch{2, 2}, InitScheme::uniform(1.0, -1.0), 0),
                  ConfigError);
}

TEST_CASE("invalid architectures are rejected") {
  CHECK_THROWS_AS(NetworkArch{2}.validate(), ArchitectureError);
  CHECK_THROWS_AS((NetworkArch{2, 0, 2}).validate(), ArchitectureError);
}

TEST_CASE("named architectures expand to the documented widths") {
  CHECK(named_arch('A', 2, 2).layer_widths == std::vector<int>{2, 20, 2});
  CHECK(named_arch('B', 64, 10).layer_widths == std::vector<int>{64, 75, 10});
  CHECK(named_arch('C', 2, 9).layer_widths == std::vector<int>{2, 100, 9});
  CHECK(named_arch('D', 2, 2).layer_widths == std::vector<int>{2, 50, 50, 2});
  CHECK_THROWS_AS(named_arch('E', 2, 2), ConfigError);
}

TEST_CASE("all-zero mask with zero biases yields zero logits") {
  const NetworkArch arch{2, 3, 2};
  ParamVector p = init_network(arch, InitScheme::uniform(-1.0, 1.0), 3);
  std::fill(p.biases.begin(), p.biases.end(), 0.0);
  const BitMask mask = BitMask::zeros(arch.weight_count());
  const Eigen::MatrixXd out = forward(MaskedNetwork(p, mask), row({0.3, -0.7}));
  CHECK(out(0, 0) == 0.0);
  CHECK(out(0, 1) == 0.0);
}

TEST_CASE("all-ones mask equals the unmasked forward") {
  const NetworkArch arch{2, 4, 3};
  const ParamVector p = init_network(arch, InitScheme::uniform(-1.0, 1.0), 9);
  const BitMask ones = BitMask::ones(arch.weight_count());
  const Eigen::MatrixXd in = row({0.5, 1.5});
  CHECK(forward(MaskedNetwork(p, ones), in) == forward(MaskedNetwork(p), in));
}

TEST_CASE("2-2-2 logits match explicit hand arithmetic") {
  ParamVector p;
  p.arch = NetworkArch{2, 2, 2};
  // Layer 0: w[r*2+c]; layer 1 likewise.
  p.weights = {0.5, -1.0, 2.0, 0.25,   // layer 0
               1.0, -0.5, 0.75, 1.5};  // layer 1
  p.biases = {0.1, -0.2,   // hidden
              0.3, -0.4};  // output
  const double x0 = 0.8, x1 = -0.6;
  const double h0_pre = x0 * 0.5 + x1 * 2.0 + 0.1;
  const double h1_pre = x0 * -1.0 + x1 * 0.25 + -0.2;
  const double h0 = h0_pre > 0.0 ? h0_pre : 0.0;
  const double h1 = h1_pre > 0.0 ? h1_pre : 0.0;
  const double y0 = h0 * 1.0 + h1 * 0.75 + 0.3;
  const double y1 = h0 * -0.5 + h1 * 1.5 + -0.4;
  const Eigen::MatrixXd out = forward(MaskedNetwork(p), row({x0, x1}));
  CHECK(out(0, 0) == doctest::Approx(y0).epsilon(1e-15));
  CHECK(out(0, 1) == doctest::Approx(y1).epsilon(1e-15));
}

TEST_CASE("random nets match the reference forward, masked and dense") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const NetworkArch arch{3, 5, 4, 2};
    const ParamVector p = init_network(arch, InitScheme::uniform(-1.5, 1.5),
                                       1000 + static_cast<std::uint64_t>(trial));
    BitMask mask = BitMask::ones(arch.weight_count());
    for (auto& b : mask.bits) b = rng.bernoulli(0.6) ? 1 : 0;
    const std::vector<double> x = {rng.uniform(-2, 2), rng.uniform(-2, 2),
                                   rng.uniform(-2, 2)};
    const auto ref = reference_forward(p, &mask, x);
    const Eigen::MatrixXd out = forward(MaskedNetwork(p, mask), row(x));
    for (int c = 0; c < 2; ++c)
      CHECK(out(0, c) == doctest::Approx(ref[static_cast<size_t>(c)]).epsilon(1e-12));
  }
}

TEST_CASE("width mismatch raises ShapeError") {
  const ParamVector p = init_network(NetworkArch{2, 2}, InitScheme::uniform(-1, 1), 0);
  CHECK_THROWS_AS(forward(MaskedNetwork(p), row({1.0, 2.0, 3.0})), ShapeError);
}

TEST_CASE("constant class-0 predictor scores the class-0 share") {
  ParamVector p;
  p.arch = NetworkArch{2, 2};
  p.weights = {0.0, 0.0, 0.0, 0.0};
  p.biases = {1.0, 0.0};  // always argmax class 0
  Dataset d;
  d.features.setZero(10, 2);
  d.labels = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  d.class_count = 2;
  CHECK(accuracy(MaskedNetwork(p), d) == doctest::Approx(0.5));
}

TEST_CASE("argmax ties break toward the lowest class index") {
  ParamVector p;
  p.arch = NetworkArch{1, 2};
  p.weights = {0.0, 0.0};
  p.biases = {0.5, 0.5};  // identical logits
  Dataset d;
  d.features.setOnes(2, 1);
  d.labels = {0, 1};
  d.class_count = 2;
  CHECK(accuracy(MaskedNetwork(p), d) == doctest::Approx(0.5));
}

TEST_CASE("accuracy on a random 2-4-2 net matches a per-row oracle") {
  const NetworkArch arch{2, 4, 2};
  const ParamVector p = init_network(arch, InitScheme::uniform(-1, 1), 21);
  const Dataset d = tiny_dataset(arch, 16, 22);
  int correct = 0;
  for (int i = 0; i < d.size(); ++i) {
    const auto logits = reference_forward(p, nullptr,
                                          {d.features(i, 0), d.features(i, 1)});
    const int pred = logits[0] >= logits[1] ? 0 : 1;  // lowest index on ties
    correct += pred == d.labels[static_cast<size_t>(i)];
  }
  CHECK(accuracy(MaskedNetwork(p), d) ==
        doctest::Approx(static_cast<double>(correct) / d.size()));
}

TEST_CASE("empty dataset raises EmptyDataError") {
  const ParamVector p = init_network(NetworkArch{2, 2}, InitScheme::uniform(-1, 1), 0);
  Dataset d;
  d.features.resize(0, 2);
  d.class_count = 2;
  CHECK_THROWS_AS(accuracy(MaskedNetwork(p), d), EmptyDataError);
  CHECK_THROWS_AS(cross_entropy(MaskedNetwork(p), d), EmptyDataError);
}

TEST_CASE("uniform logits give cross-entropy ln C") {
  for (int classes : {2, 5, 10}) {
    ParamVector p;
    p.arch = NetworkArch{1, classes};
    p.weights.assign(static_cast<size_t>(classes), 0.0);
    p.biases.assign(static_cast<size_t>(classes), 0.7);
    Dataset d;
    d.features.setOnes(4, 1);
    d.labels = {0, classes - 1, 0, classes - 1};
    d.class_count = classes;
    CHECK(cross_entropy(MaskedNetwork(p), d) ==
          doctest::Approx(std::log(static_cast<double>(classes))).epsilon(1e-12));
  }
}

TEST_CASE("dominant correct logit drives cross-entropy to zero") {
  ParamVector p;
  p.arch = NetworkArch{1, 2};
  p.weights = {30.0, -30.0};
  p.biases = {0.0, 0.0};
  Dataset d;
  d.features.setOnes(3, 1);
  d.labels = {0, 0, 0};
  d.class_count = 2;
  CHECK(cross_entropy(MaskedNetwork(p), d) < 1e-8);
}

TEST_CASE("cross-entropy matches the direct softmax formula") {
  const NetworkArch arch{2, 3, 3};
  const ParamVector p = init_network(arch, InitScheme::uniform(-1, 1), 31);
  const Dataset d = tiny_dataset(arch, 4, 32);
  double expected = 0.0;
  for (int i = 0; i < 4; ++i) {
    const auto logits = reference_forward(p, nullptr,
                                          {d.features(i, 0), d.features(i, 1)});
    const double m = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double v : logits) z += std::exp(v - m);
    expected += -(logits[static_cast<size_t>(d.labels[static_cast<size_t>(i)])] - m -
                  std::log(z));
  }
  expected /= 4.0;
  CHECK(cross_entropy(MaskedNetwork(p), d) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("sparsity counts zero bits") {
  CHECK(sparsity(BitMask::ones(10)) == doctest::Approx(0.0));
  CHECK(sparsity(BitMask::zeros(10)) == doctest::Approx(1.0));
  BitMask half = BitMask::zeros(5550);
  for (int i = 0; i < 2775; ++i) half.bits[static_cast<size_t>(i)] = 1;
  CHECK(sparsity(half) == doctest::Approx(0.5));
}

TEST_CASE("forward is invariant under pre-applied masks") {
  const NetworkArch arch{2, 5, 2};
  const ParamVector p = init_network(arch, InitScheme::uniform(-1, 1), 41);
  Rng rng(42);
  BitMask mask = BitMask::ones(arch.weight_count());
  for (auto& b : mask.bits) b = rng.bernoulli(0.5) ? 1 : 0;
  const ParamVector pm = apply_mask(p, mask);
  const BitMask ones = BitMask::ones(arch.weight_count());
  const Eigen::MatrixXd in = row({1.2, -0.4});
  CHECK(forward(MaskedNetwork(p, mask), in) == forward(MaskedNetwork(pm, ones), in));
}

TEST_CASE("masking an already-zero weight changes nothing") {
  const NetworkArch arch{2, 4, 2};
  ParamVector p = init_network(arch, InitScheme::uniform(-1, 1), 51);
  p.weights[5] = 0.0;
  BitMask with = BitMask::ones(arch.weight_count());
  BitMask without = with;
  without.bits[5] = 0;
  const Eigen::MatrixXd in = row({0.9, 0.1});
  CHECK(forward(MaskedNetwork(p, with), in) == forward(MaskedNetwork(p, without), in));
}

TEST_CASE("zero-parameter net gradient follows the softmax residual formula") {
  ParamVector p;
  p.arch = NetworkArch{2, 2, 2};
  p.weights.assign(8, 0.0);
  p.biases.assign(4, 0.0);
  Dataset d;
  d.features.setZero(4, 2);
  d.labels = {0, 0, 1, 1};
  d.class_count = 2;
  const auto g = gradient(p, d, 0.0);
  REQUIRE(g.size() == 12);
  // Zero inputs and zero hidden activations kill every weight gradient; the
  // output-bias gradient is mean(p - onehot) with p = (1/2, 1/2), which
  // cancels over the balanced batch. Hidden biases get zero deltas through
  // zero weights.
  for (double v : g) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("isolated L2 term contributes alpha times weights") {
  // With frozen zero inputs and a balanced batch the data term vanishes
  // (previous case), so alpha isolates cleanly.
  ParamVector p;
  p.arch = NetworkArch{2, 2};
  p.weights = {0.4, -0.3, 0.2, 0.1};
  p.biases = {0.0, 0.0};
  Dataset d;
  d.features.setZero(2, 2);
  d.labels = {0, 1};
  d.class_count = 2;
  const auto g = gradient(p, d, 0.1);
  for (size_t i = 0; i < 4; ++i)
    CHECK(g[i] == doctest::Approx(0.1 * p.weights[i]).epsilon(1e-12));
  CHECK(g[4] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(g[5] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("analytic gradient matches central finite differences") {
  const NetworkArch arch{2, 3, 2};
  ParamVector p = init_network(arch, InitScheme::uniform(-1, 1), 61);
  const Dataset d = tiny_dataset(arch, 8, 62);
  const double alpha = 0.01;
  const auto g = gradient(p, d, alpha);
  const double h = 1e-5;
  const int wc = arch.weight_count();
  double max_rel = 0.0;
  for (int i = 0; i < wc + arch.bias_count(); ++i) {
    double* slot = i < wc ? &p.weights[static_cast<size_t>(i)]
                          : &p.biases[static_cast<size_t>(i - wc)];
    const double keep = *slot;
    *slot = keep + h;
    const double up = penalized_loss(p, d, alpha);
    *slot = keep - h;
    const double dn = penalized_loss(p, d, alpha);
    *slot = keep;
    const double fd = (up - dn) / (2.0 * h);
    const double rel = std::abs(fd - g[static_cast<size_t>(i)]) /
                       std::max(1e-8, std::abs(fd));
    max_rel = std::max(max_rel, rel);
  }
  CHECK(max_rel < 1e-5);
}

}  // TEST_SUITE
