#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "slt/dataset.hpp"

namespace slt {

// Fully connected feed-forward architecture given as layer widths,
// e.g. [2, 20, 2] = 2 inputs, one hidden layer of 20, 2 outputs.
struct NetworkArch {
  std::vector<int> layer_widths;

  NetworkArch() = default;
  NetworkArch(std::initializer_list<int> widths) : layer_widths(widths) {}
  explicit NetworkArch(std::vector<int> widths) : layer_widths(std::move(widths)) {}

  int layer_count() const { return static_cast<int>(layer_widths.size()) - 1; }
  int input_width() const { return layer_widths.front(); }
  int output_width() const { return layer_widths.back(); }
  int width(int i) const { return layer_widths[static_cast<std::size_t>(i)]; }

  int weight_count() const;
  int bias_count() const;
  // Flat offsets into the weight/bias vectors for layer l in [0, layer_count).
  int layer_weight_offset(int l) const;
  int layer_weight_count(int l) const { return width(l) * width(l + 1); }
  int layer_bias_offset(int l) const;

  // Throws ArchitectureError unless length >= 2 and every width >= 1.
  void validate() const;

  bool operator==(const NetworkArch& other) const = default;
};

// Flat parameters. Weight i lives at layer_weight_offset(l) + r*width(l+1) + c
// for the edge from neuron r of layer l to neuron c of layer l+1 (layer-major,
// then source-neuron-major). Bias layout is analogous.
struct ParamVector {
  NetworkArch arch;
  std::vector<double> weights;
  std::vector<double> biases;

  void validate() const;  // throws ShapeError / NumericsError
};

// Binary mask over weights only; biases are never masked.
struct BitMask {
  std::vector<std::uint8_t> bits;  // one byte per bit, values 0 or 1

  static BitMask ones(int n) { return BitMask{std::vector<std::uint8_t>(static_cast<std::size_t>(n), 1)}; }
  static BitMask zeros(int n) { return BitMask{std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0)}; }

  int size() const { return static_cast<int>(bits.size()); }
  int popcount() const;

  bool operator==(const BitMask& other) const = default;
};

double sparsity(const BitMask& mask);

// Non-owning view pairing parameters with a mask. The pointed-to objects must
// outlive the view; all evaluation functions below take it by value.
struct MaskedNetwork {
  const ParamVector* params = nullptr;
  const BitMask* mask = nullptr;  // nullptr means dense (all-ones)

  MaskedNetwork(const ParamVector& p, const BitMask& m) : params(&p), mask(&m) {}
  explicit MaskedNetwork(const ParamVector& p) : params(&p) {}
};

enum class InitKind { Uniform, KaimingNormalScaled, SignedKaimingConstantScaled };

struct InitScheme {
  InitKind kind = InitKind::Uniform;
  double lo = -1.0;  // Uniform only
  double hi = 1.0;
  double k = 1.0;  // retained fraction for the scaled Kaiming schemes

  static InitScheme uniform(double lo, double hi) {
    return InitScheme{InitKind::Uniform, lo, hi, 1.0};
  }
  static InitScheme kaiming_normal_scaled(double k) {
    return InitScheme{InitKind::KaimingNormalScaled, 0.0, 0.0, k};
  }
  static InitScheme signed_kaiming_constant_scaled(double k) {
    return InitScheme{InitKind::SignedKaimingConstantScaled, 0.0, 0.0, k};
  }
};

struct EvalMetrics {
  double accuracy = 0.0;
  double cross_entropy = 0.0;
  double sparsity = 0.0;
};

// Deterministic initialization. Uniform fills weights and biases from
// U[lo, hi); the Kaiming schemes fill weights per layer (std scaled by
// 1/sqrt(k)) and set biases to zero. Draw order: weights in flat order, then
// biases in flat order.
ParamVector init_network(const NetworkArch& arch, const InitScheme& scheme,
                         std::uint64_t seed);

// Hidden layers apply ReLU; the last layer is affine (logits). When
// relu_inputs is set the inputs are clamped at zero first.
Eigen::MatrixXd forward(MaskedNetwork net, const Eigen::MatrixXd& inputs,
                        bool relu_inputs = false);

// Fraction of rows whose argmax logit equals the label; argmax ties break
// toward the lowest class index.
double accuracy(MaskedNetwork net, const Dataset& data);

// Mean over samples of -log softmax(logits)[label], max-subtracted softmax.
double cross_entropy(MaskedNetwork net, const Dataset& data);

// One forward pass computing accuracy, cross-entropy, and mask sparsity.
EvalMetrics evaluate_metrics(MaskedNetwork net, const Dataset& data);

// Analytic gradient of mean cross-entropy + (l2_alpha/2)*||weights||^2 with
// respect to [weights..., biases...]. ReLU subgradient at 0 is 0. Biases are
// not regularized.
std::vector<double> gradient(const ParamVector& params, const Dataset& batch,
                             double l2_alpha);

// Loss value the gradient differentiates: mean cross-entropy plus the
// (l2_alpha/2)*||weights||^2 penalty.
double penalized_loss(const ParamVector& params, const Dataset& batch,
                      double l2_alpha);

// Copy of params with masked weights zeroed.
ParamVector apply_mask(const ParamVector& params, const BitMask& mask);

// Named architectures: hidden widths 20 (A), 75 (B), 100 (C), 50-50 (D).
NetworkArch named_arch(char name, int input_width, int output_width);

}  // namespace slt
