#include "slt/network.hpp"

#include <cmath>
#include <string>

#include "slt/errors.hpp"
#include "slt/rng.hpp"

namespace slt {

int NetworkArch::weight_count() const {
  int n = 0;
  for (int l = 0; l + 1 < static_cast<int>(layer_widths.size()); ++l)
    n += width(l) * width(l + 1);
  return n;
}

int NetworkArch::bias_count() const {
  int n = 0;
  for (int l = 1; l < static_cast<int>(layer_widths.size()); ++l) n += width(l);
  return n;
}

int NetworkArch::layer_weight_offset(int l) const {
  int off = 0;
  for (int i = 0; i < l; ++i) off += width(i) * width(i + 1);
  return off;
}

int NetworkArch::layer_bias_offset(int l) const {
  int off = 0;
  for (int i = 0; i < l; ++i) off += width(i + 1);
  return off;
}

void NetworkArch::validate() const {
  if (layer_widths.size() < 2)
    throw ArchitectureError("architecture needs at least input and output widths");
  for (int w : layer_widths) {
    if (w < 1) throw ArchitectureError("layer width must be positive");
  }
}

void ParamVector::validate() const {
  arch.validate();
  if (static_cast<int>(weights.size()) != arch.weight_count())
    throw ShapeError("weight vector length does not match architecture");
  if (static_cast<int>(biases.size()) != arch.bias_count())
    throw ShapeError("bias vector length does not match architecture");
  for (double w : weights) {
    if (!std::isfinite(w)) throw NumericsError("non-finite weight");
  }
  for (double b : biases) {
    if (!std::isfinite(b)) throw NumericsError("non-finite bias");
  }
}

int BitMask::popcount() const {
  int n = 0;
  for (std::uint8_t b : bits) n += b != 0;
  return n;
}

double sparsity(const BitMask& mask) {
  if (mask.size() == 0) return 0.0;
  return 1.0 - static_cast<double>(mask.popcount()) / mask.size();
}

ParamVector init_network(const NetworkArch& arch, const InitScheme& scheme,
                         std::uint64_t seed) {
  arch.validate();
  ParamVector p;
  p.arch = arch;
  p.weights.resize(static_cast<std::size_t>(arch.weight_count()));
  p.biases.resize(static_cast<std::size_t>(arch.bias_count()));
  Rng rng(seed);
  switch (scheme.kind) {
    case InitKind::Uniform: {
      if (scheme.hi < scheme.lo)
        throw ConfigError("uniform init: hi must not be below lo");
      for (double& w : p.weights) w = rng.uniform(scheme.lo, scheme.hi);
      for (double& b : p.biases) b = rng.uniform(scheme.lo, scheme.hi);
      break;
    }
    case InitKind::KaimingNormalScaled:
    case InitKind::SignedKaimingConstantScaled: {
      if (!(scheme.k > 0.0 && scheme.k <= 1.0))
        throw ConfigError("scaled init: retained fraction k must be in (0, 1]");
      for (int l = 0; l < arch.layer_count(); ++l) {
        const double sigma =
            std::sqrt(2.0 / arch.width(l)) / std::sqrt(scheme.k);
        const int off = arch.layer_weight_offset(l);
        const int cnt = arch.layer_weight_count(l);
        for (int i = 0; i < cnt; ++i) {
          double v;
          if (scheme.kind == InitKind::KaimingNormalScaled) {
            v = rng.normal(0.0, sigma);
          } else {
            v = rng.next_double() < 0.5 ? -sigma : sigma;
          }
          p.weights[static_cast<std::size_t>(off + i)] = v;
        }
      }
      // Biases stay zero for both Kaiming schemes.
      break;
    }
  }
  return p;
}

namespace {

// Column-major copy of layer l's weight matrix with the mask applied.
Eigen::MatrixXd layer_matrix(const ParamVector& p, const BitMask* mask, int l) {
  const int in = p.arch.width(l);
  const int out = p.arch.width(l + 1);
  const int off = p.arch.layer_weight_offset(l);
  Eigen::MatrixXd W(in, out);
  const double* w = p.weights.data() + off;
  if (mask != nullptr) {
    const std::uint8_t* b = mask->bits.data() + off;
    for (int r = 0; r < in; ++r)
      for (int c = 0; c < out; ++c) W(r, c) = b[r * out + c] ? w[r * out + c] : 0.0;
  } else {
    for (int r = 0; r < in; ++r)
      for (int c = 0; c < out; ++c) W(r, c) = w[r * out + c];
  }
  return W;
}

void check_net_inputs(MaskedNetwork net, const Eigen::MatrixXd& inputs) {
  const ParamVector& p = *net.params;
  if (inputs.cols() != p.arch.input_width())
    throw ShapeError("input width " + std::to_string(inputs.cols()) +
                     " does not match architecture input " +
                     std::to_string(p.arch.input_width()));
  if (net.mask != nullptr && net.mask->size() != p.arch.weight_count())
    throw ShapeError("mask length does not match weight count");
}

Eigen::MatrixXd logits_of(MaskedNetwork net, const Eigen::MatrixXd& inputs,
                          bool relu_inputs) {
  check_net_inputs(net, inputs);
  const ParamVector& p = *net.params;
  const int layers = p.arch.layer_count();
  Eigen::MatrixXd h = relu_inputs ? inputs.cwiseMax(0.0).eval() : inputs;
  for (int l = 0; l < layers; ++l) {
    const Eigen::MatrixXd W = layer_matrix(p, net.mask, l);
    const auto bias = Eigen::Map<const Eigen::RowVectorXd>(
        p.biases.data() + p.arch.layer_bias_offset(l), p.arch.width(l + 1));
    h = ((h * W).rowwise() + bias).eval();
    if (l + 1 < layers) h = h.cwiseMax(0.0);
  }
  return h;
}

int argmax_lowest(const Eigen::MatrixXd& logits, Eigen::Index row) {
  int best = 0;
  for (int c = 1; c < logits.cols(); ++c) {
    if (logits(row, c) > logits(row, best)) best = c;
  }
  return best;
}

void check_labels(const Dataset& data, const NetworkArch& arch) {
  if (data.size() == 0) throw EmptyDataError("evaluation needs at least one sample");
  for (int y : data.labels) {
    if (y < 0 || y >= arch.output_width())
      throw ShapeError("label outside network output range");
  }
}

double mean_cross_entropy(const Eigen::MatrixXd& logits,
                          const std::vector<int>& labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index c = 0; c < logits.cols(); ++c)
      sum += std::exp(logits(i, c) - m);
    total += m + std::log(sum) - logits(i, labels[static_cast<std::size_t>(i)]);
  }
  return total / static_cast<double>(logits.rows());
}

}  // namespace

Eigen::MatrixXd forward(MaskedNetwork net, const Eigen::MatrixXd& inputs,
                        bool relu_inputs) {
  return logits_of(net, inputs, relu_inputs);
}

double accuracy(MaskedNetwork net, const Dataset& data) {
  check_labels(data, net.params->arch);
  const Eigen::MatrixXd logits = logits_of(net, data.features, false);
  int correct = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i)
    correct += argmax_lowest(logits, i) == data.labels[static_cast<std::size_t>(i)];
  return static_cast<double>(correct) / data.size();
}

double cross_entropy(MaskedNetwork net, const Dataset& data) {
  check_labels(data, net.params->arch);
  const Eigen::MatrixXd logits = logits_of(net, data.features, false);
  return mean_cross_entropy(logits, data.labels);
}

EvalMetrics evaluate_metrics(MaskedNetwork net, const Dataset& data) {
  check_labels(data, net.params->arch);
  const Eigen::MatrixXd logits = logits_of(net, data.features, false);
  EvalMetrics m;
  int correct = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i)
    correct += argmax_lowest(logits, i) == data.labels[static_cast<std::size_t>(i)];
  m.accuracy = static_cast<double>(correct) / data.size();
  m.cross_entropy = mean_cross_entropy(logits, data.labels);
  m.sparsity = net.mask != nullptr ? sparsity(*net.mask) : 0.0;
  return m;
}

std::vector<double> gradient(const ParamVector& params, const Dataset& batch,
                             double l2_alpha) {
  if (batch.size() == 0) throw EmptyDataError("gradient needs a nonempty batch");
  check_labels(batch, params.arch);
  const NetworkArch& arch = params.arch;
  const int layers = arch.layer_count();
  const int n = batch.size();

  // Forward pass keeping pre-activations.
  std::vector<Eigen::MatrixXd> acts;  // acts[l] = input to layer l
  acts.reserve(static_cast<std::size_t>(layers) + 1);
  acts.push_back(batch.features);
  std::vector<Eigen::MatrixXd> pre;  // pre[l] = acts[l]*W + b
  pre.reserve(static_cast<std::size_t>(layers));
  for (int l = 0; l < layers; ++l) {
    const Eigen::MatrixXd W = layer_matrix(params, nullptr, l);
    const auto bias = Eigen::Map<const Eigen::RowVectorXd>(
        params.biases.data() + arch.layer_bias_offset(l), arch.width(l + 1));
    Eigen::MatrixXd z = (acts.back() * W).rowwise() + bias;
    if (!z.allFinite()) throw NumericsError("non-finite activation in gradient");
    pre.push_back(z);
    if (l + 1 < layers) acts.push_back(z.cwiseMax(0.0));
  }

  // Softmax residual on the logits.
  const Eigen::MatrixXd& logits = pre.back();
  Eigen::MatrixXd delta(n, arch.output_width());
  for (int i = 0; i < n; ++i) {
    const double m = logits.row(i).maxCoeff();
    double sum = 0.0;
    for (int c = 0; c < arch.output_width(); ++c) {
      delta(i, c) = std::exp(logits(i, c) - m);
      sum += delta(i, c);
    }
    delta.row(i) /= sum;
    delta(i, batch.labels[static_cast<std::size_t>(i)]) -= 1.0;
  }
  delta /= static_cast<double>(n);

  std::vector<double> grad(
      static_cast<std::size_t>(arch.weight_count() + arch.bias_count()), 0.0);
  for (int l = layers - 1; l >= 0; --l) {
    const Eigen::MatrixXd gW = acts[static_cast<std::size_t>(l)].transpose() * delta;
    const Eigen::RowVectorXd gB = delta.colwise().sum();
    const int in = arch.width(l);
    const int out = arch.width(l + 1);
    const int woff = arch.layer_weight_offset(l);
    const int boff = arch.weight_count() + arch.layer_bias_offset(l);
    for (int r = 0; r < in; ++r)
      for (int c = 0; c < out; ++c)
        grad[static_cast<std::size_t>(woff + r * out + c)] = gW(r, c);
    for (int c = 0; c < out; ++c) grad[static_cast<std::size_t>(boff + c)] = gB(c);
    if (l > 0) {
      const Eigen::MatrixXd W = layer_matrix(params, nullptr, l);
      Eigen::MatrixXd back = delta * W.transpose();
      // ReLU subgradient: 0 at exactly 0.
      const Eigen::MatrixXd& z = pre[static_cast<std::size_t>(l - 1)];
      delta = (z.array() > 0.0).cast<double>() * back.array();
    }
  }
  if (l2_alpha != 0.0) {
    for (int i = 0; i < arch.weight_count(); ++i)
      grad[static_cast<std::size_t>(i)] += l2_alpha * params.weights[static_cast<std::size_t>(i)];
  }
  return grad;
}

double penalized_loss(const ParamVector& params, const Dataset& batch,
                      double l2_alpha) {
  if (batch.size() == 0) throw EmptyDataError("loss needs a nonempty batch");
  double loss = cross_entropy(MaskedNetwork(params), batch);
  if (l2_alpha != 0.0) {
    double ss = 0.0;
    for (double w : params.weights) ss += w * w;
    loss += 0.5 * l2_alpha * ss;
  }
  return loss;
}

ParamVector apply_mask(const ParamVector& params, const BitMask& mask) {
  if (mask.size() != params.arch.weight_count())
    throw ShapeError("mask length does not match weight count");
  ParamVector out = params;
  for (int i = 0; i < mask.size(); ++i) {
    if (!mask.bits[static_cast<std::size_t>(i)]) out.weights[static_cast<std::size_t>(i)] = 0.0;
  }
  return out;
}

NetworkArch named_arch(char name, int input_width, int output_width) {
  switch (name) {
    case 'A': return NetworkArch{input_width, 20, output_width};
    case 'B': return NetworkArch{input_width, 75, output_width};
    case 'C': return NetworkArch{input_width, 100, output_width};
    case 'D': return NetworkArch{input_width, 50, 50, output_width};
    default: throw ConfigError(std::string("unknown architecture name: ") + name);
  }
}

}  // namespace slt
