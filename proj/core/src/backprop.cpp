#include "slt/backprop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slt/errors.hpp"
#include "slt/rng.hpp"

namespace slt {

void BackpropConfig::validate() const {
  if (epochs < 1) throw ConfigError("backprop: epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("backprop: batch_size must be at least 1");
  if (alpha < 0.0) throw ConfigError("backprop: alpha must be nonnegative");
  if (lr_init < 0.0) throw ConfigError("backprop: lr_init must be nonnegative");
  if (epsilon <= 0.0) throw ConfigError("backprop: epsilon must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0))
    throw ConfigError("backprop: momentum must be in [0, 1)");
}

namespace {

// Glorot-uniform fill, layer by layer, weights before biases within a layer.
ParamVector glorot_init(const NetworkArch& arch, Rng& rng) {
  ParamVector p;
  p.arch = arch;
  p.weights.resize(static_cast<std::size_t>(arch.weight_count()));
  p.biases.resize(static_cast<std::size_t>(arch.bias_count()));
  for (int l = 0; l < arch.layer_count(); ++l) {
    const double bound = std::sqrt(6.0 / (arch.width(l) + arch.width(l + 1)));
    const int woff = arch.layer_weight_offset(l);
    for (int i = 0; i < arch.layer_weight_count(l); ++i)
      p.weights[static_cast<std::size_t>(woff + i)] = rng.uniform(-bound, bound);
    const int boff = arch.layer_bias_offset(l);
    for (int i = 0; i < arch.width(l + 1); ++i)
      p.biases[static_cast<std::size_t>(boff + i)] = rng.uniform(-bound, bound);
  }
  return p;
}

}  // namespace

BackpropResult train_backprop(const NetworkArch& arch, const SplitDataset& data,
                              const BackpropConfig& cfg) {
  cfg.validate();
  arch.validate();
  data.train.validate();
  if (arch.input_width() != data.train.feature_count())
    throw ShapeError("architecture input width does not match dataset");

  Rng rng(cfg.seed);
  ParamVector params = glorot_init(arch, rng);
  const int wc = arch.weight_count();
  const int pc = wc + arch.bias_count();
  const int n = data.train.size();

  std::vector<double> velocity;                    // SGD
  std::vector<double> adam_m, adam_v;              // Adam
  if (cfg.solver == Solver::Sgd) {
    velocity.assign(static_cast<std::size_t>(pc), 0.0);
  } else {
    adam_m.assign(static_cast<std::size_t>(pc), 0.0);
    adam_v.assign(static_cast<std::size_t>(pc), 0.0);
  }
  long adam_t = 0;

  double lr = cfg.lr_init;
  double best_loss = std::numeric_limits<double>::infinity();
  int no_improvement = 0;

  BackpropResult result;
  result.epochs.reserve(static_cast<std::size_t>(cfg.epochs));

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const std::vector<int> order = random_permutation(n, rng);
    double loss_acc = 0.0;
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int stop = std::min(start + cfg.batch_size, n);
      const std::vector<int> rows(order.begin() + start, order.begin() + stop);
      const Dataset batch = data.train.subset(rows);

      loss_acc += penalized_loss(params, batch, cfg.alpha) * batch.size();
      const std::vector<double> grad = gradient(params, batch, cfg.alpha);

      if (cfg.solver == Solver::Sgd) {
        for (int i = 0; i < pc; ++i) {
          const std::size_t s = static_cast<std::size_t>(i);
          double& v = velocity[s];
          v = cfg.momentum * v - lr * grad[s];
          const double update =
              cfg.nesterov ? cfg.momentum * v - lr * grad[s] : v;
          if (i < wc) {
            params.weights[s] += update;
          } else {
            params.biases[s - static_cast<std::size_t>(wc)] += update;
          }
        }
      } else {
        ++adam_t;
        const double b1 = 0.9, b2 = 0.999;
        const double lr_t = lr *
                            std::sqrt(1.0 - std::pow(b2, static_cast<double>(adam_t))) /
                            (1.0 - std::pow(b1, static_cast<double>(adam_t)));
        for (int i = 0; i < pc; ++i) {
          const std::size_t s = static_cast<std::size_t>(i);
          adam_m[s] = b1 * adam_m[s] + (1.0 - b1) * grad[s];
          adam_v[s] = b2 * adam_v[s] + (1.0 - b2) * grad[s] * grad[s];
          const double update = -lr_t * adam_m[s] / (std::sqrt(adam_v[s]) + cfg.epsilon);
          if (i < wc) {
            params.weights[s] += update;
          } else {
            params.biases[s - static_cast<std::size_t>(wc)] += update;
          }
        }
      }
    }
    const double epoch_loss = loss_acc / n;
    if (!std::isfinite(epoch_loss))
      throw NumericsError("backprop diverged at epoch " + std::to_string(epoch),
                          epoch);
    result.epochs.push_back(EpochRecord{epoch, epoch_loss, lr});

    // Learning-rate schedule bookkeeping (the loss threshold mirrors the
    // reference trainer's tolerance).
    if (epoch_loss > best_loss - 1e-4) {
      ++no_improvement;
    } else {
      no_improvement = 0;
    }
    if (epoch_loss < best_loss) best_loss = epoch_loss;
    if (no_improvement >= 2) {
      if (cfg.lr_schedule == LrSchedule::Adaptive) lr /= 5.0;
      no_improvement = 0;
    }
  }

  result.params = std::move(params);
  return result;
}

}  // namespace slt
