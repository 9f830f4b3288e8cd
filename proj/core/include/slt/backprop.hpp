#pragma once

#include <cstdint>
#include <vector>

#include "slt/dataset.hpp"
#include "slt/network.hpp"

namespace slt {

enum class Solver { Sgd, Adam };
enum class LrSchedule { Constant, Adaptive };

struct BackpropConfig {
  Solver solver = Solver::Adam;
  LrSchedule lr_schedule = LrSchedule::Constant;
  double lr_init = 0.001;
  double epsilon = 1e-8;  // Adam denominator offset, added outside the sqrt
  int batch_size = 64;
  double alpha = 0.0;  // L2 penalty weight on weights (never biases)
  double momentum = 0.9;
  bool nesterov = false;
  int epochs = 1000;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double learning_rate = 0.0;
};

struct BackpropResult {
  ParamVector params;
  std::vector<EpochRecord> epochs;
};

// Minibatch training of mean cross-entropy + (alpha/2)*||W||^2.
//
// Semantics follow the established MLP trainer this reproduces:
//  - Glorot-uniform init: per layer, weights and biases ~ U(-b, b) with
//    b = sqrt(6 / (fan_in + fan_out)).
//  - Per-epoch reshuffle from the seed stream; the final partial batch is
//    kept.
//  - SGD: v <- momentum*v - lr*g; w <- w + v (Nesterov applies
//    momentum*v_new - lr*g instead).
//  - Adam: bias-corrected step lr_t = lr*sqrt(1-b2^t)/(1-b1^t) with
//    b1=0.9, b2=0.999; denominator sqrt(v)+epsilon.
//  - Adaptive schedule: lr /= 5 whenever two consecutive epochs fail to
//    beat the best epoch loss by at least 1e-4 (applies to either solver).
//  - Epoch loss = batch-size-weighted mean of the per-batch penalized
//    losses, each taken at the parameters the batch was computed with.
// Runs exactly cfg.epochs epochs; there is no early stopping.
// Throws NumericsError (with the epoch index) if the loss turns non-finite.
BackpropResult train_backprop(const NetworkArch& arch, const SplitDataset& data,
                              const BackpropConfig& cfg);

}  // namespace slt
