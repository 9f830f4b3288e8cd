#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "slt/dataset.hpp"
#include "slt/network.hpp"

namespace slt {

enum class EpInit { UniformPm1, KaimingNormalScaled, SignedKaimingConstantScaled };

struct EdgePopupConfig {
  double prune_rate = 0.5;  // fraction of weights RETAINED per layer
  EpInit init = EpInit::UniformPm1;
  int epochs = 100;
  double score_lr = 0.1;
  double score_momentum = 0.9;
  double score_weight_decay = 1e-4;
  int batch_size = 128;
  bool cosine_lr = true;  // cosine annealing of score_lr over epochs
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

// One trainable score per weight; same length and ordering as the weights.
struct ScoreVector {
  std::vector<double> scores;
};

// Weights ~ Normal(0, sigma^2), sigma = sqrt(2/fan_in) * sqrt(1/k) per layer;
// biases zero.
ParamVector init_kaiming_normal_scaled(const NetworkArch& arch, double k,
                                       std::uint64_t seed);

// Weights = +-sigma with equal probability, sigma as above; biases zero.
ParamVector init_signed_kaiming_constant_scaled(const NetworkArch& arch,
                                                double k, std::uint64_t seed);

// Indicator of the round(k * layer_weight_count) highest raw scores in each
// layer; ties broken toward the lower weight index.
BitMask top_k_mask(const NetworkArch& arch, const ScoreVector& scores, double k);

// Forward pass through the current top-k subnetwork.
Eigen::MatrixXd edge_popup_forward(const ParamVector& params,
                                   const ScoreVector& scores, double k,
                                   const Eigen::MatrixXd& inputs);

struct EpEpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double learning_rate = 0.0;
  std::vector<int> retained_per_layer;
};

struct EdgePopupResult {
  ParamVector params;  // frozen at initialization
  BitMask mask;        // final top-k mask
  ScoreVector scores;
  std::vector<EpEpochRecord> epochs;
};

// Subnetwork search with frozen weights. Scores start at U(-s, s) with
// s = sqrt(1/fan_in) per layer and are trained by SGD with momentum
// (v <- momentum*v + g, score <- score - lr*v, weight decay added to g),
// straight-through estimator gradient: for the edge i->j,
// d score = dL/dpre_j * w_ij * activation_i summed over the batch, where
// dL/dpre flows through the masked subnetwork. Throws NumericsError on
// divergence.
EdgePopupResult edge_popup_train(const NetworkArch& arch,
                                 const SplitDataset& data,
                                 const EdgePopupConfig& cfg);

}  // namespace slt
