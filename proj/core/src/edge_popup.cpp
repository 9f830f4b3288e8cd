#include "slt/edge_popup.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "slt/errors.hpp"
#include "slt/rng.hpp"

namespace slt {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

void EdgePopupConfig::validate() const {
  if (!(prune_rate > 0.0 && prune_rate < 1.0))
    throw ConfigError("edge-popup: retained fraction must be in (0, 1)");
  if (epochs < 1) throw ConfigError("edge-popup: epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("edge-popup: batch_size must be at least 1");
  if (score_lr < 0.0) throw ConfigError("edge-popup: score_lr must be nonnegative");
  if (!(score_momentum >= 0.0 && score_momentum < 1.0))
    throw ConfigError("edge-popup: score_momentum must be in [0, 1)");
  if (score_weight_decay < 0.0)
    throw ConfigError("edge-popup: score_weight_decay must be nonnegative");
}

ParamVector init_kaiming_normal_scaled(const NetworkArch& arch, double k,
                                       std::uint64_t seed) {
  return init_network(arch, InitScheme::kaiming_normal_scaled(k), seed);
}

ParamVector init_signed_kaiming_constant_scaled(const NetworkArch& arch,
                                                double k, std::uint64_t seed) {
  return init_network(arch, InitScheme::signed_kaiming_constant_scaled(k), seed);
}

BitMask top_k_mask(const NetworkArch& arch, const ScoreVector& scores, double k) {
  arch.validate();
  if (static_cast<int>(scores.scores.size()) != arch.weight_count())
    throw ShapeError("score vector length does not match weight count");
  if (!(k > 0.0 && k <= 1.0))
    throw ConfigError("top_k_mask: retained fraction must be in (0, 1]");
  BitMask mask = BitMask::zeros(arch.weight_count());
  std::vector<int> idx;
  for (int l = 0; l < arch.layer_count(); ++l) {
    const int off = arch.layer_weight_offset(l);
    const int cnt = arch.layer_weight_count(l);
    const int keep = static_cast<int>(std::llround(k * cnt));
    if (keep == 0) continue;
    idx.resize(static_cast<std::size_t>(cnt));
    std::iota(idx.begin(), idx.end(), 0);
    const double* s = scores.scores.data() + off;
    // Highest score first; ties go to the lower weight index.
    std::sort(idx.begin(), idx.end(), [s](int a, int b) {
      if (s[a] != s[b]) return s[a] > s[b];
      return a < b;
    });
    for (int i = 0; i < keep; ++i)
      mask.bits[static_cast<std::size_t>(off + idx[static_cast<std::size_t>(i)])] = 1;
  }
  return mask;
}

Eigen::MatrixXd edge_popup_forward(const ParamVector& params,
                                   const ScoreVector& scores, double k,
                                   const Eigen::MatrixXd& inputs) {
  const BitMask mask = top_k_mask(params.arch, scores, k);
  return forward(MaskedNetwork(params, mask), inputs);
}

namespace {

Eigen::MatrixXd masked_layer_matrix(const ParamVector& p, const BitMask& mask,
                                    int l) {
  const int in = p.arch.width(l);
  const int out = p.arch.width(l + 1);
  const int off = p.arch.layer_weight_offset(l);
  Eigen::MatrixXd W(in, out);
  for (int r = 0; r < in; ++r)
    for (int c = 0; c < out; ++c)
      W(r, c) = mask.bits[static_cast<std::size_t>(off + r * out + c)]
                    ? p.weights[static_cast<std::size_t>(off + r * out + c)]
                    : 0.0;
  return W;
}

}  // namespace

EdgePopupResult edge_popup_train(const NetworkArch& arch,
                                 const SplitDataset& data,
                                 const EdgePopupConfig& cfg) {
  cfg.validate();
  arch.validate();
  data.train.validate();
  if (arch.input_width() != data.train.feature_count())
    throw ShapeError("architecture input width does not match dataset");

  // Independent streams for weights, scores, and shuffles, so each piece is
  // reproducible on its own.
  ParamVector params;
  switch (cfg.init) {
    case EpInit::UniformPm1:
      params = init_network(arch, InitScheme::uniform(-1.0, 1.0),
                            mix_seed(cfg.seed, 1));
      break;
    case EpInit::KaimingNormalScaled:
      params = init_kaiming_normal_scaled(arch, cfg.prune_rate, mix_seed(cfg.seed, 1));
      break;
    case EpInit::SignedKaimingConstantScaled:
      params = init_signed_kaiming_constant_scaled(arch, cfg.prune_rate,
                                                   mix_seed(cfg.seed, 1));
      break;
  }

  ScoreVector scores;
  scores.scores.resize(static_cast<std::size_t>(arch.weight_count()));
  {
    Rng score_rng(mix_seed(cfg.seed, 2));
    for (int l = 0; l < arch.layer_count(); ++l) {
      const double s = std::sqrt(1.0 / arch.width(l));
      const int off = arch.layer_weight_offset(l);
      for (int i = 0; i < arch.layer_weight_count(l); ++i)
        scores.scores[static_cast<std::size_t>(off + i)] = score_rng.uniform(-s, s);
    }
  }

  Rng shuffle_rng(mix_seed(cfg.seed, 3));
  const int n = data.train.size();
  const int layers = arch.layer_count();
  std::vector<double> velocity(scores.scores.size(), 0.0);

  EdgePopupResult result;
  result.epochs.reserve(static_cast<std::size_t>(cfg.epochs));

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double lr =
        cfg.cosine_lr
            ? cfg.score_lr * 0.5 *
                  (1.0 + std::cos(kPi * (epoch - 1) / static_cast<double>(cfg.epochs)))
            : cfg.score_lr;
    const std::vector<int> order = random_permutation(n, shuffle_rng);
    double loss_acc = 0.0;

    for (int start = 0; start < n; start += cfg.batch_size) {
      const int stop = std::min(start + cfg.batch_size, n);
      const std::vector<int> rows(order.begin() + start, order.begin() + stop);
      const Dataset batch = data.train.subset(rows);
      const int bn = batch.size();

      const BitMask mask = top_k_mask(arch, scores, cfg.prune_rate);

      // Forward through the subnetwork, keeping activations.
      std::vector<Eigen::MatrixXd> acts;
      acts.reserve(static_cast<std::size_t>(layers) + 1);
      acts.push_back(batch.features);
      std::vector<Eigen::MatrixXd> pre;
      pre.reserve(static_cast<std::size_t>(layers));
      for (int l = 0; l < layers; ++l) {
        const Eigen::MatrixXd W = masked_layer_matrix(params, mask, l);
        const auto bias = Eigen::Map<const Eigen::RowVectorXd>(
            params.biases.data() + arch.layer_bias_offset(l), arch.width(l + 1));
        Eigen::MatrixXd z = (acts.back() * W).rowwise() + bias;
        pre.push_back(z);
        if (l + 1 < layers) acts.push_back(z.cwiseMax(0.0));
      }

      // Mean cross-entropy and softmax residual.
      const Eigen::MatrixXd& logits = pre.back();
      Eigen::MatrixXd delta(bn, arch.output_width());
      double batch_loss = 0.0;
      for (int i = 0; i < bn; ++i) {
        const double m = logits.row(i).maxCoeff();
        double sum = 0.0;
        for (int c = 0; c < arch.output_width(); ++c) {
          delta(i, c) = std::exp(logits(i, c) - m);
          sum += delta(i, c);
        }
        batch_loss += m + std::log(sum) -
                      logits(i, batch.labels[static_cast<std::size_t>(i)]);
        delta.row(i) /= sum;
        delta(i, batch.labels[static_cast<std::size_t>(i)]) -= 1.0;
      }
      loss_acc += batch_loss;
      delta /= static_cast<double>(bn);

      // Straight-through score gradients: the mask is identity for score
      // differentiation, so d score(i->j) = [a^T delta](i,j) * raw w_ij.
      std::vector<double> sgrad(scores.scores.size(), 0.0);
      for (int l = layers - 1; l >= 0; --l) {
        const Eigen::MatrixXd gOuter =
            acts[static_cast<std::size_t>(l)].transpose() * delta;
        const int in = arch.width(l);
        const int out = arch.width(l + 1);
        const int off = arch.layer_weight_offset(l);
        for (int r = 0; r < in; ++r)
          for (int c = 0; c < out; ++c)
            sgrad[static_cast<std::size_t>(off + r * out + c)] =
                gOuter(r, c) * params.weights[static_cast<std::size_t>(off + r * out + c)];
        if (l > 0) {
          const Eigen::MatrixXd W = masked_layer_matrix(params, mask, l);
          Eigen::MatrixXd back = delta * W.transpose();
          const Eigen::MatrixXd& z = pre[static_cast<std::size_t>(l - 1)];
          delta = (z.array() > 0.0).cast<double>() * back.array();
        }
      }

      for (std::size_t i = 0; i < scores.scores.size(); ++i) {
        const double g = sgrad[i] + cfg.score_weight_decay * scores.scores[i];
        velocity[i] = cfg.score_momentum * velocity[i] + g;
        scores.scores[i] -= lr * velocity[i];
      }
    }

    const double epoch_loss = loss_acc / n;
    if (!std::isfinite(epoch_loss))
      throw NumericsError("edge-popup diverged at epoch " + std::to_string(epoch),
                          epoch);
    EpEpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss;
    rec.learning_rate = lr;
    const BitMask epoch_mask = top_k_mask(arch, scores, cfg.prune_rate);
    for (int l = 0; l < layers; ++l) {
      const int off = arch.layer_weight_offset(l);
      const int cnt = arch.layer_weight_count(l);
      int retained = 0;
      for (int i = 0; i < cnt; ++i)
        retained += epoch_mask.bits[static_cast<std::size_t>(off + i)];
      rec.retained_per_layer.push_back(retained);
    }
    result.epochs.push_back(std::move(rec));
  }

  result.mask = top_k_mask(arch, scores, cfg.prune_rate);
  result.params = std::move(params);
  result.scores = std::move(scores);
  return result;
}

}  // namespace slt
