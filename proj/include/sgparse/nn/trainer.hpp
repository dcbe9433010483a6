#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "sgparse/errors.hpp"
#include "sgparse/nn/adam.hpp"
#include "sgparse/nn/model.hpp"

namespace sgparse::nn {

struct TrainConfig {
  double learning_rate = 0.001;
  double adam_epsilon = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  int epochs = 4;
  double word_dropout_alpha = 0.25;
  std::uint64_t rng_seed = 1;
  ReduceMargin margin = ReduceMargin::WidenMargin;
  bool shuffle = true;

  void validate() const {
    if (!(learning_rate > 0 && adam_epsilon > 0 && adam_beta1 > 0 && adam_beta1 < 1 && adam_beta2 > 0 &&
          adam_beta2 < 1 && epochs > 0 && word_dropout_alpha >= 0)) {
      throw ContractViolation("training configuration out of range");
    }
  }
};

struct TrainingInstance {
  Tokens tokens;
  ArcSet gold;
  std::set<int> reduce_set;
};

struct EpochStats {
  double loss = 0.0;
  std::size_t trained = 0;
  std::size_t skipped = 0;  // unreachable gold (non-projective or cyclic)
};

// Single-writer training loop: one Adam update per sentence, following the
// oracle's preferred gold action at every step.
class Trainer {
 public:
  Trainer(ModelParams& params, TrainConfig cfg)
      : params_(params),
        cfg_(cfg),
        adam_(params, AdamConfig{cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon}),
        grad_(Weights::zeros(params.dims, params.vocab.size(), params.n_actions())),
        rng_(cfg.rng_seed) {
    cfg_.validate();
  }

  // Summed step loss, or nullopt when the instance was skipped.
  std::optional<double> train_sentence(const TrainingInstance& inst) {
    WordDropout dropout{&rng_, cfg_.word_dropout_alpha};
    SentenceLoss result;
    try {
      result = sentence_loss(params_, inst.tokens, inst.gold, inst.reduce_set,
                             LossOptions{cfg_.margin, cfg_.word_dropout_alpha > 0 ? &dropout : nullptr}, &grad_);
    } catch (const OracleStuck&) {
      grad_.set_zero();
      return std::nullopt;
    }
    adam_.step(params_.weights, grad_, result.word_ids);
    if (!params_.weights.all_finite()) throw ContractViolation("non-finite parameter after update");
    return result.loss;
  }

  EpochStats train_epoch(const std::vector<TrainingInstance>& data) {
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    if (cfg_.shuffle) std::shuffle(order.begin(), order.end(), rng_);
    EpochStats stats;
    for (std::size_t i : order) {
      if (auto loss = train_sentence(data[i])) {
        stats.loss += *loss;
        ++stats.trained;
      } else {
        ++stats.skipped;
      }
    }
    return stats;
  }

  const TrainConfig& config() const { return cfg_; }

 private:
  ModelParams& params_;
  TrainConfig cfg_;
  Adam adam_;
  Weights grad_;
  std::mt19937_64 rng_;
};

}  // namespace sgparse::nn
