#pragma once

#include <cmath>
#include <set>
#include <vector>

#include "sgparse/nn/model.hpp"

namespace sgparse::nn {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 0.01;
};

// Adam with bias correction. Embedding columns are updated lazily: only the
// words seen in the current sentence move, so a large vocabulary does not
// cost a dense pass per update.
class Adam {
 public:
  Adam(const ModelParams& like, AdamConfig cfg)
      : cfg_(cfg),
        m_(Weights::zeros(like.dims, like.vocab.size(), like.n_actions())),
        v_(Weights::zeros(like.dims, like.vocab.size(), like.n_actions())) {}

  std::size_t steps() const { return t_; }

  // Applies `grad` to `w` and zeroes `grad`.
  void step(Weights& w, Weights& grad, const std::vector<int>& touched_words) {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    auto update = [&](auto&& x, auto&& g, auto&& m, auto&& v) {
      m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
      v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
      x.array() -= cfg_.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg_.epsilon);
    };

    const std::set<int> words(touched_words.begin(), touched_words.end());
    for (int id : words) {
      update(w.embeddings.col(id), grad.embeddings.col(id), m_.embeddings.col(id), v_.embeddings.col(id));
      grad.embeddings.col(id).setZero();
    }
    auto wt = w.tensors();
    auto gt = grad.tensors();
    auto mt = m_.tensors();
    auto vt = v_.tensors();
    for (std::size_t i = 1; i < wt.size(); ++i) {  // 0 is the embedding table
      update(wt[i].map(), gt[i].map(), mt[i].map(), vt[i].map());
      gt[i].map().setZero();
    }
  }

 private:
  AdamConfig cfg_;
  Weights m_;
  Weights v_;
  std::size_t t_ = 0;
};

}  // namespace sgparse::nn
