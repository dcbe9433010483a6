#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sgparse/errors.hpp"
#include "sgparse/nn/lstm.hpp"
#include "sgparse/nn/vocabulary.hpp"
#include "sgparse/scene_graph.hpp"
#include "sgparse/text.hpp"
#include "sgparse/transition.hpp"

namespace sgparse::nn {

struct ModelDims {
  int embed = 200;
  int hidden = 256;  // per direction
  int layers = 2;
  int mlp = 100;

  int context() const { return 2 * hidden; }
  int feature() const { return 4 * context(); }

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

// Non-owning view of one parameter tensor (column-major).
struct TensorRef {
  std::string name;
  double* data;
  Eigen::Index rows;
  Eigen::Index cols;

  Eigen::Map<Matrix> map() const { return {data, rows, cols}; }
  Eigen::Index size() const { return rows * cols; }
};

struct Weights {
  Matrix embeddings;                             // embed x vocab, one column per word
  std::vector<std::array<LstmWeights, 2>> lstm;  // [layer][forward, backward]
  Vector pad;                                    // stands in for missing stack/buffer slots
  Matrix w1;
  Vector b1;
  Matrix w2;
  Vector b2;

  static Weights zeros(const ModelDims& d, std::size_t vocab, std::size_t actions) {
    Weights w;
    w.embeddings = Matrix::Zero(d.embed, static_cast<Eigen::Index>(vocab));
    for (int l = 0; l < d.layers; ++l) {
      const int in = l == 0 ? d.embed : d.context();
      std::array<LstmWeights, 2> layer;
      for (auto& dir : layer) {
        dir.w = Matrix::Zero(4 * d.hidden, in + d.hidden);
        dir.b = Vector::Zero(4 * d.hidden);
      }
      w.lstm.push_back(layer);
    }
    w.pad = Vector::Zero(d.context());
    w.w1 = Matrix::Zero(d.mlp, d.feature());
    w.b1 = Vector::Zero(d.mlp);
    w.w2 = Matrix::Zero(static_cast<Eigen::Index>(actions), d.mlp);
    w.b2 = Vector::Zero(static_cast<Eigen::Index>(actions));
    return w;
  }

  std::vector<TensorRef> tensors() {
    std::vector<TensorRef> out;
    auto add = [&](std::string name, auto& m) { out.push_back({std::move(name), m.data(), m.rows(), m.cols()}); };
    add("embeddings", embeddings);
    for (std::size_t l = 0; l < lstm.size(); ++l) {
      for (int d = 0; d < 2; ++d) {
        const std::string base = "lstm." + std::to_string(l) + (d == 0 ? ".fwd" : ".bwd");
        add(base + ".w", lstm[l][static_cast<std::size_t>(d)].w);
        add(base + ".b", lstm[l][static_cast<std::size_t>(d)].b);
      }
    }
    add("pad", pad);
    add("mlp.w1", w1);
    add("mlp.b1", b1);
    add("mlp.w2", w2);
    add("mlp.b2", b2);
    return out;
  }

  void set_zero() {
    for (auto& t : tensors()) t.map().setZero();
  }

  bool all_finite() {
    for (auto& t : tensors()) {
      if (!t.map().allFinite()) return false;
    }
    return true;
  }
};

struct ModelParams {
  ModelDims dims;
  ArcRule rule = ArcRule::LeftArc;
  Vocabulary vocab;
  Weights weights;
  std::uint64_t seed = 0;

  std::size_t n_actions() const { return ActionInventory(rule).size(); }

  // Throws ContractViolation if any tensor disagrees with dims/vocab/rule.
  void check_shapes() const {
    auto expect = [](bool ok, const char* what) {
      if (!ok) throw ContractViolation(std::string("model shape mismatch: ") + what);
    };
    const auto& w = weights;
    expect(w.embeddings.rows() == dims.embed && w.embeddings.cols() == static_cast<Eigen::Index>(vocab.size()),
           "embeddings");
    expect(static_cast<int>(w.lstm.size()) == dims.layers, "lstm layer count");
    for (std::size_t l = 0; l < w.lstm.size(); ++l) {
      const int in = l == 0 ? dims.embed : dims.context();
      for (const auto& dir : w.lstm[l]) {
        expect(dir.w.rows() == 4 * dims.hidden && dir.w.cols() == in + dims.hidden && dir.b.size() == 4 * dims.hidden,
               "lstm weights");
      }
    }
    expect(w.pad.size() == dims.context(), "pad");
    expect(w.w1.rows() == dims.mlp && w.w1.cols() == dims.feature() && w.b1.size() == dims.mlp, "mlp hidden");
    expect(w.w2.rows() == static_cast<Eigen::Index>(n_actions()) && w.w2.cols() == dims.mlp &&
               w.b2.size() == static_cast<Eigen::Index>(n_actions()),
           "mlp output");
  }

  // Embeddings and pad uniform in [-0.1, 0.1]; matrices Xavier-uniform;
  // biases zero except the forget gate (1.0).
  static ModelParams initialize(const ModelDims& dims, Vocabulary vocab, ArcRule rule, std::uint64_t seed) {
    ModelParams p;
    p.dims = dims;
    p.rule = rule;
    p.vocab = std::move(vocab);
    p.seed = seed;
    p.weights = Weights::zeros(dims, p.vocab.size(), p.n_actions());
    std::mt19937_64 rng(seed);
    auto fill = [&](auto& m, double limit) {
      std::uniform_real_distribution<double> u(-limit, limit);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
    };
    auto xavier = [](Eigen::Index fan_out, Eigen::Index fan_in) {
      return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    };
    auto& w = p.weights;
    fill(w.embeddings, 0.1);
    for (auto& layer : w.lstm) {
      for (auto& dir : layer) {
        fill(dir.w, xavier(dir.w.rows() / 4, dir.w.cols()));
        dir.b.segment(dims.hidden, dims.hidden).setOnes();
      }
    }
    fill(w.pad, 0.1);
    fill(w.w1, xavier(w.w1.rows(), w.w1.cols()));
    fill(w.w2, xavier(w.w2.rows(), w.w2.cols()));
    p.check_shapes();
    return p;
  }
};

// Forward state of the BiLSTM for one sentence. Column t of `vectors` is the
// context vector of token t+1; the last column belongs to ROOT.
struct Encoded {
  Matrix vectors;
  std::vector<int> ids;
  std::vector<Matrix> layer_inputs;
  std::vector<std::array<LstmTrace, 2>> traces;
};

struct WordDropout {
  std::mt19937_64* rng = nullptr;
  double alpha = 0.25;
};

inline std::vector<int> word_ids(const Vocabulary& vocab, const Tokens& tokens, const WordDropout* dropout) {
  std::vector<int> ids;
  ids.reserve(tokens.size() + 1);
  for (const auto& t : tokens) {
    int id = vocab.id(t);
    if (dropout && dropout->rng && id != Vocabulary::kUnk) {
      const double f = static_cast<double>(vocab.frequency(id));
      std::bernoulli_distribution drop(dropout->alpha / (dropout->alpha + f));
      if (drop(*dropout->rng)) id = Vocabulary::kUnk;
    }
    ids.push_back(id);
  }
  ids.push_back(Vocabulary::kRoot);
  return ids;
}

// Two-layer (by default) BiLSTM over the tokens plus ROOT. With `dropout`
// set, rare words are replaced by UNK with probability alpha/(alpha + freq).
inline Encoded encode(const ModelParams& params, const Tokens& tokens, const WordDropout* dropout = nullptr,
                      bool keep_trace = true) {
  Encoded enc;
  enc.ids = word_ids(params.vocab, tokens, dropout);
  const auto T = static_cast<Eigen::Index>(enc.ids.size());
  Matrix x(params.dims.embed, T);
  for (Eigen::Index t = 0; t < T; ++t) x.col(t) = params.weights.embeddings.col(enc.ids[static_cast<std::size_t>(t)]);
  for (const auto& layer : params.weights.lstm) {
    std::array<LstmTrace, 2> tr;
    Matrix out(2 * params.dims.hidden, T);
    out.topRows(params.dims.hidden) = lstm_forward(layer[0], x, false, keep_trace ? &tr[0] : nullptr);
    out.bottomRows(params.dims.hidden) = lstm_forward(layer[1], x, true, keep_trace ? &tr[1] : nullptr);
    if (keep_trace) {
      enc.layer_inputs.push_back(std::move(x));
      enc.traces.push_back(std::move(tr));
    }
    x = std::move(out);
  }
  enc.vectors = std::move(x);
  return enc;
}

// Columns of the four feature slots (s2, s1, s0, b0); -1 selects the pad vector.
inline std::array<int, 4> feature_slots(const Configuration& c) {
  std::array<int, 4> slots{-1, -1, -1, -1};
  for (std::size_t d = 0; d < 3; ++d) {
    if (auto s = c.stack_at(d)) slots[2 - d] = *s - 1;
  }
  slots[3] = c.buffer_front() - 1;
  return slots;
}

inline Vector feature(const std::array<int, 4>& slots, const Matrix& vectors, const Vector& pad) {
  const auto d = pad.size();
  Vector phi(4 * d);
  for (std::size_t k = 0; k < 4; ++k) {
    phi.segment(static_cast<Eigen::Index>(k) * d, d) = slots[k] < 0 ? pad : Vector(vectors.col(slots[k]));
  }
  return phi;
}

inline Vector feature(const Configuration& c, const Matrix& vectors, const Vector& pad) {
  return feature(feature_slots(c), vectors, pad);
}

// W2 tanh(W1 phi + b1) + b2. Raw scores, one per inventory action.
inline Vector score(const Weights& w, const Vector& phi, Vector* hidden = nullptr) {
  Vector h = (w.w1 * phi + w.b1).array().tanh().matrix();
  Vector s = w.w2 * h + w.b2;
  if (hidden) *hidden = std::move(h);
  return s;
}

// How the loss treats a step whose only correct action is REDUCE.
//   WidenMargin:      hinge margin 2 instead of 1
//   CompetitorOffset: +1 added to every competitor score before the max
//   Plain:            no special treatment
enum class ReduceMargin { WidenMargin, CompetitorOffset, Plain };

struct StepLoss {
  double value = 0.0;
  std::optional<std::size_t> best_correct;  // inventory index
  std::optional<std::size_t> best_wrong;
  double margin = 1.0;
};

inline StepLoss step_loss(const Vector& scores, const std::vector<Action>& correct, const std::vector<Action>& legal,
                          const ActionInventory& inventory, ReduceMargin mode = ReduceMargin::WidenMargin) {
  if (correct.empty()) throw ContractViolation("step_loss: empty set of correct actions");
  auto index = [&](const Action& a) {
    auto i = inventory.index_of(a);
    if (!i) throw ContractViolation("action " + to_string(a) + " not in inventory");
    return *i;
  };
  const bool reduce_only = correct.size() == 1 && correct[0].kind == ActionKind::Reduce;

  StepLoss out;
  for (const auto& a : correct) {
    const auto i = index(a);
    if (!out.best_correct || scores[static_cast<Eigen::Index>(i)] > scores[static_cast<Eigen::Index>(*out.best_correct)]) {
      out.best_correct = i;
    }
  }
  const double offset = reduce_only && mode == ReduceMargin::CompetitorOffset ? 1.0 : 0.0;
  for (const auto& a : legal) {
    if (std::find(correct.begin(), correct.end(), a) != correct.end()) continue;
    const auto i = index(a);
    if (!out.best_wrong || scores[static_cast<Eigen::Index>(i)] > scores[static_cast<Eigen::Index>(*out.best_wrong)]) {
      out.best_wrong = i;
    }
  }
  out.margin = reduce_only && mode == ReduceMargin::WidenMargin ? 2.0 : 1.0;
  if (!out.best_wrong) return out;
  const double wrong = scores[static_cast<Eigen::Index>(*out.best_wrong)] + offset;
  out.value = std::max(0.0, out.margin - scores[static_cast<Eigen::Index>(*out.best_correct)] + wrong);
  return out;
}

struct SentenceLoss {
  double loss = 0.0;
  std::size_t steps = 0;
  std::vector<Action> actions;  // gold actions followed
  std::vector<int> word_ids;    // ids fed to the encoder (after dropout)
};

struct LossOptions {
  ReduceMargin margin = ReduceMargin::WidenMargin;
  const WordDropout* dropout = nullptr;
};

// Gold-following pass over one sentence: sums the hinge loss of every step
// and, when `grad` is given, accumulates its gradient. Throws OracleStuck on
// unreachable gold.
inline SentenceLoss sentence_loss(const ModelParams& params, const Tokens& tokens, const ArcSet& gold,
                                  const std::set<int>& reduce_set, const LossOptions& opts = {},
                                  Weights* grad = nullptr) {
  const ActionInventory inventory(params.rule);
  const auto& w = params.weights;
  const Encoded enc = encode(params, tokens, opts.dropout, grad != nullptr);

  struct StepRecord {
    std::array<int, 4> slots;
    Vector phi;
    Vector hidden;
    Vector d_scores;
  };
  std::vector<StepRecord> records;

  SentenceLoss out;
  out.word_ids = enc.ids;
  Configuration c = initial(static_cast<int>(tokens.size()));
  while (!c.is_terminal()) {
    const auto correct = oracle(c, gold, reduce_set, inventory);
    const auto legal = legal_actions(c, inventory);
    StepRecord rec;
    rec.slots = feature_slots(c);
    rec.phi = feature(rec.slots, enc.vectors, w.pad);
    const Vector scores = score(w, rec.phi, &rec.hidden);
    const StepLoss sl = step_loss(scores, correct, legal, inventory, opts.margin);
    out.loss += sl.value;
    ++out.steps;
    if (grad && sl.value > 0.0) {
      rec.d_scores = Vector::Zero(scores.size());
      rec.d_scores[static_cast<Eigen::Index>(*sl.best_correct)] -= 1.0;
      rec.d_scores[static_cast<Eigen::Index>(*sl.best_wrong)] += 1.0;
      records.push_back(std::move(rec));
    }
    const Action next = preferred_action(correct);
    out.actions.push_back(next);
    c = c.apply(next);
  }
  if (!grad || records.empty()) return out;

  // MLP
  const Eigen::Index ctx = params.dims.context();
  Matrix d_vectors = Matrix::Zero(enc.vectors.rows(), enc.vectors.cols());
  for (const auto& rec : records) {
    grad->w2.noalias() += rec.d_scores * rec.hidden.transpose();
    grad->b2 += rec.d_scores;
    const Vector dz = (w.w2.transpose() * rec.d_scores).cwiseProduct((1.0 - rec.hidden.array().square()).matrix());
    grad->w1.noalias() += dz * rec.phi.transpose();
    grad->b1 += dz;
    const Vector d_phi = w.w1.transpose() * dz;
    for (std::size_t k = 0; k < 4; ++k) {
      const auto seg = d_phi.segment(static_cast<Eigen::Index>(k) * ctx, ctx);
      if (rec.slots[k] < 0) {
        grad->pad += seg;
      } else {
        d_vectors.col(rec.slots[k]) += seg;
      }
    }
  }

  // BiLSTM, top layer first
  Matrix d_out = std::move(d_vectors);
  const Eigen::Index H = params.dims.hidden;
  for (std::size_t l = w.lstm.size(); l-- > 0;) {
    const Matrix& x = enc.layer_inputs[l];
    Matrix d_x = Matrix::Zero(x.rows(), x.cols());
    lstm_backward(w.lstm[l][0], enc.traces[l][0], false, d_out.topRows(H), grad->lstm[l][0], d_x);
    lstm_backward(w.lstm[l][1], enc.traces[l][1], true, d_out.bottomRows(H), grad->lstm[l][1], d_x);
    d_out = std::move(d_x);
  }
  for (std::size_t t = 0; t < enc.ids.size(); ++t) {
    grad->embeddings.col(enc.ids[t]) += d_out.col(static_cast<Eigen::Index>(t));
  }
  return out;
}

struct ParseResult {
  ArcSet arcs;
  std::vector<Action> actions;
};

// Greedy decoding: highest-scoring legal action at every step.
inline ParseResult parse_with_actions(const ModelParams& params, const Tokens& tokens) {
  const ActionInventory inventory(params.rule);
  const Encoded enc = encode(params, tokens, nullptr, false);
  Configuration c = initial(static_cast<int>(tokens.size()));
  ParseResult out;
  while (!c.is_terminal()) {
    const Vector s = score(params.weights, feature(c, enc.vectors, params.weights.pad));
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < inventory.size(); ++i) {
      if (!c.is_legal(inventory[i])) continue;
      if (!best || s[static_cast<Eigen::Index>(i)] > s[static_cast<Eigen::Index>(*best)]) best = i;
    }
    out.actions.push_back(inventory[*best]);
    c = c.apply(inventory[*best]);
  }
  out.arcs = c.arcs();
  return out;
}

inline ArcSet parse(const ModelParams& params, const Tokens& tokens) { return parse_with_actions(params, tokens).arcs; }

}  // namespace sgparse::nn
