#pragma once

#include <functional>
#include <string>

#include "sgparse/nn/model.hpp"
#include "sgparse/nn/trainer.hpp"

namespace sgparse::nn {

// Reduced model used for finite-difference checks.
inline ModelDims gradcheck_dims() { return ModelDims{6, 8, 2, 4}; }

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_tensor;
};

// Compares the analytic gradient of the summed sentence loss with central
// differences, tensor by tensor: ||analytic - numeric|| / (||analytic|| +
// ||numeric||). `corrupt`, when set, tampers with the analytic gradient
// before the comparison (mutation testing).
inline GradCheckResult grad_check(const ModelParams& params, const TrainingInstance& inst, double step,
                                  ReduceMargin margin = ReduceMargin::WidenMargin,
                                  const std::function<void(Weights&)>& corrupt = {}) {
  const LossOptions opts{margin, nullptr};
  Weights analytic = Weights::zeros(params.dims, params.vocab.size(), params.n_actions());
  sentence_loss(params, inst.tokens, inst.gold, inst.reduce_set, opts, &analytic);
  if (corrupt) corrupt(analytic);

  ModelParams probe = params;
  auto probe_tensors = probe.weights.tensors();
  auto analytic_tensors = analytic.tensors();
  GradCheckResult result;
  for (std::size_t k = 0; k < probe_tensors.size(); ++k) {
    auto x = probe_tensors[k].map();
    const auto a = analytic_tensors[k].map();
    Matrix numeric(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double saved = x.data()[i];
      x.data()[i] = saved + step;
      const double up = sentence_loss(probe, inst.tokens, inst.gold, inst.reduce_set, opts).loss;
      x.data()[i] = saved - step;
      const double down = sentence_loss(probe, inst.tokens, inst.gold, inst.reduce_set, opts).loss;
      x.data()[i] = saved;
      numeric.data()[i] = (up - down) / (2.0 * step);
    }
    const double denom = a.norm() + numeric.norm();
    const double err = denom < 1e-12 ? 0.0 : (a - numeric).norm() / denom;
    if (result.worst_tensor.empty() || err > result.max_relative_error) {
      result.max_relative_error = err;
      result.worst_tensor = probe_tensors[k].name;
    }
  }
  return result;
}

}  // namespace sgparse::nn
