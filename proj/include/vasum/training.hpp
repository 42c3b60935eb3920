#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "vasum/dataset.hpp"
#include "vasum/model.hpp"

namespace vasum {

struct Hyperparameters {
  double learning_rate = 5e-5;
  double l2 = 1e-5;
  std::int64_t epochs = 200;
  double p_drop = 0.5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

// Mean squared error.
double mse_loss(std::span<const double> predicted, std::span<const double> target);

// Gradient of loss_scale * mse_loss(trace.scores, target) with respect to
// every parameter, dropout masks held fixed.
ModelParameters backward(const ForwardTrace& trace, const Matrix& x,
                         std::span<const double> target, const ModelParameters& params,
                         double loss_scale = 1.0);

struct OptimizerState {
  ModelParameters first_moment;
  ModelParameters second_moment;
  std::int64_t step = 0;

  static OptimizerState for_parameters(const ModelParameters& params);
};

// ADAM with bias correction; L2 enters as grad += l2 * param before the
// moment update. Throws NumericError on non-finite gradients.
void adam_step(ModelParameters& params, const ModelParameters& grads, OptimizerState& state,
               const Hyperparameters& hyper);

struct TrainOptions {
  Hyperparameters hyper;
  ModelConfig model;  // p_drop is taken from hyper
  double budget_ratio = 0.15;
  std::uint64_t fold_index = 0;  // selects the RNG substreams
  // Called after every epoch with (epoch, loss, validation F).
  std::function<void(std::int64_t, double, double)> on_epoch;
};

struct TrainReport {
  std::vector<double> epoch_loss;
  std::vector<double> epoch_fscore;
  std::int64_t best_epoch = -1;
  ModelParameters best;
  std::vector<std::vector<VideoKey>> epoch_order;  // shuffled training order
};

// Single-video batches, shuffled each epoch; after every epoch the held-out
// videos are scored and the best snapshot is kept (first on ties).
TrainReport train(const Fold& fold, std::span<const Dataset> datasets,
                  const TrainOptions& options);

// Protocol of the dataset a key belongs to.
Protocol protocol_for(std::span<const Dataset> datasets, const VideoKey& key);

}  // namespace vasum
