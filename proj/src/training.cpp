#include <cmath>
#include <string>

#include "vasum/error.hpp"
#include "vasum/evaluation.hpp"
#include "vasum/rng.hpp"
#include "vasum/training.hpp"

namespace vasum {

void Hyperparameters::validate() const {
  if (!(learning_rate > 0.0)) throw ParameterError("learning rate must be positive");
  if (!(l2 >= 0.0)) throw ParameterError("l2 must be non-negative");
  if (epochs < 1) throw ParameterError("epochs must be >= 1");
  if (!(p_drop >= 0.0 && p_drop < 1.0)) throw ParameterError("dropout must lie in [0, 1)");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw ParameterError("ADAM betas must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw ParameterError("ADAM epsilon must be positive");
}

OptimizerState OptimizerState::for_parameters(const ModelParameters& params) {
  return {ModelParameters::zeros(params.config), ModelParameters::zeros(params.config), 0};
}

void adam_step(ModelParameters& params, const ModelParameters& grads, OptimizerState& state,
               const Hyperparameters& hyper) {
  auto p = params.tensors();
  const auto g = grads.tensors();
  auto m = state.first_moment.tensors();
  auto v = state.second_moment.tensors();
  if (g.size() != p.size() || m.size() != p.size() || v.size() != p.size())
    throw ParameterError("adam: gradient/state layout does not match parameters");
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (g[k].data.size() != p[k].data.size() || m[k].data.size() != p[k].data.size())
      throw ParameterError("adam: shape mismatch in " + std::string(p[k].name));
    for (double x : g[k].data)
      if (!std::isfinite(x))
        throw NumericError("adam: non-finite gradient in " + std::string(p[k].name) +
                           " at step " + std::to_string(state.step + 1));
  }

  ++state.step;
  const double b1 = hyper.adam_beta1, b2 = hyper.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < p.size(); ++k) {
    for (std::size_t i = 0; i < p[k].data.size(); ++i) {
      const double grad = g[k].data[i] + hyper.l2 * p[k].data[i];
      double& mk = m[k].data[i];
      double& vk = v[k].data[i];
      mk = b1 * mk + (1.0 - b1) * grad;
      vk = b2 * vk + (1.0 - b2) * grad * grad;
      p[k].data[i] -= hyper.learning_rate * (mk / c1) / (std::sqrt(vk / c2) + hyper.adam_eps);
    }
  }
}

Protocol protocol_for(std::span<const Dataset> datasets, const VideoKey& key) {
  for (const auto& ds : datasets)
    if (ds.name == key.dataset) return ds.protocol;
  return default_protocol_for(key.dataset);
}

TrainReport train(const Fold& fold, std::span<const Dataset> datasets,
                  const TrainOptions& options) {
  const Hyperparameters& hyper = options.hyper;
  hyper.validate();
  if (fold.train.empty()) throw ParameterError("train: fold has no training videos");

  struct Sample {
    VideoKey key;
    Matrix x;
    std::vector<double> target;
  };
  std::vector<Sample> samples;
  for (const auto& key : fold.train) {
    const auto& r = resolve(datasets, key);
    samples.push_back({key, r.features_as_double(), r.gt_score_as_double()});
  }
  struct HeldOut {
    const VideoRecord* record;
    Matrix x;
    Protocol protocol;
  };
  std::vector<HeldOut> held_out;
  for (const auto& key : fold.test) {
    const auto& r = resolve(datasets, key);
    held_out.push_back({&r, r.features_as_double(), protocol_for(datasets, key)});
  }

  ModelConfig config = options.model;
  config.p_drop = hyper.p_drop;
  if (config.input_dim != samples.front().x.cols()) config.input_dim = samples.front().x.cols();

  Rng init_rng(hyper.seed, "init", options.fold_index);
  ModelParameters params = ModelParameters::initialize(config, init_rng);
  OptimizerState state = OptimizerState::for_parameters(params);
  Rng dropout_rng(hyper.seed, "dropout", options.fold_index);

  TrainReport report;
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::int64_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    Rng shuffle_rng(hyper.seed, "shuffle",
                    (options.fold_index << 32) ^ static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(order);
    std::vector<VideoKey> epoch_keys;
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const Sample& s = samples[idx];
      epoch_keys.push_back(s.key);
      const ForwardTrace tr = forward(s.x, params, Mode::kTrain, &dropout_rng);
      loss_sum += mse_loss({tr.scores.data(), static_cast<std::size_t>(tr.scores.size())}, s.target);
      const ModelParameters grads = backward(tr, s.x, s.target, params);
      adam_step(params, grads, state, hyper);
    }
    const double loss = loss_sum / static_cast<double>(samples.size());

    double f = 0.0;
    if (!held_out.empty()) {
      for (const auto& h : held_out) {
        const Vector y = predict(h.x, params);
        const Summary summary = summarize(
            *h.record, {y.data(), static_cast<std::size_t>(y.size())}, options.budget_ratio);
        f += evaluate_video(summary, *h.record, h.protocol).f;
      }
      f /= static_cast<double>(held_out.size());
    }
    report.epoch_loss.push_back(loss);
    report.epoch_fscore.push_back(f);
    report.epoch_order.push_back(std::move(epoch_keys));
    if (report.best_epoch < 0 || f > report.epoch_fscore[report.best_epoch]) {
      report.best_epoch = epoch;
      report.best = params;
    }
    if (options.on_epoch) options.on_epoch(epoch, loss, f);
  }
  return report;
}

}  // namespace vasum
