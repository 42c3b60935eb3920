#include <cmath>
#include <string>

#include "vasum/error.hpp"
#include "vasum/training.hpp"

namespace vasum {
namespace {

Matrix masked(const Matrix& grad, const Matrix& mask) {
  return mask.size() == 0 ? grad : Matrix(grad.cwiseProduct(mask));
}

// Backward through out = normalized * gain + bias; returns d(input).
Matrix layer_norm_backward(const Matrix& d_out, const LayerNormCache& cache, const Vector& gain,
                           Vector& d_gain, Vector& d_bias) {
  const Matrix& xhat = cache.normalized;
  d_gain += (d_out.cwiseProduct(xhat)).colwise().sum().transpose();
  d_bias += d_out.colwise().sum().transpose();
  const Matrix d_xhat = (d_out.array().rowwise() * gain.transpose().array()).matrix();
  const auto cols = static_cast<double>(xhat.cols());
  Matrix d_in(d_out.rows(), d_out.cols());
  for (Eigen::Index r = 0; r < d_out.rows(); ++r) {
    const double mean_d = d_xhat.row(r).sum() / cols;
    const double mean_dx = d_xhat.row(r).dot(xhat.row(r)) / cols;
    d_in.row(r) = cache.inv_std(r) *
                  (d_xhat.row(r).array() - mean_d - xhat.row(r).array() * mean_dx).matrix();
  }
  return d_in;
}

}  // namespace

double mse_loss(std::span<const double> predicted, std::span<const double> target) {
  if (predicted.size() != target.size())
    throw ParameterError("loss: length mismatch (" + std::to_string(predicted.size()) + " vs " +
                         std::to_string(target.size()) + ")");
  if (predicted.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - target[i];
    sum += d * d;
  }
  return sum / static_cast<double>(predicted.size());
}

ModelParameters backward(const ForwardTrace& tr, const Matrix& x, std::span<const double> target,
                         const ModelParameters& params, double loss_scale) {
  const Eigen::Index n = x.rows();
  if (tr.scores.size() != n || tr.attention.rows() != n || tr.block_out.rows() != n)
    throw ParameterError("backward: trace does not belong to this input");
  if (static_cast<Eigen::Index>(target.size()) != n)
    throw ParameterError("backward: target length mismatch");

  ModelParameters g = ModelParameters::zeros(params.config);

  // Loss and sigmoid.
  Vector d_logit(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double y = tr.scores(t);
    d_logit(t) = loss_scale * 2.0 * (y - target[t]) / static_cast<double>(n) * y * (1.0 - y);
  }
  g.w2 = tr.hidden_out.transpose() * d_logit;
  g.b2 = d_logit.sum();
  const Matrix d_hidden_out = d_logit * params.w2.transpose();

  // Head: layer norm, dropout, ReLU, linear.
  Matrix d_act = layer_norm_backward(d_hidden_out, tr.ln2, params.ln2_gain, g.ln2_gain, g.ln2_bias);
  d_act = masked(d_act, tr.masks.hidden);
  const Matrix d_pre = d_act.cwiseProduct(
      tr.hidden_pre.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
  g.W1 = d_pre.transpose() * tr.block_out;
  g.b1 = d_pre.colwise().sum().transpose();
  const Matrix d_block = d_pre * params.W1;

  // Residual block; the identity path carries d_sum to x, which is not learned.
  const Matrix d_sum = layer_norm_backward(d_block, tr.ln1, params.ln1_gain, g.ln1_gain, g.ln1_bias);
  const Matrix d_proj = masked(d_sum, tr.masks.residual);
  g.W = d_proj.transpose() * tr.context;
  const Matrix d_context = d_proj * params.W;

  // context = attended * values, values = x C^T.
  const Matrix d_attended = d_context * tr.values.transpose();
  const Matrix d_values = tr.attended.transpose() * d_context;
  g.C = d_values.transpose() * x;

  // Dropout on attention, then softmax.
  const Matrix d_attention = masked(d_attended, tr.masks.attention);
  Matrix d_energy(n, n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double inner = tr.attention.row(t).dot(d_attention.row(t));
    d_energy.row(t) =
        tr.attention.row(t).cwiseProduct((d_attention.row(t).array() - inner).matrix());
  }

  Matrix d_key, d_query;
  if (params.config.attention == AttentionKind::kAdditive) {
    // E[t,i] = M . tanh(key_i + query_t)
    const Eigen::Index d = x.cols();
    d_key = Matrix::Zero(n, d);
    d_query = Matrix::Zero(n, d);
    for (Eigen::Index t = 0; t < n; ++t) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::RowVectorXd th = (tr.key.row(i) + tr.query.row(t)).array().tanh().matrix();
        const double de = d_energy(t, i);
        g.M += de * th.transpose();
        const Eigen::RowVectorXd d_pre_tanh =
            de * (params.M.transpose().array() * (1.0 - th.array().square())).matrix();
        d_key.row(i) += d_pre_tanh;
        d_query.row(t) += d_pre_tanh;
      }
    }
  } else {
    // E = s * query * key^T
    const double s = params.config.scale;
    d_query = s * d_energy * tr.key;
    d_key = s * d_energy.transpose() * tr.query;
  }
  g.U = d_key.transpose() * x;
  g.V = d_query.transpose() * x;
  return g;
}

}  // namespace vasum
