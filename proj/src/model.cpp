#include "vasum/model.hpp"

#include <cmath>
#include <string>

#include "vasum/error.hpp"
#include "vasum/rng.hpp"

namespace vasum {
namespace {

void check_input(const Matrix& x, const ModelParameters& params) {
  if (x.rows() < 1) throw ParameterError("model input has no frames");
  if (x.cols() != params.config.input_dim)
    throw ParameterError("model input has " + std::to_string(x.cols()) +
                         " columns, expected " + std::to_string(params.config.input_dim));
  if (!x.allFinite()) throw NumericError("model input contains non-finite values");
}

void fill_uniform(Matrix& m, double bound, Rng& rng) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
}

void fill_uniform(Vector& v, double bound, Rng& rng) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.uniform(-bound, bound);
}

double glorot(std::int64_t fan_in, std::int64_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Matrix sample_mask(std::int64_t rows, std::int64_t cols, double p_drop, Rng& rng) {
  Matrix m(rows, cols);
  const double keep = 1.0 / (1.0 - p_drop);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = rng.uniform() < p_drop ? 0.0 : keep;
  return m;
}

Matrix apply_mask(const Matrix& in, const Matrix& mask) {
  if (mask.size() == 0) return in;
  if (mask.rows() != in.rows() || mask.cols() != in.cols())
    throw ParameterError("dropout mask shape mismatch");
  return in.cwiseProduct(mask);
}

Matrix bilinear_energies(const Matrix& key, const Matrix& query, double scale,
                         EnergyStats* stats) {
  const Eigen::Index n = key.rows();
  Matrix e(n, n);
  for (Eigen::Index t = 0; t < n; ++t)
    for (Eigen::Index i = 0; i < n; ++i) e(t, i) = scale * key.row(i).dot(query.row(t));
  if (stats) stats->inner_products += static_cast<std::uint64_t>(n * n);
  return e;
}

Matrix additive_energies(const Matrix& key, const Matrix& query, const Vector& mix) {
  const Eigen::Index n = key.rows();
  Matrix e(n, n);
  for (Eigen::Index t = 0; t < n; ++t)
    for (Eigen::Index i = 0; i < n; ++i)
      e(t, i) = (key.row(i) + query.row(t)).array().tanh().matrix().dot(mix);
  return e;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

template <typename T>
void append_view(std::vector<T>& out, std::string_view name, auto& tensor,
                 std::vector<std::int64_t> shape) {
  out.push_back({name, {tensor.data(), static_cast<std::size_t>(tensor.size())}, std::move(shape)});
}

}  // namespace

std::string_view to_string(AttentionKind kind) {
  return kind == AttentionKind::kAdditive ? "add" : "mul";
}

AttentionKind parse_attention(std::string_view s) {
  if (s == "mul") return AttentionKind::kMultiplicative;
  if (s == "add") return AttentionKind::kAdditive;
  throw ConfigError("unknown attention kind '" + std::string(s) + "' (expected mul|add)");
}

ModelParameters ModelParameters::zeros(const ModelConfig& config) {
  const auto d = config.input_dim;
  const auto h = config.hidden_dim;
  if (d < 1 || h < 1) throw ParameterError("model dimensions must be positive");
  ModelParameters p;
  p.config = config;
  p.U = Matrix::Zero(d, d);
  p.V = Matrix::Zero(d, d);
  if (config.attention == AttentionKind::kAdditive) p.M = Vector::Zero(d);
  p.C = Matrix::Zero(d, d);
  p.W = Matrix::Zero(d, d);
  p.ln1_gain = Vector::Zero(d);
  p.ln1_bias = Vector::Zero(d);
  p.W1 = Matrix::Zero(h, d);
  p.b1 = Vector::Zero(h);
  p.ln2_gain = Vector::Zero(h);
  p.ln2_bias = Vector::Zero(h);
  p.w2 = Vector::Zero(h);
  p.b2 = 0.0;
  return p;
}

ModelParameters ModelParameters::initialize(const ModelConfig& config, Rng& rng) {
  ModelParameters p = zeros(config);
  const auto d = config.input_dim;
  const auto h = config.hidden_dim;
  fill_uniform(p.U, glorot(d, d), rng);
  fill_uniform(p.V, glorot(d, d), rng);
  if (config.attention == AttentionKind::kAdditive) fill_uniform(p.M, glorot(d, 1), rng);
  fill_uniform(p.C, glorot(d, d), rng);
  fill_uniform(p.W, glorot(d, d), rng);
  p.ln1_gain.setOnes();
  fill_uniform(p.W1, glorot(d, h), rng);
  p.ln2_gain.setOnes();
  fill_uniform(p.w2, glorot(h, 1), rng);
  p.validate();
  return p;
}

void ModelParameters::validate() const {
  if (!(config.scale > 0.0) || !std::isfinite(config.scale))
    throw ParameterError("attention scale must be positive");
  if (!(config.p_drop >= 0.0 && config.p_drop < 1.0))
    throw ParameterError("dropout probability must lie in [0, 1)");
  const auto d = config.input_dim;
  const auto h = config.hidden_dim;
  auto shape_ok = [](const auto& m, Eigen::Index r, Eigen::Index c) {
    return m.rows() == r && m.cols() == c;
  };
  bool ok = shape_ok(U, d, d) && shape_ok(V, d, d) && shape_ok(C, d, d) &&
            shape_ok(W, d, d) && ln1_gain.size() == d && ln1_bias.size() == d &&
            shape_ok(W1, h, d) && b1.size() == h && ln2_gain.size() == h &&
            ln2_bias.size() == h && w2.size() == h;
  ok = ok && (config.attention == AttentionKind::kAdditive ? M.size() == d : M.size() == 0);
  if (!ok) throw ParameterError("model parameter shapes do not match the configuration");
  for (const auto& t : tensors())
    for (double v : t.data)
      if (!std::isfinite(v))
        throw ParameterError("non-finite value in parameter " + std::string(t.name));
}

std::vector<TensorView> ModelParameters::tensors() {
  std::vector<TensorView> out;
  const auto d = config.input_dim;
  const auto h = config.hidden_dim;
  append_view(out, "U", U, {d, d});
  append_view(out, "V", V, {d, d});
  if (M.size() > 0) append_view(out, "M", M, {d});
  append_view(out, "C", C, {d, d});
  append_view(out, "W", W, {d, d});
  append_view(out, "ln1_gain", ln1_gain, {d});
  append_view(out, "ln1_bias", ln1_bias, {d});
  append_view(out, "W1", W1, {h, d});
  append_view(out, "b1", b1, {h});
  append_view(out, "ln2_gain", ln2_gain, {h});
  append_view(out, "ln2_bias", ln2_bias, {h});
  append_view(out, "w2", w2, {h});
  out.push_back({"b2", {&b2, 1}, {}});
  return out;
}

std::vector<ConstTensorView> ModelParameters::tensors() const {
  std::vector<ConstTensorView> out;
  for (auto& t : const_cast<ModelParameters*>(this)->tensors())
    out.push_back({t.name, t.data, t.shape});
  return out;
}

std::int64_t ModelParameters::num_parameters() const {
  std::int64_t n = 0;
  for (const auto& t : tensors()) n += static_cast<std::int64_t>(t.data.size());
  return n;
}

DropoutMasks DropoutMasks::sample(std::int64_t n, std::int64_t d, std::int64_t h,
                                  double p_drop, Rng& rng) {
  DropoutMasks m;
  if (p_drop <= 0.0) return m;
  m.attention = sample_mask(n, n, p_drop, rng);
  m.residual = sample_mask(n, d, p_drop, rng);
  m.hidden = sample_mask(n, h, p_drop, rng);
  return m;
}

Matrix attention_energies(const Matrix& x, const ModelParameters& params, EnergyStats* stats) {
  check_input(x, params);
  const Matrix key = x * params.U.transpose();
  const Matrix query = x * params.V.transpose();
  if (stats) stats->projections += 2 * static_cast<std::uint64_t>(x.rows());
  return bilinear_energies(key, query, params.config.scale, stats);
}

Matrix additive_attention_energies(const Matrix& x, const ModelParameters& params) {
  check_input(x, params);
  if (params.M.size() != params.config.input_dim)
    throw ConfigError("additive attention requires the mixing vector M");
  return additive_energies(x * params.U.transpose(), x * params.V.transpose(), params.M);
}

Matrix softmax_rows(const Matrix& energies) {
  Matrix a(energies.rows(), energies.cols());
  for (Eigen::Index t = 0; t < energies.rows(); ++t) {
    const double m = energies.row(t).maxCoeff();
    a.row(t) = (energies.row(t).array() - m).exp().matrix();
    a.row(t) /= a.row(t).sum();
  }
  return a;
}

ContextResult context_vectors(const Matrix& x, const Matrix& attention,
                              const ModelParameters& params) {
  if (attention.rows() != x.rows() || attention.cols() != x.rows())
    throw ParameterError("attention matrix must be N x N");
  ContextResult r;
  r.values = x * params.C.transpose();
  r.context = attention * r.values;
  return r;
}

Matrix layer_norm(const Matrix& in, const Vector& gain, const Vector& bias, double eps,
                  LayerNormCache* cache) {
  const Eigen::Index cols = in.cols();
  Matrix normalized(in.rows(), cols);
  Vector inv_std(in.rows());
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    const double mean = in.row(r).mean();
    const auto centered = (in.row(r).array() - mean).matrix();
    const double var = centered.squaredNorm() / static_cast<double>(cols);
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    normalized.row(r) = centered * inv_std(r);
  }
  Matrix out = (normalized.array().rowwise() * gain.transpose().array()).matrix();
  out.rowwise() += bias.transpose();
  if (cache) {
    cache->normalized = std::move(normalized);
    cache->inv_std = std::move(inv_std);
  }
  return out;
}

Matrix residual_block(const Matrix& context, const Matrix& x, const ModelParameters& params,
                      const Matrix& residual_mask, LayerNormCache* cache, Matrix* projected) {
  if (context.rows() != x.rows() || context.cols() != x.cols())
    throw ParameterError("context and input shapes differ");
  Matrix proj = context * params.W.transpose();
  const Matrix sum = apply_mask(proj, residual_mask) + x;
  if (projected) *projected = std::move(proj);
  return layer_norm(sum, params.ln1_gain, params.ln1_bias, params.config.ln_eps, cache);
}

Vector regression_head(const Matrix& block_out, const ModelParameters& params,
                       const Matrix& hidden_mask, ForwardTrace* trace) {
  if (block_out.cols() != params.config.input_dim)
    throw ParameterError("regression head input width mismatch");
  Matrix pre = block_out * params.W1.transpose();
  pre.rowwise() += params.b1.transpose();
  const Matrix act = apply_mask(pre.cwiseMax(0.0), hidden_mask);
  LayerNormCache cache;
  Matrix hidden = layer_norm(act, params.ln2_gain, params.ln2_bias, params.config.ln_eps, &cache);
  Vector logits = hidden * params.w2;
  logits.array() += params.b2;
  Vector y = logits.unaryExpr([](double z) { return sigmoid(z); });
  if (trace) {
    trace->hidden_pre = std::move(pre);
    trace->ln2 = std::move(cache);
    trace->hidden_out = std::move(hidden);
    trace->logits = std::move(logits);
  }
  return y;
}

ForwardTrace forward_with_masks(const Matrix& x, const ModelParameters& params,
                                const DropoutMasks& masks) {
  check_input(x, params);
  ForwardTrace tr;
  tr.training = true;
  tr.masks = masks;
  tr.key = x * params.U.transpose();
  tr.query = x * params.V.transpose();
  if (params.config.attention == AttentionKind::kAdditive) {
    if (params.M.size() != params.config.input_dim)
      throw ConfigError("additive attention requires the mixing vector M");
    tr.energies = additive_energies(tr.key, tr.query, params.M);
  } else {
    tr.energies = bilinear_energies(tr.key, tr.query, params.config.scale, nullptr);
  }
  tr.attention = softmax_rows(tr.energies);
  tr.attended = apply_mask(tr.attention, masks.attention);
  auto ctx = context_vectors(x, tr.attended, params);
  tr.values = std::move(ctx.values);
  tr.context = std::move(ctx.context);
  tr.block_out = residual_block(tr.context, x, params, masks.residual, &tr.ln1, &tr.projected);
  tr.scores = regression_head(tr.block_out, params, masks.hidden, &tr);
  return tr;
}

ForwardTrace forward(const Matrix& x, const ModelParameters& params, Mode mode, Rng* rng) {
  DropoutMasks masks;
  if (mode == Mode::kTrain && params.config.p_drop > 0.0) {
    if (!rng) throw ParameterError("train-mode forward needs an rng for dropout");
    masks = DropoutMasks::sample(x.rows(), params.config.input_dim, params.config.hidden_dim,
                                 params.config.p_drop, *rng);
  }
  ForwardTrace tr = forward_with_masks(x, params, masks);
  tr.training = mode == Mode::kTrain;
  return tr;
}

Vector predict(const Matrix& x, const ModelParameters& params) {
  return forward(x, params, Mode::kInfer).scores;
}

}  // namespace vasum
