#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vasum/types.hpp"

namespace vasum {

class Rng;

enum class AttentionKind { kMultiplicative, kAdditive };

std::string_view to_string(AttentionKind kind);
AttentionKind parse_attention(std::string_view s);  // "mul" | "add"

struct ModelConfig {
  std::int64_t input_dim = 1024;   // D
  std::int64_t hidden_dim = 1024;  // H
  double scale = 0.06;             // s, multiplies the bilinear energies
  double p_drop = 0.5;
  AttentionKind attention = AttentionKind::kMultiplicative;
  double ln_eps = 1e-5;
};

// A named view of one parameter tensor. Scalars have an empty shape.
struct TensorView {
  std::string_view name;
  std::span<double> data;
  std::vector<std::int64_t> shape;
};

struct ConstTensorView {
  std::string_view name;
  std::span<const double> data;
  std::vector<std::int64_t> shape;
};

// Learned weights. The same layout doubles as the gradient container.
struct ModelParameters {
  ModelConfig config;

  Matrix U, V;  // D x D attention projections (no bias)
  Vector M;     // D, additive attention only
  Matrix C;     // D x D input transform
  Matrix W;     // D x D context projection
  Vector ln1_gain, ln1_bias;  // D
  Matrix W1;                  // H x D
  Vector b1;                  // H
  Vector ln2_gain, ln2_bias;  // H
  Vector w2;                  // H
  double b2 = 0.0;

  // All-zero tensors of the right shapes.
  static ModelParameters zeros(const ModelConfig& config);
  // Uniform +-sqrt(6 / (fan_in + fan_out)) weights, zero biases, unit gains.
  static ModelParameters initialize(const ModelConfig& config, Rng& rng);

  // Throws ParameterError on bad shapes, non-finite entries, s <= 0 or
  // p_drop outside [0, 1).
  void validate() const;

  // Fixed order; checkpoints and the optimizer rely on it.
  std::vector<TensorView> tensors();
  std::vector<ConstTensorView> tensors() const;
  std::int64_t num_parameters() const;
};

// Scaled inverted-dropout masks (entries 0 or 1/(1-p)). An empty matrix
// means identity.
struct DropoutMasks {
  Matrix attention;  // N x N
  Matrix residual;   // N x D
  Matrix hidden;     // N x H

  static DropoutMasks sample(std::int64_t n, std::int64_t d, std::int64_t h,
                             double p_drop, Rng& rng);
};

struct LayerNormCache {
  Matrix normalized;  // (x - mean) / sqrt(var + eps), before gain/bias
  Vector inv_std;     // per row
};

// Everything the backward pass needs from one forward evaluation.
struct ForwardTrace {
  bool training = false;
  DropoutMasks masks;

  Matrix query;      // V x_t per row (multiplicative and additive)
  Matrix key;        // U x_i per row
  Matrix energies;   // E, N x N
  Matrix attention;  // softmax(E), before dropout
  Matrix attended;   // attention after dropout
  Matrix values;     // B, rows C x_i
  Matrix context;    // attended * B
  Matrix projected;  // rows W c_t
  LayerNormCache ln1;
  Matrix block_out;  // K
  Matrix hidden_pre;  // W1 k_t + b1
  LayerNormCache ln2;
  Matrix hidden_out;  // after the second layer norm
  Vector logits;
  Vector scores;  // Y
};

// Counts work done by attention_energies on its reference path.
struct EnergyStats {
  std::uint64_t inner_products = 0;  // length-D dot products
  std::uint64_t projections = 0;     // D x D matrix-vector products
};

// E[t, i] = s * (U x_i) . (V x_t)
Matrix attention_energies(const Matrix& x, const ModelParameters& params,
                          EnergyStats* stats = nullptr);

// E[t, i] = M . tanh(U x_i + V x_t)
Matrix additive_attention_energies(const Matrix& x, const ModelParameters& params);

// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& energies);

struct ContextResult {
  Matrix values;   // B, rows C x_i
  Matrix context;  // A * B
};
ContextResult context_vectors(const Matrix& x, const Matrix& attention,
                              const ModelParameters& params);

// Row-wise normalisation followed by gain/bias.
Matrix layer_norm(const Matrix& in, const Vector& gain, const Vector& bias, double eps,
                  LayerNormCache* cache = nullptr);

// k_t = layer_norm(dropout(W c_t) + x_t). `residual_mask` may be empty.
Matrix residual_block(const Matrix& context, const Matrix& x, const ModelParameters& params,
                      const Matrix& residual_mask, LayerNormCache* cache = nullptr,
                      Matrix* projected = nullptr);

// y_t = sigmoid(w2 . layer_norm(dropout(relu(W1 k_t + b1))) + b2)
Vector regression_head(const Matrix& block_out, const ModelParameters& params,
                       const Matrix& hidden_mask, ForwardTrace* trace = nullptr);

enum class Mode { kTrain, kInfer };

// Full forward pass for one video (rows of x are frames). In train mode masks
// are drawn from `rng` (required when p_drop > 0).
ForwardTrace forward(const Matrix& x, const ModelParameters& params, Mode mode,
                     Rng* rng = nullptr);

// Train-mode forward with caller-supplied masks.
ForwardTrace forward_with_masks(const Matrix& x, const ModelParameters& params,
                                const DropoutMasks& masks);

// Inference scores only.
Vector predict(const Matrix& x, const ModelParameters& params);

}  // namespace vasum
