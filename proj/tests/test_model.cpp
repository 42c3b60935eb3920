#include <doctest.h>

#include <cmath>
#include <numeric>

#include "support/oracles.hpp"
#include "vasum/error.hpp"
#include "vasum/model.hpp"
#include "vasum/rng.hpp"

using namespace vasum;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  return m;
}

// Random parameters with non-trivial gains/biases.
ModelParameters random_params(std::int64_t d, std::int64_t h, Rng& rng,
                              AttentionKind kind = AttentionKind::kMultiplicative,
                              double p_drop = 0.0) {
  ModelConfig c;
  c.input_dim = d;
  c.hidden_dim = h;
  c.attention = kind;
  c.p_drop = p_drop;
  c.scale = 0.3;
  ModelParameters p = ModelParameters::initialize(c, rng);
  for (auto& t : p.tensors())
    for (double& v : t.data) v += 0.1 * rng.normal();
  return p;
}

double max_abs_diff(const Matrix& a, const oracle::Grid& b) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b[i][j]));
  return m;
}

}  // namespace

TEST_CASE("multiplicative attention energies") {
  Rng rng(1);
  SUBCASE("single frame") {
    ModelParameters p = random_params(3, 2, rng);
    const Matrix x = random_matrix(1, 3, rng);
    const Matrix e = attention_energies(x, p);
    REQUIRE(e.rows() == 1);
    const double expect = p.config.scale * (p.U * x.row(0).transpose()).dot(p.V * x.row(0).transpose());
    CHECK(e(0, 0) == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("identity projections on orthonormal rows") {
    ModelParameters p = random_params(3, 2, rng);
    p.U.setIdentity();
    p.V.setIdentity();
    p.config.scale = 1.0;
    const Matrix x = Matrix::Identity(3, 3);
    CHECK(attention_energies(x, p).isApprox(Matrix::Identity(3, 3)));
  }
  SUBCASE("random N=4, D=3 matches the loop oracle") {
    ModelParameters p = random_params(3, 2, rng);
    const Matrix x = random_matrix(4, 3, rng);
    CHECK(max_abs_diff(attention_energies(x, p), oracle::energies(x, p)) < 1e-12);
  }
  SUBCASE("quadratic number of inner products") {
    ModelParameters p = random_params(5, 2, rng);
    for (std::int64_t n : {1, 7, 20}) {
      EnergyStats stats;
      attention_energies(random_matrix(n, 5, rng), p, &stats);
      CHECK(stats.inner_products == static_cast<std::uint64_t>(n * n));
      CHECK(stats.projections == static_cast<std::uint64_t>(2 * n));
    }
  }
  SUBCASE("non-finite input") {
    ModelParameters p = random_params(3, 2, rng);
    Matrix x = random_matrix(2, 3, rng);
    x(1, 1) = std::nan("");
    CHECK_THROWS_AS(attention_energies(x, p), NumericError);
  }
}

TEST_CASE("additive attention energies") {
  Rng rng(2);
  ModelParameters p = random_params(4, 3, rng, AttentionKind::kAdditive);
  SUBCASE("zero mixing vector") {
    p.M.setZero();
    CHECK(additive_attention_energies(random_matrix(3, 4, rng), p).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("opposite inputs cancel when U = V") {
    p.V = p.U;
    Matrix x(2, 4);
    x.row(0) = random_matrix(1, 4, rng);
    x.row(1) = -x.row(0);
    const Matrix e = additive_attention_energies(x, p);
    CHECK(std::abs(e(0, 1)) < 1e-12);
    CHECK(std::abs(e(1, 0)) < 1e-12);
  }
  SUBCASE("random N=3 matches the loop oracle") {
    const Matrix x = random_matrix(3, 4, rng);
    CHECK(max_abs_diff(additive_attention_energies(x, p), oracle::additive_energies(x, p)) < 1e-12);
  }
  SUBCASE("missing M") {
    ModelParameters q = random_params(4, 3, rng);
    CHECK_THROWS_AS(additive_attention_energies(random_matrix(2, 4, rng), q), ConfigError);
  }
}

TEST_CASE("softmax rows") {
  SUBCASE("constant row") {
    const Matrix a = softmax_rows(Matrix::Constant(1, 4, 2.5));
    for (int i = 0; i < 4; ++i) CHECK(a(0, i) == doctest::Approx(0.25));
  }
  SUBCASE("closed form") {
    Matrix e(1, 2);
    e << std::log(1.0), std::log(3.0);
    const Matrix a = softmax_rows(e);
    CHECK(a(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(a(0, 1) == doctest::Approx(0.75).epsilon(1e-14));
  }
  SUBCASE("shift invariance with a large offset") {
    Rng rng(3);
    const Matrix e = random_matrix(5, 6, rng);
    const Matrix shifted = (e.array() + 1000.0).matrix();
    CHECK((softmax_rows(e) - softmax_rows(shifted)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("rows sum to one for extreme energies") {
    Rng rng(4);
    const Matrix a = softmax_rows(random_matrix(8, 8, rng, 300.0));
    for (int t = 0; t < 8; ++t) CHECK(std::abs(a.row(t).sum() - 1.0) < 1e-6);
  }
}

TEST_CASE("context vectors") {
  Rng rng(5);
  ModelParameters p = random_params(3, 2, rng);
  const Matrix x = random_matrix(4, 3, rng);
  SUBCASE("identity attention") {
    const auto r = context_vectors(x, Matrix::Identity(4, 4), p);
    CHECK(r.context.isApprox(r.values));
  }
  SUBCASE("uniform attention averages the transformed inputs") {
    const auto r = context_vectors(x, Matrix::Constant(4, 4, 0.25), p);
    const Eigen::RowVectorXd mean = r.values.colwise().mean();
    for (int t = 0; t < 4; ++t) CHECK((r.context.row(t) - mean).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("random attention matches summation") {
    const Matrix a = softmax_rows(random_matrix(4, 4, rng));
    const auto r = context_vectors(x, a, p);
    for (int t = 0; t < 4; ++t)
      for (int k = 0; k < 3; ++k) {
        double c = 0.0;
        for (int i = 0; i < 4; ++i) {
          const auto b = oracle::matvec(p.C, oracle::row(x, i));
          c += a(t, i) * b[k];
        }
        CHECK(r.context(t, k) == doctest::Approx(c).epsilon(1e-12));
      }
  }
}

TEST_CASE("residual block") {
  Rng rng(6);
  ModelParameters p = random_params(6, 3, rng);
  const Matrix x = random_matrix(5, 6, rng, 10.0);
  const Matrix ctx = random_matrix(5, 6, rng);
  SUBCASE("unit gain and zero bias normalise every row") {
    p.ln1_gain.setOnes();
    p.ln1_bias.setZero();
    const Matrix k = residual_block(ctx, x, p, Matrix());
    for (int t = 0; t < 5; ++t) {
      const double mean = k.row(t).mean();
      const double var = (k.row(t).array() - mean).square().mean();
      CHECK(std::abs(mean) < 1e-6);
      CHECK(std::abs(var - 1.0) < 1e-6);
    }
  }
  SUBCASE("zero projection passes the input through") {
    p.W.setZero();
    const Matrix k = residual_block(ctx, x, p, Matrix());
    CHECK(k.isApprox(layer_norm(x, p.ln1_gain, p.ln1_bias, p.config.ln_eps)));
  }
  SUBCASE("fixed dropout mask matches the scalar oracle") {
    Matrix mask(5, 6);
    for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = rng.uniform() < 0.5 ? 0.0 : 2.0;
    const Matrix k = residual_block(ctx, x, p, mask);
    for (int t = 0; t < 5; ++t) {
      const auto wc = oracle::matvec(p.W, oracle::row(ctx, t));
      std::vector<double> sum(6);
      for (int j = 0; j < 6; ++j) sum[j] = wc[j] * mask(t, j) + x(t, j);
      const auto expect = oracle::layer_norm_row(sum, p.ln1_gain, p.ln1_bias, p.config.ln_eps);
      for (int j = 0; j < 6; ++j) CHECK(k(t, j) == doctest::Approx(expect[j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("regression head") {
  Rng rng(7);
  ModelParameters p = random_params(4, 5, rng);
  const Matrix k = random_matrix(6, 4, rng);
  SUBCASE("zero output layer gives 0.5") {
    p.w2.setZero();
    p.b2 = 0.0;
    const Vector y = regression_head(k, p, Matrix());
    for (int t = 0; t < 6; ++t) CHECK(y(t) == 0.5);
  }
  SUBCASE("saturates for a large bias") {
    p.w2.setZero();
    p.b2 = 30.0;
    const Vector y = regression_head(k, p, Matrix());
    for (int t = 0; t < 6; ++t) CHECK(y(t) > 1.0 - 1e-9);
  }
  SUBCASE("matches the scalar oracle") {
    const Vector y = regression_head(k, p, Matrix());
    for (int t = 0; t < 6; ++t) {
      auto pre = oracle::matvec(p.W1, oracle::row(k, t));
      for (int j = 0; j < 5; ++j) pre[j] = std::max(pre[j] + p.b1(j), 0.0);
      const auto hn = oracle::layer_norm_row(pre, p.ln2_gain, p.ln2_bias, p.config.ln_eps);
      double z = p.b2;
      for (int j = 0; j < 5; ++j) z += p.w2(j) * hn[j];
      CHECK(y(t) == doctest::Approx(1.0 / (1.0 + std::exp(-z))).epsilon(1e-12));
    }
  }
}

TEST_CASE("forward pass") {
  Rng rng(8);
  SUBCASE("inference is deterministic") {
    ModelParameters p = random_params(8, 8, rng, AttentionKind::kMultiplicative, 0.5);
    const Matrix x = random_matrix(6, 8, rng);
    CHECK(predict(x, p) == predict(x, p));
  }
  SUBCASE("train mode without dropout equals inference") {
    ModelParameters p = random_params(8, 8, rng);
    const Matrix x = random_matrix(6, 8, rng);
    Rng drop(1);
    CHECK(forward(x, p, Mode::kTrain, &drop).scores == predict(x, p));
  }
  SUBCASE("train mode with dropout records masks and still matches the oracle") {
    ModelParameters p = random_params(8, 8, rng, AttentionKind::kMultiplicative, 0.5);
    const Matrix x = random_matrix(6, 8, rng);
    Rng drop(2);
    const ForwardTrace tr = forward(x, p, Mode::kTrain, &drop);
    CHECK(tr.masks.attention.rows() == 6);
    CHECK(tr.masks.residual.cols() == 8);
    CHECK(tr.masks.hidden.cols() == 8);
    const auto expect = oracle::forward(x, p, tr.masks);
    for (int t = 0; t < 6; ++t) CHECK(tr.scores(t) == doctest::Approx(expect.scores[t]).epsilon(1e-12));
    CHECK_THROWS_AS(forward(x, p, Mode::kTrain, nullptr), ParameterError);
  }
  for (auto kind : {AttentionKind::kMultiplicative, AttentionKind::kAdditive}) {
    CAPTURE(to_string(kind));
    ModelParameters p = random_params(8, 8, rng, kind);
    const Matrix x = random_matrix(6, 8, rng);
    const ForwardTrace tr = forward(x, p, Mode::kInfer);
    const auto expect = oracle::forward(x, p, {});
    CHECK(max_abs_diff(tr.attention, expect.attention) < 1e-12);
    for (int t = 0; t < 6; ++t) {
      CHECK(tr.scores(t) == doctest::Approx(expect.scores[t]).epsilon(1e-12));
      CHECK(tr.scores(t) > 0.0);
      CHECK(tr.scores(t) < 1.0);
      CHECK(std::abs(tr.attention.row(t).sum() - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("parameter validation") {
  Rng rng(9);
  ModelParameters p = random_params(4, 3, rng);
  CHECK_NOTHROW(p.validate());
  SUBCASE("scale") {
    p.config.scale = 0.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
  }
  SUBCASE("dropout") {
    p.config.p_drop = 1.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
  }
  SUBCASE("non-finite") {
    p.W1(0, 0) = INFINITY;
    CHECK_THROWS_AS(p.validate(), ParameterError);
  }
  SUBCASE("shape") {
    p.b1.resize(2);
    CHECK_THROWS_AS(p.validate(), ParameterError);
  }
  CHECK(random_params(4, 3, rng).num_parameters() == 4 * 16 + 2 * 4 + 12 + 3 * 4 + 1);
}
