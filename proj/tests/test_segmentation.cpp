#include <doctest.h>

#include "support/oracles.hpp"
#include "vasum/error.hpp"
#include "vasum/rng.hpp"
#include "vasum/segmentation.hpp"

using namespace vasum;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

Matrix two_blocks(std::int64_t first, std::int64_t second) {
  Matrix x = Matrix::Zero(first + second, 3);
  for (std::int64_t i = 0; i < first + second; ++i) x(i, i < first ? 0 : 1) = 1.0;
  return x;
}

}  // namespace

TEST_CASE("cosine gram matrix") {
  SUBCASE("identical rows") {
    Matrix x(4, 3);
    x.rowwise() = Eigen::RowVector3d(1.0, 2.0, -2.0);
    CHECK((gram_matrix(x).array() - 1.0).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("orthogonal rows") {
    const Matrix x = Matrix::Identity(3, 3) * 5.0;
    CHECK(gram_matrix(x).isApprox(Matrix::Identity(3, 3)));
  }
  SUBCASE("symmetric with unit diagonal") {
    Rng rng(2);
    const Matrix k = gram_matrix(random_matrix(5, 7, rng));
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    for (int i = 0; i < 5; ++i) CHECK(k(i, i) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("segment cost table") {
  SUBCASE("constant features cost nothing") {
    Matrix x(6, 2);
    x.rowwise() = Eigen::RowVector2d(0.3, 0.4);
    const Matrix c = segment_cost_table(gram_matrix(x));
    CHECK(c.cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("two orthogonal rows") {
    const Matrix c = segment_cost_table(Matrix::Identity(2, 2));
    CHECK(c(0, 1) == doctest::Approx(1.0));
    CHECK(c(0, 0) == 0.0);
  }
  SUBCASE("matches the direct double sum") {
    Rng rng(5);
    const Matrix k = gram_matrix(random_matrix(8, 4, rng));
    const Matrix c = segment_cost_table(k);
    for (int i = 0; i < 8; ++i)
      for (int j = i; j < 8; ++j) {
        CHECK(c(i, j) == doctest::Approx(oracle::segment_cost(k, i, j)).epsilon(1e-10));
        CHECK(c(i, j) >= 0.0);
      }
  }
}

TEST_CASE("kernel temporal segmentation") {
  SUBCASE("constant features yield no change points") {
    Matrix x(12, 3);
    x.rowwise() = Eigen::RowVector3d(1.0, 0.5, 0.2);
    const auto r = kts(x, {5, 1.0});
    CHECK(r.segmentation.boundaries.empty());
  }
  SUBCASE("two orthogonal blocks split at the join") {
    const Matrix x = two_blocks(5, 5);
    std::vector<std::int64_t> where;
    oracle::best_scatter(gram_matrix(x), 1, &where);
    REQUIRE(where == std::vector<std::int64_t>{5});
    const auto r = kts(x, {3, 1.0});
    CHECK(r.segmentation.boundaries == std::vector<std::int64_t>{5});
  }
  SUBCASE("optimal scatter equals exhaustive search") {
    Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix x = random_matrix(12, 5, rng);
      const Matrix k = gram_matrix(x);
      const auto r = kts(x, {3, 1.0});
      for (std::int64_t m = 0; m <= 3; ++m)
        CHECK(r.scatter[m] == doctest::Approx(oracle::best_scatter(k, m)).epsilon(1e-9));
      for (std::int64_t m = 1; m <= 3; ++m) CHECK(r.scatter[m] <= r.scatter[m - 1] + 1e-12);
    }
  }
  SUBCASE("invariant to positive rescaling") {
    Rng rng(4);
    const Matrix x = random_matrix(14, 3, rng);
    const auto a = kts(x, {4, 0.2});
    const auto b = kts(x * 7.5, {4, 0.2});
    CHECK(a.segmentation.boundaries == b.segmentation.boundaries);
  }
  SUBCASE("ties prefer the earliest boundary") {
    // Three orthogonal blocks, only one boundary allowed: splitting after
    // either block costs the same.
    Matrix x = Matrix::Zero(6, 3);
    for (int i = 0; i < 6; ++i) x(i, i / 2) = 1.0;
    const auto r = kts_from_costs(segment_cost_table(gram_matrix(x)), {1, 0.0});
    CHECK(r.segmentation.boundaries == std::vector<std::int64_t>{2});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(kts(Matrix(0, 3), {0, 1.0}), ParameterError);
    CHECK_THROWS_AS(kts(Matrix::Ones(4, 2), {4, 1.0}), ParameterError);
  }
}

TEST_CASE("segments project onto original frames") {
  Segmentation s{4, {2}};
  const std::vector<std::int64_t> picks{3, 18, 33, 48};
  const auto shots = s.to_shots(picks, 60);
  REQUIRE(shots.size() == 2);
  CHECK(shots[0] == Shot{0, 32});
  CHECK(shots[1] == Shot{33, 59});
  CHECK(default_max_change_points(647.0, 1294) == 323);
  CHECK(default_max_change_points(10.0, 3) == 2);
}
