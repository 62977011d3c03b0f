#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "osgnn/gradcheck.hpp"
#include "osgnn/matrix.hpp"

using namespace osgnn;

namespace {

// Independent oracle: naive i-j-k triple loop.
DenseMatrix matmul_naive(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.rows, b.cols);
  for (index_t i = 0; i < a.rows; ++i)
    for (index_t j = 0; j < b.cols; ++j) {
      double acc = 0.0;
      for (index_t k = 0; k < a.cols; ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  return c;
}

DenseMatrix random_dense(index_t r, index_t c, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  DenseMatrix m(r, c);
  for (auto& v : m.data) v = dist(rng);
  return m;
}

SparseMatrix random_csr(index_t r, index_t c, double dens, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<std::tuple<index_t, index_t, double>> trip;
  for (index_t i = 0; i < r; ++i)
    for (index_t j = 0; j < c; ++j)
      if (u(rng) < dens) trip.emplace_back(i, j, dist(rng));
  return SparseMatrix::from_triplets(r, c, std::move(trip));
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  REQUIRE(a.same_shape(b));
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

}  // namespace

TEST_CASE("matmul identity and hand cases") {
  auto id = DenseMatrix::from_rows({{1, 0}, {0, 1}});
  auto b = DenseMatrix::from_rows({{3, 4}, {5, 6}});
  auto c = matmul(id, b);
  CHECK(max_abs_diff(c, b) == 0.0);

  auto r = matmul(DenseMatrix::from_rows({{1, 2}}), DenseMatrix::from_rows({{3}, {4}}));
  REQUIRE(r.rows == 1);
  REQUIRE(r.cols == 1);
  CHECK(r(0, 0) == 11.0);
}

TEST_CASE("matmul matches naive oracle") {
  std::mt19937_64 rng(11);
  auto a = random_dense(7, 5, rng);
  auto b = random_dense(5, 3, rng);
  CHECK(max_abs_diff(matmul(a, b), matmul_naive(a, b)) < 1e-12);
}

TEST_CASE("matmul shape mismatch throws") {
  DenseMatrix a(2, 3), b(4, 2);
  CHECK_THROWS_AS(matmul(a, b), DimensionError);
}

TEST_CASE("matmul_tn and matmul_nt match transposed oracle") {
  std::mt19937_64 rng(12);
  auto a = random_dense(6, 4, rng);
  auto b = random_dense(6, 3, rng);
  // a^T b
  DenseMatrix at(a.cols, a.rows);
  for (index_t i = 0; i < a.rows; ++i)
    for (index_t j = 0; j < a.cols; ++j) at(j, i) = a(i, j);
  CHECK(max_abs_diff(matmul_tn(a, b), matmul_naive(at, b)) < 1e-12);
  // a b^T with b: 5x4
  auto b2 = random_dense(5, 4, rng);
  DenseMatrix b2t(b2.cols, b2.rows);
  for (index_t i = 0; i < b2.rows; ++i)
    for (index_t j = 0; j < b2.cols; ++j) b2t(j, i) = b2(i, j);
  CHECK(max_abs_diff(matmul_nt(a, b2), matmul_naive(a, b2t)) < 1e-12);
}

TEST_CASE("spmm trivial cases") {
  std::mt19937_64 rng(13);
  auto d = random_dense(4, 3, rng);

  SparseMatrix zero;
  zero.rows = 4;
  zero.cols = 4;
  zero.row_ptr.assign(5, 0);
  auto z = spmm(zero, d);
  for (double v : z.data) CHECK(v == 0.0);

  std::vector<std::tuple<index_t, index_t, double>> trip;
  for (index_t i = 0; i < 4; ++i) trip.emplace_back(i, i, 1.0);
  auto id = SparseMatrix::from_triplets(4, 4, std::move(trip));
  CHECK(max_abs_diff(spmm(id, d), d) == 0.0);
}

TEST_CASE("spmm matches densify oracle") {
  std::mt19937_64 rng(14);
  auto s = random_csr(20, 20, 0.1, rng);
  auto d = random_dense(20, 4, rng);
  CHECK(max_abs_diff(spmm(s, d), matmul_naive(densify(s), d)) < 1e-12);
}

TEST_CASE("spmm equals dense product on random instances up to 50x50") {
  std::mt19937_64 rng(15);
  for (int rep = 0; rep < 25; ++rep) {
    std::uniform_int_distribution<index_t> dim(1, 50);
    const index_t r = dim(rng), m = dim(rng), c = dim(rng);
    std::uniform_real_distribution<double> dens(0.0, 0.5);
    auto s = random_csr(r, m, dens(rng), rng);
    auto d = random_dense(m, c, rng);
    CHECK(max_abs_diff(spmm(s, d), matmul_naive(densify(s), d)) < 1e-12);
    auto dt = random_dense(r, c, rng);
    // s^T * dt against densified transpose
    DenseMatrix st(m, r);
    auto sd = densify(s);
    for (index_t i = 0; i < r; ++i)
      for (index_t j = 0; j < m; ++j) st(j, i) = sd(i, j);
    CHECK(max_abs_diff(spmm_tn(s, dt), matmul_naive(st, dt)) < 1e-12);
  }
}

TEST_CASE("csr_from_dense round-trips nonzeros") {
  std::mt19937_64 rng(16);
  auto d = random_dense(9, 7, rng);
  for (std::size_t i = 0; i < d.data.size(); i += 3) d.data[i] = 0.0;
  CHECK(max_abs_diff(densify(csr_from_dense(d)), d) == 0.0);
}

TEST_CASE("softmax uniform and saturated rows") {
  auto u = softmax_rows(DenseMatrix::from_rows({{0, 0, 0}}));
  for (index_t j = 0; j < 3; ++j) CHECK(u(0, j) == Catch::Approx(1.0 / 3.0).margin(1e-12));

  auto s = softmax_rows(DenseMatrix::from_rows({{1000, 0, 0}}));
  CHECK(s(0, 0) == Catch::Approx(1.0).margin(1e-9));
  CHECK(s(0, 1) == Catch::Approx(0.0).margin(1e-9));
  CHECK(s(0, 2) == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("softmax [1,2,3] matches direct evaluation") {
  auto p = softmax_rows(DenseMatrix::from_rows({{1, 2, 3}}));
  CHECK(p(0, 0) == Catch::Approx(0.09003).margin(1e-5));
  CHECK(p(0, 1) == Catch::Approx(0.24473).margin(1e-5));
  CHECK(p(0, 2) == Catch::Approx(0.66524).margin(1e-5));
}

TEST_CASE("softmax rows sum to one and are shift invariant") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    auto m = random_dense(5, 6, rng);
    for (auto& v : m.data) v *= 50.0;
    auto p = softmax_rows(m);
    for (index_t i = 0; i < p.rows; ++i) {
      double sum = 0.0;
      for (index_t j = 0; j < p.cols; ++j) sum += p(i, j);
      CHECK(std::abs(sum - 1.0) < 1e-9);
    }
    auto shifted = m;
    std::uniform_real_distribution<double> cdist(-100.0, 100.0);
    const double c = cdist(rng);
    for (auto& v : shifted.data) v += c;
    CHECK(max_abs_diff(softmax_rows(shifted), p) < 1e-12);
  }
}

TEST_CASE("relu forward, idempotence and backward mask") {
  auto r = relu(DenseMatrix::from_rows({{-1, 2}}));
  CHECK(r(0, 0) == 0.0);
  CHECK(r(0, 1) == 2.0);

  std::mt19937_64 rng(18);
  auto m = random_dense(4, 4, rng);
  CHECK(max_abs_diff(relu(relu(m)), relu(m)) == 0.0);

  auto pre = DenseMatrix::from_rows({{-0.5, 0.5, 0.0}});
  auto up = DenseMatrix::from_rows({{3.0, 3.0, 3.0}});
  auto g = relu_backward(pre, up);
  CHECK(g(0, 0) == 0.0);
  CHECK(g(0, 1) == 3.0);
  CHECK(g(0, 2) == 0.0);
}

TEST_CASE("sgd_step updates value and zeroes grad") {
  ParamTensor p(1, 1);
  p.value(0, 0) = 1.0;
  p.grad(0, 0) = 2.0;
  sgd_step(p, 0.1);
  CHECK(p.value(0, 0) == Catch::Approx(0.8));
  CHECK(p.grad(0, 0) == 0.0);

  ParamTensor q(2, 2);
  q.value.fill(5.0);
  sgd_step(q, 0.5);
  for (double v : q.value.data) CHECK(v == 5.0);

  // paper default lr
  ParamTensor r(1, 1);
  r.value(0, 0) = 0.25;
  r.grad(0, 0) = 4.0;
  sgd_step(r, 1e-3);
  CHECK(r.value(0, 0) == Catch::Approx(0.25 - 1e-3 * 4.0).epsilon(1e-15));
}

TEST_CASE("sgd_step rejects non-finite gradients") {
  ParamTensor p(1, 1);
  p.grad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(sgd_step(p, 0.1), NumericError);
}

TEST_CASE("finite_diff_check on quadratic and constant losses") {
  ParamTensor x(1, 1);
  x.value(0, 0) = 3.0;
  auto quad = [&](bool with_grad) {
    const double v = x.value(0, 0);
    if (with_grad) x.grad(0, 0) += v;
    return 0.5 * v * v;
  };
  auto rep = finite_diff_check(quad, {{"x", &x}}, 1e-5, 1e-6);
  CHECK(rep.pass);
  CHECK(rep.checked == 1);

  ParamTensor y(2, 3);
  auto constant = [&](bool) { return 7.5; };
  auto rep2 = finite_diff_check(constant, {{"y", &y}}, 1e-5, 1e-6);
  CHECK(rep2.pass);
  CHECK(rep2.max_rel_err == 0.0);
}
