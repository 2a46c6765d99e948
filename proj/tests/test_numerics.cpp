#include <cmath>

#include "doctest.h"
#include "mlzsr/adam.hpp"
#include "mlzsr/errors.hpp"
#include "mlzsr/gradcheck.hpp"
#include "mlzsr/matrix.hpp"
#include "mlzsr/rng.hpp"

using namespace mlzsr;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.next_normal();
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("numerics");

TEST_CASE("matmul identity leaves the operand unchanged") {
  Rng rng(1);
  Matrix m = random_matrix(3, 4, rng);
  Matrix out = matmul(identity(3), m);
  CHECK(out.data == m.data);
}

TEST_CASE("matmul hand-evaluated case") {
  Matrix a(2, 2);
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(1, 0) = 3;
  a(1, 1) = 4;
  Matrix b(2, 1);
  b(0, 0) = 1;
  b(1, 0) = 1;
  Matrix out = matmul(a, b);
  CHECK(out(0, 0) == 3.0);
  CHECK(out(1, 0) == 7.0);
}

TEST_CASE("matmul by zeros annihilates") {
  Rng rng(2);
  Matrix m = random_matrix(4, 3, rng);
  Matrix out = matmul(m, Matrix::zeros(3, 5));
  for (double v : out.data) CHECK(v == 0.0);
}

TEST_CASE("matmul rejects mismatched shapes") {
  CHECK_THROWS_AS(matmul(Matrix(2, 3), Matrix(2, 3)), ShapeError);
}

TEST_CASE("matmul associativity on random small matrices") {
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix a = random_matrix(1 + rng.uniform_index(4), 1 + rng.uniform_index(4), rng);
    Matrix b = random_matrix(a.cols, 1 + rng.uniform_index(4), rng);
    Matrix c = random_matrix(b.cols, 1 + rng.uniform_index(4), rng);
    Matrix left = matmul(matmul(a, b), c);
    Matrix right = matmul(a, matmul(b, c));
    for (std::size_t i = 0; i < left.data.size(); ++i) {
      double denom = std::max({std::fabs(left.data[i]), std::fabs(right.data[i]), 1.0});
      CHECK(std::fabs(left.data[i] - right.data[i]) / denom < 1e-10);
    }
  }
}

TEST_CASE("pcg stream is reproducible and splits diverge") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u32() == b.next_u32());

  Rng parent(42);
  Rng s1 = parent.split(1);
  Rng s2 = parent.split(2);
  Rng s1_again = parent.split(1);
  bool differ = false;
  for (int i = 0; i < 16; ++i) {
    std::uint32_t x = s1.next_u32();
    CHECK(x == s1_again.next_u32());
    if (x != s2.next_u32()) differ = true;
  }
  CHECK(differ);
}

TEST_CASE("uniform doubles stay in range, shuffle is a permutation") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    double v = rng.next_double();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
  rng.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 8; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("adam leaves parameters alone on zero gradients from a fresh state") {
  Matrix params(2, 2);
  params.fill(0.7);
  AdamState state(2, 2, 0.1);
  adam_step(params, Matrix::zeros(2, 2), state);
  for (double v : params.data) CHECK(v == 0.7);
  CHECK(state.step == 1);
}

TEST_CASE("first adam step moves by about -lr * sign(g)") {
  // With fresh moments, mhat = g and vhat = g^2, so the update is
  // -lr * g / (|g| + eps) -> -lr * sign(g) as eps -> 0.
  for (double g : {0.5, -2.0, 1e-3}) {
    Matrix params(1, 1);
    AdamState state(1, 1, 0.01);
    Matrix grads(1, 1);
    grads(0, 0) = g;
    adam_step(params, grads, state);
    const double expected = -0.01 * (g > 0 ? 1.0 : -1.0);
    CHECK(params(0, 0) == doctest::Approx(expected).epsilon(1e-4));
  }
}

TEST_CASE("adam is deterministic given identical inputs") {
  Rng rng(9);
  Matrix params_a = random_matrix(3, 3, rng);
  Matrix params_b = params_a;
  Matrix grads = random_matrix(3, 3, rng);
  AdamState sa(3, 3, 0.05), sb(3, 3, 0.05);
  for (int i = 0; i < 5; ++i) {
    adam_step(params_a, grads, sa);
    adam_step(params_b, grads, sb);
  }
  CHECK(params_a.data == params_b.data);
}

TEST_CASE("adam rejects shape mismatch and non-finite gradients") {
  Matrix params(2, 2);
  AdamState state(2, 2, 0.1);
  CHECK_THROWS_AS(adam_step(params, Matrix(2, 3), state), ShapeError);
  Matrix bad(2, 2);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(adam_step(params, bad, state), NumericError);
}

TEST_CASE("finite differences recover simple analytic derivatives") {
  auto square = [](std::span<const double> x) { return x[0] * x[0]; };
  std::vector<double> at{3.0};
  std::vector<double> g = finite_diff_grad(square, at, 1e-5);
  CHECK(g[0] == doctest::Approx(6.0).epsilon(1e-6));

  auto constant = [](std::span<const double>) { return 4.25; };
  std::vector<double> x{1.0, -2.0, 0.5};
  for (double v : finite_diff_grad(constant, x, 1e-5)) CHECK(v == 0.0);

  const std::vector<double> c{0.3, -1.2, 2.2};
  auto linear = [&c](std::span<const double> x_) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * x_[i];
    return s;
  };
  std::vector<double> g2 = finite_diff_grad(linear, x, 1e-5);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(std::fabs(g2[i] - c[i]) < 1e-8);
  }
}

TEST_CASE("finite differences reject non-finite objectives and bad steps") {
  auto exploding = [](std::span<const double> x) { return x[0] > 0.5 ? 1.0 / 0.0 : 0.0; };
  std::vector<double> at{0.5};
  CHECK_THROWS_AS(finite_diff_grad(exploding, at, 1e-2), NumericError);
  auto fine = [](std::span<const double> x) { return x[0]; };
  CHECK_THROWS_AS(finite_diff_grad(fine, at, 0.0), ConfigError);
  CHECK_THROWS_AS(finite_diff_grad(fine, at, -1e-5), ConfigError);
}

TEST_CASE("finite differences match polynomial gradients at O(h^2)") {
  // f(x) = sum_i (i+1) x_i^3; df/dx_i = 3 (i+1) x_i^2.
  auto poly = [](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      s += static_cast<double>(i + 1) * x[i] * x[i] * x[i];
    }
    return s;
  };
  Rng rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> x(4);
    for (double& v : x) v = rng.next_normal();
    std::vector<double> g = finite_diff_grad(poly, x, 1e-5);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double exact = 3.0 * static_cast<double>(i + 1) * x[i] * x[i];
      CHECK(std::fabs(g[i] - exact) < 1e-7 * std::max(1.0, std::fabs(exact)));
    }
  }
}

TEST_SUITE_END();
