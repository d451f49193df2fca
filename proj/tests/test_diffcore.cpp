#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "mgfusion/diffcore/gradcheck.hpp"
#include "mgfusion/diffcore/ops.hpp"
#include "test_support.hpp"

using namespace mgf;
using diff::Tensor;
using test::thrown_kind;

namespace {

using TD = Tensor<double>;

TD vec(std::vector<double> v) {
  const std::size_t n = v.size();
  return TD::constant({n}, std::move(v));
}
TD mat(std::size_t r, std::size_t c, std::vector<double> v) { return TD::constant({r, c}, std::move(v)); }

void check_values(const TD& t, std::vector<double> expected, double tol = 1e-12) {
  REQUIRE(t.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(std::abs(t[i] - expected[i]) <= tol);
}

double op_gradient_error(const std::function<TD()>& loss, const std::vector<TD>& params) {
  return diff::backward_and_check(loss, params).max_relative_error;
}

}  // namespace

TEST_CASE("affine matches the hand-computed products") {
  check_values(diff::affine(vec({1, 2}), mat(2, 2, {1, 0, 0, 1}), vec({0, 0})), {1, 2});
  check_values(diff::affine(vec({1, 1}), mat(2, 2, {2, 3, 4, 5}), vec({1, 1})), {7, 9});
  check_values(diff::affine(vec({0, 0, 0}), mat(3, 2, {4, -1, 2, 8, 3, 3}), vec({0.5, -2})), {0.5, -2});
  CHECK(thrown_kind([] { diff::affine(vec({1, 2, 3}), mat(2, 2, {1, 0, 0, 1}), vec({0, 0})); }) ==
        ErrorKind::dimension);
  const auto msg = test::thrown_message([] { diff::affine(vec({1, 2, 3}), mat(2, 2, {1, 0, 0, 1}), vec({0, 0})); });
  CHECK(msg.find("[3]") != std::string::npos);
  CHECK(msg.find("[2,2]") != std::string::npos);
}

TEST_CASE("relu values and subgradients") {
  check_values(diff::relu(vec({-1, 0, 2})), {0, 0, 2});
  check_values(diff::relu(vec({-3, -0.5})), {0, 0});
  auto x = TD::variable({3}, {2, -1, 0});
  test::probe(diff::relu(x), 1).backward();
  Rng rng(1);
  const auto w = test::random_values(rng, 3);
  CHECK(x.grad()[0] == doctest::Approx(w[0]));
  CHECK(x.grad()[1] == 0.0);
  CHECK(x.grad()[2] == 0.0);
}

TEST_CASE("softmax examples and stability") {
  check_values(diff::softmax(vec({0, 0, 0, 0})), {0.25, 0.25, 0.25, 0.25});
  const auto big = diff::softmax(vec({1000, 0}));
  CHECK(std::isfinite(big[0]));
  CHECK(big[0] == doctest::Approx(1.0));
  CHECK(big[1] == doctest::Approx(0.0));
  check_values(diff::softmax(vec({std::log(1.0), std::log(3.0)})), {0.25, 0.75});
}

TEST_CASE("softmax rows are distributions") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = test::random_constant(rng, {3, 7}, 5.0);
    const auto p = diff::softmax(x);
    for (std::size_t r = 0; r < 3; ++r) {
      double sum = 0;
      for (std::size_t c = 0; c < 7; ++c) {
        CHECK(p[r * 7 + c] >= 0.0);
        sum += p[r * 7 + c];
      }
      CHECK(std::abs(sum - 1.0) <= 1e-6);
    }
  }
}

TEST_CASE("layer_norm examples") {
  const auto ones = vec({1, 1}), zeros = vec({0, 0});
  check_values(diff::layer_norm(vec({3, 3}), ones, zeros), {0, 0});
  const auto y = diff::layer_norm(vec({0.25, 0.75}), ones, zeros);
  CHECK(y[0] == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(y[1] == doctest::Approx(1.0).epsilon(1e-3));
  check_values(diff::layer_norm(vec({5, -2, 7}), vec({0, 0, 0}), vec({0.5, 1, -1})), {0.5, 1, -1});
}

TEST_CASE("layer_norm output is standardized") {
  Rng rng(5);
  const std::size_t D = 16;
  const auto gain = TD::constant({D}, std::vector<double>(D, 1.0));
  const auto bias = TD::constant({D}, std::vector<double>(D, 0.0));
  for (int trial = 0; trial < 50; ++trial) {
    const auto y = diff::layer_norm(test::random_constant(rng, {4, D}, 3.0), gain, bias);
    for (std::size_t r = 0; r < 4; ++r) {
      double mean = 0, var = 0;
      for (std::size_t d = 0; d < D; ++d) mean += y[r * D + d];
      mean /= D;
      for (std::size_t d = 0; d < D; ++d) var += (y[r * D + d] - mean) * (y[r * D + d] - mean);
      var /= D;
      CHECK(std::abs(mean) <= 1e-6);
      CHECK(std::abs(var - 1.0) <= 1e-4);
    }
  }
}

TEST_CASE("dropout") {
  Rng rng(11);
  const auto x = test::random_constant(rng, {64}, 1.0);
  const auto same = diff::dropout(x, 0.0, diff::Mode::train, rng);
  CHECK(std::equal(same.values().begin(), same.values().end(), x.values().begin()));
  const auto eval = diff::dropout(x, 0.7, diff::Mode::eval, rng);
  CHECK(std::memcmp(eval.values().data(), x.values().data(), x.size() * sizeof(double)) == 0);

  SUBCASE("statistics at p = 0.2") {
    const std::size_t n = 200000;
    const auto ones = TD::constant({n}, std::vector<double>(n, 1.0));
    Rng r(2024);
    const auto y = diff::dropout(ones, 0.2, diff::Mode::train, r);
    std::size_t zeros = 0;
    double mean = 0;
    for (double v : y.values()) {
      zeros += v == 0.0;
      mean += v;
    }
    mean /= static_cast<double>(n);
    CHECK(std::abs(static_cast<double>(zeros) / n - 0.2) <= 0.02);
    CHECK(std::abs(mean - 1.0) <= 0.02);
    for (double v : y.values()) CHECK((v == 0.0 || std::abs(v - 1.25) < 1e-12));
  }

  CHECK(thrown_kind([&] { diff::dropout(x, 1.0, diff::Mode::train, rng); }) == ErrorKind::parameter);
  CHECK(thrown_kind([&] { diff::dropout(x, -0.1, diff::Mode::eval, rng); }) == ErrorKind::parameter);
}

TEST_CASE("masked_mean") {
  check_values(diff::masked_mean(mat(2, 2, {1, 3, 5, 7}), Mask::full(2)), {3, 5});
  check_values(diff::masked_mean(mat(1, 3, {4, 5, 6}), Mask::full(1)), {4, 5, 6});
  check_values(diff::masked_mean(mat(2, 2, {1, 1, 9, 9}), Mask({1, 0})), {1, 1});
  CHECK(thrown_kind([] { diff::masked_mean(mat(2, 2, {1, 1, 9, 9}), Mask({0, 0})); }) == ErrorKind::empty_sequence);
}

TEST_CASE("masked_mean is invariant to joint permutation of rows and mask") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t K = 2 + trial % 6, D = 3;
    const auto x = test::random_values(rng, K * D);
    std::vector<std::uint8_t> flags(K);
    for (auto& f : flags) f = static_cast<std::uint8_t>(rng() % 2);
    flags[rng() % K] = 1;
    std::vector<std::size_t> perm(K);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> px(K * D);
    std::vector<std::uint8_t> pf(K);
    for (std::size_t k = 0; k < K; ++k) {
      pf[k] = flags[perm[k]];
      for (std::size_t d = 0; d < D; ++d) px[k * D + d] = x[perm[k] * D + d];
    }
    const auto a = diff::masked_mean(mat(K, D, x), Mask(flags));
    const auto b = diff::masked_mean(mat(K, D, px), Mask(pf));
    CHECK(test::max_abs_diff(a.values(), b.values()) <= 1e-12);
  }
}

TEST_CASE("concat") {
  check_values(diff::concat<double>({vec({1, 2}), vec({3})}), {1, 2, 3});
  std::vector<TD> parts;
  for (int i = 0; i < 4; ++i) parts.push_back(TD::zeros({768}));
  CHECK(diff::concat(parts).shape() == Shape{3072});
  CHECK(thrown_kind([] { diff::concat<double>({mat(2, 1, {1, 2}), mat(3, 1, {1, 2, 3})}); }) == ErrorKind::dimension);

  auto a = TD::variable({2}, {1, 2});
  auto b = TD::variable({1}, {3});
  const auto g = TD::constant({3}, {0.5, -2, 7});
  const auto y = diff::concat<double>({a, b});
  diff::reshape(diff::matmul(diff::reshape(diff::mul(y, g), {1, 3}), TD::constant({3, 1}, {1, 1, 1})), {1})
      .backward();
  CHECK(a.grad()[0] == 0.5);
  CHECK(a.grad()[1] == -2);
  CHECK(b.grad()[0] == 7);
}

TEST_CASE("cross_entropy") {
  const std::size_t t0[] = {0}, t2[] = {2};
  CHECK(diff::cross_entropy(mat(1, 4, {0, 0, 0, 0}), t0).item() == doctest::Approx(std::log(4.0)));
  CHECK(diff::cross_entropy(mat(1, 2, {10, -10}), t0).item() == doctest::Approx(0.0).epsilon(1e-8));
  const double e1 = std::exp(1.0), e2 = std::exp(2.0), e3 = std::exp(3.0);
  CHECK(diff::cross_entropy(mat(1, 3, {1, 2, 3}), t2).item() == doctest::Approx(-std::log(e3 / (e1 + e2 + e3))));
  const std::size_t pair[] = {2, 0};
  CHECK(diff::cross_entropy(mat(2, 3, {1, 2, 3, 1, 2, 3}), pair).item() ==
        doctest::Approx((-std::log(e3 / (e1 + e2 + e3)) - std::log(e1 / (e1 + e2 + e3))) / 2));
  const std::size_t bad[] = {4};
  CHECK(thrown_kind([&] { diff::cross_entropy(mat(1, 4, {0, 0, 0, 0}), bad); }) == ErrorKind::label);
}

TEST_CASE("backward_and_check basics") {
  auto x = TD::variable({1}, {3.0});
  const auto r = diff::backward_and_check([&] { return diff::mul(x, x); }, {x});
  CHECK(r.gradients[0][0] == doctest::Approx(6.0));
  CHECK(r.max_relative_error <= 1e-8);

  Rng rng(23);
  const auto in = test::random_constant(rng, {3, 5});
  auto W = test::random_variable(rng, {5, 4});
  auto b = test::random_variable(rng, {4});
  const std::size_t targets[] = {1, 3, 0};
  CHECK(op_gradient_error([&] { return diff::cross_entropy(diff::affine(in, W, b), targets); }, {W, b}) <= 1e-6);

  auto v = TD::variable({2}, {1, 2});
  CHECK(thrown_kind([&] { diff::backward_and_check([&] { return diff::scale(v, 2.0); }, {v}); }) ==
        ErrorKind::contract);
  CHECK(thrown_kind([&] { diff::scale(v, 2.0).backward(); }) == ErrorKind::contract);
}

TEST_CASE("reverse-mode gradients match finite differences for every op") {
  Rng rng(31);
  const double tol = 1e-6;
  auto x = test::random_variable(rng, {3, 4});
  auto y = test::random_variable(rng, {3, 4});
  auto W = test::random_variable(rng, {4, 5});
  auto b = test::random_variable(rng, {5});
  auto B = test::random_variable(rng, {2, 4});
  auto row = test::random_variable(rng, {4});
  auto gain = test::random_variable(rng, {4});
  auto stack = test::random_variable(rng, {3, 2, 4});
  auto weights = TD::variable({3}, {0.7, 1.3, 0.4});

  SUBCASE("affine") { CHECK(op_gradient_error([&] { return test::probe(diff::affine(x, W, b)); }, {x, W, b}) <= tol); }
  SUBCASE("matmul") { CHECK(op_gradient_error([&] { return test::probe(diff::matmul(x, W)); }, {x, W}) <= tol); }
  SUBCASE("matmul_transposed") {
    CHECK(op_gradient_error([&] { return test::probe(diff::matmul_transposed(x, B)); }, {x, B}) <= tol);
  }
  SUBCASE("add") { CHECK(op_gradient_error([&] { return test::probe(diff::add(x, y)); }, {x, y}) <= tol); }
  SUBCASE("mul") { CHECK(op_gradient_error([&] { return test::probe(diff::mul(x, y)); }, {x, y}) <= tol); }
  SUBCASE("scale") { CHECK(op_gradient_error([&] { return test::probe(diff::scale(x, -1.7)); }, {x}) <= tol); }
  SUBCASE("add_row") { CHECK(op_gradient_error([&] { return test::probe(diff::add_row(x, row)); }, {x, row}) <= tol); }
  SUBCASE("reshape") { CHECK(op_gradient_error([&] { return test::probe(diff::reshape(x, {4, 3})); }, {x}) <= tol); }
  SUBCASE("relu") { CHECK(op_gradient_error([&] { return test::probe(diff::relu(x)); }, {x}) <= tol); }
  SUBCASE("softmax") { CHECK(op_gradient_error([&] { return test::probe(diff::softmax(x)); }, {x}) <= tol); }
  SUBCASE("layer_norm") {
    CHECK(op_gradient_error([&] { return test::probe(diff::layer_norm(x, gain, row)); }, {x, gain, row}) <= tol);
  }
  SUBCASE("dropout") {
    CHECK(op_gradient_error(
              [&] {
                Rng r(5);
                return test::probe(diff::dropout(x, 0.3, diff::Mode::train, r));
              },
              {x}) <= tol);
  }
  SUBCASE("masked_mean") {
    CHECK(op_gradient_error([&] { return test::probe(diff::masked_mean(x, Mask({1, 0, 1}))); }, {x}) <= tol);
  }
  SUBCASE("concat") {
    CHECK(op_gradient_error([&] { return test::probe(diff::concat<double>({x, y, x})); },
                            {x, y}) <= tol);
  }
  SUBCASE("slice_last") { CHECK(op_gradient_error([&] { return test::probe(diff::slice_last(x, 1, 2)); }, {x}) <= tol); }
  SUBCASE("cross_entropy") {
    const std::size_t targets[] = {0, 3, 2};
    CHECK(op_gradient_error([&] { return diff::cross_entropy(x, targets); }, {x}) <= tol);
  }
  SUBCASE("layer_weighted_average") {
    CHECK(op_gradient_error([&] { return test::probe(diff::layer_weighted_average(stack, weights)); },
                            {stack, weights}) <= tol);
  }
  SUBCASE("masked attention scores") {
    const auto bias = diff::mask_bias<double>(Mask({1, 0, 1, 1}));
    CHECK(op_gradient_error([&] { return test::probe(diff::softmax(diff::add_row(x, bias))); }, {x}) <= tol);
  }
}

TEST_CASE("layer_weighted_average guards degenerate weights") {
  const auto stack = TD::constant({2, 1, 2}, {1, 2, 3, 4});
  CHECK(thrown_kind([&] { diff::layer_weighted_average(stack, vec({1, -1})); }) == ErrorKind::numerical);
  CHECK(thrown_kind([&] { diff::layer_weighted_average(stack, vec({1, 1, 1})); }) == ErrorKind::dimension);
}

TEST_CASE("tensor invariants") {
  Rng rng(41);
  auto x = test::random_variable(rng, {2, 3});
  auto W = test::random_variable(rng, {3, 2});
  CHECK(x.size() == element_count(x.shape()));
  test::probe(diff::relu(diff::matmul(x, W))).backward();
  CHECK(x.grad().size() == x.size());
  CHECK(W.grad().size() == W.size());
  CHECK(thrown_kind([] { TD::constant({2, 2}, {1, 2, 3}); }) == ErrorKind::dimension);

  // Non-finite outputs never come from finite inputs, even at extreme scale.
  const auto big = test::random_constant(rng, {2, 6}, 1e4);
  const auto sm = diff::softmax(big);
  for (double v : sm.values()) CHECK(std::isfinite(v));
  const auto g = TD::constant({6}, std::vector<double>(6, 1.0)), z = TD::zeros({6});
  const auto ln = diff::layer_norm(big, g, z);
  for (double v : ln.values()) CHECK(std::isfinite(v));
}

TEST_CASE("leaf grads accumulate until zero_grad") {
  auto x = TD::variable({1}, {2.0});
  diff::mul(x, x).backward();
  diff::mul(x, x).backward();
  CHECK(x.grad()[0] == doctest::Approx(8.0));
  x.zero_grad();
  diff::scale(x, 3.0).backward();
  CHECK(x.grad()[0] == doctest::Approx(3.0));
}
