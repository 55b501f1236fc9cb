#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "topotrail/error.hpp"
#include "topotrail/learn.hpp"

using namespace topotrail;

namespace {

std::vector<LabeledSample> balanced(std::size_t n, std::size_t positives) {
  std::vector<LabeledSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({{static_cast<double>(i)}, i < positives ? 1 : 0});
  }
  return out;
}

std::vector<LabeledSample> noisy_blobs(std::mt19937_64& rng, std::size_t n, std::size_t d,
                                       double shift) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<LabeledSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    LabeledSample s;
    s.label = static_cast<int>(i % 2);
    for (std::size_t j = 0; j < d; ++j) s.features.push_back(g(rng) + (s.label ? shift : 0.0));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST_CASE("split sizes") {
  const auto s240 = balanced(240, 120);
  const auto a = train_test_split(s240, 0.65, 1);
  CHECK(a.train.size() == 156);
  CHECK(a.test.size() == 84);

  const auto s50 = balanced(50, 25);
  const auto b = train_test_split(s50, 0.65, 1);
  CHECK(b.train.size() == 33);
  CHECK(b.test.size() == 17);
}

TEST_CASE("split is a deterministic stratified partition") {
  const auto s = balanced(60, 20);
  const auto a = train_test_split(s, 0.65, 42);
  const auto b = train_test_split(s, 0.65, 42);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
  const auto c = train_test_split(s, 0.65, 43);
  CHECK(a.train != c.train);

  std::vector<int> seen(60, 0);
  for (auto i : a.train) ++seen[i];
  for (auto i : a.test) ++seen[i];
  for (int x : seen) CHECK(x == 1);
  CHECK(std::is_sorted(a.train.begin(), a.train.end()));
  CHECK(std::is_sorted(a.test.begin(), a.test.end()));

  // 39 train: 20 * 0.65 = 13 positives, 40 * 0.65 = 26 negatives.
  std::size_t pos = 0;
  for (auto i : a.train) pos += static_cast<std::size_t>(s[i].label);
  CHECK(pos == 13);
}

TEST_CASE("split errors") {
  const auto s = balanced(10, 1);
  CHECK_THROWS_AS(train_test_split(s, 0.65, 1), ValidationError);
  CHECK_THROWS_AS(train_test_split(balanced(10, 5), 0.0, 1), ValidationError);
  CHECK_THROWS_AS(train_test_split(balanced(10, 5), 1.0, 1), ValidationError);
  CHECK_THROWS_AS(train_test_split(balanced(1, 1), 0.5, 1), ValidationError);
  // A single-label dataset only needs both sides non-empty.
  CHECK(train_test_split(balanced(10, 0), 0.5, 1).train.size() == 5);
}

TEST_CASE("separable one-dimensional data") {
  std::vector<LabeledSample> s;
  for (int i = -10; i <= 10; ++i) {
    if (i != 0) s.push_back({{static_cast<double>(i)}, i > 0 ? 1 : 0});
  }
  const auto model = fit(s);
  CHECK(accuracy(model, s) == 1.0);
  CHECK(model.weights[0] > 0.0);
}

TEST_CASE("constant features give the penalised intercept-only optimum") {
  std::vector<LabeledSample> s;
  for (int i = 0; i < 30; ++i) s.push_back({{1.0, 2.0}, i < 21 ? 1 : 0});
  FitOptions opts;
  opts.tol = 1e-10;
  const auto model = fit(s, opts);
  CHECK(std::abs(model.weights[0]) < 1e-12);
  CHECK(std::abs(model.weights[1]) < 1e-12);
  const double c_star = oracle::golden_min(
      [](double c) {
        return 21 * std::log1p(std::exp(-c)) + 9 * std::log1p(std::exp(c));
      },
      -10.0, 10.0);
  CHECK(model.intercept == doctest::Approx(c_star).epsilon(1e-6));
  CHECK(model.intercept == doctest::Approx(std::log(0.7 / 0.3)).epsilon(1e-6));
}

TEST_CASE("gradient vanishes at the optimum") {
  std::mt19937_64 rng(3);
  const auto s = noisy_blobs(rng, 80, 4, 1.0);
  FitOptions opts;
  const auto model = fit(s, opts);
  std::vector<std::vector<double>> z;
  std::vector<int> y;
  for (const auto& x : s) {
    z.push_back(standardize(model, x.features));
    y.push_back(x.label);
  }
  LogisticObjective obj(z, y, opts.C);
  std::vector<double> p = model.weights;
  p.push_back(model.intercept);
  std::vector<double> g(obj.dimension());
  obj.value_and_gradient(p, g);
  for (double gi : g) CHECK(std::abs(gi) < opts.tol);
}

TEST_CASE("analytic gradient matches finite differences") {
  std::mt19937_64 rng(11);
  const auto s = noisy_blobs(rng, 40, 3, 0.7);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (const auto& v : s) {
    x.push_back(v.features);
    y.push_back(v.label);
  }
  LogisticObjective obj(x, y, 2.0);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> p(obj.dimension());
    for (auto& v : p) v = g(rng);
    std::vector<double> grad(obj.dimension());
    const double f = obj.value_and_gradient(p, grad);
    CHECK(f == doctest::Approx(obj.value(p)).epsilon(1e-14));
    const auto fd = oracle::fd_gradient([&](const std::vector<double>& q) { return obj.value(q); },
                                        p, 1e-5);
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(std::abs(grad[i] - fd[i]) <= 1e-5 * std::max(1.0, std::abs(fd[i])));
    }
  }
}

TEST_CASE("different starting points reach the same objective") {
  std::mt19937_64 rng(19);
  const auto s = noisy_blobs(rng, 60, 5, 0.8);
  FitOptions a, b;
  a.tol = b.tol = 1e-9;
  b.initial_params = std::vector<double>{3, -2, 1, 0.5, -4, 2};
  const auto ma = fit(s, a);
  const auto mb = fit(s, b);
  std::vector<std::vector<double>> z;
  std::vector<int> y;
  for (const auto& x : s) {
    z.push_back(standardize(ma, x.features));
    y.push_back(x.label);
  }
  LogisticObjective obj(z, y, 1.0);
  auto pa = ma.weights;
  pa.push_back(ma.intercept);
  auto pb = mb.weights;
  pb.push_back(mb.intercept);
  CHECK(std::abs(obj.value(pa) - obj.value(pb)) < 1e-6);
}

TEST_CASE("training accuracy does not rise as C shrinks") {
  std::mt19937_64 rng(23);
  const auto s = noisy_blobs(rng, 60, 3, 1.2);
  double previous = 2.0;
  for (double C : {10.0, 0.1, 0.001}) {
    FitOptions opts;
    opts.C = C;
    const double acc = accuracy(fit(s, opts), s);
    CHECK(acc <= previous);
    previous = acc;
  }
}

TEST_CASE("fit is deterministic and validates input") {
  std::mt19937_64 rng(29);
  const auto s = noisy_blobs(rng, 30, 2, 1.0);
  const auto a = fit(s);
  const auto b = fit(s);
  CHECK(a.weights == b.weights);
  CHECK(a.intercept == b.intercept);
  CHECK_THROWS_AS(fit(std::vector<LabeledSample>{}), ValidationError);
  CHECK_THROWS_AS(fit(balanced(5, 5)), ValidationError);
  FitOptions bad;
  bad.C = 0.0;
  CHECK_THROWS_AS(fit(s, bad), ValidationError);
  std::vector<LabeledSample> ragged{{{1.0}, 0}, {{1.0, 2.0}, 1}};
  CHECK_THROWS_AS(fit(ragged), ValidationError);
  std::vector<LabeledSample> nonfinite{{{NAN}, 0}, {{1.0}, 1}};
  CHECK_THROWS(fit(nonfinite));
}

TEST_CASE("predict") {
  LogisticModel zero;
  zero.weights = {0.0, 0.0};
  zero.mean = {0.0, 0.0};
  zero.scale = {1.0, 1.0};
  const auto p = predict(zero, std::vector<double>{3.0, -1.0});
  CHECK(p.probability == 0.5);
  CHECK(p.label == 1);

  LogisticModel big = zero;
  big.weights = {50.0, 0.0};
  CHECK(predict(big, std::vector<double>{10.0, 0.0}).probability == doctest::Approx(1.0));
  const auto q = predict(big, std::vector<double>{0.01, 0.0});
  LogisticModel flipped = big;
  flipped.weights = {-50.0, 0.0};
  CHECK(q.probability + predict(flipped, std::vector<double>{0.01, 0.0}).probability ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(predict(zero, std::vector<double>{1.0}), ValidationError);
}

TEST_CASE("accuracy counting") {
  LogisticModel m;
  m.weights = {1.0};
  m.mean = {0.0};
  m.scale = {1.0};
  std::vector<LabeledSample> right, wrong, half;
  for (int i = 0; i < 84; ++i) {
    const double x = i % 2 ? 1.0 : -1.0;
    right.push_back({{x}, i % 2});
    wrong.push_back({{x}, 1 - i % 2});
    half.push_back({{x}, i < 42 ? i % 2 : 1 - i % 2});
  }
  CHECK(accuracy(m, right) == 1.0);
  CHECK(accuracy(m, wrong) == 0.0);
  CHECK(accuracy(m, half) == 0.5);
  CHECK_THROWS_AS(accuracy(m, std::vector<LabeledSample>{}), ValidationError);
}

TEST_CASE("model json round trip") {
  std::mt19937_64 rng(31);
  const auto s = noisy_blobs(rng, 20, 3, 1.0);
  const auto m = fit(s);
  const auto back = model_from_json(model_to_json(m));
  CHECK(back.weights == m.weights);
  CHECK(back.intercept == m.intercept);
  CHECK(back.mean == m.mean);
  CHECK(back.scale == m.scale);
  CHECK(back.inverse_regularization == m.inverse_regularization);
  CHECK_THROWS_AS(model_from_json("{\"weights\": [1]}"), ValidationError);
  CHECK_THROWS_AS(model_from_json("not json"), ValidationError);
}
