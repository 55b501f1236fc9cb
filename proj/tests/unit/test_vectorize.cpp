#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "topotrail/vectorize.hpp"

using namespace topotrail;

namespace {

LifetimeDiagram random_lifetimes(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> birth(0.0, 5.0), life(0.05, 3.0);
  PersistenceDiagram d;
  d.dim = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = birth(rng);
    d.pairs.push_back({1, b, b + life(rng)});
  }
  return lifetime_diagram(d);
}

}  // namespace

TEST_CASE("kernel weights and sigma") {
  const auto single = kernel(lifetime_diagram(make_diagram(1, {{1, 3}})), 10);
  CHECK(single.weights == std::vector<double>{1.0});
  CHECK(single.sigma == doctest::Approx(0.2));

  const auto two = kernel(lifetime_diagram(make_diagram(1, {{0, 1}, {0, 2}})), 10);
  CHECK(two.weights == std::vector<double>{0.5, 1.0});

  const auto flat = kernel(lifetime_diagram(make_diagram(1, {{0, 1}, {3, 4}, {5, 6}})), 4);
  for (double w : flat.weights) CHECK(w == 1.0);

  CHECK_THROWS_AS(kernel(LifetimeDiagram{}, 10), EmptyDiagramError);
  CHECK_THROWS_AS(kernel(lifetime_diagram(make_diagram(1, {{0, 1}})), 0), ValidationError);
}

TEST_CASE("density shape") {
  const auto k = kernel(lifetime_diagram(make_diagram(1, {{1, 3}})), 10);
  const double peak = eval_density(k, 1.0, 2.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const double v = eval_density(k, u(rng), u(rng));
    CHECK(v <= peak);
    CHECK(v >= 0.0);
  }
  CHECK(eval_density(k, 1.0 + 0.5 * k.sigma, 2.0) > 0.0);
  // exp(-25/2) ~ 3.7e-6
  CHECK(eval_density(k, 1.0 + 5 * k.sigma, 2.0) < 1e-5 * peak);
}

TEST_CASE("single centre over +-4 sigma with one cell") {
  const auto lt = lifetime_diagram(make_diagram(1, {{1, 3}}));
  const double sigma = 2.0 / 1;
  const ImageWindow w{1 - 4 * sigma, 1 + 4 * sigma, 2 - 4 * sigma, 2 + 4 * sigma};
  const auto img = persistence_image(lt, 1, 1e-3, w);
  const double one_axis = std::erf(4.0 / std::sqrt(2.0));
  CHECK(img.at(0, 0) == doctest::Approx(one_axis * one_axis).epsilon(1e-12));
  CHECK(img.at(0, 0) > 0.9998);
}

TEST_CASE("empty diagram gives zeros") {
  const auto img = persistence_image(LifetimeDiagram{}, 7, 1e-3);
  CHECK(img.cells.size() == 49);
  for (double c : img.cells) CHECK(c == 0.0);
  CHECK_THROWS_AS(persistence_image(LifetimeDiagram{}, 0, 1e-3), ValidationError);
  CHECK_THROWS_AS(persistence_image(LifetimeDiagram{}, 4, 1.0), ValidationError);
}

TEST_CASE("window captures at least 1 - delta of the weight") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const auto lt = random_lifetimes(rng, 1 + trial % 9);
    const auto k = kernel(lt, 20);
    const double total = k.total_weight();
    for (double delta : {1e-1, 1e-3, 1e-6}) {
      const auto img = persistence_image(lt, 20, delta);
      CHECK(img.sum() >= (1 - delta) * total);
      CHECK(img.sum() <= total * (1 + 1e-12));
      for (double c : img.cells) CHECK(c >= 0.0);
    }
  }
}

TEST_CASE("cells are exact to CDF precision") {
  std::mt19937_64 rng(12);
  const auto lt = random_lifetimes(rng, 6);
  const auto k = kernel(lt, 15);
  auto w = covering_window(k, 1e-3);
  w.birth_min -= 4 * k.sigma;
  w.birth_max += 4 * k.sigma;
  w.lifetime_min -= 4 * k.sigma;
  w.lifetime_max += 4 * k.sigma;
  const auto img = persistence_image(lt, 15, 1e-3, w);
  CHECK(std::abs(img.sum() - k.total_weight()) < 1e-9);
}

TEST_CASE("image ignores the order of diagram points") {
  PersistenceDiagram d = make_diagram(1, {{0.5, 2}, {1, 1.5}, {0.2, 3}, {2, 2.4}});
  const auto a = persistence_image(lifetime_diagram(d), 12, 1e-3);
  std::reverse(d.pairs.begin(), d.pairs.end());
  const auto b = persistence_image(lifetime_diagram(d), 12, 1e-3);
  CHECK(a == b);
}

TEST_CASE("scaling lifetimes scales sigma and window, not weights") {
  const auto d = make_diagram(1, {{0.5, 2}, {1, 1.5}, {0.2, 3}});
  const double lambda = 2.5;
  PersistenceDiagram scaled = d;
  for (auto& p : scaled.pairs) {
    p.birth *= lambda;
    p.death *= lambda;
  }
  const auto k1 = kernel(lifetime_diagram(d), 10);
  const auto k2 = kernel(lifetime_diagram(scaled), 10);
  CHECK(k2.sigma == doctest::Approx(lambda * k1.sigma));
  for (std::size_t i = 0; i < k1.weights.size(); ++i) {
    CHECK(k2.weights[i] == doctest::Approx(k1.weights[i]));
  }
  const auto w1 = covering_window(k1, 1e-3);
  const auto w2 = covering_window(k2, 1e-3);
  CHECK(w2.birth_min == doctest::Approx(lambda * w1.birth_min));
  CHECK(w2.birth_max == doctest::Approx(lambda * w1.birth_max));
  CHECK(w2.lifetime_min == doctest::Approx(lambda * w1.lifetime_min));
  CHECK(w2.lifetime_max == doctest::Approx(lambda * w1.lifetime_max));
}

TEST_CASE("cells agree with Monte-Carlo integration") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    const auto lt = random_lifetimes(rng, 3);
    const int m = 6;
    const auto img = persistence_image(lt, m, 1e-3);
    const auto k = kernel(lt, m);
    std::vector<oracle::DPt> centres;
    for (const auto& c : k.centers) centres.push_back({c.birth, c.lifetime});
    const auto& w = img.window;
    const double dx = (w.birth_max - w.birth_min) / m;
    const double dy = (w.lifetime_max - w.lifetime_min) / m;
    std::uniform_int_distribution<int> cell(0, m - 1);
    for (int c = 0; c < 4; ++c) {
      const int i = cell(rng), j = cell(rng);
      const auto est = oracle::monte_carlo(
          [&](double x, double y) { return oracle::density(centres, k.weights, k.sigma, x, y); },
          w.birth_min + i * dx, w.birth_min + (i + 1) * dx, w.lifetime_min + j * dy,
          w.lifetime_min + (j + 1) * dy, 20000, rng);
      CHECK(std::abs(img.at(i, j) - est.mean) <= 3 * est.std_error + 1e-12);
    }
  }
}

TEST_CASE("flatten and unflatten") {
  const auto img = unflatten(std::vector<double>{1, 2, 3, 4}, 2);
  CHECK(img.at(0, 1) == 2);
  CHECK(img.at(1, 0) == 3);
  CHECK(flatten(img) == std::vector<double>{1, 2, 3, 4});
  CHECK(unflatten(flatten(img), 2) == img);
  CHECK(flatten(persistence_image(LifetimeDiagram{}, 3, 1e-3)) == std::vector<double>(9, 0.0));
  CHECK_THROWS_AS(unflatten(std::vector<double>{1, 2, 3}, 2), ValidationError);
}

TEST_CASE("shared window") {
  const auto a = lifetime_diagram(make_diagram(1, {{0, 1}}));
  const auto b = lifetime_diagram(make_diagram(1, {{4, 7}}));
  const std::vector<ImageWindow> ws{*image_window(a, 8, 1e-3), *image_window(b, 8, 1e-3)};
  const auto u = *union_window(ws);
  const auto ia = persistence_image(a, 8, 1e-3, u);
  const auto ib = persistence_image(b, 8, 1e-3, u);
  CHECK(ia.window == ib.window);
  CHECK(ia.sum() >= 0.999 * 1.0);
  CHECK_FALSE(image_window(LifetimeDiagram{}, 8, 1e-3).has_value());
  CHECK_FALSE(union_window({}).has_value());
  // A window that misses the mass is rejected.
  CHECK_THROWS_AS(persistence_image(b, 8, 1e-3, ImageWindow{100, 101, 100, 101}),
                  ValidationError);
}

TEST_CASE("image exports") {
  const auto img = unflatten(std::vector<double>{0, 0.5, 1, 0.25}, 2);
  std::ostringstream pgm, csv;
  write_image_pgm(pgm, img);
  CHECK(pgm.str() == "P2\n2 2\n255\n0 128\n255 64\n");
  write_image_csv(csv, img);
  CHECK(csv.str() == "0,0.5\n1,0.25\n");
  std::ostringstream zero;
  write_image_pgm(zero, unflatten(std::vector<double>(4, 0.0), 2));
  CHECK(zero.str() == "P2\n2 2\n255\n0 0\n0 0\n");
}
