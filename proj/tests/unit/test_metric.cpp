#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "topotrail/error.hpp"
#include "topotrail/hungarian.hpp"
#include "topotrail/metric.hpp"

using namespace topotrail;

namespace {

PersistenceDiagram random_diagram(std::mt19937_64& rng, std::size_t max_points) {
  std::uniform_int_distribution<std::size_t> size(0, max_points);
  std::uniform_real_distribution<double> birth(0.0, 4.0), life(0.01, 3.0);
  PersistenceDiagram d;
  d.dim = 1;
  const std::size_t n = size(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double b = birth(rng);
    d.pairs.push_back({1, b, b + life(rng)});
  }
  return d;
}

std::vector<oracle::DPt> to_oracle(const PersistenceDiagram& d) {
  std::vector<oracle::DPt> out;
  for (const auto& p : d.pairs) out.push_back({p.birth, p.death});
  return out;
}

}  // namespace

TEST_CASE("matching cost examples") {
  const auto a = make_diagram(1, {{0, 2}});
  const auto empty = make_diagram(1, {});
  CHECK(matching_cost(a, a, Matching{{{0, 0}}, {}, {}, 0}) == 0.0);
  CHECK(matching_cost(a, empty, Matching{{}, {0}, {}, 0}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(matching_cost(make_diagram(1, {{0, 1}}), make_diagram(1, {{0, 3}}),
                      Matching{{{0, 0}}, {}, {}, 0}) == 2.0);
  CHECK_THROWS_AS(matching_cost(a, empty, Matching{}), ValidationError);
  CHECK_THROWS_AS(matching_cost(a, a, Matching{{{0, 0}}, {0}, {}, 0}), ValidationError);
  CHECK_THROWS_AS(matching_cost(a, a, Matching{{{0, 1}}, {}, {}, 0}), ValidationError);
}

TEST_CASE("optimal matching examples") {
  const auto d = make_diagram(1, {{0, 2}, {1, 4}, {0.5, 0.9}});
  const auto self = optimal_partial_matching(d, d);
  CHECK(self.cost == 0.0);
  CHECK(self.pairs.size() == 3);

  // 1.98 matched versus (2 + 0.02) / sqrt(2) ~ 1.428 through the diagonal.
  const auto m = optimal_partial_matching(make_diagram(1, {{0, 2}}), make_diagram(1, {{0, 0.02}}));
  CHECK(m.pairs.empty());
  CHECK(m.u_to_diagonal == std::vector<std::size_t>{0});
  CHECK(m.v_to_diagonal == std::vector<std::size_t>{0});
  CHECK(m.cost == doctest::Approx(2.02 / std::sqrt(2.0)));

  std::mt19937_64 rng(5);
  PersistenceDiagram u, v;
  while (u.pairs.size() != 3) u = random_diagram(rng, 3);
  while (v.pairs.size() != 5) v = random_diagram(rng, 5);
  const auto best = optimal_partial_matching(u, v);
  CHECK(best.pairs.size() * 2 + best.u_to_diagonal.size() + best.v_to_diagonal.size() == 8);
  CHECK(best.cost == matching_cost(u, v, best));
  CHECK(best.cost == oracle::exhaustive_wasserstein(to_oracle(u), to_oracle(v)));
}

TEST_CASE("wasserstein examples") {
  const auto d = make_diagram(1, {{0, 2}, {1, 4}});
  CHECK(wasserstein(d, d) == 0.0);
  CHECK(wasserstein(make_diagram(1, {{0, 1}}), make_diagram(1, {})) ==
        doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(wasserstein(make_diagram(1, {}), make_diagram(1, {})) == 0.0);
  CHECK_THROWS_AS(wasserstein(make_diagram(0, {{0, 1}}), make_diagram(1, {{0, 1}})),
                  ValidationError);
  CHECK_THROWS_AS(wasserstein(make_diagram(1, {{0, kEssential}}), make_diagram(1, {})),
                  ValidationError);
}

TEST_CASE("hungarian cost equals exhaustive enumeration") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto u = random_diagram(rng, 5);
    const auto v = random_diagram(rng, 5);
    CHECK(wasserstein(u, v) == oracle::exhaustive_wasserstein(to_oracle(u), to_oracle(v)));
  }
}

TEST_CASE("assignment against permutation brute force") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> c(0.0, 10.0);
  for (std::size_t n = 1; n <= 6; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> cost(n * n);
      for (auto& x : cost) x = trial % 3 == 0 ? std::round(c(rng)) : c(rng);
      const auto assign = solve_assignment(cost, n);
      double got = 0.0;
      for (std::size_t i = 0; i < n; ++i) got += cost[i * n + assign[i]];
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      double best = INFINITY;
      do {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += cost[i * n + perm[i]];
        best = std::min(best, s);
      } while (std::next_permutation(perm.begin(), perm.end()));
      CHECK(got == doctest::Approx(best).epsilon(1e-12));
      std::vector<std::size_t> sorted = assign;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < n; ++i) CHECK(sorted[i] == i);
    }
  }
  CHECK(solve_assignment({}, 0).empty());
  std::vector<double> bad{0.0, NAN, 1.0, 2.0};
  CHECK_THROWS_AS(solve_assignment(bad, 2), ValidationError);
}

TEST_CASE("metric axioms") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_diagram(rng, 6);
    const auto b = random_diagram(rng, 6);
    const auto c = random_diagram(rng, 6);
    const double ab = wasserstein(a, b);
    CHECK(ab >= 0.0);
    CHECK(std::abs(ab - wasserstein(b, a)) <= 1e-9);
    CHECK(wasserstein(a, a) <= 1e-9);
    CHECK(wasserstein(a, c) <= ab + wasserstein(b, c) + 1e-9);
  }
}

TEST_CASE("diagram order does not change the distance") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    auto u = random_diagram(rng, 6);
    const auto v = random_diagram(rng, 6);
    const double before = wasserstein(u, v);
    std::shuffle(u.pairs.begin(), u.pairs.end(), rng);
    CHECK(wasserstein(u, v) == doctest::Approx(before).epsilon(1e-12));
  }
}

TEST_CASE("frechet energy") {
  const auto a = make_diagram(1, {{0, 1}});
  const auto b = make_diagram(1, {{0, 3}});
  CHECK(frechet_energy(a, std::vector<PersistenceDiagram>{a}) == 0.0);
  CHECK(frechet_energy(a, std::vector<PersistenceDiagram>{a, a}) == 0.0);
  CHECK(frechet_energy(a, std::vector<PersistenceDiagram>{a, b}) == doctest::Approx(4.0));
  CHECK_THROWS_AS(frechet_energy(a, {}), ValidationError);
}

TEST_CASE("barycenter of two single-point diagrams") {
  const std::vector<PersistenceDiagram> ds{make_diagram(1, {{0, 2}}), make_diagram(1, {{0, 4}})};
  // Energy of {(0, t)} is (t - 2)^2 + (t - 4)^2.
  const double t_star = oracle::golden_min(
      [](double t) { return (t - 2) * (t - 2) + (t - 4) * (t - 4); }, 0.0, 10.0);
  for (std::size_t init : {0u, 1u}) {
    BarycenterOptions opts;
    opts.init_index = init;
    const auto r = barycenter(ds, opts);
    REQUIRE(r.diagram.pairs.size() == 1);
    CHECK(r.diagram.pairs[0].birth == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(std::abs(r.diagram.pairs[0].death - t_star) < 1e-6);
    CHECK(r.energy == doctest::Approx(2.0));
    CHECK(r.energy == doctest::Approx(frechet_energy(r.diagram, ds)));
  }
}

TEST_CASE("identical diagrams are a fixed point") {
  const auto d = make_diagram(1, {{0, 2}, {1, 4}, {0.3, 0.8}});
  const std::vector<PersistenceDiagram> ds(4, d);
  const auto r = barycenter(ds);
  CHECK(r.energy == 0.0);
  CHECK(r.iterations == 1);
  CHECK(wasserstein(r.diagram, d) == 0.0);
}

TEST_CASE("barycenter energy never increases") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<PersistenceDiagram> ds;
    for (int i = 0; i < 3 + trial % 3; ++i) {
      PersistenceDiagram d;
      while (d.pairs.empty()) d = random_diagram(rng, 6);
      ds.push_back(d);
    }
    const auto r = barycenter(ds);
    REQUIRE_FALSE(r.energy_trace.empty());
    for (std::size_t i = 1; i < r.energy_trace.size(); ++i) {
      CHECK(r.energy_trace[i] <= r.energy_trace[i - 1]);
    }
    CHECK(r.energy <= frechet_energy(ds[median_size_index(ds)], ds) + 1e-12);
    CHECK(r.energy == doctest::Approx(frechet_energy(r.diagram, ds)).epsilon(1e-12));
    CHECK(r.iterations <= 100);
  }
  CHECK_THROWS_AS(barycenter({}), ValidationError);
}

TEST_CASE("median size initialisation") {
  const std::vector<PersistenceDiagram> ds{make_diagram(1, {{0, 1}, {0, 2}, {0, 3}}),
                                           make_diagram(1, {{0, 1}}),
                                           make_diagram(1, {{0, 1}, {0, 2}})};
  CHECK(median_size_index(ds) == 2);
  const std::vector<PersistenceDiagram> two{make_diagram(1, {{0, 1}, {0, 2}}),
                                            make_diagram(1, {{0, 1}})};
  CHECK(median_size_index(two) == 1);
}

TEST_CASE("wasserstein series") {
  const auto d = make_diagram(1, {{0, 2}});
  const auto e = make_diagram(1, {{0, 5}});
  CHECK(wasserstein_series(std::vector<PersistenceDiagram>{d, d, d}) ==
        std::vector<double>{0.0, 0.0});
  CHECK(wasserstein_series(std::vector<PersistenceDiagram>{d, e}) ==
        std::vector<double>{wasserstein(d, e)});
  CHECK_THROWS_AS(wasserstein_series(std::vector<PersistenceDiagram>{d}), ValidationError);

  std::ostringstream csv;
  const std::vector<double> s{0.0, 1.5};
  write_series_csv(csv, s);
  CHECK(csv.str() == "index,distance\n0,0\n1,1.5\n");
}

TEST_CASE("matching json") {
  Matching m{{{0, 1}}, {2}, {0}, 1.5};
  const auto j = nlohmann::json::parse(matching_to_json(m));
  CHECK(j["pairs"][0][0] == 0);
  CHECK(j["pairs"][0][1] == 1);
  CHECK(j["u_to_diagonal"][0] == 2);
  CHECK(j["v_to_diagonal"][0] == 0);
  CHECK(j["cost"] == 1.5);
}
