#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "interact/errors.hpp"
#include "interact/gainmodel.hpp"
#include "test_support.hpp"

using namespace interact;
using namespace interact::gainmodel;

namespace {

Dataset unique_rows(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    d.x.push_back({static_cast<double>(i) + u(rng), u(rng), u(rng)});
    d.y.push_back(u(rng) * 10);
  }
  return d;
}

ForestParams single_tree() {
  ForestParams p;
  p.n_trees = 1;
  p.bootstrap = false;
  p.min_samples_leaf = 1;
  p.features_per_split = 3;
  return p;
}

}  // namespace

TEST_CASE("r2 score") {
  CHECK(r2_score({1, 2, 3}, {1, 2, 4}) == 0.5);
  CHECK(r2_score({1, 2, 3}, {1, 2, 3}) == 1.0);
  CHECK(r2_score({1, 2, 3}, {2, 2, 2}) == 0.0);
  CHECK(r2_score({4, 4}, {4, 4}) == 1.0);
  CHECK(r2_score({4, 4}, {4, 5}) == 0.0);
  CHECK_THROWS_AS(r2_score({1, 2}, {1}), LengthMismatch);
}

TEST_CASE("constant target gives single-leaf trees") {
  Matrix x{{1, 2}, {3, 4}, {5, 6}, {7, 8}};
  std::vector<double> y(4, 2.5);
  ForestParams p;
  p.n_trees = 10;
  auto m = fit(x, y, p);
  for (const auto& t : m.trees) CHECK(t.leaf_count() == 1);
  for (double v : predict(m, {{0, 0}, {100, -3}})) CHECK(v == 2.5);
  for (double v : m.feature_importances) CHECK(v == 0.0);
}

TEST_CASE("an unbootstrapped deep tree memorizes unique rows") {
  auto d = unique_rows(50, 3);
  auto m = fit(d.x, d.y, single_tree());
  CHECK(r2_score(d.y, predict(m, d.x)) == 1.0);
}

TEST_CASE("fits are deterministic") {
  auto d = synthetic_benchmark(120, 0.1, 5, 9);
  ForestParams p;
  p.n_trees = 20;
  p.seed = 11;
  auto probe = synthetic_benchmark(30, 0.1, 5, 10).x;
  auto a = fit(d.x, d.y, p);
  auto b = fit(d.x, d.y, p);
  auto c = fit(d.x, d.y, p, 3);
  CHECK(a == b);
  CHECK(a == c);
  CHECK(predict(a, probe) == predict(b, probe));
}

TEST_CASE("predictions stay within the training range") {
  auto d = synthetic_benchmark(80, 0.5, 5, 1);
  ForestParams p;
  p.n_trees = 15;
  auto m = fit(d.x, d.y, p);
  auto [lo, hi] = std::minmax_element(d.y.begin(), d.y.end());
  for (double v : predict(m, synthetic_benchmark(50, 0.5, 5, 2).x)) {
    CHECK(v >= *lo);
    CHECK(v <= *hi);
  }
}

TEST_CASE("leaf values are averaged across trees") {
  ForestModel m;
  m.n_features = 1;
  Tree zero, one;
  zero.nodes = {Node{-1, 0, -1, -1, 0.0}};
  one.nodes = {Node{-1, 0, -1, -1, 1.0}};
  m.trees = {zero, one};
  CHECK(predict(m, {{42.0}}) == std::vector<double>{0.5});
  ForestModel leaf;
  leaf.n_features = 2;
  leaf.trees = {one};
  CHECK(predict(leaf, {{-7.0, 3.0}}) == std::vector<double>{1.0});
  CHECK_THROWS_AS(predict(leaf, {{1.0}}), ShapeMismatch);
}

TEST_CASE("importances are nonnegative and sum to one") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto d = synthetic_benchmark(60, 0.1, 5, seed);
    ForestParams p;
    p.n_trees = 10;
    p.seed = seed;
    auto m = fit(d.x, d.y, p);
    double sum = 0;
    for (double v : m.feature_importances) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0));
  }
}

TEST_CASE("single-tree fits do not depend on row order") {
  auto d = synthetic_benchmark(60, 0.1, 5, 4);
  auto p = single_tree();
  p.min_samples_leaf = 2;
  auto m = fit(d.x, d.y, p);
  std::vector<std::size_t> perm(d.y.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(99));
  auto shuffled = fit(take_rows(d.x, perm), take(d.y, perm), p);
  CHECK(shuffled == m);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(fit({{1.0}}, {1.0}, ForestParams{}), DegenerateData);
  CHECK_THROWS_AS(fit({{1.0}, {2.0, 3.0}}, {1.0, 2.0}, ForestParams{}), ShapeMismatch);
  CHECK_THROWS_AS(fit({{1.0}, {2.0}}, {1.0}, ForestParams{}), ShapeMismatch);
  CHECK_THROWS_AS(fit({{1.0}, {NAN}}, {1.0, 2.0}, ForestParams{}), NonFinite);
  ForestParams bad;
  bad.n_trees = 0;
  CHECK_THROWS_AS(fit({{1.0}, {2.0}}, {1.0, 2.0}, bad), ConfigError);
}

TEST_CASE("fold assignment") {
  auto a = kfold_assignment(23, 5, 7);
  CHECK(a == kfold_assignment(23, 5, 7));
  std::vector<int> sizes(5);
  for (int f : a) ++sizes[static_cast<std::size_t>(f)];
  for (int s : sizes) CHECK((s == 4 || s == 5));
}

TEST_CASE("cross validation") {
  auto d = synthetic_benchmark(60, 0.1, 5, 3);
  ForestParams only;
  only.n_trees = 5;
  auto res = cross_validate(d.x, d.y, {only}, 5, 0);
  CHECK(res.best == only);
  CHECK(res.fold_scores.size() == 5);
  CHECK(res.grid.size() == 1);
  CHECK(res.mean_score == doctest::Approx(
      std::accumulate(res.fold_scores.begin(), res.fold_scores.end(), 0.0) / 5));

  CHECK_THROWS_AS(cross_validate(d.x, d.y, {}, 5), ConfigError);
  CHECK_THROWS_AS(cross_validate({{1.0}, {2.0}}, {1.0, 2.0}, {only}, 5), TooFewRows);
}

TEST_CASE("deep grid point beats a stump on a linear target") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> noise(0, 0.05);
  Matrix x;
  std::vector<double> y;
  for (int i = 0; i < 150; ++i) {
    x.push_back({u(rng), u(rng)});
    y.push_back(3 * x.back()[0] + noise(rng));
  }
  ForestParams stump, deep;
  stump.n_trees = deep.n_trees = 30;
  stump.max_depth = 1;
  auto res = cross_validate(x, y, {stump, deep}, 5, 0);
  CHECK(res.grid[1].mean > res.grid[0].mean);
  CHECK(res.best == deep);
}

TEST_CASE("train/test split") {
  auto s = train_test_split(10, 0.2, 3);
  CHECK(s.test.size() == 2);
  CHECK(s.train.size() == 8);
  CHECK(std::is_sorted(s.test.begin(), s.test.end()));
  std::vector<std::size_t> all = s.train;
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < 10; ++i) CHECK(all[i] == i);
}

TEST_CASE("benchmark accuracy with default parameters") {
  auto start = std::chrono::steady_clock::now();
  auto d = synthetic_benchmark(500, 0.1, 5, 42);
  auto split = train_test_split(500, 0.2, 7);
  auto m = fit(take_rows(d.x, split.train), take(d.y, split.train), ForestParams{});
  double r2 = r2_score(take(d.y, split.test), predict(m, take_rows(d.x, split.test)));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  MESSAGE("held-out R2 " << r2 << " in " << secs << " s");
  CHECK(r2 >= 0.8);
  CHECK(secs < 30.0);
}

TEST_CASE("model json round trip") {
  TempDir tmp;
  auto d = synthetic_benchmark(50, 0.1, 5, 8);
  ForestParams p;
  p.n_trees = 4;
  p.max_depth = 3;
  auto m = fit(d.x, d.y, p);
  save_model(m, tmp.path / "model.json");
  auto back = load_model(tmp.path / "model.json");
  CHECK(back == m);
  CHECK(predict(back, d.x) == predict(m, d.x));
  auto j = to_json(m);
  j["version"] = 99;
  CHECK_THROWS_AS(model_from_json(j), ParseError);
  auto broken = to_json(m);
  broken["trees"][0]["left"][0] = 1000;
  CHECK_THROWS_AS(model_from_json(broken), ParseError);
}
