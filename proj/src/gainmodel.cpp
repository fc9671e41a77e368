#include "interact/gainmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

#include "interact/errors.hpp"

namespace interact::gainmodel {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t x = seed ^ (index + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Builder {
  const Matrix& x;
  const std::vector<double>& y;
  const ForestParams& params;
  std::size_t p;
  int mtry;
  std::mt19937_64 rng;
  Tree tree;
  std::vector<double> importance;

  int leaf(double value) {
    Node n;
    n.value = value;
    tree.nodes.push_back(n);
    return static_cast<int>(tree.nodes.size()) - 1;
  }

  int build(std::vector<std::size_t> idx, int depth) {
    const std::size_t n = idx.size();
    double sum = 0;
    for (auto i : idx) sum += y[i];
    const double mean = sum / static_cast<double>(n);
    const std::size_t min_leaf = static_cast<std::size_t>(params.min_samples_leaf);
    bool constant = std::all_of(idx.begin(), idx.end(), [&](auto i) { return y[i] == y[idx[0]]; });
    if (constant || n < 2 * min_leaf || (params.max_depth && depth >= *params.max_depth))
      return leaf(mean);

    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> order = idx;
    auto scan = [&](std::size_t f) {
      std::sort(order.begin(), order.end(), [&](auto a, auto b) {
        return x[a][f] != x[b][f] ? x[a][f] < x[b][f] : y[a] < y[b];
      });
      double left_sum = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_sum += y[order[i]];
        const std::size_t nl = i + 1, nr = n - nl;
        const double xa = x[order[i]][f], xb = x[order[i + 1]][f];
        if (xa == xb || nl < min_leaf || nr < min_leaf) continue;
        const double ml = left_sum / static_cast<double>(nl);
        const double mr = (sum - left_sum) / static_cast<double>(nr);
        const double gain = static_cast<double>(nl) * static_cast<double>(nr) /
                            static_cast<double>(n) * (ml - mr) * (ml - mr);
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_threshold = xa + (xb - xa) / 2.0;
        }
      }
    };

    // mtry features by partial Fisher-Yates, scanned in index order so ties
    // go to the lowest feature. If none of them admits a split, the draw
    // continues one feature at a time until one does.
    std::vector<std::size_t> features(p);
    std::iota(features.begin(), features.end(), 0);
    const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(mtry), p);
    auto draw = [&](std::size_t i) {
      std::uniform_int_distribution<std::size_t> pick(i, p - 1);
      std::swap(features[i], features[pick(rng)]);
    };
    if (m < p)
      for (std::size_t i = 0; i < m; ++i) draw(i);
    std::vector<std::size_t> first(features.begin(), features.begin() + static_cast<long>(m));
    std::sort(first.begin(), first.end());
    for (auto f : first) scan(f);
    for (std::size_t i = m; i < p && best_feature < 0; ++i) {
      draw(i);
      scan(features[i]);
    }
    if (best_feature < 0) return leaf(mean);

    importance[best_feature] += best_gain;
    std::vector<std::size_t> left, right;
    for (auto i : idx) (x[i][best_feature] <= best_threshold ? left : right).push_back(i);
    Node node;
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.value = mean;
    tree.nodes.push_back(node);
    const int self = static_cast<int>(tree.nodes.size()) - 1;
    const int l = build(std::move(left), depth + 1);
    const int r = build(std::move(right), depth + 1);
    tree.nodes[self].left = l;
    tree.nodes[self].right = r;
    return self;
  }
};

void check_matrix(const Matrix& x, std::size_t p) {
  for (const auto& row : x)
    if (row.size() != p) throw ShapeMismatch("every row must have " + std::to_string(p) + " columns");
}

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers = std::clamp<std::size_t>(threads < 1 ? 1 : threads, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

int ForestParams::resolved_features_per_split(std::size_t p) const {
  if (features_per_split) return *features_per_split;
  return std::max(1, static_cast<int>((p + 2) / 3));
}

void ForestParams::validate(std::size_t p) const {
  if (n_trees < 1) throw ConfigError("n_trees must be >= 1");
  if (min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be >= 1");
  if (max_depth && *max_depth < 0) throw ConfigError("max_depth must be >= 0");
  int m = resolved_features_per_split(p);
  if (m < 1 || static_cast<std::size_t>(m) > std::max<std::size_t>(p, 1))
    throw ConfigError("features_per_split must be in [1, p]");
}

double Tree::predict(const std::vector<double>& row) const {
  int i = 0;
  while (nodes[i].feature >= 0) i = row[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
  return nodes[i].value;
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.feature < 0; }));
}

ForestModel fit(const Matrix& x, const std::vector<double>& y, const ForestParams& params, int threads) {
  if (x.size() < 2) throw DegenerateData("at least two rows are needed to fit");
  if (y.size() != x.size()) throw ShapeMismatch("labels and rows differ in length");
  const std::size_t p = x.front().size();
  if (p == 0) throw ShapeMismatch("rows have no columns");
  check_matrix(x, p);
  for (const auto& row : x)
    for (double v : row)
      if (!std::isfinite(v)) throw NonFinite("feature matrix holds a non-finite value");
  for (double v : y)
    if (!std::isfinite(v)) throw NonFinite("labels hold a non-finite value");
  params.validate(p);

  ForestModel model;
  model.n_features = p;
  model.params = params;
  model.trees.resize(params.n_trees);
  std::vector<std::vector<double>> importances(params.n_trees);
  const std::size_t n = x.size();

  parallel_for(params.n_trees, threads, [&](std::size_t t) {
    Builder b{x, y, params, p, params.resolved_features_per_split(p),
              std::mt19937_64(mix(params.seed, t)), {}, std::vector<double>(p, 0.0)};
    std::vector<std::size_t> idx(n);
    if (params.bootstrap) {
      std::uniform_int_distribution<std::size_t> draw(0, n - 1);
      for (auto& i : idx) i = draw(b.rng);
    } else {
      std::iota(idx.begin(), idx.end(), 0);
    }
    // Canonical row order: node sums, and therefore the tree, do not depend
    // on how the caller ordered the rows.
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
      if (x[a] != x[b]) return x[a] < x[b];
      if (y[a] != y[b]) return y[a] < y[b];
      return a < b;
    });
    b.build(std::move(idx), 0);
    model.trees[t] = std::move(b.tree);
    importances[t] = std::move(b.importance);
  });

  model.feature_importances.assign(p, 0.0);
  for (const auto& imp : importances)
    for (std::size_t f = 0; f < p; ++f) model.feature_importances[f] += imp[f];
  double total = std::accumulate(model.feature_importances.begin(), model.feature_importances.end(), 0.0);
  if (total > 0)
    for (auto& v : model.feature_importances) v /= total;
  return model;
}

std::vector<double> predict(const ForestModel& model, const Matrix& x) {
  check_matrix(x, model.n_features);
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& row : x) {
    double s = 0;
    for (const auto& t : model.trees) s += t.predict(row);
    out.push_back(s / static_cast<double>(model.trees.size()));
  }
  return out;
}

double r2_score(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
  if (y_true.size() != y_pred.size()) throw LengthMismatch("y_true and y_pred differ in length");
  if (y_true.empty()) throw LengthMismatch("r2_score needs at least one value");
  double mean = std::accumulate(y_true.begin(), y_true.end(), 0.0) / static_cast<double>(y_true.size());
  double ss_tot = 0, ss_res = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
    ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
  }
  if (ss_tot == 0) return ss_res == 0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

std::vector<int> kfold_assignment(std::size_t n, int k, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> fold(n);
  for (std::size_t i = 0; i < n; ++i) fold[perm[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  return fold;
}

CvResult cross_validate(const Matrix& x, const std::vector<double>& y,
                        const std::vector<ForestParams>& grid, int k, std::uint64_t seed, int threads) {
  if (grid.empty()) throw ConfigError("cross-validation grid is empty");
  if (k < 2 || x.size() < static_cast<std::size_t>(k))
    throw TooFewRows("cross-validation needs at least k >= 2 rows (have " + std::to_string(x.size()) + ")");
  if (y.size() != x.size()) throw ShapeMismatch("labels and rows differ in length");
  const auto fold = kfold_assignment(x.size(), k, seed);

  CvResult result;
  for (const auto& params : grid) {
    GridScore gs{params, {}, 0.0};
    for (int f = 0; f < k; ++f) {
      std::vector<std::size_t> train, test;
      for (std::size_t i = 0; i < x.size(); ++i) (fold[i] == f ? test : train).push_back(i);
      auto model = fit(take_rows(x, train), take(y, train), params, threads);
      gs.fold_scores.push_back(r2_score(take(y, test), predict(model, take_rows(x, test))));
    }
    gs.mean = std::accumulate(gs.fold_scores.begin(), gs.fold_scores.end(), 0.0) / k;
    result.grid.push_back(std::move(gs));
  }

  auto depth = [](const ForestParams& p) { return p.max_depth.value_or(std::numeric_limits<int>::max()); };
  const GridScore* best = &result.grid.front();
  for (const auto& g : result.grid) {
    bool better = g.mean > best->mean ||
                  (g.mean == best->mean &&
                   (g.params.n_trees < best->params.n_trees ||
                    (g.params.n_trees == best->params.n_trees && depth(g.params) < depth(best->params))));
    if (better) best = &g;
  }
  result.best = best->params;
  result.fold_scores = best->fold_scores;
  result.mean_score = best->mean;
  return result;
}

std::vector<ForestParams> default_grid(std::uint64_t seed) {
  std::vector<ForestParams> grid;
  for (int trees : {100, 200})
    for (std::optional<int> depth : {std::optional<int>(4), std::optional<int>(8), std::optional<int>()}) {
      ForestParams p;
      p.n_trees = trees;
      p.max_depth = depth;
      p.seed = seed;
      grid.push_back(p);
    }
  return grid;
}

Split train_test_split(std::size_t n, double test_fraction, std::uint64_t seed) {
  if (n < 2) throw TooFewRows("a held-out split needs at least two rows");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test_fraction must be in (0, 1)");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::size_t n_test = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction)), 1, n - 1);
  Split s;
  s.test.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  s.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

Matrix take_rows(const Matrix& x, const std::vector<std::size_t>& idx) {
  Matrix out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(x.at(i));
  return out;
}

std::vector<double> take(const std::vector<double>& y, const std::vector<std::size_t>& idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(y.at(i));
  return out;
}

Dataset synthetic_benchmark(std::size_t n, double sigma, std::size_t p, std::uint64_t seed) {
  if (p < 3) throw ConfigError("the synthetic benchmark needs at least three features");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, sigma);
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(p);
    for (auto& v : row) v = u(rng);
    d.y.push_back(10.0 * std::sin(M_PI * row[0] * row[1]) + 20.0 * (row[2] - 0.5) * (row[2] - 0.5) +
                  noise(rng));
    d.x.push_back(std::move(row));
  }
  return d;
}

nlohmann::ordered_json to_json(const ForestModel& m) {
  nlohmann::ordered_json j;
  j["format"] = "interact-forest";
  j["version"] = kModelFormatVersion;
  j["n_features"] = m.n_features;
  nlohmann::ordered_json p;
  p["n_trees"] = m.params.n_trees;
  p["max_depth"] = m.params.max_depth ? nlohmann::ordered_json(*m.params.max_depth) : nullptr;
  p["min_samples_leaf"] = m.params.min_samples_leaf;
  p["features_per_split"] =
      m.params.features_per_split ? nlohmann::ordered_json(*m.params.features_per_split) : nullptr;
  p["bootstrap"] = m.params.bootstrap;
  p["seed"] = m.params.seed;
  j["params"] = std::move(p);
  j["feature_importances"] = m.feature_importances;
  auto trees = nlohmann::ordered_json::array();
  for (const auto& t : m.trees) {
    nlohmann::ordered_json tj;
    std::vector<int> feature, left, right;
    std::vector<double> threshold, value;
    for (const auto& n : t.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      value.push_back(n.value);
    }
    tj["feature"] = feature;
    tj["threshold"] = threshold;
    tj["left"] = left;
    tj["right"] = right;
    tj["value"] = value;
    trees.push_back(std::move(tj));
  }
  j["trees"] = std::move(trees);
  return j;
}

ForestModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "interact-forest") throw ParseError("not a forest model file");
    if (j.at("version").get<int>() != kModelFormatVersion)
      throw ParseError("unsupported model version " + j.at("version").dump());
    ForestModel m;
    m.n_features = j.at("n_features").get<std::size_t>();
    const auto& p = j.at("params");
    m.params.n_trees = p.at("n_trees").get<int>();
    if (!p.at("max_depth").is_null()) m.params.max_depth = p["max_depth"].get<int>();
    m.params.min_samples_leaf = p.at("min_samples_leaf").get<int>();
    if (!p.at("features_per_split").is_null()) m.params.features_per_split = p["features_per_split"].get<int>();
    m.params.bootstrap = p.at("bootstrap").get<bool>();
    m.params.seed = p.at("seed").get<std::uint64_t>();
    m.feature_importances = j.at("feature_importances").get<std::vector<double>>();
    for (const auto& tj : j.at("trees")) {
      auto feature = tj.at("feature").get<std::vector<int>>();
      auto threshold = tj.at("threshold").get<std::vector<double>>();
      auto left = tj.at("left").get<std::vector<int>>();
      auto right = tj.at("right").get<std::vector<int>>();
      auto value = tj.at("value").get<std::vector<double>>();
      const std::size_t n = feature.size();
      if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n || value.size() != n)
        throw ParseError("tree arrays differ in length");
      Tree t;
      for (std::size_t i = 0; i < n; ++i) {
        if (feature[i] >= static_cast<int>(m.n_features) ||
            (feature[i] >= 0 && (left[i] <= static_cast<int>(i) || right[i] <= static_cast<int>(i) ||
                                 left[i] >= static_cast<int>(n) || right[i] >= static_cast<int>(n))))
          throw ParseError("tree node " + std::to_string(i) + " is malformed");
        t.nodes.push_back({feature[i], threshold[i], left[i], right[i], value[i]});
      }
      m.trees.push_back(std::move(t));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
}

void save_model(const ForestModel& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << to_json(m).dump() << '\n';
}

ForestModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return model_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace interact::gainmodel
