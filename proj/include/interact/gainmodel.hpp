#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <vector>

#include "json.hpp"

namespace interact::gainmodel {

using Matrix = std::vector<std::vector<double>>;

struct ForestParams {
  int n_trees = 200;
  std::optional<int> max_depth;  // unlimited when empty
  int min_samples_leaf = 2;
  std::optional<int> features_per_split;  // ceil(p/3) when empty
  bool bootstrap = true;
  std::uint64_t seed = 0;

  int resolved_features_per_split(std::size_t p) const;
  // Throws ConfigError.
  void validate(std::size_t p) const;
  bool operator==(const ForestParams&) const = default;
};

struct Node {
  int feature = -1;  // -1 for a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  bool operator==(const Node&) const = default;
};

struct Tree {
  std::vector<Node> nodes;  // nodes[0] is the root
  double predict(const std::vector<double>& row) const;
  std::size_t leaf_count() const;
  bool operator==(const Tree&) const = default;
};

struct ForestModel {
  std::size_t n_features = 0;
  ForestParams params;
  std::vector<Tree> trees;
  // Normalized variance-reduction shares; all zero when no split was made.
  std::vector<double> feature_importances;
  bool operator==(const ForestModel&) const = default;
};

// Deterministic in params.seed for any `threads` value. Throws DegenerateData
// (n < 2), NonFinite, ShapeMismatch (ragged X or |y| != n), ConfigError.
ForestModel fit(const Matrix& x, const std::vector<double>& y, const ForestParams& params,
                int threads = 1);
std::vector<double> predict(const ForestModel& model, const Matrix& x);  // ShapeMismatch

// 1 - SS_res/SS_tot; with SS_tot = 0 returns 1 if SS_res = 0 else 0.
double r2_score(const std::vector<double>& y_true, const std::vector<double>& y_pred);

// Fold id per row: a seeded shuffle dealt round-robin into k folds.
std::vector<int> kfold_assignment(std::size_t n, int k, std::uint64_t seed);

struct GridScore {
  ForestParams params;
  std::vector<double> fold_scores;
  double mean = 0.0;
};

struct CvResult {
  ForestParams best;
  std::vector<double> fold_scores;  // of the best point
  double mean_score = 0.0;
  std::vector<GridScore> grid;      // every point, in grid order
};

// Highest mean fold R^2 wins; ties go to fewer trees, then shallower depth.
// Throws TooFewRows when n < k or k < 2, ConfigError for an empty grid.
CvResult cross_validate(const Matrix& x, const std::vector<double>& y,
                        const std::vector<ForestParams>& grid, int k = 5, std::uint64_t seed = 0,
                        int threads = 1);

std::vector<ForestParams> default_grid(std::uint64_t seed = 0);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
// Seeded shuffle; the first round(n * test_fraction) rows (at least one) are held out.
Split train_test_split(std::size_t n, double test_fraction = 0.2, std::uint64_t seed = 0);
Matrix take_rows(const Matrix& x, const std::vector<std::size_t>& idx);
std::vector<double> take(const std::vector<double>& y, const std::vector<std::size_t>& idx);

// y = 10 sin(pi x1 x2) + 20 (x3 - 0.5)^2 + N(0, sigma), x ~ U[0,1]^p.
struct Dataset {
  Matrix x;
  std::vector<double> y;
};
Dataset synthetic_benchmark(std::size_t n, double sigma = 0.1, std::size_t p = 5,
                            std::uint64_t seed = 0);

inline constexpr int kModelFormatVersion = 1;
nlohmann::ordered_json to_json(const ForestModel& m);
ForestModel model_from_json(const nlohmann::json& j);  // ParseError
void save_model(const ForestModel& m, const std::filesystem::path& path);
ForestModel load_model(const std::filesystem::path& path);

}  // namespace interact::gainmodel
