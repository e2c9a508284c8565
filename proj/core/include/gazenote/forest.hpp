#pragma once

#include "gazenote/features.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gazenote {

enum class ClassWeighting { None, Balanced };

const char* class_weighting_name(ClassWeighting w);
ClassWeighting class_weighting_from_name(const std::string& name);

struct ForestConfig {
    int n_trees = 1000;
    int max_depth = 0;              // 0 = unlimited
    int min_samples_leaf = 1;
    int features_per_split = 4;     // ceil(sqrt(15))
    bool bootstrap = true;
    ClassWeighting class_weighting = ClassWeighting::Balanced;
    std::uint64_t seed = 0;
};

/// Flat node array; feature < 0 marks a leaf. Leaves keep raw class counts;
/// the per-tree class weights turn them into probabilities.
struct TreeNode {
    int feature = -1;
    double threshold = 0;
    int left = -1;
    int right = -1;
    double count0 = 0;
    double count1 = 0;

    bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
    double w0 = 1.0;    // class weights used while growing this tree
    double w1 = 1.0;
    std::vector<TreeNode> nodes;    // nodes[0] is the root
};

struct TrainedForest {
    ForestConfig config;
    std::vector<DecisionTree> trees;
    std::array<double, kFeatureCount> feature_importances{};    // sums to 1
};

struct TrainingSet {
    std::vector<std::array<double, kFeatureCount>> x;
    std::vector<int> y;     // 0 = NotAnnotated, 1 = Annotated
};

TrainingSet training_set_from_rows(std::span<const FeatureRow> rows);

/// Grows cfg.n_trees CART trees on bootstrap resamples (or the full data)
/// with Gini splits over features_per_split uniformly sampled features per
/// node. Per-tree seeds derive from cfg.seed by counter, so results do not
/// depend on scheduling; `jobs` only sets the worker thread count.
/// Throws EmptyData / SingleClassData.
TrainedForest train_forest(const TrainingSet& data, const ForestConfig& cfg, unsigned jobs = 1);

/// Probability of Annotated: mean over trees of the (weight-adjusted) leaf
/// class-1 fraction. The decision label is p >= 0.5.
double predict_proba(const TrainedForest& model, const std::array<double, kFeatureCount>& row);

/// Mean decrease in Gini impurity per feature, normalized to sum 1,
/// sorted descending with feature names.
std::vector<std::pair<std::string, double>> feature_importance(const TrainedForest& model);

/// Versioned text format; load(save(m)) reproduces identical predictions.
/// Throws VersionMismatch on a wrong version tag, CorruptModel otherwise.
void save_model(const TrainedForest& model, const std::filesystem::path& path);
TrainedForest load_model(const std::filesystem::path& path);

} // namespace gazenote
