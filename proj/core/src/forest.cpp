#include "gazenote/forest.hpp"

#include "gazenote/csv.hpp"
#include "gazenote/errors.hpp"
#include "gazenote/parallel.hpp"
#include "gazenote/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gazenote {

const char* class_weighting_name(ClassWeighting w) {
    return w == ClassWeighting::Balanced ? "balanced" : "none";
}

ClassWeighting class_weighting_from_name(const std::string& name) {
    if (name == "balanced") return ClassWeighting::Balanced;
    if (name == "none") return ClassWeighting::None;
    throw ConfigError("unknown class_weighting '" + name + "'");
}

TrainingSet training_set_from_rows(std::span<const FeatureRow> rows) {
    TrainingSet data;
    for (const auto& row : rows) {
        if (row.vec.label == NoteLabel::Unknown) continue;
        data.x.push_back(row.vec.f);
        data.y.push_back(row.vec.label == NoteLabel::Annotated ? 1 : 0);
    }
    return data;
}

namespace {

double gini(double w0, double w1) {
    const double total = w0 + w1;
    if (total <= 0) return 0;
    const double p0 = w0 / total;
    const double p1 = w1 / total;
    return 1.0 - p0 * p0 - p1 * p1;
}

/// Grows one CART tree on a fixed index sample. All randomness comes from
/// the Rng handed in; with features_per_split == 15 no random draws happen
/// at all, which keeps the single-tree reference comparison exact.
class TreeBuilder {
public:
    TreeBuilder(const TrainingSet& data, const ForestConfig& cfg, DecisionTree& tree,
                std::array<double, kFeatureCount>& importance, Rng& rng)
        : data_(data), cfg_(cfg), tree_(tree), importance_(importance), rng_(rng) {}

    void build(std::vector<int> indices) {
        indices_ = std::move(indices);
        std::size_t c0 = 0, c1 = 0;
        for (int i : indices_) (data_.y[i] == 0 ? c0 : c1)++;
        if (cfg_.class_weighting == ClassWeighting::Balanced) {
            const double n = static_cast<double>(indices_.size());
            tree_.w0 = c0 > 0 ? n / (2.0 * static_cast<double>(c0)) : 0.0;
            tree_.w1 = c1 > 0 ? n / (2.0 * static_cast<double>(c1)) : 0.0;
        } else {
            tree_.w0 = tree_.w1 = 1.0;
        }
        root_weight_ = tree_.w0 * static_cast<double>(c0) + tree_.w1 * static_cast<double>(c1);
        grow(0, indices_.size(), 0);
    }

private:
    struct Split {
        bool found = false;
        int feature = 0;
        double threshold = 0;
        double gain = 0;
    };

    int grow(std::size_t lo, std::size_t hi, int depth) {
        std::size_t c0 = 0, c1 = 0;
        for (std::size_t k = lo; k < hi; ++k) (data_.y[indices_[k]] == 0 ? c0 : c1)++;

        const int node_id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.push_back(TreeNode{});
        tree_.nodes[node_id].count0 = static_cast<double>(c0);
        tree_.nodes[node_id].count1 = static_cast<double>(c1);

        const bool pure = c0 == 0 || c1 == 0;
        const bool depth_capped = cfg_.max_depth > 0 && depth >= cfg_.max_depth;
        const bool too_small =
            hi - lo < 2 * static_cast<std::size_t>(std::max(1, cfg_.min_samples_leaf));
        if (pure || depth_capped || too_small) return node_id;

        const Split split = best_split(lo, hi, c0, c1);
        if (!split.found) return node_id;

        importance_[split.feature] += split.gain / root_weight_;

        const auto mid_it = std::partition(
            indices_.begin() + static_cast<std::ptrdiff_t>(lo),
            indices_.begin() + static_cast<std::ptrdiff_t>(hi),
            [&](int i) { return data_.x[i][split.feature] <= split.threshold; });
        const std::size_t mid = static_cast<std::size_t>(mid_it - indices_.begin());

        // fill split fields after growing children: grow() may reallocate nodes
        const int left = grow(lo, mid, depth + 1);
        const int right = grow(mid, hi, depth + 1);
        TreeNode& node = tree_.nodes[node_id];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left;
        node.right = right;
        return node_id;
    }

    Split best_split(std::size_t lo, std::size_t hi, std::size_t c0, std::size_t c1) {
        // candidate features, ascending so exact gain ties resolve to the
        // lowest feature index, then the lowest threshold
        int feats[kFeatureCount];
        std::iota(feats, feats + kFeatureCount, 0);
        int n_feats = static_cast<int>(kFeatureCount);
        const int mtry = std::clamp(cfg_.features_per_split, 1, n_feats);
        if (mtry < n_feats) {
            for (int i = 0; i < mtry; ++i) {
                const int j = i + static_cast<int>(rng_.below(
                                      static_cast<std::uint64_t>(n_feats - i)));
                std::swap(feats[i], feats[j]);
            }
            std::sort(feats, feats + mtry);
            n_feats = mtry;
        }

        const double w0 = tree_.w0, w1 = tree_.w1;
        const double parent_w = w0 * static_cast<double>(c0) + w1 * static_cast<double>(c1);
        const double parent_cost = parent_w * gini(w0 * static_cast<double>(c0),
                                                   w1 * static_cast<double>(c1));
        const std::size_t msl = static_cast<std::size_t>(std::max(1, cfg_.min_samples_leaf));

        Split best;
        std::vector<std::pair<double, int>> values;  // (feature value, class)
        values.reserve(hi - lo);
        for (int f = 0; f < n_feats; ++f) {
            const int feature = feats[f];
            values.clear();
            for (std::size_t k = lo; k < hi; ++k)
                values.emplace_back(data_.x[indices_[k]][feature], data_.y[indices_[k]]);
            std::sort(values.begin(), values.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (values.front().first == values.back().first) continue;  // constant feature

            std::size_t left0 = 0, left1 = 0;
            for (std::size_t k = 0; k + 1 < values.size(); ++k) {
                (values[k].second == 0 ? left0 : left1)++;
                if (values[k].first == values[k + 1].first) continue;  // not a class boundary
                const std::size_t left_n = k + 1;
                const std::size_t right_n = values.size() - left_n;
                if (left_n < msl || right_n < msl) continue;
                const std::size_t right0 = c0 - left0;
                const std::size_t right1 = c1 - left1;
                const double lw = w0 * static_cast<double>(left0) +
                                  w1 * static_cast<double>(left1);
                const double rw = w0 * static_cast<double>(right0) +
                                  w1 * static_cast<double>(right1);
                const double cost = lw * gini(w0 * static_cast<double>(left0),
                                              w1 * static_cast<double>(left1)) +
                                    rw * gini(w0 * static_cast<double>(right0),
                                              w1 * static_cast<double>(right1));
                const double gain = parent_cost - cost;
                if (!best.found || gain > best.gain) {
                    best.found = true;
                    best.feature = feature;
                    best.threshold = (values[k].first + values[k + 1].first) / 2.0;
                    best.gain = gain;
                }
            }
        }
        return best;
    }

    const TrainingSet& data_;
    const ForestConfig& cfg_;
    DecisionTree& tree_;
    std::array<double, kFeatureCount>& importance_;
    Rng& rng_;
    std::vector<int> indices_;
    double root_weight_ = 1.0;
};

double tree_proba(const DecisionTree& tree, const std::array<double, kFeatureCount>& row) {
    const TreeNode* node = &tree.nodes[0];
    while (!node->is_leaf())
        node = &tree.nodes[row[node->feature] <= node->threshold ? node->left : node->right];
    const double pos = tree.w1 * node->count1;
    const double total = tree.w0 * node->count0 + pos;
    return total > 0 ? pos / total : 0.5;
}

} // namespace

TrainedForest train_forest(const TrainingSet& data, const ForestConfig& cfg, unsigned jobs) {
    if (data.x.empty()) throw EmptyData("training set is empty");
    if (data.x.size() != data.y.size()) throw LengthMismatch("x/y row counts differ");
    const bool has0 = std::find(data.y.begin(), data.y.end(), 0) != data.y.end();
    const bool has1 = std::find(data.y.begin(), data.y.end(), 1) != data.y.end();
    if (!has0 || !has1) throw SingleClassData("training set has a single class");
    if (cfg.n_trees < 1) throw ConfigError("n_trees must be >= 1");

    TrainedForest model;
    model.config = cfg;
    model.trees.resize(static_cast<std::size_t>(cfg.n_trees));
    std::vector<std::array<double, kFeatureCount>> tree_importances(
        static_cast<std::size_t>(cfg.n_trees));

    const std::size_t n = data.x.size();
    parallel_for(static_cast<std::size_t>(cfg.n_trees), jobs, [&](std::size_t t) {
        Rng rng(derive_seed(cfg.seed, t));
        std::vector<int> indices(n);
        if (cfg.bootstrap) {
            for (std::size_t i = 0; i < n; ++i)
                indices[i] = static_cast<int>(rng.below(n));
        } else {
            std::iota(indices.begin(), indices.end(), 0);
        }
        tree_importances[t] = {};
        TreeBuilder builder(data, cfg, model.trees[t], tree_importances[t], rng);
        builder.build(std::move(indices));
    });

    // aggregate in tree order so thread scheduling cannot change the sums
    std::array<double, kFeatureCount> total{};
    for (const auto& imp : tree_importances)
        for (std::size_t f = 0; f < kFeatureCount; ++f) total[f] += imp[f];
    double sum = 0;
    for (double v : total) sum += v;
    if (sum > 0) {
        for (std::size_t f = 0; f < kFeatureCount; ++f)
            model.feature_importances[f] = total[f] / sum;
    } else {
        // no split anywhere (degenerate data): report an uninformative uniform
        for (std::size_t f = 0; f < kFeatureCount; ++f)
            model.feature_importances[f] = 1.0 / static_cast<double>(kFeatureCount);
    }
    return model;
}

double predict_proba(const TrainedForest& model, const std::array<double, kFeatureCount>& row) {
    double sum = 0;
    for (const auto& tree : model.trees) sum += tree_proba(tree, row);
    return sum / static_cast<double>(model.trees.size());
}

std::vector<std::pair<std::string, double>> feature_importance(const TrainedForest& model) {
    std::vector<std::pair<std::string, double>> out;
    out.reserve(kFeatureCount);
    for (std::size_t f = 0; f < kFeatureCount; ++f)
        out.emplace_back(kFeatureNames[f], model.feature_importances[f]);
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

namespace {

constexpr const char* kModelMagic = "gazenote-forest";
constexpr const char* kModelVersion = "v1";

} // namespace

void save_model(const TrainedForest& model, const std::filesystem::path& path) {
    std::string out;
    out += std::string(kModelMagic) + " " + kModelVersion + "\n";
    const ForestConfig& c = model.config;
    out += "n_trees " + std::to_string(c.n_trees) + "\n";
    out += "max_depth " + std::to_string(c.max_depth) + "\n";
    out += "min_samples_leaf " + std::to_string(c.min_samples_leaf) + "\n";
    out += "features_per_split " + std::to_string(c.features_per_split) + "\n";
    out += std::string("bootstrap ") + (c.bootstrap ? "1" : "0") + "\n";
    out += std::string("class_weighting ") + class_weighting_name(c.class_weighting) + "\n";
    out += "seed " + std::to_string(c.seed) + "\n";
    out += "features";
    for (const char* name : kFeatureNames) out += std::string(" ") + name;
    out += "\nimportances";
    for (double v : model.feature_importances) out += " " + format_double(v);
    out += "\ntrees " + std::to_string(model.trees.size()) + "\n";
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
        const DecisionTree& tree = model.trees[t];
        out += "tree " + std::to_string(t) + " " + std::to_string(tree.nodes.size()) + " " +
               format_double(tree.w0) + " " + format_double(tree.w1) + "\n";
        for (const auto& n : tree.nodes)
            out += std::to_string(n.feature) + " " + format_double(n.threshold) + " " +
                   std::to_string(n.left) + " " + std::to_string(n.right) + " " +
                   format_double(n.count0) + " " + format_double(n.count1) + "\n";
    }
    out += "end\n";
    write_text_file(path, out);
}

namespace {

std::string next_line(std::istringstream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw CorruptModel(path + ": truncated model file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::vector<std::string> expect_fields(const std::string& line, const std::string& key,
                                       std::size_t count, const std::string& path) {
    auto fields = split_line(line, ' ');
    if (fields.size() != count || fields[0] != key)
        throw CorruptModel(path + ": malformed '" + key + "' line");
    return fields;
}

double parse_model_double(const std::string& s, const std::string& path) {
    try {
        return parse_double(s, path, 0);
    } catch (const ParseError&) {
        throw CorruptModel(path + ": bad number '" + s + "'");
    }
}

std::int64_t parse_model_int(const std::string& s, const std::string& path) {
    try {
        return parse_int(s, path, 0);
    } catch (const ParseError&) {
        throw CorruptModel(path + ": bad integer '" + s + "'");
    }
}

} // namespace

TrainedForest load_model(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    const std::string p = path.string();

    const std::string header = next_line(in, p);
    const auto head_fields = split_line(header, ' ');
    if (head_fields.empty() || head_fields[0] != kModelMagic)
        throw CorruptModel(p + ": not a forest model file");
    if (head_fields.size() != 2 || head_fields[1] != kModelVersion)
        throw VersionMismatch(p + ": unsupported model version '" +
                              (head_fields.size() > 1 ? head_fields[1] : "") + "'");

    TrainedForest model;
    ForestConfig& c = model.config;
    c.n_trees = static_cast<int>(parse_model_int(expect_fields(next_line(in, p), "n_trees", 2, p)[1], p));
    c.max_depth = static_cast<int>(parse_model_int(expect_fields(next_line(in, p), "max_depth", 2, p)[1], p));
    c.min_samples_leaf = static_cast<int>(
        parse_model_int(expect_fields(next_line(in, p), "min_samples_leaf", 2, p)[1], p));
    c.features_per_split = static_cast<int>(
        parse_model_int(expect_fields(next_line(in, p), "features_per_split", 2, p)[1], p));
    c.bootstrap = parse_model_int(expect_fields(next_line(in, p), "bootstrap", 2, p)[1], p) != 0;
    try {
        c.class_weighting =
            class_weighting_from_name(expect_fields(next_line(in, p), "class_weighting", 2, p)[1]);
    } catch (const ConfigError&) {
        throw CorruptModel(p + ": bad class_weighting value");
    }
    c.seed = static_cast<std::uint64_t>(
        parse_model_int(expect_fields(next_line(in, p), "seed", 2, p)[1], p));

    expect_fields(next_line(in, p), "features", 1 + kFeatureCount, p);
    const auto imp = expect_fields(next_line(in, p), "importances", 1 + kFeatureCount, p);
    for (std::size_t f = 0; f < kFeatureCount; ++f)
        model.feature_importances[f] = parse_model_double(imp[1 + f], p);

    const std::size_t n_trees =
        static_cast<std::size_t>(parse_model_int(expect_fields(next_line(in, p), "trees", 2, p)[1], p));
    model.trees.reserve(n_trees);
    for (std::size_t t = 0; t < n_trees; ++t) {
        const auto tree_fields = expect_fields(next_line(in, p), "tree", 5, p);
        if (parse_model_int(tree_fields[1], p) != static_cast<std::int64_t>(t))
            throw CorruptModel(p + ": tree index out of order");
        const std::size_t n_nodes = static_cast<std::size_t>(parse_model_int(tree_fields[2], p));
        DecisionTree tree;
        tree.w0 = parse_model_double(tree_fields[3], p);
        tree.w1 = parse_model_double(tree_fields[4], p);
        tree.nodes.reserve(n_nodes);
        for (std::size_t i = 0; i < n_nodes; ++i) {
            const auto f = split_line(next_line(in, p), ' ');
            if (f.size() != 6) throw CorruptModel(p + ": malformed node line");
            TreeNode node;
            node.feature = static_cast<int>(parse_model_int(f[0], p));
            node.threshold = parse_model_double(f[1], p);
            node.left = static_cast<int>(parse_model_int(f[2], p));
            node.right = static_cast<int>(parse_model_int(f[3], p));
            node.count0 = parse_model_double(f[4], p);
            node.count1 = parse_model_double(f[5], p);
            if (node.feature >= static_cast<int>(kFeatureCount))
                throw CorruptModel(p + ": split feature index out of range");
            const int limit = static_cast<int>(n_nodes);
            if (!node.is_leaf() &&
                (node.left < 0 || node.left >= limit || node.right < 0 || node.right >= limit))
                throw CorruptModel(p + ": node child index out of range");
            tree.nodes.push_back(node);
        }
        if (tree.nodes.empty()) throw CorruptModel(p + ": tree with no nodes");
        model.trees.push_back(std::move(tree));
    }
    if (next_line(in, p) != "end") throw CorruptModel(p + ": missing end marker");
    return model;
}

} // namespace gazenote
