#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "adlink/matrix.hpp"

namespace adlink {

/// Labeled feature rows. Labels are 0/1.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<std::pair<std::string, std::string>> ids;  // optional, per row
    std::vector<std::string> feature_names;
    int schema_version = 0;

    std::size_t size() const noexcept { return labels.size(); }
    /// Checks row/label counts, finiteness, and that both classes appear.
    void validate() const;
    Dataset subset(std::span<const std::size_t> rows) const;
};

enum class ModelKind { logistic, forest };

std::string_view to_string(ModelKind k);
ModelKind model_kind_from_string(std::string_view s);

/// Axis-aligned split `x[feature] <= threshold` goes left. Leaves have
/// feature == -1 and carry the positive-class fraction in `value`.
struct TreeNode {
    int feature = -1;
    double threshold = 0;
    int left = -1;
    int right = -1;
    double value = 0;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;     // nodes[0] is the root
    std::uint64_t seed = 0;          // bootstrap / feature-sampling seed
    std::vector<double> importance;  // weighted Gini decrease per feature

    double predict(std::span<const double> x) const;
};

struct LogisticParams {
    double l2 = 1e-3;
    int epochs = 300;
    double lr = 0.5;
};

struct ForestParams {
    std::size_t n_trees = 50;
    int max_depth = 12;
    std::size_t min_leaf = 2;
    std::size_t features_per_split = 0;  // 0: round(sqrt(feature count))
    bool bootstrap = true;
    std::uint64_t seed = 7;
    unsigned threads = 1;
};

struct MatchModel {
    ModelKind kind = ModelKind::logistic;
    int schema_version = 0;
    std::vector<std::string> feature_names;

    // logistic: standardization lives in the model
    std::vector<double> means;
    std::vector<double> scales;
    std::vector<double> weights;
    double bias = 0;

    // forest
    std::vector<DecisionTree> trees;

    /// Throws DataError if x has the wrong length.
    double predict_proba(std::span<const double> x) const;
    std::vector<double> predict(const Matrix& rows) const;

    /// Throws DataError unless names and version match the model.
    void check_schema(const std::vector<std::string>& names, int version) const;
};

/// An untrained logistic model: zero weights, identity standardization.
MatchModel zero_logistic(std::vector<std::string> feature_names, int schema_version);

struct LossAndGradient {
    double loss = 0;
    std::vector<double> grad_w;
    double grad_b = 0;
};

/// Mean log-loss plus (l2 / 2) * |w|^2 on already-standardized rows.
LossAndGradient logistic_loss_gradient(const Matrix& x, std::span<const int> labels,
                                       std::span<const double> w, double b, double l2);

/// Full-batch gradient descent with step halving, so the loss never rises.
/// `loss_history`, if given, receives the loss before training and after every epoch.
MatchModel train_logistic(const Dataset& data, const LogisticParams& params,
                          std::vector<double>* loss_history = nullptr);

/// Bootstrap CART forest with Gini splits. Per-tree seeds are drawn from
/// params.seed before any tree is built, so output ignores thread count.
MatchModel train_forest(const Dataset& data, const ForestParams& params);

using RankedFeatures = std::vector<std::pair<std::string, double>>;

/// Mean impurity decrease, normalized to sum to 1, sorted descending with
/// ties kept in feature order. Throws UsageError for logistic models.
RankedFeatures feature_importance(const MatchModel& model);
/// |weight| on standardized features, normalized; logistic models only.
RankedFeatures weight_importance(const MatchModel& model);

nlohmann::json model_to_json(const MatchModel& model);
MatchModel model_from_json(const nlohmann::json& j);

}  // namespace adlink
