#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "adlink/corpus.hpp"
#include "adlink/extract.hpp"
#include "adlink/matchmodel.hpp"
#include "adlink/resolve.hpp"
#include "adlink/roc.hpp"

namespace adlink {

inline constexpr std::size_t kClusterFeatureCount = 14;

struct ClusterFeatures {
    double n_ads = 0;
    double posting_months = 0;
    double posting_weeks = 0;
    double mn_months = 0;
    double mn_weeks = 0;
    double std_months = 0;
    double std_weeks = 0;
    double min_chars = 0;
    double max_img_freq = 0;
    double std_img_freq = 0;
    double names_norm = 0;
    double unique_imgs_norm = 0;
    double states_norm = 0;
    double edge_density = 0;

    std::array<double, kClusterFeatureCount> values() const;
};

const std::vector<std::string>& cluster_feature_names();

/// Number of ads carrying each image hash.
std::map<std::string, std::size_t> image_frequencies(std::span<const Ad> corpus);

/// `members` are corpus indices; `n_edges` counts distinct links inside the
/// component. Months are calendar months and weeks ISO weeks, both UTC.
/// Standard deviations are population deviations over active buckets.
ClusterFeatures featurize_component(std::span<const std::size_t> members, std::span<const Ad> corpus,
                                    std::span<const FieldSet> fieldsets,
                                    const std::map<std::string, std::size_t>& image_df,
                                    std::size_t n_edges);

/// Components with strictly more than `min_size` members.
std::vector<Component> filter_components(std::span<const Component> components, std::size_t min_size);

struct ClusterClassifierParams {
    std::size_t n_folds = 4;
    std::size_t n_random_baselines = 100;
    std::uint64_t seed = 7;
    ForestParams forest{100, 8, 1, 0, true, 7, 1};
};

struct ClusterClassifierResult {
    MatchModel model;                  // trained on every cluster
    std::vector<double> oof_scores;    // out-of-fold score per cluster
    std::vector<std::size_t> fold_of;  // fold per cluster
    RocCurve roc;                      // pooled out-of-fold
    std::vector<double> baseline_aucs;
    double baseline_mean_auc = 0;
    RocCurve baseline_curve;  // mean TPR over baselines on a 101-point FPR grid
};

/// Stratified k-fold forest with a pooled out-of-fold ROC, plus the ROC of
/// uniformly random scorers as a control.
ClusterClassifierResult train_cluster_classifier(const Dataset& data, const ClusterClassifierParams& params);

}  // namespace adlink
