#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "adlink/matrix.hpp"

namespace adlink {

/// lower < x[feature] <= upper; a missing bound is open.
struct Condition {
    std::size_t feature = 0;
    std::optional<double> lower;
    std::optional<double> upper;

    bool matches(std::span<const double> row) const;
};

struct RuleMetrics {
    std::size_t support = 0;
    std::size_t positives = 0;
    std::optional<double> ratio;  // absent when support == 0
    std::optional<double> lift;   // absent when support == 0 or no positives at all
};

struct Rule {
    std::vector<Condition> conditions;  // at most one per feature, ordered by feature
    RuleMetrics metrics;                // on the full dataset

    bool matches(std::span<const double> row) const;
};

RuleMetrics rule_metrics(const Rule& rule, const Matrix& features, std::span<const int> labels);

/// e.g. "min_chars<=250, 120000<max_img_freq, 3<mn_weeks<=3.4"
std::string describe(const Rule& rule, std::span<const std::string> feature_names);

struct RuleParams {
    std::size_t max_rules = 8;
    std::size_t min_support = 3;
    std::size_t beam_width = 8;
    std::size_t max_conditions = 4;
    std::size_t n_cuts = 16;  // quantile cut points per feature
};

struct RuleSet {
    std::vector<Rule> rules;  // learned order
    std::vector<std::string> warnings;
};

/// Candidate cut points for one column: midpoints between distinct values
/// when there are few, otherwise n_cuts evenly spaced quantiles.
std::vector<double> cut_points(std::span<const double> column, std::size_t n_cuts);

/// Midpoints between adjacent distinct values whose rows are not all of one
/// shared class. Empty when there are more than `limit` of them.
std::vector<double> class_boundaries(std::span<const double> column, std::span<const int> labels,
                                     std::size_t limit);

/// Sequential covering over cut_points plus class_boundaries (limit n_cuts)
/// per feature. Each round beam-searches one conjunction of interval
/// conditions maximizing precision on the not-yet-covered positives plus all
/// negatives (ties: larger support, then fewer conditions), then removes the
/// positives it covers.
RuleSet learn_rules(const Matrix& features, std::span<const int> labels, const RuleParams& params);

struct PnPoint {
    std::size_t negatives = 0;
    std::size_t positives = 0;
};

/// Cumulative distinct negatives/positives covered after each rule, from (0,0).
std::vector<PnPoint> pn_curve(std::span<const Rule> rules, const Matrix& features, std::span<const int> labels);

nlohmann::json rules_to_json(std::span<const Rule> rules, std::span<const std::string> feature_names);

}  // namespace adlink
