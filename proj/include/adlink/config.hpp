#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "adlink/blocking.hpp"
#include "adlink/matchmodel.hpp"
#include "adlink/rules.hpp"
#include "adlink/synthetic.hpp"

namespace adlink {

struct PipelineConfig {
    std::filesystem::path out_dir = "out";
    std::filesystem::path corpus;  // ingest input (ads.jsonl)
    std::filesystem::path labels;  // optional cluster labels (cluster_id,label)
    std::uint64_t seed = 7;
    unsigned threads = 1;

    SyntheticSpec synth;

    std::size_t n_pos = 5000;
    std::size_t n_neg = 5000;
    bool same_city_negatives = false;

    ModelKind model_kind = ModelKind::forest;
    LogisticParams logistic;
    ForestParams forest;
    double holdout_fraction = 0.25;

    BlockingParams blocking;

    std::vector<double> thresholds;  // empty: 0, 0.05, ..., 0.95
    double cap_fraction = 0.05;
    std::size_t sweep_sample = 10000;

    std::size_t min_cluster_size = 10;
    std::size_t n_folds = 4;
    std::size_t n_baselines = 100;
    RuleParams rules;
    std::vector<std::size_t> pn_max_rules{1, 2, 4, 8};

    /// Applies one dotted key. Throws UsageError on unknown keys or bad values.
    void set(std::string_view key, std::string_view value);
    /// Range checks across all fields.
    void validate() const;
    /// Every key with its current value, one `key = value` per line.
    std::string dump() const;
};

/// Parses `key = value` lines; '#' starts a comment.
PipelineConfig parse_config(std::string_view text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace adlink
