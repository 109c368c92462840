#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "adlink/config.hpp"
#include "adlink/corpus.hpp"

namespace adlink {

/// Stage names in pipeline order; "pipeline" runs them all.
const std::vector<std::string>& stage_names();

struct StageReport {
    std::string stage;
    double seconds = 0;
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    std::vector<std::string> warnings;
};

/// Runs one stage against cfg.out_dir. Missing inputs raise
/// PrerequisiteError naming the stage that produces them. Appends the
/// report to metrics.json.
StageReport run_stage(std::string_view stage, const PipelineConfig& cfg);

/// synth (or ingest when cfg.corpus is set) through eval, then digests.json.
std::vector<StageReport> run_pipeline(const PipelineConfig& cfg);

/// Digest of every regular file in `dir` except metrics.json (timings) and
/// digests.json itself, keyed by file name.
std::map<std::string, std::string> artifact_digests(const std::filesystem::path& dir);

struct PairwiseScores {
    std::size_t true_positives = 0;
    std::size_t predicted_pairs = 0;
    std::size_t truth_pairs = 0;
    std::optional<double> precision;  // absent when nothing is predicted
    std::optional<double> recall;     // absent when there is no truth
    std::optional<double> f1;         // absent unless both are defined
};

/// Pair-counting precision/recall/F1 of a clustering against known sources.
/// Ads without a source are left out of both sides.
PairwiseScores pairwise_scores(std::span<const std::size_t> component_of,
                               std::span<const std::optional<std::string>> source_of);

}  // namespace adlink
