#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "adlink/blocking.hpp"
#include "adlink/matchmodel.hpp"
#include "adlink/pairfeat.hpp"
#include "adlink/surrogate.hpp"

namespace adlink {

struct WeakEdge {
    std::size_t i = 0;  // i < j
    std::size_t j = 0;
    double score = 0;
};

/// Every pair of ads sharing at least one phone, sorted and unique.
std::vector<AdPair> strong_edges(const StrongGraph& graph);

/// Strong edges restricted to `subset` (sorted corpus indices), re-indexed
/// to positions within the subset.
std::vector<AdPair> strong_edges_within(const StrongGraph& graph, std::span<const std::size_t> subset);

/// One match probability per candidate, in candidate order.
std::vector<double> score_candidates(const MatchModel& model, std::span<const AdPair> candidates,
                                     std::span<const AdProfile> profiles, unsigned threads = 1);

std::vector<WeakEdge> make_weak_edges(std::span<const AdPair> candidates, std::span<const double> scores);

struct Component {
    std::size_t id = 0;                // smallest member
    std::vector<std::size_t> members;  // sorted
    std::size_t strong_edges = 0;
    std::size_t weak_edges = 0;  // admitted weak edges that are not also strong
};

struct ComponentSet {
    std::vector<std::size_t> component_of;  // node -> component id
    std::vector<Component> components;      // ordered by id

    std::size_t largest_size() const;
};

/// Union-find over strong edges plus weak edges scoring >= threshold.
ComponentSet connected_components(std::size_t n_nodes, std::span<const AdPair> strong,
                                  std::span<const WeakEdge> weak, double threshold);

struct SweepPoint {
    double threshold = 0;
    std::size_t n_components = 0;
    std::size_t largest_size = 0;
};

struct SweepResult {
    std::size_t sample_size = 0;
    std::vector<std::size_t> sample;  // sorted corpus indices
    std::vector<SweepPoint> points;
    std::vector<AdPair> candidates;  // indices into `sample`
    std::vector<double> scores;
    std::vector<std::string> warnings;
};

/// 0, 0.05, ..., 0.95.
std::vector<double> default_thresholds();

/// Resolves pre-scored edges at each threshold (strictly increasing, >= 2 values).
std::vector<SweepPoint> sweep_scored(std::size_t n_nodes, std::span<const AdPair> strong,
                                     std::span<const WeakEdge> weak, std::span<const double> thresholds);

struct SweepParams {
    std::size_t sample_size = 10000;
    std::vector<double> thresholds = default_thresholds();
    BlockingParams blocking;
    std::uint64_t seed = 7;
    unsigned threads = 1;
};

/// Draws a seeded sample (clamped to the corpus with a warning), then blocks,
/// scores and resolves it once per threshold.
SweepResult threshold_sweep(const MatchModel& model, std::span<const Ad> corpus,
                            std::span<const AdProfile> profiles, const StrongGraph& graph,
                            const SweepParams& params);

struct ThresholdChoice {
    double threshold = 0;
    bool within_cap = true;  // false: no threshold met the cap; highest returned
};

/// Smallest threshold whose largest component is <= cap * sample size;
/// otherwise the highest threshold with a warning. Throws UsageError on an empty sweep.
ThresholdChoice select_threshold(std::span<const SweepPoint> points, std::size_t sample_size,
                                 double max_largest_fraction = 0.05);

}  // namespace adlink
