#include "adlink/resolve.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "adlink/error.hpp"
#include "adlink/log.hpp"
#include "adlink/parallel.hpp"
#include "adlink/random.hpp"
#include "adlink/union_find.hpp"

namespace adlink {

std::vector<AdPair> strong_edges(const StrongGraph& graph) {
    std::vector<AdPair> out;
    for (const auto& [_, ads] : graph.phone_to_ads) {
        for (std::size_t a = 0; a < ads.size(); ++a) {
            for (std::size_t b = a + 1; b < ads.size(); ++b) out.emplace_back(ads[a], ads[b]);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<AdPair> strong_edges_within(const StrongGraph& graph, std::span<const std::size_t> subset) {
    std::map<std::size_t, std::size_t> position;
    for (std::size_t k = 0; k < subset.size(); ++k) position[subset[k]] = k;
    std::vector<AdPair> out;
    for (const auto& [_, ads] : graph.phone_to_ads) {
        std::vector<std::size_t> local;
        for (auto a : ads) {
            if (auto it = position.find(a); it != position.end()) local.push_back(it->second);
        }
        for (std::size_t a = 0; a < local.size(); ++a) {
            for (std::size_t b = a + 1; b < local.size(); ++b) out.emplace_back(local[a], local[b]);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> score_candidates(const MatchModel& model, std::span<const AdPair> candidates,
                                     std::span<const AdProfile> profiles, unsigned threads) {
    model.check_schema(pair_feature_names(), kPairSchemaVersion);
    std::vector<double> scores(candidates.size());
    parallel_for(candidates.size(), threads, [&](std::size_t k) {
        const auto [i, j] = candidates[k];
        const PairFeatures f = compute_pair_features(profiles[i], profiles[j]);
        scores[k] = model.predict_proba(f);
    });
    return scores;
}

std::vector<WeakEdge> make_weak_edges(std::span<const AdPair> candidates, std::span<const double> scores) {
    if (candidates.size() != scores.size()) throw DataError("candidate and score counts differ");
    std::vector<WeakEdge> out;
    out.reserve(candidates.size());
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        out.push_back({candidates[k].first, candidates[k].second, scores[k]});
    }
    return out;
}

std::size_t ComponentSet::largest_size() const {
    std::size_t best = 0;
    for (const auto& c : components) best = std::max(best, c.members.size());
    return best;
}

namespace {

void check_edge(std::size_t n, std::size_t i, std::size_t j) {
    if (i >= n || j >= n) throw DataError("edge references node outside the graph");
    if (i == j) throw DataError("self-edge in link graph");
}

}  // namespace

ComponentSet connected_components(std::size_t n_nodes, std::span<const AdPair> strong,
                                  std::span<const WeakEdge> weak, double threshold) {
    DisjointSet ds(n_nodes);
    for (const auto& [i, j] : strong) {
        check_edge(n_nodes, i, j);
        ds.unite(i, j);
    }
    for (const auto& e : weak) {
        check_edge(n_nodes, e.i, e.j);
        if (e.score >= threshold) ds.unite(e.i, e.j);
    }

    ComponentSet out;
    out.component_of.assign(n_nodes, 0);
    std::vector<std::size_t> slot_of_root(n_nodes, n_nodes);
    std::vector<std::size_t> slot(n_nodes);
    for (std::size_t v = 0; v < n_nodes; ++v) {
        const std::size_t r = ds.find(v);
        if (slot_of_root[r] == n_nodes) {
            // v ascends, so the first node seen is the smallest member
            slot_of_root[r] = out.components.size();
            out.components.push_back({v, {}, 0, 0});
        }
        slot[v] = slot_of_root[r];
        out.components[slot[v]].members.push_back(v);
        out.component_of[v] = out.components[slot[v]].id;
    }
    std::vector<AdPair> strong_sorted;
    for (const auto& [i, j] : strong) strong_sorted.emplace_back(std::min(i, j), std::max(i, j));
    std::sort(strong_sorted.begin(), strong_sorted.end());
    strong_sorted.erase(std::unique(strong_sorted.begin(), strong_sorted.end()), strong_sorted.end());
    for (const auto& [i, j] : strong_sorted) ++out.components[slot[i]].strong_edges;
    for (const auto& e : weak) {
        if (e.score < threshold) continue;
        const AdPair p{std::min(e.i, e.j), std::max(e.i, e.j)};
        if (std::binary_search(strong_sorted.begin(), strong_sorted.end(), p)) continue;
        ++out.components[slot[e.i]].weak_edges;
    }
    return out;
}

std::vector<double> default_thresholds() {
    std::vector<double> t;
    for (int k = 0; k < 20; ++k) t.push_back(k / 20.0);
    return t;
}

std::vector<SweepPoint> sweep_scored(std::size_t n_nodes, std::span<const AdPair> strong,
                                     std::span<const WeakEdge> weak, std::span<const double> thresholds) {
    if (thresholds.size() < 2) throw UsageError("threshold sweep needs at least two thresholds");
    for (std::size_t k = 1; k < thresholds.size(); ++k) {
        if (!(thresholds[k] > thresholds[k - 1])) throw UsageError("sweep thresholds must strictly increase");
    }
    std::vector<SweepPoint> points;
    for (double t : thresholds) {
        const ComponentSet cs = connected_components(n_nodes, strong, weak, t);
        points.push_back({t, cs.components.size(), cs.largest_size()});
    }
    return points;
}

SweepResult threshold_sweep(const MatchModel& model, std::span<const Ad> corpus,
                            std::span<const AdProfile> profiles, const StrongGraph& graph,
                            const SweepParams& params) {
    SweepResult out;
    std::size_t n = params.sample_size;
    if (n > corpus.size()) {
        out.warnings.push_back("sweep sample of " + std::to_string(n) + " clamped to corpus size " +
                               std::to_string(corpus.size()));
        n = corpus.size();
    }
    std::vector<std::size_t> all(corpus.size());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
    if (n < corpus.size()) {
        Rng rng(params.seed);
        shuffle(rng, all);
        all.resize(n);
        std::sort(all.begin(), all.end());
    }
    out.sample = std::move(all);
    out.sample_size = n;

    std::vector<Ad> sub;
    std::vector<AdProfile> sub_profiles;
    sub.reserve(n);
    sub_profiles.reserve(n);
    for (auto k : out.sample) {
        sub.push_back(corpus[k]);
        sub_profiles.push_back(profiles[k]);
    }
    const BlockIndex index = build_blocks(sub, params.blocking);
    out.candidates = candidate_pairs(index).pairs;
    out.scores = score_candidates(model, out.candidates, sub_profiles, params.threads);
    const auto strong = strong_edges_within(graph, out.sample);
    const auto weak = make_weak_edges(out.candidates, out.scores);
    out.points = sweep_scored(n, strong, weak, params.thresholds);
    return out;
}

ThresholdChoice select_threshold(std::span<const SweepPoint> points, std::size_t sample_size,
                                 double max_largest_fraction) {
    if (points.empty()) throw UsageError("cannot select a threshold from an empty sweep");
    const double cap = max_largest_fraction * static_cast<double>(sample_size);
    for (const auto& p : points) {
        if (static_cast<double>(p.largest_size) <= cap) return {p.threshold, true};
    }
    log::warn("no sweep threshold keeps the largest component within the cap; using the highest");
    return {points.back().threshold, false};
}

}  // namespace adlink
