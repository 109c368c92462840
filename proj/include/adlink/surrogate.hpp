#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adlink/corpus.hpp"
#include "adlink/extract.hpp"

namespace adlink {

/// Bipartite phone <-> ad relation. Ads are referenced by corpus index.
struct StrongGraph {
    std::map<std::string, std::vector<std::size_t>> phone_to_ads;  // sorted indices
    std::vector<std::vector<std::string>> ad_to_phones;            // sorted phones

    bool shares_phone(std::size_t a, std::size_t b) const;
};

/// Connected components of the shared-phone graph over phone-bearing ads.
struct ProxyComponents {
    std::vector<std::optional<std::size_t>> component_of;  // nullopt: ad has no phone
    std::vector<std::vector<std::size_t>> members;         // ordered by smallest member
    std::size_t excluded = 0;                              // ads without any phone
};

struct StrongGraphResult {
    StrongGraph graph;
    ProxyComponents components;
};

StrongGraphResult build_strong_graph(std::span<const FieldSet> fieldsets);

enum class PairLabel { negative = 0, positive = 1 };

struct PairSample {
    std::size_t ad_i = 0;  // ad_i < ad_j
    std::size_t ad_j = 0;
    PairLabel label = PairLabel::negative;
    std::size_t component_i = 0;
    std::size_t component_j = 0;
};

struct SampleParams {
    std::size_t n_pos = 5000;
    std::size_t n_neg = 5000;
    std::uint64_t seed = 7;
    bool same_city_negatives = false;  // requires `ads` in sample_pairs
};

struct SampleResult {
    std::vector<PairSample> pairs;  // positives first, each group sorted by (ad_i, ad_j)
    std::size_t eligible_positives = 0;
    std::vector<std::string> warnings;
};

/// Positives: same proxy component with disjoint phone sets. Negatives:
/// uniform over cross-component pairs. Throws DataError if no positive pair
/// satisfies the disjoint-phone constraint.
SampleResult sample_pairs(const ProxyComponents& components, const StrongGraph& graph,
                          const SampleParams& params, std::span<const Ad> ads = {});

/// Jaccard similarity of two sorted, unique token lists; 1.0 when both are empty.
double jaccard_unigram(std::span<const std::string> a, std::span<const std::string> b);

struct Histogram {
    std::vector<double> edges;  // bins + 1 edges over [0, 1]
    std::vector<std::size_t> counts;
};

Histogram similarity_histogram(std::span<const double> similarities, std::size_t bins = 20);

}  // namespace adlink
