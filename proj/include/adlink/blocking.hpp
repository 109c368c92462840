#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adlink/corpus.hpp"

namespace adlink {

enum class KeyKind { unigram, bigram, image };

std::string_view to_string(KeyKind k);

struct BlockKey {
    KeyKind kind = KeyKind::unigram;
    std::string value;  // bigrams are "first second"

    auto operator<=>(const BlockKey&) const = default;
};

struct BlockingParams {
    std::size_t rarity_threshold = 10;  // max document frequency of a key
    double rarity_fraction = 0;         // if > 0, threshold = max(2, floor(fraction * n_ads))
    std::size_t max_block_size = 200;

    std::size_t effective_threshold(std::size_t n_ads) const;
};

using AdPair = std::pair<std::size_t, std::size_t>;  // corpus indices, first < second

struct BlockIndex {
    std::map<BlockKey, std::vector<std::size_t>> blocks;  // sorted ad indices
    std::map<KeyKind, std::map<std::string, std::size_t>> df;
    std::size_t rarity_threshold = 0;
    std::size_t dropped_blocks = 0;  // rare keys whose block exceeded max_block_size
    std::size_t n_ads = 0;
};

/// Blocks every unigram, bigram and image hash whose document frequency is
/// in [2, threshold] and whose block fits max_block_size.
BlockIndex build_blocks(std::span<const Ad> corpus, const BlockingParams& params);

struct CandidateSet {
    std::vector<AdPair> pairs;  // sorted, unique
    std::size_t total_pairs = 0;  // n(n-1)/2
    double reduction_ratio = 0;   // 1 - |pairs| / total_pairs

    double fraction_of_total() const {
        return total_pairs ? static_cast<double>(pairs.size()) / static_cast<double>(total_pairs) : 0.0;
    }
};

CandidateSet candidate_pairs(const BlockIndex& index);

/// |candidates ∩ truth| / |truth|. Both inputs sorted and unique. Throws
/// UsageError on empty truth.
double blocking_recall(std::span<const AdPair> candidates, std::span<const AdPair> truth);

/// All pairs of ads with the same known source_id, sorted.
std::vector<AdPair> truth_pairs(std::span<const Ad> corpus);

}  // namespace adlink
