#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adlink/corpus.hpp"

namespace adlink {

/// Planted source behaviour. `organized` sources are the multi-state,
/// multi-name, image-reusing archetype used as positive cluster labels.
enum class Archetype { independent, organized };

std::string_view to_string(Archetype a);
Archetype archetype_from_string(std::string_view s);

struct IntRange {
    int lo = 0;
    int hi = 0;
};

struct SyntheticSpec {
    std::size_t n_sources = 50;
    IntRange ads_per_source{20, 60};
    IntRange phones_per_source{2, 4};
    double phone_visibility = 0.75;   // P(ad shows any phone)
    double second_phone_rate = 0.25;  // P(two phones | phone shown)
    double repost_rate = 0.1;         // P(ad is a light edit of an earlier ad)
    double organized_fraction = 0.3;
    double phone_collision_rate = 0.0;  // P(a source borrows a phone from another source)
    int time_span_days = 365;
    std::int64_t start_time = 1451606400;  // 2016-01-01T00:00:00Z

    // Template pool: each source owns a pool of signature tokens and images,
    // dealt so that every token lands in about `signature_df` of its ads.
    std::size_t signature_tokens_per_ad = 28;
    std::size_t signature_df = 7;
    std::size_t core_tokens = 4;
    std::size_t images_per_ad = 3;
    std::size_t image_df = 6;
    std::size_t generic_vocabulary = 4000;
    std::size_t generic_tokens_per_ad = 10;

    std::uint64_t rng_seed = 7;

    /// Throws UsageError for degenerate specs.
    void validate() const;
};

struct SourceInfo {
    std::string id;
    Archetype archetype = Archetype::independent;
    std::vector<std::string> phones;
    std::vector<std::string> names;
    std::size_t n_ads = 0;
};

struct SyntheticCorpus {
    Corpus ads;
    std::vector<SourceInfo> sources;
};

/// Deterministic in `spec`: equal specs give byte-identical corpora.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

std::string sources_to_csv(const std::vector<SourceInfo>& sources);
/// Reads the (source_id, archetype) columns written by sources_to_csv.
std::vector<std::pair<std::string, Archetype>> parse_sources_csv(std::string_view content);

}  // namespace adlink
