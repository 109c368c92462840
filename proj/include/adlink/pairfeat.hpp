#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "adlink/corpus.hpp"
#include "adlink/extract.hpp"

namespace adlink {

inline constexpr int kPairSchemaVersion = 1;

/// Texts are cut to this many codepoints before substring matching.
inline constexpr std::size_t kLcsMaxCodepoints = 2000;

/// Fixed feature order. Per-ad scalars enter as (min, max) and per-ad flags
/// as (both, either) so the vector is symmetric in its two ads.
enum PairFeature : std::size_t {
    kSameState,
    kSameCity,
    kSpecialCharsMin,
    kSpecialCharsMax,
    kLongestCommonSubstring,
    kUniqueTokensSum,
    kJaccardUnigram,
    kTimeDifference,
    kSameDay,
    kSharedImages,
    kEthnicityBoth,
    kEthnicityEither,
    kRateBoth,
    kRateEither,
    kRestrictionsBoth,
    kRestrictionsEither,
    kNamesBoth,
    kNamesEither,
    kSharedName,
    kSharedCost,
    kPairFeatureCount,
};

using PairFeatures = std::array<double, kPairFeatureCount>;

const std::vector<std::string>& pair_feature_names();

/// Per-ad quantities reused across every pair the ad takes part in.
struct AdProfile {
    std::u32string codepoints;          // truncated to kLcsMaxCodepoints
    std::vector<std::string> unigrams;  // sorted, unique
    std::size_t special_chars = 0;
    std::int64_t posted_at = 0;
    std::string city;
    std::string state;
    std::vector<std::string> images;  // sorted, unique
    std::vector<std::string> names;   // sorted
    std::vector<int> cost_amounts;    // sorted, unique
    bool has_ethnicity = false;
    bool has_rate = false;
    bool has_restrictions = false;
    bool has_names = false;
};

AdProfile make_profile(const Ad& ad, const FieldSet& fields);

/// Length in codepoints of the longest contiguous run shared by a and b.
std::size_t longest_common_substring(std::u32string_view a, std::u32string_view b);
std::size_t longest_common_substring(std::string_view a, std::string_view b);

PairFeatures compute_pair_features(const AdProfile& a, const AdProfile& b);
PairFeatures compute_pair_features(const Ad& ad_i, const Ad& ad_j, const FieldSet& fields_i,
                                   const FieldSet& fields_j);

}  // namespace adlink
