#include "adlink/pairfeat.hpp"

#include <algorithm>
#include <cmath>

#include "adlink/surrogate.hpp"
#include "adlink/text.hpp"

namespace adlink {

const std::vector<std::string>& pair_feature_names() {
    static const std::vector<std::string> names = {
        "same_state",         "same_city",          "special_chars_min", "special_chars_max",
        "longest_common_substring", "unique_tokens_sum", "jaccard_unigram", "time_difference",
        "same_day",           "shared_images",      "ethnicity_both",    "ethnicity_either",
        "rate_both",          "rate_either",        "restrictions_both", "restrictions_either",
        "names_both",         "names_either",       "shared_name",       "shared_cost",
    };
    return names;
}

AdProfile make_profile(const Ad& ad, const FieldSet& fields) {
    AdProfile p;
    p.codepoints = text::decode_utf8(ad.text);
    if (p.codepoints.size() > kLcsMaxCodepoints) p.codepoints.resize(kLcsMaxCodepoints);
    p.unigrams = unigram_set(ad.text);
    p.special_chars = special_char_count(ad.text);
    p.posted_at = ad.posted_at;
    p.city = ad.city;
    p.state = ad.state;
    p.images = ad.image_hashes;
    std::sort(p.images.begin(), p.images.end());
    p.images.erase(std::unique(p.images.begin(), p.images.end()), p.images.end());
    p.names.assign(fields.names.begin(), fields.names.end());
    for (const auto& c : fields.costs) p.cost_amounts.push_back(c.amount);
    std::sort(p.cost_amounts.begin(), p.cost_amounts.end());
    p.cost_amounts.erase(std::unique(p.cost_amounts.begin(), p.cost_amounts.end()),
                         p.cost_amounts.end());
    p.has_ethnicity = !fields.ethnicities.empty();
    p.has_rate = !fields.costs.empty();
    p.has_restrictions = !fields.restrictions.empty();
    p.has_names = !fields.names.empty();
    return p;
}

std::size_t longest_common_substring(std::u32string_view a, std::u32string_view b) {
    if (a.empty() || b.empty()) return 0;
    if (b.size() > a.size()) std::swap(a, b);
    // Rolling DP row over the shorter string: run[j] = length of the common
    // suffix of a[..i] and b[..j].
    std::vector<std::uint32_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    std::uint32_t best = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const char32_t ca = a[i];
        for (std::size_t j = 0; j < b.size(); ++j) {
            const std::uint32_t v = ca == b[j] ? prev[j] + 1 : 0;
            cur[j + 1] = v;
            best = std::max(best, v);
        }
        std::swap(prev, cur);
    }
    return best;
}

std::size_t longest_common_substring(std::string_view a, std::string_view b) {
    auto ca = text::decode_utf8(a);
    auto cb = text::decode_utf8(b);
    if (ca.size() > kLcsMaxCodepoints) ca.resize(kLcsMaxCodepoints);
    if (cb.size() > kLcsMaxCodepoints) cb.resize(kLcsMaxCodepoints);
    return longest_common_substring(std::u32string_view(ca), std::u32string_view(cb));
}

namespace {

template <class T>
std::size_t intersection_size(const std::vector<T>& a, const std::vector<T>& b) {
    std::size_t n = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i == *j) {
            ++n;
            ++i;
            ++j;
        } else if (*i < *j) {
            ++i;
        } else {
            ++j;
        }
    }
    return n;
}

double flag(bool b) { return b ? 1.0 : 0.0; }

}  // namespace

PairFeatures compute_pair_features(const AdProfile& a, const AdProfile& b) {
    PairFeatures f{};
    f[kSameState] = flag(!a.state.empty() && a.state == b.state);
    f[kSameCity] = flag(!a.city.empty() && a.city == b.city && a.state == b.state);
    f[kSpecialCharsMin] = static_cast<double>(std::min(a.special_chars, b.special_chars));
    f[kSpecialCharsMax] = static_cast<double>(std::max(a.special_chars, b.special_chars));
    f[kLongestCommonSubstring] = static_cast<double>(
        longest_common_substring(std::u32string_view(a.codepoints), std::u32string_view(b.codepoints)));
    f[kUniqueTokensSum] = static_cast<double>(a.unigrams.size() + b.unigrams.size());
    f[kJaccardUnigram] = jaccard_unigram(a.unigrams, b.unigrams);
    const auto dt = a.posted_at > b.posted_at ? a.posted_at - b.posted_at : b.posted_at - a.posted_at;
    f[kTimeDifference] = static_cast<double>(dt);
    f[kSameDay] = flag(timefmt::day_number(a.posted_at) == timefmt::day_number(b.posted_at));
    f[kSharedImages] = static_cast<double>(intersection_size(a.images, b.images));
    f[kEthnicityBoth] = flag(a.has_ethnicity && b.has_ethnicity);
    f[kEthnicityEither] = flag(a.has_ethnicity || b.has_ethnicity);
    f[kRateBoth] = flag(a.has_rate && b.has_rate);
    f[kRateEither] = flag(a.has_rate || b.has_rate);
    f[kRestrictionsBoth] = flag(a.has_restrictions && b.has_restrictions);
    f[kRestrictionsEither] = flag(a.has_restrictions || b.has_restrictions);
    f[kNamesBoth] = flag(a.has_names && b.has_names);
    f[kNamesEither] = flag(a.has_names || b.has_names);
    f[kSharedName] = flag(intersection_size(a.names, b.names) > 0);
    f[kSharedCost] = flag(intersection_size(a.cost_amounts, b.cost_amounts) > 0);
    return f;
}

PairFeatures compute_pair_features(const Ad& ad_i, const Ad& ad_j, const FieldSet& fields_i,
                                   const FieldSet& fields_j) {
    return compute_pair_features(make_profile(ad_i, fields_i), make_profile(ad_j, fields_j));
}

}  // namespace adlink
