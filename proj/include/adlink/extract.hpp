#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace adlink {

enum class CostUnit { per_hour, per_half_hour, unknown };

std::string_view to_string(CostUnit unit);
CostUnit cost_unit_from_string(std::string_view s);

struct Cost {
    int amount = 0;  // whole currency units
    CostUnit unit = CostUnit::unknown;

    auto operator<=>(const Cost&) const = default;
};

/// Structured fields extracted from one ad's text. String values are lowercase.
struct FieldSet {
    std::set<int> ages;          // validated to [18, 99]
    std::set<int> flagged_ages;  // matched ages below 18, kept for review
    std::set<Cost> costs;
    std::set<std::string> emails;
    std::set<std::string> names;
    std::set<std::string> urls;
    std::set<std::string> ethnicities;
    std::set<std::string> eye_colors;
    std::set<std::string> hair_colors;
    std::set<std::string> skin_colors;
    std::set<std::string> restrictions;
    std::set<int> heights_cm;
    std::set<int> weights_kg;
    std::set<std::string> measurements;
    std::set<std::string> phones;  // exactly 10 digits each

    bool operator==(const FieldSet&) const = default;
};

/// One pattern hit: which named pattern fired, for which field, producing what.
struct Extraction {
    std::string pattern;
    std::string field;
    std::string value;
};

struct TracedFields {
    FieldSet fields;
    std::vector<Extraction> trace;
};

FieldSet extract_fields(std::string_view text);
TracedFields extract_fields_traced(std::string_view text);

/// Names of every pattern in the table, grouped by field, in evaluation order.
std::vector<std::pair<std::string, std::string>> pattern_table();

/// Strips punctuation/whitespace, maps digit words and standalone 'o' to
/// digits, drops a leading country code 1. Returns nullopt unless exactly
/// ten digits remain.
std::optional<std::string> normalize_phone(std::string_view raw);

struct Tokens {
    std::map<std::string, int> unigrams;
    std::map<std::pair<std::string, std::string>, int> bigrams;
};

/// Lowercases, splits on runs of anything that is not ASCII alphanumeric,
/// drops tokens shorter than two characters, then pairs adjacent survivors.
Tokens tokenize(std::string_view text);

/// Distinct unigrams in sorted order.
std::vector<std::string> unigram_set(std::string_view text);

/// Codepoints that are neither ASCII alphanumeric nor whitespace.
std::size_t special_char_count(std::string_view text);

nlohmann::json fields_to_json(const FieldSet& fields);
FieldSet fields_from_json(const nlohmann::json& j);

}  // namespace adlink
