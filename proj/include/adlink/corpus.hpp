#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adlink {

/// One advertisement record.
struct Ad {
    std::string id;
    std::string text;
    std::int64_t posted_at = 0;  // epoch seconds, UTC
    std::string city;
    std::string state;                      // two-letter code or empty
    std::vector<std::string> image_hashes;  // sorted, unique, lowercase hex
    std::optional<std::string> source_id;   // ground truth, when known

    bool operator==(const Ad&) const = default;
};

using Corpus = std::vector<Ad>;

struct RejectedLine {
    std::size_t line = 0;  // 1-based
    std::string reason;
};

struct LoadResult {
    Corpus ads;
    std::vector<RejectedLine> rejects;
};

/// Reads ads.jsonl. Unreadable files throw DataError; bad lines are skipped
/// and reported in `rejects`.
LoadResult load_corpus(const std::filesystem::path& path);
LoadResult parse_corpus(std::string_view content);

/// Parses one JSONL line into an Ad. Throws DataError with the reason.
Ad parse_ad(std::string_view line);

std::string ad_to_json(const Ad& ad);
void write_corpus(std::ostream& out, const Corpus& corpus);
std::string corpus_to_jsonl(const Corpus& corpus);

namespace timefmt {

/// Parses "YYYY-MM-DDThh:mm:ssZ". Throws DataError.
std::int64_t parse(std::string_view s);
std::string format(std::int64_t epoch_seconds);

inline std::int64_t day_number(std::int64_t epoch_seconds) {
    return epoch_seconds >= 0 ? epoch_seconds / 86400 : -((-epoch_seconds + 86399) / 86400);
}

/// year * 100 + month, calendar month in UTC.
int month_key(std::int64_t epoch_seconds);
/// iso_year * 100 + iso_week.
int iso_week_key(std::int64_t epoch_seconds);

}  // namespace timefmt

}  // namespace adlink
