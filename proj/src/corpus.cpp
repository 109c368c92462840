#include "adlink/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "adlink/error.hpp"
#include "adlink/io.hpp"

namespace adlink {

using nlohmann::json;

namespace timefmt {

namespace chr = std::chrono;

std::int64_t parse(std::string_view s) {
    // Strict layout: YYYY-MM-DDThh:mm:ssZ
    auto bad = [&] { return DataError("bad timestamp '" + std::string(s) + "'"); };
    if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
        s[16] != ':' || s[19] != 'Z') {
        throw bad();
    }
    auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (s[i] < '0' || s[i] > '9') throw bad();
            v = v * 10 + (s[i] - '0');
        }
        return v;
    };
    const int y = num(0, 4), mo = num(5, 2), d = num(8, 2);
    const int h = num(11, 2), mi = num(14, 2), sec = num(17, 2);
    const chr::year_month_day ymd{chr::year{y}, chr::month{static_cast<unsigned>(mo)},
                                  chr::day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 59) throw bad();
    const auto days = chr::sys_days{ymd}.time_since_epoch().count();
    return static_cast<std::int64_t>(days) * 86400 + h * 3600 + mi * 60 + sec;
}

std::string format(std::int64_t t) {
    const auto day = day_number(t);
    const auto secs = t - day * 86400;
    const chr::year_month_day ymd{chr::sys_days{chr::days{day}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60),
                  static_cast<int>(secs % 60));
    return buf;
}

int month_key(std::int64_t t) {
    const chr::year_month_day ymd{chr::sys_days{chr::days{day_number(t)}}};
    return static_cast<int>(ymd.year()) * 100 + static_cast<int>(static_cast<unsigned>(ymd.month()));
}

int iso_week_key(std::int64_t t) {
    const chr::sys_days day{chr::days{day_number(t)}};
    const unsigned iso_wd = chr::weekday{day}.iso_encoding();  // Mon=1..Sun=7
    // The Thursday of this ISO week decides the ISO year.
    const chr::sys_days thursday = day + chr::days{4 - static_cast<int>(iso_wd)};
    const chr::year_month_day thu{thursday};
    const chr::sys_days jan1{thu.year() / chr::January / 1};
    const int week = static_cast<int>((thursday - jan1).count() / 7) + 1;
    return static_cast<int>(thu.year()) * 100 + week;
}

}  // namespace timefmt

namespace {

bool is_hex(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
    });
}

const json& require(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw DataError(std::string("missing field '") + key + "'");
    return *it;
}

std::string require_string(const json& obj, const char* key) {
    const auto& v = require(obj, key);
    if (!v.is_string()) throw DataError(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

}  // namespace

Ad parse_ad(std::string_view line) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw DataError("line is not a JSON object");

    Ad ad;
    ad.id = require_string(obj, "id");
    if (ad.id.empty()) throw DataError("empty id");
    ad.text = require_string(obj, "text");
    ad.posted_at = timefmt::parse(require_string(obj, "posted_at"));
    ad.city = require_string(obj, "city");
    ad.state = require_string(obj, "state");
    if (!ad.state.empty() && ad.state.size() != 2) throw DataError("state must be a 2-letter code");

    const auto& images = require(obj, "image_hashes");
    if (!images.is_array()) throw DataError("image_hashes must be an array");
    for (const auto& h : images) {
        if (!h.is_string() || !is_hex(h.get<std::string>())) {
            throw DataError("image_hashes entries must be hex strings");
        }
        std::string hash = h.get<std::string>();
        std::transform(hash.begin(), hash.end(), hash.begin(),
                       [](char c) { return static_cast<char>(std::tolower(c)); });
        ad.image_hashes.push_back(std::move(hash));
    }
    std::sort(ad.image_hashes.begin(), ad.image_hashes.end());
    ad.image_hashes.erase(std::unique(ad.image_hashes.begin(), ad.image_hashes.end()),
                          ad.image_hashes.end());

    if (auto it = obj.find("source_id"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) throw DataError("source_id must be a string or null");
        ad.source_id = it->get<std::string>();
    }
    return ad;
}

LoadResult parse_corpus(std::string_view content) {
    LoadResult result;
    std::unordered_set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        auto end = content.find('\n', pos);
        if (end == std::string_view::npos) end = content.size();
        auto line = content.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        try {
            Ad ad = parse_ad(line);
            if (!seen.insert(ad.id).second) throw DataError("duplicate id '" + ad.id + "'");
            result.ads.push_back(std::move(ad));
        } catch (const DataError& e) {
            result.rejects.push_back({line_no, e.what()});
        }
    }
    return result;
}

LoadResult load_corpus(const std::filesystem::path& path) {
    return parse_corpus(io::read_file(path));
}

std::string ad_to_json(const Ad& ad) {
    // ordered_json keeps the documented key order in output files.
    nlohmann::ordered_json obj;
    obj["id"] = ad.id;
    obj["text"] = ad.text;
    obj["posted_at"] = timefmt::format(ad.posted_at);
    obj["city"] = ad.city;
    obj["state"] = ad.state;
    obj["image_hashes"] = ad.image_hashes;
    if (ad.source_id) {
        obj["source_id"] = *ad.source_id;
    } else {
        obj["source_id"] = nullptr;
    }
    return obj.dump(-1, ' ', false, json::error_handler_t::replace);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
    for (const auto& ad : corpus) out << ad_to_json(ad) << '\n';
}

std::string corpus_to_jsonl(const Corpus& corpus) {
    std::string out;
    for (const auto& ad : corpus) {
        out += ad_to_json(ad);
        out += '\n';
    }
    return out;
}

}  // namespace adlink
