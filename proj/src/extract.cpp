#include "adlink/extract.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <regex>

#include "adlink/error.hpp"
#include "adlink/text.hpp"

namespace adlink {

std::string_view to_string(CostUnit unit) {
    switch (unit) {
        case CostUnit::per_hour: return "per-hour";
        case CostUnit::per_half_hour: return "per-half-hour";
        case CostUnit::unknown: return "unknown";
    }
    return "unknown";
}

CostUnit cost_unit_from_string(std::string_view s) {
    if (s == "per-hour") return CostUnit::per_hour;
    if (s == "per-half-hour") return CostUnit::per_half_hour;
    if (s == "unknown") return CostUnit::unknown;
    throw DataError("unknown cost unit '" + std::string(s) + "'");
}

namespace {

// ---------------------------------------------------------------------------
// Phone scanning

constexpr std::array<std::pair<std::string_view, char>, 11> kDigitWords{{
    {"zero", '0'},
    {"one", '1'},
    {"two", '2'},
    {"three", '3'},
    {"four", '4'},
    {"five", '5'},
    {"six", '6'},
    {"seven", '7'},
    {"eight", '8'},
    {"nine", '9'},
    {"o", '0'},
}};

std::optional<char> digit_word(std::string_view w) {
    for (const auto& [word, digit] : kDigitWords) {
        if (w == word) return digit;
    }
    return std::nullopt;
}

bool is_lower_alpha(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_phone_separator(char c) {
    return c == ' ' || c == '-' || c == '.' || c == '(' || c == ')' || c == '+' || c == '\t';
}

struct PhoneAtom {
    std::size_t begin, end;  // byte range in the lowercased text
    std::string digits;
};

// Atoms are maximal digit runs or digit words; a run of atoms continues while
// the gap between atoms holds at most three separator characters.
std::vector<std::vector<PhoneAtom>> phone_runs(const std::string& s) {
    std::vector<std::vector<PhoneAtom>> runs;
    std::vector<PhoneAtom> cur;
    std::size_t last_end = 0;
    auto flush = [&] {
        if (!cur.empty()) runs.push_back(std::move(cur));
        cur.clear();
    };
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        std::optional<PhoneAtom> atom;
        std::size_t j = i;
        if (is_digit(c)) {
            while (j < s.size() && is_digit(s[j])) ++j;
            atom = PhoneAtom{i, j, s.substr(i, j - i)};
        } else if (is_lower_alpha(c)) {
            while (j < s.size() && is_lower_alpha(s[j])) ++j;
            if (auto d = digit_word(std::string_view(s).substr(i, j - i))) {
                atom = PhoneAtom{i, j, std::string(1, *d)};
            }
        } else {
            j = i + 1;
        }
        if (atom) {
            if (!cur.empty()) {
                bool joined = atom->begin - last_end <= 3;
                for (std::size_t k = last_end; joined && k < atom->begin; ++k) {
                    joined = is_phone_separator(s[k]);
                }
                if (!joined) flush();
            }
            last_end = atom->end;
            cur.push_back(std::move(*atom));
        } else if (!is_phone_separator(c)) {
            flush();
        }
        i = j;
    }
    flush();
    return runs;
}

// ---------------------------------------------------------------------------
// Regex pattern table

enum class Field {
    age, cost, email, url, name, ethnicity, eye_color, hair_color, skin_color,
    height, weight, measurement, restriction,
};

constexpr std::string_view field_name(Field f) {
    switch (f) {
        case Field::age: return "ages";
        case Field::cost: return "costs";
        case Field::email: return "emails";
        case Field::url: return "urls";
        case Field::name: return "names";
        case Field::ethnicity: return "ethnicities";
        case Field::eye_color: return "eye_colors";
        case Field::hair_color: return "hair_colors";
        case Field::skin_color: return "skin_colors";
        case Field::height: return "heights_cm";
        case Field::weight: return "weights_kg";
        case Field::measurement: return "measurements";
        case Field::restriction: return "restrictions";
    }
    return "";
}

struct Pattern {
    std::string name;
    Field field;
    std::regex re;
};

constexpr const char* kCostUnit =
    R"((?:\s*(?:/|per|an?)\s*|\s*)(half\s*(?:hour|hr)|hh|30\s*min(?:s|utes)?|hours?|hrs?|h)?(?![a-z]))";

const std::vector<Pattern>& patterns() {
    static const std::vector<Pattern> table = [] {
        const auto flags = std::regex::ECMAScript | std::regex::optimize;
        auto p = [&](std::string name, Field f, const std::string& re) {
            return Pattern{std::move(name), f, std::regex(re, flags)};
        };
        std::vector<Pattern> t;
        t.push_back(p("age_suffix", Field::age,
                      R"(\b(\d{2})\s*(?:yo\b|y\.o\.?|y/o|yrs?\b|years?\s*old\b))"));
        t.push_back(p("age_prefix", Field::age, R"(\bage\s*[:=]?\s*(\d{2})\b)"));
        t.push_back(p("cost_dollar", Field::cost, std::string(R"(\$\s*(\d{2,4}))") + kCostUnit));
        t.push_back(p("cost_roses", Field::cost,
                      std::string(R"(\b(\d{2,4})\s*(?:roses?|dollars|usd)\b)") + kCostUnit));
        t.push_back(p("email", Field::email,
                      R"(\b[a-z0-9._%+\-]+@[a-z0-9\-]+(?:\.[a-z0-9\-]+)*\.[a-z]{2,}\b)"));
        t.push_back(p("url", Field::url, R"(\b(?:https?://|www\.)[a-z0-9\-._~/?#=&%+]*[a-z0-9/])"));
        t.push_back(p("name_intro", Field::name,
                      R"(\b(?:i'?m|i am|my name is|name'?s|ask for|this is|it'?s|xoxo)\s+([a-z]{3,15})\b)"));
        t.push_back(p("ethnicity_word", Field::ethnicity,
                      R"(\b(latina|asian|ebony|black|white|caucasian|hispanic|indian|thai|japanese|korean|chinese|filipina|brazilian|russian|italian|puerto rican|mixed|middle eastern|european|persian|cuban|colombian|mexican)\b(?!\s*-?\s*(?:hair|eye|skin|complexion|men\b|guys\b)))"));
        t.push_back(p("eye_color", Field::eye_color,
                      R"(\b(blue|green|brown|hazel|gray|grey|black|amber)\s*-?\s*eye[sd]?\b)"));
        t.push_back(p("hair_color", Field::hair_color,
                      R"(\b(blonde|blond|brunette|red|black|brown|auburn|pink|purple|silver|platinum|ginger)\s*-?\s*hair(?:ed)?\b)"));
        t.push_back(p("hair_standalone", Field::hair_color,
                      R"(\b(blonde|brunette|redhead)\b(?!\s*-?\s*hair))"));
        t.push_back(p("skin_color", Field::skin_color,
                      R"(\b(light|fair|dark|tan|tanned|olive|caramel|chocolate|pale|mocha)\s*-?\s*(?:skin(?:ned)?|complexion)\b)"));
        t.push_back(p("height_imperial", Field::height,
                      R"(\b([4-6])\s*(?:'|ft\b|feet\b|foot\b)\s*(?:(\d{1,2})\s*(?:"|''|in\b|inch(?:es)?\b)?)?)"));
        t.push_back(p("height_metric", Field::height, R"(\b(1[4-9]\d)\s*cm\b)"));
        t.push_back(p("weight_imperial", Field::weight, R"(\b(\d{2,3})\s*(?:lbs?|pounds)\b)"));
        t.push_back(p("weight_metric", Field::weight, R"(\b(\d{2,3})\s*kgs?\b)"));
        t.push_back(p("measurement", Field::measurement,
                      R"(\b(\d{2}[a-h]{0,3})\s*-\s*(\d{2})\s*-\s*(\d{2})\b)"));
        t.push_back(p("restriction_no", Field::restriction,
                      R"(\bno\s+(blocked\s+calls|private\s+(?:numbers|calls)|law\s+enforcement|cops|pimps|aa|african\s+americans?|black\s+men|texts?|rush(?:ing)?|bb|bareback|explicit\s+talk|drugs|couples)\b)"));
        t.push_back(p("restriction_only", Field::restriction, R"(\b(incall|outcall)\s+only\b)"));
        return t;
    }();
    return table;
}

// Words that follow introduction phrases but are not names.
const std::set<std::string>& name_stoplist() {
    static const std::set<std::string> words{
        "the", "and", "new", "here", "back", "your", "you", "available", "ready", "sweet",
        "sexy", "real", "very", "not", "just", "all", "now", "open", "only", "waiting",
        "looking", "hot", "young", "petite", "visiting", "town", "this", "that", "who",
        "what", "free", "hosting", "incall", "outcall", "one", "two", "out", "for", "fun",
        "friendly", "upscale", "classy", "discreet", "sure", "always", "still", "also",
        "time", "about", "from", "with", "baby", "babe", "honey", "latina", "asian",
        "ebony", "white", "black", "mixed", "blonde", "brunette", "redhead", "exotic",
        "curvy", "thick", "slim", "tall", "short", "busty", "cute", "pretty", "beautiful",
        "gorgeous", "almost", "finally", "really", "gonna", "going", "doing", "offering",
        "call", "text", "ask", "back", "available", "january", "weekend", "today",
        "tonight", "morning", "night", "like", "best", "our", "tired", "safe", "clean",
        "independent", "local", "passing", "staying", "special", "ur", "yours", "totally",
        "pure", "bout", "well", "more", "less", "over", "down", "into", "off", "got",
    };
    return words;
}

void add_value(FieldSet& fs, Field f, const std::smatch& m, std::vector<Extraction>& trace,
               const std::string& pattern) {
    auto record = [&](std::string value) {
        trace.push_back({pattern, std::string(field_name(f)), std::move(value)});
    };
    switch (f) {
        case Field::age: {
            const int age = std::stoi(m[1].str());
            if (age < 18) {
                fs.flagged_ages.insert(age);
                record("flagged:" + std::to_string(age));
            } else {
                fs.ages.insert(age);
                record(std::to_string(age));
            }
            break;
        }
        case Field::cost: {
            const int amount = std::stoi(m[1].str());
            CostUnit unit = CostUnit::unknown;
            if (m[2].matched) {
                const std::string u = m[2].str();
                if (u.starts_with("half") || u == "hh" || u.starts_with("30")) {
                    unit = CostUnit::per_half_hour;
                } else {
                    unit = CostUnit::per_hour;
                }
            }
            fs.costs.insert({amount, unit});
            record(std::to_string(amount) + "/" + std::string(to_string(unit)));
            break;
        }
        case Field::email:
            fs.emails.insert(m[0].str());
            record(m[0].str());
            break;
        case Field::url:
            fs.urls.insert(m[0].str());
            record(m[0].str());
            break;
        case Field::name: {
            const std::string name = m[1].str();
            if (name_stoplist().count(name)) return;
            fs.names.insert(name);
            record(name);
            break;
        }
        case Field::ethnicity: {
            std::string v = text::collapse_spaces(m[1].str());
            fs.ethnicities.insert(v);
            record(v);
            break;
        }
        case Field::eye_color: {
            std::string v = m[1].str() == "grey" ? "gray" : m[1].str();
            fs.eye_colors.insert(v);
            record(v);
            break;
        }
        case Field::hair_color: {
            std::string v = m[1].str();
            if (v == "blond") v = "blonde";
            if (v == "redhead" || v == "ginger") v = "red";
            fs.hair_colors.insert(v);
            record(v);
            break;
        }
        case Field::skin_color: {
            std::string v = m[1].str() == "tanned" ? "tan" : m[1].str();
            fs.skin_colors.insert(v);
            record(v);
            break;
        }
        case Field::height: {
            int cm = 0;
            if (pattern == "height_metric") {
                cm = std::stoi(m[1].str());
            } else {
                const int feet = std::stoi(m[1].str());
                const int inches = m[2].matched ? std::stoi(m[2].str()) : 0;
                if (inches > 11) return;
                cm = static_cast<int>(std::lround((feet * 12 + inches) * 2.54));
            }
            fs.heights_cm.insert(cm);
            record(std::to_string(cm));
            break;
        }
        case Field::weight: {
            int kg = std::stoi(m[1].str());
            if (pattern == "weight_imperial") {
                kg = static_cast<int>(std::lround(kg * 0.45359237));
            }
            if (kg < 30 || kg > 250) return;
            fs.weights_kg.insert(kg);
            record(std::to_string(kg));
            break;
        }
        case Field::measurement: {
            std::string v = m[1].str() + "-" + m[2].str() + "-" + m[3].str();
            fs.measurements.insert(v);
            record(v);
            break;
        }
        case Field::restriction: {
            std::string v = text::collapse_spaces(m[0].str());
            fs.restrictions.insert(v);
            record(v);
            break;
        }
    }
}

void extract_phones(const std::string& lower, FieldSet& fs, std::vector<Extraction>& trace) {
    for (const auto& run : phone_runs(lower)) {
        std::size_t i = 0;
        while (i < run.size()) {
            std::string digits;
            std::size_t j = i;
            bool found = false;
            for (; j < run.size(); ++j) {
                digits += run[j].digits;
                const bool eleven = digits.size() == 11 && digits[0] == '1';
                if (digits.size() == 10 || eleven) {
                    found = true;
                    break;
                }
                if (digits.size() > 11) break;
            }
            if (found) {
                const auto raw = std::string_view(lower).substr(run[i].begin,
                                                                run[j].end - run[i].begin);
                if (auto phone = normalize_phone(raw)) {
                    fs.phones.insert(*phone);
                    trace.push_back({"phone", "phones", *phone});
                }
                i = j + 1;
            } else {
                ++i;
            }
        }
    }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> pattern_table() {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("phones", "phone");
    for (const auto& p : patterns()) out.emplace_back(std::string(field_name(p.field)), p.name);
    return out;
}

std::optional<std::string> normalize_phone(std::string_view raw) {
    const std::string s = text::ascii_lower(raw);
    std::string digits;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (is_digit(c)) {
            digits.push_back(c);
            ++i;
        } else if (is_lower_alpha(c)) {
            std::size_t j = i;
            while (j < s.size() && is_lower_alpha(s[j])) ++j;
            auto d = digit_word(std::string_view(s).substr(i, j - i));
            if (!d) return std::nullopt;
            digits.push_back(*d);
            i = j;
        } else if (static_cast<unsigned char>(c) < 0x80 &&
                   (std::ispunct(static_cast<unsigned char>(c)) || text::is_ascii_space(c))) {
            ++i;
        } else {
            return std::nullopt;
        }
    }
    if (digits.size() == 11 && digits[0] == '1') digits.erase(0, 1);
    if (digits.size() != 10) return std::nullopt;
    return digits;
}

TracedFields extract_fields_traced(std::string_view input) {
    TracedFields out;
    if (input.empty()) return out;
    const std::string lower = text::ascii_lower(input);
    extract_phones(lower, out.fields, out.trace);
    for (const auto& p : patterns()) {
        for (std::sregex_iterator it(lower.begin(), lower.end(), p.re), end; it != end; ++it) {
            add_value(out.fields, p.field, *it, out.trace, p.name);
        }
    }
    return out;
}

FieldSet extract_fields(std::string_view text) { return extract_fields_traced(text).fields; }

Tokens tokenize(std::string_view input) {
    Tokens out;
    std::vector<std::string> seq;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 2) seq.push_back(cur);
        cur.clear();
    };
    for (char c : input) {
        const auto u = static_cast<unsigned char>(c);
        if (u < 0x80 && text::is_ascii_alnum(u)) {
            cur.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
        } else {
            flush();
        }
    }
    flush();
    for (std::size_t i = 0; i < seq.size(); ++i) {
        ++out.unigrams[seq[i]];
        if (i + 1 < seq.size()) ++out.bigrams[{seq[i], seq[i + 1]}];
    }
    return out;
}

std::vector<std::string> unigram_set(std::string_view text) {
    std::vector<std::string> out;
    for (auto& [tok, n] : tokenize(text).unigrams) out.push_back(tok);
    return out;
}

std::size_t special_char_count(std::string_view s) {
    std::size_t n = 0;
    for (char32_t c : text::decode_utf8(s)) {
        if (!text::is_ascii_alnum(c) && !text::is_ascii_space(c)) ++n;
    }
    return n;
}

namespace {

template <class Set>
nlohmann::json to_array(const Set& s) {
    auto arr = nlohmann::json::array();
    for (const auto& v : s) arr.push_back(v);
    return arr;
}

template <class T>
void read_array(const nlohmann::json& j, const char* key, std::set<T>& out) {
    if (auto it = j.find(key); it != j.end()) {
        for (const auto& v : *it) out.insert(v.get<T>());
    }
}

}  // namespace

nlohmann::json fields_to_json(const FieldSet& f) {
    nlohmann::json j;
    j["phones"] = to_array(f.phones);
    j["ages"] = to_array(f.ages);
    j["flagged_ages"] = to_array(f.flagged_ages);
    auto costs = nlohmann::json::array();
    for (const auto& c : f.costs) {
        costs.push_back({{"amount", c.amount}, {"unit", std::string(to_string(c.unit))}});
    }
    j["costs"] = costs;
    j["emails"] = to_array(f.emails);
    j["names"] = to_array(f.names);
    j["urls"] = to_array(f.urls);
    j["ethnicities"] = to_array(f.ethnicities);
    j["eye_colors"] = to_array(f.eye_colors);
    j["hair_colors"] = to_array(f.hair_colors);
    j["skin_colors"] = to_array(f.skin_colors);
    j["restrictions"] = to_array(f.restrictions);
    j["heights_cm"] = to_array(f.heights_cm);
    j["weights_kg"] = to_array(f.weights_kg);
    j["measurements"] = to_array(f.measurements);
    return j;
}

FieldSet fields_from_json(const nlohmann::json& j) {
    FieldSet f;
    read_array(j, "phones", f.phones);
    read_array(j, "ages", f.ages);
    read_array(j, "flagged_ages", f.flagged_ages);
    if (auto it = j.find("costs"); it != j.end()) {
        for (const auto& c : *it) {
            f.costs.insert({c.at("amount").get<int>(),
                            cost_unit_from_string(c.at("unit").get<std::string>())});
        }
    }
    read_array(j, "emails", f.emails);
    read_array(j, "names", f.names);
    read_array(j, "urls", f.urls);
    read_array(j, "ethnicities", f.ethnicities);
    read_array(j, "eye_colors", f.eye_colors);
    read_array(j, "hair_colors", f.hair_colors);
    read_array(j, "skin_colors", f.skin_colors);
    read_array(j, "restrictions", f.restrictions);
    read_array(j, "heights_cm", f.heights_cm);
    read_array(j, "weights_kg", f.weights_kg);
    read_array(j, "measurements", f.measurements);
    for (const auto& p : f.phones) {
        if (p.size() != 10) throw DataError("phone '" + p + "' is not 10 digits");
    }
    return f;
}

}  // namespace adlink
