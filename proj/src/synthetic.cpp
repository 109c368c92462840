#include "adlink/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "adlink/error.hpp"
#include "adlink/io.hpp"
#include "adlink/random.hpp"

namespace adlink {

std::string_view to_string(Archetype a) {
    return a == Archetype::organized ? "organized" : "independent";
}

Archetype archetype_from_string(std::string_view s) {
    if (s == "organized") return Archetype::organized;
    if (s == "independent") return Archetype::independent;
    throw DataError("unknown archetype '" + std::string(s) + "'");
}

void SyntheticSpec::validate() const {
    auto fail = [](const std::string& m) { throw UsageError("synthetic spec: " + m); };
    if (n_sources == 0) fail("n_sources must be positive");
    if (ads_per_source.lo < 1 || ads_per_source.hi < ads_per_source.lo) {
        fail("ads_per_source must be a positive range");
    }
    if (phones_per_source.lo < 1 || phones_per_source.hi < phones_per_source.lo) {
        fail("phones_per_source must be a positive range");
    }
    for (double p : {phone_visibility, second_phone_rate, repost_rate, organized_fraction,
                     phone_collision_rate}) {
        if (!(p >= 0.0 && p <= 1.0)) fail("probabilities must lie in [0, 1]");
    }
    if (time_span_days < 1) fail("time_span_days must be positive");
    if (signature_df < 1 || image_df < 1) fail("signature_df and image_df must be positive");
    if (generic_vocabulary < 1) fail("generic_vocabulary must be positive");
}

namespace {

struct Location {
    std::string city;
    std::string state;
};

const std::vector<Location> kLocations = {
    {"boston", "MA"},       {"worcester", "MA"},    {"springfield", "MA"},
    {"new york", "NY"},     {"buffalo", "NY"},      {"albany", "NY"},
    {"philadelphia", "PA"}, {"pittsburgh", "PA"},   {"harrisburg", "PA"},
    {"chicago", "IL"},      {"peoria", "IL"},       {"detroit", "MI"},
    {"lansing", "MI"},      {"grand rapids", "MI"}, {"cleveland", "OH"},
    {"columbus", "OH"},     {"cincinnati", "OH"},   {"atlanta", "GA"},
    {"savannah", "GA"},     {"miami", "FL"},        {"orlando", "FL"},
    {"tampa", "FL"},        {"jacksonville", "FL"}, {"houston", "TX"},
    {"dallas", "TX"},       {"austin", "TX"},       {"san antonio", "TX"},
    {"el paso", "TX"},      {"phoenix", "AZ"},      {"tucson", "AZ"},
    {"los angeles", "CA"},  {"san diego", "CA"},    {"oakland", "CA"},
    {"sacramento", "CA"},   {"fresno", "CA"},       {"seattle", "WA"},
    {"spokane", "WA"},      {"portland", "OR"},     {"denver", "CO"},
    {"las vegas", "NV"},    {"reno", "NV"},         {"baltimore", "MD"},
    {"newark", "NJ"},       {"trenton", "NJ"},      {"charlotte", "NC"},
    {"raleigh", "NC"},      {"nashville", "TN"},    {"memphis", "TN"},
};

const std::vector<std::string> kNames = {
    "paris", "victoria", "nikki", "candy", "diamond", "destiny", "jasmine", "crystal",
    "amber", "bella", "brandy", "chloe", "daisy", "faith", "gigi",
    "india", "jade", "kayla", "lola", "mia", "nina", "olivia", "precious", "queen",
    "roxy", "sasha", "tiffany", "unique", "vanessa", "whitney", "xena", "yasmin",
    "zoe", "alexis", "bianca", "carmen", "delilah", "essence", "fantasia", "gabriella",
    "heaven", "isabella", "jessica", "kendra", "lexi", "monique", "natalia", "paige",
    "raven", "sierra", "stormy", "trinity", "valentina", "vivian", "angel", "aaliyah",
    "brooke", "cherry", "dominique", "envy", "felicia", "ginger", "harmony", "ivy",
    "jazmine", "kiki", "layla", "mercedes", "nadia", "octavia", "porsha", "rosa",
    "selena", "tatiana", "venus", "willow", "scarlett", "savannah", "skyler", "summer",
    "tori", "star", "luna", "kylie", "keisha", "kimberly", "lacey", "leah", "lucy",
    "maya", "melody", "misty", "nicole", "passion", "peaches", "rain", "rebecca",
};

const std::vector<std::string> kEthnicities = {
    "latina", "asian", "ebony", "white", "caucasian", "hispanic", "indian", "thai",
    "japanese", "korean", "filipina", "brazilian", "russian", "italian", "mixed", "cuban",
};
const std::vector<std::string> kEyeColors = {"blue", "green", "brown", "hazel", "gray"};
const std::vector<std::string> kHairColors = {"blonde", "brunette", "red", "black", "brown",
                                              "auburn"};
const std::vector<std::string> kSkinTones = {"light", "fair", "dark", "tan", "olive", "caramel"};
const std::vector<std::string> kRestrictions = {
    "no blocked calls", "no law enforcement", "no pimps", "no texts", "no rush",
    "no private numbers", "incall only", "outcall only", "no explicit talk", "no drugs",
};

const std::vector<std::string> kOpeners = {
    "hey gentlemen", "new in town", "hi guys", "back in town", "hello boys",
    "last days in town", "visiting this week", "sweet treat waiting", "are you ready",
    "hey there handsome",
};
const std::vector<std::string> kClosers = {
    "call or text anytime", "serious inquiries only", "available day and night",
    "satisfaction guaranteed", "dont miss out", "see you soon", "treat yourself today",
};
const std::vector<std::string> kFillers = {
    "sexy", "sweet", "upscale", "discreet", "fun", "friendly", "classy", "young",
    "petite", "curvy", "real", "pics", "special", "tonight", "weekend", "play",
    "relax", "unwind", "treat", "yourself", "gentleman", "generous", "respectful",
    "clean", "safe", "private", "incall", "outcall", "available", "now", "today",
    "come", "see", "me", "baby", "love", "kisses", "hot", "busy", "hours",
    "company", "elegant", "exotic", "stunning", "experience", "amazing", "open", "minded",
};
const std::vector<std::string> kEmoji = {
    "💋", "😘", "🔥", "💦", "🌹", "❤", "✨", "👅", "🍒", "💯", "🌸", "😍", "💕", "⭐",
    "🎀", "🦋", "💎", "👑", "🍑", "😈", "💖", "🌺", "🥰", "*", "~", "#", "!", "♥", "★",
};
const std::vector<std::string> kNameIntros = {"im", "my name is", "ask for", "its", "xoxo"};
const std::vector<std::string> kPhoneIntros = {"call", "text me", "call or text", "☎", "📞"};

const char* const kConsonants[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r",
                                   "s", "t", "v", "z", "sh", "ch", "tr", "br"};
const char* const kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou", "ee"};

class WordFactory {
public:
    WordFactory() {
        auto add = [&](const std::string& phrase) {
            std::istringstream ss(phrase);
            for (std::string w; ss >> w;) used_.insert(w);
        };
        for (const auto& v : {kNames, kEthnicities, kEyeColors, kHairColors, kSkinTones,
                              kRestrictions, kOpeners, kClosers, kFillers, kNameIntros}) {
            for (const auto& w : v) add(w);
        }
        for (const auto& l : kLocations) add(l.city);
        for (const char* w : {"zero", "one", "two", "three", "four", "five", "six", "seven",
                              "eight", "nine", "hair", "eyes", "skin", "roses", "hour", "only",
                              "age", "old", "years", "lbs"}) {
            used_.insert(w);
        }
    }

    std::string make(Rng& rng, int min_syllables, int max_syllables) {
        for (;;) {
            std::string w;
            const int n = uniform_int(rng, min_syllables, max_syllables);
            for (int s = 0; s < n; ++s) {
                w += kConsonants[uniform_index(rng, std::size(kConsonants))];
                w += kVowels[uniform_index(rng, std::size(kVowels))];
            }
            if (bernoulli(rng, 0.3)) w += kConsonants[uniform_index(rng, 14)];
            if (used_.insert(w).second) return w;
        }
    }

private:
    std::set<std::string> used_;
};

std::string random_hex(Rng& rng) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
    return buf;
}

std::string random_phone(Rng& rng) {
    std::string p;
    p += static_cast<char>('2' + uniform_index(rng, 8));
    p += static_cast<char>('0' + uniform_index(rng, 10));
    p += static_cast<char>('0' + uniform_index(rng, 10));
    p += static_cast<char>('2' + uniform_index(rng, 8));
    for (int i = 0; i < 6; ++i) p += static_cast<char>('0' + uniform_index(rng, 10));
    return p;
}

const char* const kDigitNames[] = {"zero", "one", "two", "three", "four",
                                   "five", "six", "seven", "eight", "nine"};

// Writes a 10-digit phone in one of several obfuscated layouts.
std::string format_phone(const std::string& p, int style, Rng& rng) {
    const std::string a = p.substr(0, 3), b = p.substr(3, 3), c = p.substr(6, 4);
    switch (style) {
        case 0: return a + "-" + b + "-" + c;
        case 1: return "(" + a + ") " + b + "-" + c;
        case 2: return a + "." + b + "." + c;
        case 3: return a + " " + b + " " + c;
        case 4: return p;
        case 5: return "1-" + a + "-" + b + "-" + c;
        case 6: {
            // Spell out a few digits; adjacent words need a space between them.
            const std::string grouped = a + "-" + b + "-" + c;
            std::vector<bool> spell(grouped.size(), false);
            for (int k = 0; k < 3; ++k) spell[uniform_index(rng, grouped.size())] = true;
            std::string out;
            bool prev_word = false;
            for (std::size_t i = 0; i < grouped.size(); ++i) {
                const char ch = grouped[i];
                if (ch == '-') {
                    out += '-';
                    prev_word = false;
                } else if (spell[i]) {
                    if (prev_word) out += ' ';
                    out += kDigitNames[ch - '0'];
                    prev_word = true;
                } else {
                    out += ch;
                    prev_word = false;
                }
            }
            return out;
        }
        default: {
            std::string out = a + "-" + b + "-" + c;
            // A lone 'o' between digits reads as zero.
            for (std::size_t i = 1; i + 1 < out.size(); ++i) {
                if (out[i] == '0' && out[i - 1] != 'o' && out[i + 1] != 'o') out[i] = 'o';
            }
            return out;
        }
    }
}

std::string capitalize(std::string w) {
    if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
    return w;
}

// Balanced dealing: picks `count` items from [0, pool) preferring the least
// used so far, ties broken randomly. Returns indices in ascending order.
std::vector<std::size_t> deal(Rng& rng, std::vector<std::size_t>& usage, std::size_t count) {
    std::vector<std::size_t> order(usage.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle(rng, order);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return usage[x] < usage[y]; });
    order.resize(std::min(count, order.size()));
    for (auto i : order) ++usage[i];
    std::sort(order.begin(), order.end());
    return order;
}

// Covering deal for signature tokens: each new ad greedily takes tokens held
// by earlier ads it does not share a token with yet, so same-source pairs
// almost always meet on some rare token. Usage never exceeds `cap`.
std::vector<std::size_t> deal_covering(Rng& rng, std::vector<std::vector<std::size_t>>& holders,
                                       std::size_t n_prev, std::size_t count, std::size_t cap) {
    std::vector<bool> shared(n_prev, false);
    std::vector<bool> taken(holders.size(), false);
    std::vector<std::size_t> order(holders.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle(rng, order);
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < count; ++c) {
        std::size_t best = holders.size(), best_gain = 0, best_use = 0;
        for (auto t : order) {
            if (taken[t] || holders[t].size() >= cap) continue;
            std::size_t gain = 0;
            for (auto h : holders[t]) gain += !shared[h];
            const std::size_t use = holders[t].size();
            if (best == holders.size() || gain > best_gain || (gain == best_gain && use < best_use)) {
                best = t;
                best_gain = gain;
                best_use = use;
            }
        }
        if (best == holders.size()) break;  // pool exhausted
        taken[best] = true;
        for (auto h : holders[best]) shared[h] = true;
        holders[best].push_back(n_prev);
        out.push_back(best);
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct Persona {
    SourceInfo info;
    std::vector<Location> locations;
    std::int64_t window_start = 0;
    std::int64_t window_seconds = 0;
    int age = 25;
    std::string ethnicity, eye, hair, skin;
    int height_in = 64;
    int weight_lb = 125;
    std::string measurement;
    int rate = 200;
    int rate_style = 0;
    std::vector<std::string> restrictions;
    std::vector<std::string> emoji;
    double emoji_density = 0.5;
    std::string opener;
    std::string closer;
    int phone_style = 0;
    int name_intro = 0;
    std::vector<std::string> core;      // fixed phrase shared by every ad
    std::vector<std::string> signature;  // dealt tokens
    std::vector<std::vector<std::size_t>> signature_holders;  // original-ad ordinals per token
    std::size_t originals = 0;
    std::vector<std::string> images;
    std::vector<std::size_t> image_usage;
};

struct Draft {
    std::vector<std::string> segments;  // joined with spaces/emoji at render time
    std::size_t phone_segment = 0;
    bool has_phone_segment = false;
    std::vector<std::string> images;
    std::int64_t posted_at = 0;
    Location location;
};

class Generator {
public:
    explicit Generator(const SyntheticSpec& spec) : spec_(spec), rng_(spec.rng_seed) {}

    SyntheticCorpus run() {
        build_generic_vocabulary();
        build_stock_images();
        std::vector<Persona> personas = build_personas();
        std::vector<std::pair<std::size_t, Draft>> drafts;
        for (std::size_t s = 0; s < personas.size(); ++s) {
            for (auto& d : make_drafts(personas[s])) drafts.emplace_back(s, std::move(d));
        }
        shuffle(rng_, drafts);

        SyntheticCorpus out;
        char id[32];
        for (std::size_t k = 0; k < drafts.size(); ++k) {
            auto& [s, d] = drafts[k];
            std::snprintf(id, sizeof id, "ad%06zu", k);
            Ad ad;
            ad.id = id;
            ad.text = render(personas[s], d);
            ad.posted_at = d.posted_at;
            ad.city = d.location.city;
            ad.state = d.location.state;
            ad.image_hashes = d.images;
            std::sort(ad.image_hashes.begin(), ad.image_hashes.end());
            ad.image_hashes.erase(std::unique(ad.image_hashes.begin(), ad.image_hashes.end()),
                                  ad.image_hashes.end());
            ad.source_id = personas[s].info.id;
            out.ads.push_back(std::move(ad));
        }
        for (auto& p : personas) out.sources.push_back(std::move(p.info));
        return out;
    }

private:
    void build_generic_vocabulary() {
        generic_.reserve(spec_.generic_vocabulary);
        for (std::size_t i = 0; i < spec_.generic_vocabulary; ++i) {
            generic_.push_back(words_.make(rng_, 2, 3));
        }
        // Zipf(1) cumulative weights over vocabulary rank.
        zipf_cdf_.resize(generic_.size());
        double acc = 0;
        for (std::size_t r = 0; r < generic_.size(); ++r) {
            acc += 1.0 / static_cast<double>(r + 1);
            zipf_cdf_[r] = acc;
        }
    }

    void build_stock_images() {
        for (int i = 0; i < 12; ++i) stock_images_.push_back(random_hex(rng_));
    }

    const std::string& generic_word() {
        const double u = uniform_real(rng_) * zipf_cdf_.back();
        auto it = std::lower_bound(zipf_cdf_.begin(), zipf_cdf_.end(), u);
        return generic_[std::min<std::size_t>(it - zipf_cdf_.begin(), generic_.size() - 1)];
    }

    std::vector<Persona> build_personas() {
        const std::size_t n = spec_.n_sources;
        const auto n_organized = static_cast<std::size_t>(
            std::llround(spec_.organized_fraction * static_cast<double>(n)));
        std::vector<bool> organized(n, false);
        std::fill(organized.begin(), organized.begin() + std::min(n_organized, n), true);
        shuffle(rng_, organized);

        std::set<std::string> used_phones;
        std::vector<Persona> personas(n);
        char id[32];
        for (std::size_t s = 0; s < n; ++s) {
            Persona& p = personas[s];
            std::snprintf(id, sizeof id, "src%04zu", s);
            p.info.id = id;
            p.info.archetype = organized[s] ? Archetype::organized : Archetype::independent;
            const bool org = organized[s];
            p.info.n_ads = static_cast<std::size_t>(
                uniform_int(rng_, spec_.ads_per_source.lo, spec_.ads_per_source.hi));

            int n_phones = uniform_int(rng_, spec_.phones_per_source.lo, spec_.phones_per_source.hi);
            if (org) ++n_phones;
            for (int k = 0; k < n_phones; ++k) {
                if (s > 0 && k > 0 && bernoulli(rng_, spec_.phone_collision_rate)) {
                    const auto& other = personas[uniform_index(rng_, s)].info.phones;
                    p.info.phones.push_back(pick(rng_, other));
                    continue;
                }
                std::string phone;
                do {
                    phone = random_phone(rng_);
                } while (!used_phones.insert(phone).second);
                p.info.phones.push_back(phone);
            }

            const int n_names = org ? uniform_int(rng_, 3, 6) : (bernoulli(rng_, 0.8) ? 1 : 2);
            while (static_cast<int>(p.info.names.size()) < n_names) {
                const auto& name = pick(rng_, kNames);
                if (std::find(p.info.names.begin(), p.info.names.end(), name) == p.info.names.end()) {
                    p.info.names.push_back(name);
                }
            }

            const Location home = pick(rng_, kLocations);
            p.locations.push_back(home);
            if (org) {
                const int n_loc = uniform_int(rng_, 3, 6);
                while (static_cast<int>(p.locations.size()) < n_loc) {
                    const auto& loc = pick(rng_, kLocations);
                    bool dup = false;
                    for (const auto& l : p.locations) dup = dup || l.city == loc.city;
                    if (!dup) p.locations.push_back(loc);
                }
            } else if (bernoulli(rng_, 0.25)) {
                for (const auto& loc : kLocations) {
                    if (loc.state == home.state && loc.city != home.city) {
                        p.locations.push_back(loc);
                        break;
                    }
                }
            }

            const int span = spec_.time_span_days;
            const int dur_days = org ? uniform_int(rng_, std::min(span, 120), std::min(span, 300))
                                     : uniform_int(rng_, std::min(span, 10), std::min(span, 60));
            p.window_seconds = static_cast<std::int64_t>(dur_days) * 86400;
            p.window_start = spec_.start_time +
                             static_cast<std::int64_t>(uniform_int(rng_, 0, span - dur_days)) * 86400;

            p.age = uniform_int(rng_, 19, 35);
            p.ethnicity = pick(rng_, kEthnicities);
            p.eye = pick(rng_, kEyeColors);
            p.hair = pick(rng_, kHairColors);
            p.skin = pick(rng_, kSkinTones);
            p.height_in = uniform_int(rng_, 58, 70);
            p.weight_lb = uniform_int(rng_, 100, 170);
            p.measurement = std::to_string(uniform_int(rng_, 32, 38)) +
                            static_cast<char>('a' + uniform_int(rng_, 0, 4)) + "-" +
                            std::to_string(uniform_int(rng_, 24, 30)) + "-" +
                            std::to_string(uniform_int(rng_, 34, 40));
            p.rate = 10 * uniform_int(rng_, 8, 40);
            p.rate_style = uniform_int(rng_, 0, 3);
            const int n_restr = uniform_int(rng_, 0, 2);
            for (int k = 0; k < n_restr; ++k) p.restrictions.push_back(pick(rng_, kRestrictions));
            for (int k = 0; k < 3; ++k) p.emoji.push_back(pick(rng_, kEmoji));
            p.emoji_density = 0.15 + 0.7 * uniform_real(rng_);
            p.opener = pick(rng_, kOpeners);
            p.closer = pick(rng_, kClosers);
            p.phone_style = uniform_int(rng_, 0, 7);
            p.name_intro = uniform_int(rng_, 0, static_cast<int>(kNameIntros.size()) - 1);

            for (std::size_t k = 0; k < spec_.core_tokens; ++k) p.core.push_back(words_.make(rng_, 2, 4));
            for (int k = 0; k < 5; ++k) p.core.push_back(pick(rng_, kFillers));
            shuffle(rng_, p.core);

            const std::size_t originals = std::max<std::size_t>(1, p.info.n_ads);
            const std::size_t k_sig =
                (originals * spec_.signature_tokens_per_ad + spec_.signature_df - 1) / spec_.signature_df;
            for (std::size_t k = 0; k < std::max(k_sig, spec_.signature_tokens_per_ad); ++k) {
                p.signature.push_back(words_.make(rng_, 2, 4));
            }
            p.signature_holders.assign(p.signature.size(), {});
            const std::size_t k_img = std::max<std::size_t>(
                spec_.images_per_ad, (originals * spec_.images_per_ad + spec_.image_df - 1) / spec_.image_df);
            for (std::size_t k = 0; k < k_img; ++k) p.images.push_back(random_hex(rng_));
            p.image_usage.assign(p.images.size(), 0);
        }
        return personas;
    }

    std::string phone_segment(const Persona& p) {
        std::vector<std::string> shown;
        shown.push_back(pick(rng_, p.info.phones));
        if (p.info.phones.size() > 1 && bernoulli(rng_, spec_.second_phone_rate)) {
            std::string other;
            do {
                other = pick(rng_, p.info.phones);
            } while (other == shown[0]);
            shown.push_back(other);
        }
        std::string seg = bernoulli(rng_, 0.8) ? kPhoneIntros[p.phone_style % kPhoneIntros.size()]
                                               : pick(rng_, kPhoneIntros);
        for (std::size_t k = 0; k < shown.size(); ++k) {
            const int style = bernoulli(rng_, 0.7) ? p.phone_style : uniform_int(rng_, 0, 7);
            seg += k == 0 ? " " : " or ";
            seg += format_phone(shown[k], style, rng_);
        }
        return seg;
    }

    Location pick_location(const Persona& p) {
        if (p.locations.size() == 1 || bernoulli(rng_, 0.5)) return p.locations.front();
        return p.locations[uniform_index(rng_, p.locations.size())];
    }

    std::int64_t pick_time(const Persona& p) {
        return p.window_start + static_cast<std::int64_t>(uniform_real(rng_) *
                                                          static_cast<double>(p.window_seconds));
    }

    std::vector<Draft> make_drafts(Persona& p) {
        std::vector<Draft> drafts;
        const bool org = p.info.archetype == Archetype::organized;
        for (std::size_t a = 0; a < p.info.n_ads; ++a) {
            if (!drafts.empty() && bernoulli(rng_, spec_.repost_rate)) {
                // Repost: same body, new time, phone line possibly re-rolled.
                Draft d = drafts[uniform_index(rng_, drafts.size())];
                d.posted_at = pick_time(p);
                if (bernoulli(rng_, 0.2)) d.location = pick_location(p);
                if (d.has_phone_segment && bernoulli(rng_, 0.5)) {
                    d.segments[d.phone_segment] = phone_segment(p);
                }
                drafts.push_back(std::move(d));
                continue;
            }

            Draft d;
            d.posted_at = pick_time(p);
            d.location = pick_location(p);
            auto& seg = d.segments;
            seg.push_back(bernoulli(rng_, 0.85) ? p.opener : pick(rng_, kOpeners));
            if (bernoulli(rng_, 0.85)) {
                const auto& intro = bernoulli(rng_, 0.7) ? kNameIntros[p.name_intro] : pick(rng_, kNameIntros);
                std::string name = pick(rng_, p.info.names);
                seg.push_back(intro + " " + (bernoulli(rng_, 0.7) ? capitalize(name) : name));
            }
            if (bernoulli(rng_, 0.6)) {
                const int age = p.age + (bernoulli(rng_, 0.2) ? 1 : 0);
                switch (uniform_int(rng_, 0, 2)) {
                    case 0: seg.push_back(std::to_string(age) + "yo"); break;
                    case 1: seg.push_back("age " + std::to_string(age)); break;
                    default: seg.push_back(std::to_string(age) + " years old"); break;
                }
            }
            if (bernoulli(rng_, 0.5)) seg.push_back(p.ethnicity);
            if (bernoulli(rng_, 0.5)) seg.push_back(p.eye + " eyes");
            if (bernoulli(rng_, 0.5)) seg.push_back(p.hair + " hair");
            if (bernoulli(rng_, 0.3)) seg.push_back(p.skin + " skin");

            if (bernoulli(rng_, 0.9)) {
                std::vector<std::string> core = p.core;
                if (bernoulli(rng_, 0.3)) core.erase(core.begin() + uniform_index(rng_, core.size()));
                std::string s;
                for (const auto& w : core) s += (s.empty() ? "" : " ") + w;
                seg.push_back(s);
            }

            // Signature tokens, with generic words sprinkled between them.
            const auto chosen = deal_covering(rng_, p.signature_holders, p.originals++,
                                              spec_.signature_tokens_per_ad, spec_.signature_df);
            std::vector<std::string> body;
            for (auto i : chosen) body.push_back(p.signature[i]);
            for (std::size_t k = 0; k < spec_.generic_tokens_per_ad; ++k) {
                body.insert(body.begin() + uniform_index(rng_, body.size() + 1), generic_word());
            }
            const std::size_t chunk = 6;
            for (std::size_t i = 0; i < body.size(); i += chunk) {
                std::string s;
                for (std::size_t k = i; k < std::min(body.size(), i + chunk); ++k) {
                    s += (s.empty() ? "" : " ") + body[k];
                }
                seg.push_back(s);
            }

            if (bernoulli(rng_, 0.3)) {
                seg.push_back(std::to_string(p.height_in / 12) + "'" + std::to_string(p.height_in % 12) + "\"");
            }
            if (bernoulli(rng_, 0.3)) seg.push_back(std::to_string(p.weight_lb) + "lbs");
            if (bernoulli(rng_, 0.25)) seg.push_back(p.measurement);

            if (bernoulli(rng_, 0.75)) {
                const std::string amt = std::to_string(p.rate);
                switch (p.rate_style) {
                    case 0: seg.push_back("$" + amt + "/hr"); break;
                    case 1: seg.push_back("$" + amt + " hour"); break;
                    case 2: seg.push_back(std::to_string(p.rate / 2 + 20) + " roses hh"); break;
                    default: seg.push_back(amt + " roses"); break;
                }
            }
            if (bernoulli(rng_, spec_.phone_visibility)) {
                d.phone_segment = seg.size();
                d.has_phone_segment = true;
                seg.push_back(phone_segment(p));
            }
            for (const auto& r : p.restrictions) {
                if (bernoulli(rng_, 0.6)) seg.push_back(r);
            }
            if (bernoulli(rng_, 0.5)) seg.push_back(p.closer);

            for (auto i : deal(rng_, p.image_usage, spec_.images_per_ad)) d.images.push_back(p.images[i]);
            if (org && bernoulli(rng_, 0.4)) d.images.push_back(pick(rng_, stock_images_));
            drafts.push_back(std::move(d));
        }
        return drafts;
    }

    std::string render(const Persona& p, const Draft& d) {
        std::string out;
        for (std::size_t i = 0; i < d.segments.size(); ++i) {
            if (i > 0) {
                out += ' ';
                if (bernoulli(rng_, p.emoji_density)) {
                    const int run = uniform_int(rng_, 1, 4);
                    for (int k = 0; k < run; ++k) {
                        out += bernoulli(rng_, 0.8) ? pick(rng_, p.emoji) : pick(rng_, kEmoji);
                    }
                    out += ' ';
                }
            }
            out += d.segments[i];
        }
        return out;
    }

    const SyntheticSpec& spec_;
    Rng rng_;
    WordFactory words_;
    std::vector<std::string> generic_;
    std::vector<double> zipf_cdf_;
    std::vector<std::string> stock_images_;
};

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    return Generator(spec).run();
}

std::string sources_to_csv(const std::vector<SourceInfo>& sources) {
    std::string out = "source_id,archetype,n_ads,phones,names\n";
    for (const auto& s : sources) {
        std::string phones, names;
        for (const auto& p : s.phones) phones += (phones.empty() ? "" : ";") + p;
        for (const auto& n : s.names) names += (names.empty() ? "" : ";") + n;
        out += io::csv_escape(s.id) + "," + std::string(to_string(s.archetype)) + "," +
               std::to_string(s.n_ads) + "," + phones + "," + names + "\n";
    }
    return out;
}

std::vector<std::pair<std::string, Archetype>> parse_sources_csv(std::string_view content) {
    std::vector<std::pair<std::string, Archetype>> out;
    auto rows = io::parse_csv(content);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() < 2) throw DataError("sources.csv: short row");
        out.emplace_back(rows[i][0], archetype_from_string(rows[i][1]));
    }
    return out;
}

}  // namespace adlink
