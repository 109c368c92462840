#include "adlink/config.hpp"

#include <functional>
#include <map>

#include "adlink/error.hpp"
#include "adlink/io.hpp"
#include "adlink/resolve.hpp"
#include "adlink/text.hpp"

namespace adlink {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::size_t to_size(std::string_view v) {
    const long long x = io::parse_int(v);
    if (x < 0) throw UsageError("expected a non-negative integer, got '" + std::string(v) + "'");
    return static_cast<std::size_t>(x);
}

bool to_bool(std::string_view v) {
    const std::string s = text::ascii_lower(v);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw UsageError("expected a boolean, got '" + std::string(v) + "'");
}

template <class T, class Parse>
std::vector<T> to_list(std::string_view v, Parse parse) {
    std::vector<T> out;
    std::size_t start = 0;
    while (start <= v.size()) {
        const auto comma = v.find(',', start);
        const std::string item = trim(v.substr(start, comma == std::string_view::npos ? v.npos : comma - start));
        if (!item.empty()) out.push_back(parse(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (const auto& v : values) {
        if (!out.empty()) out += ",";
        if constexpr (std::is_floating_point_v<T>) {
            out += io::format_double(v);
        } else {
            out += std::to_string(v);
        }
    }
    return out;
}

struct Field {
    std::function<void(PipelineConfig&, std::string_view)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

#define SIZE_FIELD(key, member)                                                         \
    {key, {[](PipelineConfig& c, std::string_view v) { c.member = to_size(v); },       \
           [](const PipelineConfig& c) { return std::to_string(c.member); }}}
#define INT_FIELD(key, member)                                                                     \
    {key, {[](PipelineConfig& c, std::string_view v) { c.member = static_cast<int>(io::parse_int(v)); }, \
           [](const PipelineConfig& c) { return std::to_string(c.member); }}}
#define DOUBLE_FIELD(key, member)                                                       \
    {key, {[](PipelineConfig& c, std::string_view v) { c.member = io::parse_double(v); }, \
           [](const PipelineConfig& c) { return io::format_double(c.member); }}}
#define BOOL_FIELD(key, member)                                                     \
    {key, {[](PipelineConfig& c, std::string_view v) { c.member = to_bool(v); },   \
           [](const PipelineConfig& c) { return std::string(c.member ? "true" : "false"); }}}
#define PATH_FIELD(key, member)                                                     \
    {key, {[](PipelineConfig& c, std::string_view v) { c.member = std::string(v); }, \
           [](const PipelineConfig& c) { return c.member.string(); }}}

const std::map<std::string, Field, std::less<>>& fields() {
    static const std::map<std::string, Field, std::less<>> table = {
        PATH_FIELD("out_dir", out_dir),
        PATH_FIELD("corpus", corpus),
        PATH_FIELD("labels", labels),
        {"seed", {[](PipelineConfig& c, std::string_view v) { c.seed = to_size(v); },
                  [](const PipelineConfig& c) { return std::to_string(c.seed); }}},
        {"threads", {[](PipelineConfig& c, std::string_view v) { c.threads = static_cast<unsigned>(to_size(v)); },
                     [](const PipelineConfig& c) { return std::to_string(c.threads); }}},

        SIZE_FIELD("synth.n_sources", synth.n_sources),
        INT_FIELD("synth.ads_min", synth.ads_per_source.lo),
        INT_FIELD("synth.ads_max", synth.ads_per_source.hi),
        INT_FIELD("synth.phones_min", synth.phones_per_source.lo),
        INT_FIELD("synth.phones_max", synth.phones_per_source.hi),
        DOUBLE_FIELD("synth.phone_visibility", synth.phone_visibility),
        DOUBLE_FIELD("synth.second_phone_rate", synth.second_phone_rate),
        DOUBLE_FIELD("synth.repost_rate", synth.repost_rate),
        DOUBLE_FIELD("synth.organized_fraction", synth.organized_fraction),
        DOUBLE_FIELD("synth.phone_collision_rate", synth.phone_collision_rate),
        INT_FIELD("synth.time_span_days", synth.time_span_days),
        SIZE_FIELD("synth.signature_tokens_per_ad", synth.signature_tokens_per_ad),
        SIZE_FIELD("synth.signature_df", synth.signature_df),
        SIZE_FIELD("synth.core_tokens", synth.core_tokens),
        SIZE_FIELD("synth.images_per_ad", synth.images_per_ad),
        SIZE_FIELD("synth.image_df", synth.image_df),
        SIZE_FIELD("synth.generic_vocabulary", synth.generic_vocabulary),
        SIZE_FIELD("synth.generic_tokens_per_ad", synth.generic_tokens_per_ad),

        SIZE_FIELD("sampler.n_pos", n_pos),
        SIZE_FIELD("sampler.n_neg", n_neg),
        BOOL_FIELD("sampler.same_city_negatives", same_city_negatives),

        {"model.kind", {[](PipelineConfig& c, std::string_view v) { c.model_kind = model_kind_from_string(v); },
                        [](const PipelineConfig& c) { return std::string(to_string(c.model_kind)); }}},
        DOUBLE_FIELD("model.holdout_fraction", holdout_fraction),
        DOUBLE_FIELD("model.logistic.l2", logistic.l2),
        INT_FIELD("model.logistic.epochs", logistic.epochs),
        DOUBLE_FIELD("model.logistic.lr", logistic.lr),
        SIZE_FIELD("model.forest.n_trees", forest.n_trees),
        INT_FIELD("model.forest.max_depth", forest.max_depth),
        SIZE_FIELD("model.forest.min_leaf", forest.min_leaf),
        SIZE_FIELD("model.forest.features_per_split", forest.features_per_split),

        SIZE_FIELD("blocking.rarity_threshold", blocking.rarity_threshold),
        DOUBLE_FIELD("blocking.rarity_fraction", blocking.rarity_fraction),
        SIZE_FIELD("blocking.max_block_size", blocking.max_block_size),

        {"resolve.thresholds",
         {[](PipelineConfig& c, std::string_view v) { c.thresholds = to_list<double>(v, io::parse_double); },
          [](const PipelineConfig& c) { return join(c.thresholds); }}},
        DOUBLE_FIELD("resolve.cap_fraction", cap_fraction),
        SIZE_FIELD("resolve.sweep_sample", sweep_sample),

        SIZE_FIELD("cluster.min_size", min_cluster_size),
        SIZE_FIELD("cluster.n_folds", n_folds),
        SIZE_FIELD("cluster.n_baselines", n_baselines),
        SIZE_FIELD("cluster.max_rules", rules.max_rules),
        SIZE_FIELD("cluster.min_support", rules.min_support),
        SIZE_FIELD("cluster.beam_width", rules.beam_width),
        SIZE_FIELD("cluster.max_conditions", rules.max_conditions),
        SIZE_FIELD("cluster.n_cuts", rules.n_cuts),
        {"cluster.pn_max_rules",
         {[](PipelineConfig& c, std::string_view v) { c.pn_max_rules = to_list<std::size_t>(v, to_size); },
          [](const PipelineConfig& c) { return join(c.pn_max_rules); }}},
    };
    return table;
}

#undef SIZE_FIELD
#undef INT_FIELD
#undef DOUBLE_FIELD
#undef BOOL_FIELD
#undef PATH_FIELD

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view value) {
    const auto it = fields().find(key);
    if (it == fields().end()) throw UsageError("unknown config key '" + std::string(key) + "'");
    try {
        it->second.set(*this, value);
    } catch (const Error& e) {
        throw UsageError("config key '" + std::string(key) + "': " + e.what());
    }
}

void PipelineConfig::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw UsageError("config: " + what);
    };
    synth.validate();
    require(threads >= 1, "threads must be >= 1");
    require(n_pos >= 1 && n_neg >= 1, "sampler.n_pos and sampler.n_neg must be >= 1");
    require(holdout_fraction > 0 && holdout_fraction < 1, "model.holdout_fraction must be in (0,1)");
    require(logistic.epochs >= 0 && logistic.lr > 0 && logistic.l2 >= 0, "logistic parameters out of range");
    require(forest.n_trees >= 1 && forest.max_depth >= 0 && forest.min_leaf >= 1, "forest parameters out of range");
    require(blocking.rarity_threshold >= 2, "blocking.rarity_threshold must be >= 2");
    require(blocking.rarity_fraction >= 0 && blocking.rarity_fraction <= 1, "blocking.rarity_fraction in [0,1]");
    require(blocking.max_block_size >= 2, "blocking.max_block_size must be >= 2");
    require(cap_fraction > 0 && cap_fraction <= 1, "resolve.cap_fraction must be in (0,1]");
    require(sweep_sample >= 2, "resolve.sweep_sample must be >= 2");
    const auto grid = thresholds.empty() ? default_thresholds() : thresholds;
    require(grid.size() >= 2, "resolve.thresholds needs at least two values");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        require(grid[k] >= 0 && grid[k] <= 1, "thresholds must lie in [0,1]");
        require(k == 0 || grid[k] > grid[k - 1], "thresholds must strictly increase");
    }
    require(n_folds >= 2, "cluster.n_folds must be >= 2");
    require(rules.min_support >= 1 && rules.beam_width >= 1 && rules.max_conditions >= 1,
            "rule parameters out of range");
    require(rules.n_cuts >= 1, "cluster.n_cuts must be >= 1");
    require(!pn_max_rules.empty(), "cluster.pn_max_rules must not be empty");
}

std::string PipelineConfig::dump() const {
    std::string out;
    for (const auto& [key, field] : fields()) out += key + " = " + field.get(*this) + "\n";
    return out;
}

PipelineConfig parse_config(std::string_view text, PipelineConfig base) {
    std::size_t line_no = 0, start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(start, nl - start);
        start = nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const std::string s = trim(line);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        base.set(trim(std::string_view(s).substr(0, eq)), trim(std::string_view(s).substr(eq + 1)));
    }
    return base;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const Error& e) {
        throw UsageError(std::string("cannot read config: ") + e.what());
    }
    return parse_config(text);
}

}  // namespace adlink
