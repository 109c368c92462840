#include "adlink/rules.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>

#include "adlink/error.hpp"
#include "adlink/io.hpp"
#include "adlink/log.hpp"

namespace adlink {

bool Condition::matches(std::span<const double> row) const {
    const double x = row[feature];
    if (lower && !(x > *lower)) return false;
    if (upper && !(x <= *upper)) return false;
    return true;
}

bool Rule::matches(std::span<const double> row) const {
    return std::all_of(conditions.begin(), conditions.end(), [&](const Condition& c) { return c.matches(row); });
}

RuleMetrics rule_metrics(const Rule& rule, const Matrix& features, std::span<const int> labels) {
    if (features.rows() != labels.size()) throw DataError("rule metrics: rows and labels differ");
    RuleMetrics m;
    std::size_t total_pos = 0;
    for (std::size_t r = 0; r < features.rows(); ++r) {
        total_pos += labels[r];
        if (!rule.matches(features.row(r))) continue;
        ++m.support;
        m.positives += labels[r];
    }
    if (m.support > 0) {
        m.ratio = static_cast<double>(m.positives) / static_cast<double>(m.support);
        if (total_pos > 0) {
            const double prior = static_cast<double>(total_pos) / static_cast<double>(labels.size());
            m.lift = *m.ratio / prior;
        }
    }
    return m;
}

std::string describe(const Rule& rule, std::span<const std::string> names) {
    std::string out;
    for (const auto& c : rule.conditions) {
        if (!out.empty()) out += ", ";
        const std::string& name = c.feature < names.size() ? names[c.feature] : std::to_string(c.feature);
        if (c.lower) out += io::format_double(*c.lower) + "<";
        out += name;
        if (c.upper) out += "<=" + io::format_double(*c.upper);
    }
    return out.empty() ? "(all)" : out;
}

std::vector<double> cut_points(std::span<const double> column, std::size_t n_cuts) {
    std::vector<double> sorted(column.begin(), column.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> distinct = sorted;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<double> cuts;
    if (distinct.size() <= n_cuts + 1) {
        for (std::size_t k = 0; k + 1 < distinct.size(); ++k) cuts.push_back(0.5 * (distinct[k] + distinct[k + 1]));
        return cuts;
    }
    for (std::size_t k = 1; k <= n_cuts; ++k) {
        const auto pos = static_cast<std::size_t>(static_cast<double>(k) * static_cast<double>(sorted.size()) /
                                                  static_cast<double>(n_cuts + 1));
        const double v = sorted[std::min(pos, sorted.size() - 1)];
        if (v < distinct.back()) cuts.push_back(v);  // cutting at the max splits nothing
    }
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

std::vector<double> class_boundaries(std::span<const double> column, std::span<const int> labels,
                                     std::size_t limit) {
    if (column.size() != labels.size()) throw DataError("rules: column and labels differ");
    // per distinct value: 1 = all positive, 0 = all negative, -1 = mixed
    std::map<double, int> purity;
    for (std::size_t r = 0; r < column.size(); ++r) {
        const int y = labels[r] != 0;
        auto [it, fresh] = purity.emplace(column[r], y);
        if (!fresh && it->second != y) it->second = -1;
    }
    std::vector<double> out;
    for (auto it = purity.begin(); it != purity.end(); ++it) {
        const auto next = std::next(it);
        if (next == purity.end()) break;
        if (it->second == next->second && it->second >= 0) continue;
        out.push_back(0.5 * (it->first + next->first));
        if (out.size() > limit) return {};
    }
    return out;
}

namespace {

struct Candidate {
    Rule rule;
    std::size_t support = 0;    // on the active rows
    std::size_t positives = 0;  // on the active rows

    double ratio() const { return static_cast<double>(positives) / static_cast<double>(support); }
};

// Strictly better under (ratio desc, support desc, fewer conditions).
bool better(const Candidate& a, const Candidate& b) {
    // compare a.pos/a.sup vs b.pos/b.sup exactly in integers
    const auto lhs = a.positives * b.support;
    const auto rhs = b.positives * a.support;
    if (lhs != rhs) return lhs > rhs;
    if (a.support != b.support) return a.support > b.support;
    return a.rule.conditions.size() < b.rule.conditions.size();
}

using ConditionKey = std::vector<std::tuple<std::size_t, bool, double, bool, double>>;

ConditionKey key_of(const Rule& r) {
    ConditionKey k;
    for (const auto& c : r.conditions) {
        k.emplace_back(c.feature, c.lower.has_value(), c.lower.value_or(0), c.upper.has_value(), c.upper.value_or(0));
    }
    return k;
}

// Adds lower < x (is_lower) or x <= bound to the rule; nullopt if the
// interval becomes empty or the condition changes nothing.
std::optional<Rule> refine(const Rule& base, std::size_t feature, bool is_lower, double bound) {
    Rule r = base;
    auto it = std::find_if(r.conditions.begin(), r.conditions.end(),
                           [&](const Condition& c) { return c.feature == feature; });
    if (it == r.conditions.end()) {
        Condition c;
        c.feature = feature;
        it = r.conditions.insert(
            std::upper_bound(r.conditions.begin(), r.conditions.end(), feature,
                             [](std::size_t f, const Condition& x) { return f < x.feature; }),
            c);
    }
    if (is_lower) {
        if (it->lower && *it->lower >= bound) return std::nullopt;
        it->lower = bound;
    } else {
        if (it->upper && *it->upper <= bound) return std::nullopt;
        it->upper = bound;
    }
    if (it->lower && it->upper && !(*it->lower < *it->upper)) return std::nullopt;
    return r;
}

}  // namespace

RuleSet learn_rules(const Matrix& x, std::span<const int> labels, const RuleParams& params) {
    if (params.min_support < 1) throw UsageError("rules: min_support must be >= 1");
    if (params.beam_width < 1 || params.max_conditions < 1) throw UsageError("rules: beam and conditions >= 1");
    if (x.rows() != labels.size()) throw DataError("rules: rows and labels differ");
    RuleSet out;
    const std::size_t n = x.rows(), d = x.cols();

    std::vector<std::vector<double>> cuts(d);
    for (std::size_t f = 0; f < d; ++f) {
        std::vector<double> col(n);
        for (std::size_t r = 0; r < n; ++r) col[r] = x(r, f);
        cuts[f] = cut_points(col, params.n_cuts);
        const auto extra = class_boundaries(col, labels, params.n_cuts);
        cuts[f].insert(cuts[f].end(), extra.begin(), extra.end());
        std::sort(cuts[f].begin(), cuts[f].end());
        cuts[f].erase(std::unique(cuts[f].begin(), cuts[f].end()), cuts[f].end());
    }

    std::vector<bool> active(n, true);  // negatives stay active; covered positives drop out
    auto evaluate = [&](Candidate& c) {
        c.support = c.positives = 0;
        for (std::size_t r = 0; r < n; ++r) {
            if (!active[r] || !c.rule.matches(x.row(r))) continue;
            ++c.support;
            c.positives += labels[r];
        }
    };

    for (std::size_t round = 0; round < params.max_rules; ++round) {
        std::size_t remaining = 0;
        for (std::size_t r = 0; r < n; ++r) remaining += active[r] && labels[r];
        if (remaining == 0) break;

        std::optional<Candidate> best;
        std::vector<Candidate> beam(1);  // the empty rule
        for (std::size_t depth = 0; depth < params.max_conditions && !beam.empty(); ++depth) {
            std::map<ConditionKey, Candidate> next;
            for (const auto& b : beam) {
                for (std::size_t f = 0; f < d; ++f) {
                    for (double cut : cuts[f]) {
                        for (bool is_lower : {true, false}) {
                            auto rule = refine(b.rule, f, is_lower, cut);
                            if (!rule) continue;
                            auto k = key_of(*rule);
                            if (next.count(k)) continue;
                            Candidate c{std::move(*rule), 0, 0};
                            evaluate(c);
                            if (c.support < params.min_support || c.positives == 0) continue;
                            next.emplace(std::move(k), std::move(c));
                        }
                    }
                }
            }
            std::vector<Candidate> ranked;
            for (auto& [_, c] : next) ranked.push_back(std::move(c));
            std::stable_sort(ranked.begin(), ranked.end(), better);
            if (ranked.size() > params.beam_width) ranked.resize(params.beam_width);
            if (!ranked.empty() && (!best || better(ranked.front(), *best))) best = ranked.front();
            beam = std::move(ranked);
        }
        if (!best) break;

        Rule rule = std::move(best->rule);
        rule.metrics = rule_metrics(rule, x, labels);
        for (std::size_t r = 0; r < n; ++r) {
            if (labels[r] && rule.matches(x.row(r))) active[r] = false;
        }
        out.rules.push_back(std::move(rule));
    }
    if (out.rules.empty()) {
        out.warnings.push_back("no rule reaches min_support " + std::to_string(params.min_support));
        log::warn(out.warnings.back());
    }
    return out;
}

std::vector<PnPoint> pn_curve(std::span<const Rule> rules, const Matrix& x, std::span<const int> labels) {
    std::vector<PnPoint> curve{{0, 0}};
    std::vector<bool> covered(x.rows(), false);
    PnPoint p;
    for (const auto& rule : rules) {
        for (std::size_t r = 0; r < x.rows(); ++r) {
            if (covered[r] || !rule.matches(x.row(r))) continue;
            covered[r] = true;
            (labels[r] ? p.positives : p.negatives)++;
        }
        curve.push_back(p);
    }
    return curve;
}

nlohmann::json rules_to_json(std::span<const Rule> rules, std::span<const std::string> names) {
    auto arr = nlohmann::json::array();
    for (std::size_t k = 0; k < rules.size(); ++k) {
        const Rule& r = rules[k];
        auto conds = nlohmann::json::array();
        for (const auto& c : r.conditions) {
            nlohmann::json jc;
            jc["feature"] = c.feature < names.size() ? names[c.feature] : std::to_string(c.feature);
            jc["lower_exclusive"] = c.lower ? nlohmann::json(*c.lower) : nlohmann::json(nullptr);
            jc["upper_inclusive"] = c.upper ? nlohmann::json(*c.upper) : nlohmann::json(nullptr);
            conds.push_back(jc);
        }
        nlohmann::json jr;
        jr["order"] = k + 1;
        jr["rule"] = describe(r, names);
        jr["conditions"] = conds;
        jr["support"] = r.metrics.support;
        jr["ratio"] = r.metrics.ratio ? nlohmann::json(*r.metrics.ratio) : nlohmann::json(nullptr);
        jr["lift"] = r.metrics.lift ? nlohmann::json(*r.metrics.lift) : nlohmann::json(nullptr);
        arr.push_back(jr);
    }
    return arr;
}

}  // namespace adlink
