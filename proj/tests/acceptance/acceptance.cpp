// Runs the desk-scale acceptance checks and prints one PASS/FAIL line per
// criterion. Usage: acceptance <work_dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adlink/blocking.hpp"
#include "adlink/corpus.hpp"
#include "adlink/extract.hpp"
#include "adlink/io.hpp"
#include "adlink/log.hpp"
#include "adlink/matchmodel.hpp"
#include "adlink/pairfeat.hpp"
#include "adlink/pipeline.hpp"
#include "adlink/random.hpp"
#include "adlink/resolve.hpp"
#include "adlink/roc.hpp"
#include "adlink/rules.hpp"
#include "adlink/surrogate.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace adlink;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
        }
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

json read_json(const fs::path& p) { return json::parse(io::read_file(p)); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome oracle_equivalences() {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    Rng rng(20240101);

    std::size_t graph_mismatch = 0;
    for (int g = 0; g < 100; ++g) {
        const std::size_t n = 1 + uniform_index(rng, 1000);
        const std::size_t m = uniform_index(rng, 2 * n + 1);
        std::vector<AdPair> strong, admitted;
        std::vector<WeakEdge> weak;
        const double t = uniform_real(rng);
        for (std::size_t e = 0; e < m && n > 1; ++e) {
            const std::size_t a = uniform_index(rng, n), b = uniform_index(rng, n);
            if (a == b) continue;
            if (bernoulli(rng, 0.5)) {
                strong.emplace_back(a, b);
                admitted.emplace_back(a, b);
            } else {
                weak.push_back({std::min(a, b), std::max(a, b), uniform_real(rng)});
                if (weak.back().score >= t) admitted.emplace_back(a, b);
            }
        }
        const ComponentSet cs = connected_components(n, strong, weak, t);
        std::set<std::set<std::size_t>> got;
        for (const auto& c : cs.components) got.insert(std::set<std::size_t>(c.members.begin(), c.members.end()));
        graph_mismatch += got != oracle::bfs_partition(n, admitted);
    }
    out.require(graph_mismatch == 0, "union-find vs BFS on " + std::to_string(graph_mismatch) + " graphs");

    double worst_auc = 0;
    for (int s = 0; s < 100; ++s) {
        const std::size_t n = 2 + uniform_index(rng, 300);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = s % 2 ? uniform_real(rng) : std::floor(uniform_real(rng) * 8) / 8;
            labels[i] = bernoulli(rng, 0.5);
        }
        labels[0] = 1;
        labels[1] = 0;
        worst_auc = std::max(worst_auc, std::abs(roc(scores, labels).auc - oracle::concordance_auc(scores, labels)));
    }
    out.require(worst_auc <= 1e-9, "AUC vs concordance, max diff " + fmt(worst_auc));

    std::size_t rule_mismatch = 0, rule_sets = 0;
    for (int s = 0; s < 200; ++s) {
        const std::size_t n = 1 + uniform_index(rng, 1000), d = 1 + uniform_index(rng, 5);
        Matrix x;
        std::vector<int> y;
        for (std::size_t r = 0; r < n; ++r) {
            std::vector<double> row(d);
            for (auto& v : row) v = std::floor(uniform_real(rng) * 12);
            x.append_row(row);
            y.push_back(bernoulli(rng, 0.3));
        }
        std::vector<Rule> rules;
        if (std::count(y.begin(), y.end(), 1) > 0) rules = learn_rules(x, y, {}).rules;
        for (int k = 0; k < 5; ++k) {
            Rule r;
            const std::size_t f = uniform_index(rng, d);
            r.conditions.push_back({f, std::floor(uniform_real(rng) * 10) - 0.5, std::nullopt});
            if (bernoulli(rng, 0.5)) r.conditions.back().upper = *r.conditions.back().lower + 4;
            rules.push_back(r);
        }
        for (const auto& r : rules) {
            ++rule_sets;
            const RuleMetrics m = rule_metrics(r, x, y);
            const oracle::Counts c = oracle::rule_counts(r, x, y);
            const bool ok = m.support == c.support && m.positives == c.positives &&
                            (c.support == 0 ? !m.ratio : (m.ratio && *m.ratio == double(c.positives) / double(c.support)));
            rule_mismatch += !ok;
        }
    }
    out.require(rule_mismatch == 0, "rule metrics vs counting on " + std::to_string(rule_mismatch) + " rules");

    std::size_t lcs_mismatch = 0;
    const std::u32string alphabet = U"abcab é中";
    for (int s = 0; s < 2000; ++s) {
        std::u32string a, b;
        const std::size_t la = uniform_index(rng, 65), lb = uniform_index(rng, 65);
        for (std::size_t i = 0; i < la; ++i) a += alphabet[uniform_index(rng, alphabet.size())];
        for (std::size_t i = 0; i < lb; ++i) b += alphabet[uniform_index(rng, alphabet.size())];
        lcs_mismatch += longest_common_substring(a, b) != oracle::lcs_enumerate(a, b);
    }
    out.require(lcs_mismatch == 0, "LCS vs enumeration on " + std::to_string(lcs_mismatch) + " pairs");

    const double secs = seconds_since(t0);
    out.require(secs < 60, "runtime " + fmt(secs) + "s >= 60s");
    out.note("100 graphs, 100 score sets, " + std::to_string(rule_sets) + " rules, 2000 string pairs in " +
             fmt(secs) + "s");
    return out;
}

struct World {
    Corpus ads;
    std::vector<FieldSet> fields;
    std::vector<AdProfile> profiles;
    StrongGraphResult strong;
};

World load_world(const fs::path& dir) {
    World w;
    w.ads = load_corpus(dir / "ads.jsonl").ads;
    for (const auto& ad : w.ads) {
        w.fields.push_back(extract_fields(ad.text));
        w.profiles.push_back(make_profile(ad, w.fields.back()));
    }
    w.strong = build_strong_graph(w.fields);
    return w;
}

Outcome surrogate_bias(const World& w) {
    Outcome out;
    SampleParams sp;
    sp.n_pos = 10000;
    sp.n_neg = 10000;
    sp.seed = 7;
    const SampleResult res = sample_pairs(w.strong.components, w.strong.graph, sp);
    std::size_t positives = 0, sharing = 0;
    for (const auto& p : res.pairs) {
        if (p.label != PairLabel::positive) continue;
        ++positives;
        // recheck against the raw extracted phone sets, not the graph
        const auto& a = w.fields[p.ad_i].phones;
        const auto& b = w.fields[p.ad_j].phones;
        for (const auto& ph : a) sharing += b.count(ph) ? 1 : 0;
    }
    out.require(positives == 10000, "sampled " + std::to_string(positives) + " positives (eligible " +
                                        std::to_string(res.eligible_positives) + ")");
    out.require(sharing == 0, std::to_string(sharing) + " shared phones among positives");
    out.note(std::to_string(positives) + " positives, " + std::to_string(sharing) + " sharing a phone");
    return out;
}

Outcome match_quality(const fs::path& dir, const World& w) {
    Outcome out;
    const json r = read_json(dir / "train_report.json");
    const double auc = r["auc"], tpr = r["tpr_at_fpr_0.01"];
    out.require(w.ads.size() >= 1500 && w.ads.size() <= 2500, "corpus size " + std::to_string(w.ads.size()));
    out.require(auc >= 0.95, "held-out AUC " + fmt(auc) + " < 0.95");
    out.require(tpr >= 0.5, "TPR@FPR=1% " + fmt(tpr) + " < 0.5");
    out.note(std::to_string(w.ads.size()) + " ads, held-out AUC " + fmt(auc) + ", TPR@FPR=1% " + fmt(tpr) +
             " (n_test " + std::to_string(r["n_test"].get<std::size_t>()) + ")");
    return out;
}

Outcome breakdown(const fs::path& dir, const World& w) {
    Outcome out;
    const MatchModel model = model_from_json(read_json(dir / "model.json"));
    SweepParams sp;
    sp.sample_size = 1000;
    sp.seed = 11;
    const SweepResult res = threshold_sweep(model, w.ads, w.profiles, w.strong.graph, sp);
    out.require(res.points.size() >= 8, std::to_string(res.points.size()) + " thresholds");
    bool mono = true;
    for (std::size_t k = 1; k < res.points.size(); ++k) {
        mono = mono && res.points[k].largest_size <= res.points[k - 1].largest_size &&
               res.points[k].n_components >= res.points[k - 1].n_components;
    }
    out.require(mono, "monotone sweep");
    const auto& first = res.points.front();
    out.require(first.threshold == 0.0, "first threshold is 0");
    out.require(first.largest_size * 2 > res.sample_size,
                "giant component " + std::to_string(first.largest_size) + " of " + std::to_string(res.sample_size));
    std::string trace;
    for (const auto& p : res.points) trace += " " + fmt(p.threshold) + ":" + std::to_string(p.largest_size);
    out.note("sample " + std::to_string(res.sample_size) + ", largest by threshold" + trace);
    return out;
}

Outcome resolution(const fs::path& dir, const World& w) {
    Outcome out;
    const json ev = read_json(dir / "eval.json");
    const json bs = read_json(dir / "blocking_stats.json");

    // independent recount from components.jsonl
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < w.ads.size(); ++i) index[w.ads[i].id] = i;
    std::istringstream in(io::read_file(dir / "components.jsonl"));
    double tp = 0, pred = 0;
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        std::map<std::string, double> by_source;
        double n = 0;
        const json comp = json::parse(line);
        for (const auto& m : comp["members"]) {
            const auto& src = w.ads[index.at(m.get<std::string>())].source_id;
            if (!src) continue;
            by_source[*src] += 1;
            n += 1;
        }
        pred += n * (n - 1) / 2;
        for (const auto& [s, c] : by_source) tp += c * (c - 1) / 2;
    }
    std::map<std::string, double> source_size;
    for (const auto& ad : w.ads) {
        if (ad.source_id) source_size[*ad.source_id] += 1;
    }
    double truth = 0;
    for (const auto& [s, c] : source_size) truth += c * (c - 1) / 2;
    const double precision = tp / pred, recall = tp / truth, f1 = 2 * precision * recall / (precision + recall);
    const double reported = ev["pairwise"]["f1"];
    out.require(std::abs(f1 - reported) <= 1e-9, "recount F1 " + fmt(f1) + " vs reported " + fmt(reported));
    out.require(f1 >= 0.90, "pairwise F1 " + fmt(f1) + " < 0.90");

    const double brecall = bs["blocking_recall"], frac = bs["fraction_of_total"];
    out.require(brecall >= 0.95, "blocking recall " + fmt(brecall) + " < 0.95");
    out.require(frac <= 0.10, "candidate fraction " + fmt(frac) + " > 0.10");
    out.note("threshold " + fmt(read_json(dir / "threshold.json")["threshold"]) + ", P " + fmt(precision) + " R " +
             fmt(recall) + " F1 " + fmt(f1) + ", blocking recall " + fmt(brecall) + " at " + fmt(frac) +
             " of all pairs");
    return out;
}

Outcome rule_consistency(const fs::path& dir) {
    Outcome out;
    const json rj = read_json(dir / "rules.json");
    const json cr = read_json(dir / "cluster_report.json");

    // recompute every rule from the cluster table
    const auto rows = io::parse_csv(io::read_file(dir / "cluster_features.csv"));
    const auto lab_rows = io::parse_csv(io::read_file(dir / "labels.csv"));
    std::map<std::string, int> labels;
    for (std::size_t r = 1; r < lab_rows.size(); ++r) labels[lab_rows[r][0]] = std::stoi(lab_rows[r][1]);
    std::map<std::string, std::size_t> column;
    for (std::size_t k = 1; k < rows[0].size(); ++k) column[rows[0][k]] = k - 1;
    Matrix x;
    std::vector<int> y;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (!labels.count(rows[r][0])) continue;
        std::vector<double> v;
        for (std::size_t k = 1; k < rows[r].size(); ++k) v.push_back(io::parse_double(rows[r][k]));
        x.append_row(v);
        y.push_back(labels[rows[r][0]]);
    }
    const double prior = double(std::count(y.begin(), y.end(), 1)) / double(y.size());
    out.require(std::abs(prior - rj["prior"].get<double>()) <= 1e-12, "prior matches labels");

    double worst = 0;
    std::size_t recount_mismatch = 0;
    for (const auto& r : rj["rules"]) {
        worst = std::max(worst, std::abs(r["lift"].get<double>() * prior - r["ratio"].get<double>()));
        Rule rule;
        for (const auto& c : r["conditions"]) {
            Condition cond;
            cond.feature = column.at(c["feature"].get<std::string>());
            if (!c["lower_exclusive"].is_null()) cond.lower = c["lower_exclusive"].get<double>();
            if (!c["upper_inclusive"].is_null()) cond.upper = c["upper_inclusive"].get<double>();
            rule.conditions.push_back(cond);
        }
        const oracle::Counts cnt = oracle::rule_counts(rule, x, y);
        recount_mismatch += cnt.support != r["support"].get<std::size_t>() ||
                            double(cnt.positives) / double(cnt.support) != r["ratio"].get<double>();
    }
    out.require(!rj["rules"].empty(), "at least one rule");
    out.require(worst <= 1e-9, "lift x prior - ratio up to " + fmt(worst));
    out.require(recount_mismatch == 0, std::to_string(recount_mismatch) + " rules disagree with a recount");
    if (!rj["rules"].empty()) {
        const auto& top = rj["rules"][0];
        const double ratio = top["ratio"], lift = top["lift"];
        out.require(ratio >= 0.9, "top rule ratio " + fmt(ratio));
        out.require(lift >= 2, "top rule lift " + fmt(lift));
        out.note("top rule '" + top["rule"].get<std::string>() + "' support " + std::to_string(top["support"].get<int>()) +
                 " ratio " + fmt(ratio) + " lift " + fmt(lift));
    }
    const double base = cr["baseline_mean_auc"];
    out.require(cr["n_baselines"].get<std::size_t>() == 100, "100 baselines");
    out.require(base >= 0.45 && base <= 0.55, "baseline AUC " + fmt(base));
    out.note(std::to_string(rj["rules"].size()) + " rules over " + std::to_string(y.size()) + " clusters (prior " +
             fmt(prior) + "), baseline AUC " + fmt(base) + ", cluster AUC " + fmt(cr["auc"]));
    return out;
}

Outcome determinism(const fs::path& a, const fs::path& b) {
    Outcome out;
    const auto da = artifact_digests(a), db = artifact_digests(b);
    const json ja = read_json(a / "digests.json"), jb = read_json(b / "digests.json");
    std::size_t differing = 0;
    for (const auto& [name, d] : da) {
        const auto it = db.find(name);
        if (it == db.end() || it->second != d) {
            ++differing;
            out.note("differs: " + name);
        }
    }
    out.require(da.size() == db.size() && differing == 0, "artifact digests differ");
    out.require(ja == jb, "digests.json differs");
    out.note(std::to_string(da.size()) + " artifacts compared");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: acceptance <work_dir>\n");
        return 2;
    }
    const fs::path work = argv[1];
    fs::remove_all(work);
    fs::create_directories(work);
    log::threshold() = log::Level::warn;

    std::vector<std::pair<int, Outcome>> results;
    auto report = [&](int k, Outcome o) {
        std::printf("criterion %d: %s  %s\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        results.emplace_back(k, std::move(o));
    };

    report(1, oracle_equivalences());

    PipelineConfig cfg;
    cfg.seed = 7;
    cfg.out_dir = work / "run_a";
    const auto t0 = std::chrono::steady_clock::now();
    run_pipeline(cfg);
    const double pipeline_secs = seconds_since(t0);
    cfg.out_dir = work / "run_b";
    run_pipeline(cfg);

    const fs::path a = work / "run_a";
    const World w = load_world(a);
    report(2, surrogate_bias(w));
    Outcome q = match_quality(a, w);
    q.require(pipeline_secs < 300, "pipeline runtime " + fmt(pipeline_secs) + "s");
    q.note("full pipeline " + fmt(pipeline_secs) + "s");
    report(3, std::move(q));
    report(4, breakdown(a, w));
    report(5, resolution(a, w));
    report(6, rule_consistency(a));
    report(7, determinism(a, work / "run_b"));

    std::size_t failed = 0;
    for (const auto& [k, o] : results) failed += !o.pass;
    std::printf("%zu/%zu criteria passed\n", results.size() - failed, results.size());
    return failed == 0 ? 0 : 1;
}
