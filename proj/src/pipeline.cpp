#include "adlink/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "adlink/blocking.hpp"
#include "adlink/clusterfeat.hpp"
#include "adlink/error.hpp"
#include "adlink/extract.hpp"
#include "adlink/io.hpp"
#include "adlink/log.hpp"
#include "adlink/matchmodel.hpp"
#include "adlink/pairfeat.hpp"
#include "adlink/parallel.hpp"
#include "adlink/random.hpp"
#include "adlink/resolve.hpp"
#include "adlink/roc.hpp"
#include "adlink/rules.hpp"
#include "adlink/surrogate.hpp"
#include "adlink/synthetic.hpp"

namespace adlink {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names = {"synth",  "ingest", "extract", "sample", "features",
                                                   "train",  "block",  "sweep",   "resolve", "clusters",
                                                   "rules",  "eval",   "pipeline"};
    return names;
}

namespace {

// Sub-seeds per stage, so changing one stage's draws leaves the others intact.
enum SeedSlot : std::uint64_t { kSampleSeed = 1, kSplitSeed, kForestSeed, kSweepSeed, kClusterSeed };

class Workspace {
public:
    explicit Workspace(const PipelineConfig& cfg) : cfg_(cfg), dir_(cfg.out_dir) {}

    const PipelineConfig& cfg() const { return cfg_; }
    fs::path path(std::string_view name) const { return dir_ / std::string(name); }

    /// Path of an input artifact; absent inputs name their producing stage.
    fs::path need(std::string_view name, std::string_view producer) const {
        fs::path p = path(name);
        if (!fs::is_regular_file(p)) {
            throw PrerequisiteError(std::string(producer), "missing " + p.string() + "; run the '" +
                                                              std::string(producer) + "' stage first");
        }
        return p;
    }

    void write(std::string_view name, std::string_view content) const { io::write_atomic(path(name), content); }
    void write_json(std::string_view name, const ojson& j) const { write(name, j.dump(2) + "\n"); }

    const Corpus& ads() {
        if (!ads_) {
            LoadResult r = load_corpus(need("ads.jsonl", "synth' or 'ingest"));
            if (!r.rejects.empty()) {
                throw DataError("ads.jsonl line " + std::to_string(r.rejects.front().line) + ": " +
                                r.rejects.front().reason);
            }
            ads_ = std::move(r.ads);
            for (std::size_t k = 0; k < ads_->size(); ++k) index_[(*ads_)[k].id] = k;
        }
        return *ads_;
    }

    std::size_t index_of(const std::string& id) {
        ads();
        const auto it = index_.find(id);
        if (it == index_.end()) throw DataError("unknown ad id '" + id + "'");
        return it->second;
    }

    const std::vector<FieldSet>& fields() {
        if (!fields_) {
            const auto& corpus = ads();
            const std::string text = io::read_file(need("fields.jsonl", "extract"));
            std::vector<FieldSet> out(corpus.size());
            std::vector<bool> seen(corpus.size(), false);
            std::istringstream in(text);
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                const auto j = nlohmann::json::parse(line, nullptr, false);
                if (j.is_discarded() || !j.contains("id") || !j.contains("fields")) {
                    throw DataError("fields.jsonl: malformed line");
                }
                const std::size_t k = index_of(j["id"].get<std::string>());
                out[k] = fields_from_json(j["fields"]);
                seen[k] = true;
            }
            if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
                throw PrerequisiteError("extract", "fields.jsonl does not cover ads.jsonl; re-run 'extract'");
            }
            fields_ = std::move(out);
        }
        return *fields_;
    }

    const std::vector<AdProfile>& profiles() {
        if (!profiles_) {
            const auto& corpus = ads();
            const auto& fs_ = fields();
            std::vector<AdProfile> out(corpus.size());
            parallel_for(corpus.size(), cfg_.threads,
                         [&](std::size_t k) { out[k] = make_profile(corpus[k], fs_[k]); });
            profiles_ = std::move(out);
        }
        return *profiles_;
    }

    const StrongGraphResult& strong() {
        if (!strong_) strong_ = build_strong_graph(fields());
        return *strong_;
    }

    MatchModel model() {
        const std::string text = io::read_file(need("model.json", "train"));
        const auto j = nlohmann::json::parse(text, nullptr, false);
        if (j.is_discarded()) throw DataError("model.json is not valid JSON");
        return model_from_json(j);
    }

    std::vector<AdPair> read_pairs(std::string_view name, std::string_view producer) {
        const auto rows = io::parse_csv(io::read_file(need(name, producer)));
        std::vector<AdPair> out;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            if (rows[r].size() < 2) throw DataError(std::string(name) + ": short row");
            const std::size_t a = index_of(rows[r][0]), b = index_of(rows[r][1]);
            out.emplace_back(std::min(a, b), std::max(a, b));
        }
        return out;
    }

private:
    const PipelineConfig& cfg_;
    fs::path dir_;
    std::optional<Corpus> ads_;
    std::unordered_map<std::string, std::size_t> index_;
    std::optional<std::vector<FieldSet>> fields_;
    std::optional<std::vector<AdProfile>> profiles_;
    std::optional<StrongGraphResult> strong_;
};

ojson optional_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

std::vector<std::optional<std::string>> sources_of(const Corpus& corpus) {
    std::vector<std::optional<std::string>> out;
    for (const auto& ad : corpus) out.push_back(ad.source_id);
    return out;
}

bool has_truth(const Corpus& corpus) {
    return std::any_of(corpus.begin(), corpus.end(), [](const Ad& a) { return a.source_id.has_value(); });
}

// ---------------------------------------------------------------------------
// features.csv

std::string features_csv(const Dataset& d) {
    std::string out = "# schema_version=" + std::to_string(d.schema_version) + "\nad_i,ad_j,label";
    for (const auto& n : d.feature_names) out += "," + n;
    out += "\n";
    for (std::size_t r = 0; r < d.size(); ++r) {
        out += io::csv_escape(d.ids[r].first) + "," + io::csv_escape(d.ids[r].second) + "," +
               std::to_string(d.labels[r]);
        for (double v : d.features.row(r)) out += "," + io::format_double(v);
        out += "\n";
    }
    return out;
}

Dataset read_features_csv(const fs::path& path) {
    const std::string text = io::read_file(path);
    Dataset d;
    const std::string tag = "# schema_version=";
    if (text.rfind(tag, 0) != 0) throw DataError("features.csv: missing schema_version header comment");
    d.schema_version = static_cast<int>(io::parse_int(text.substr(tag.size(), text.find('\n') - tag.size())));
    const auto rows = io::parse_csv(text);
    if (rows.empty() || rows[0].size() < 4) throw DataError("features.csv: missing header");
    d.feature_names.assign(rows[0].begin() + 3, rows[0].end());
    std::vector<double> values(d.feature_names.size());
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != rows[0].size()) throw DataError("features.csv: ragged row " + std::to_string(r));
        d.ids.emplace_back(rows[r][0], rows[r][1]);
        d.labels.push_back(static_cast<int>(io::parse_int(rows[r][2])));
        for (std::size_t k = 0; k < values.size(); ++k) values[k] = io::parse_double(rows[r][3 + k]);
        d.features.append_row(values);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Stages

void stage_synth(Workspace& ws, StageReport& rep) {
    SyntheticSpec spec = ws.cfg().synth;
    spec.rng_seed = ws.cfg().seed;
    const SyntheticCorpus sc = generate_synthetic(spec);
    ws.write("ads.jsonl", corpus_to_jsonl(sc.ads));
    ws.write("sources.csv", sources_to_csv(sc.sources));
    rep.counts["ads"] = sc.ads.size();
    rep.counts["sources"] = sc.sources.size();
}

void stage_ingest(Workspace& ws, StageReport& rep) {
    const auto& cfg = ws.cfg();
    if (cfg.corpus.empty()) throw UsageError("ingest needs a corpus path (config key 'corpus')");
    LoadResult r = load_corpus(cfg.corpus);
    std::sort(r.ads.begin(), r.ads.end(), [](const Ad& a, const Ad& b) { return a.id < b.id; });
    ws.write("ads.jsonl", corpus_to_jsonl(r.ads));
    std::string rejects = "line,reason\n";
    for (const auto& rj : r.rejects) rejects += std::to_string(rj.line) + "," + io::csv_escape(rj.reason) + "\n";
    ws.write("rejects.csv", rejects);
    rep.counts["ads"] = r.ads.size();
    rep.counts["rejected"] = r.rejects.size();
    if (!r.rejects.empty()) rep.warnings.push_back(std::to_string(r.rejects.size()) + " lines rejected");
}

void stage_extract(Workspace& ws, StageReport& rep) {
    const Corpus& corpus = ws.ads();
    std::vector<FieldSet> fields(corpus.size());
    parallel_for(corpus.size(), ws.cfg().threads, [&](std::size_t k) { fields[k] = extract_fields(corpus[k].text); });

    std::string out;
    std::map<std::string, std::pair<std::size_t, std::size_t>> per_field;  // ads with field, values
    for (std::size_t k = 0; k < corpus.size(); ++k) {
        const nlohmann::json fj = fields_to_json(fields[k]);
        ojson line;
        line["id"] = corpus[k].id;
        line["fields"] = fj;
        out += line.dump() + "\n";
        for (const auto& [name, value] : fj.items()) {
            auto& [ads_with, values] = per_field[name];
            if (!value.empty()) ++ads_with;
            values += value.size();
        }
    }
    ws.write("fields.jsonl", out);
    std::string report = "field,ads_with_field,values\n";
    for (const auto& [name, c] : per_field) {
        report += name + "," + std::to_string(c.first) + "," + std::to_string(c.second) + "\n";
    }
    ws.write("extraction_report.csv", report);
    rep.counts["ads"] = corpus.size();
    rep.counts["ads_with_phone"] = per_field["phones"].first;
}

void stage_sample(Workspace& ws, StageReport& rep) {
    const auto& cfg = ws.cfg();
    const Corpus& corpus = ws.ads();
    const auto& sg = ws.strong();
    SampleParams sp;
    sp.n_pos = cfg.n_pos;
    sp.n_neg = cfg.n_neg;
    sp.seed = derive_seed(cfg.seed, kSampleSeed);
    sp.same_city_negatives = cfg.same_city_negatives;
    const SampleResult res = sample_pairs(sg.components, sg.graph, sp, corpus);

    const auto& profiles = ws.profiles();
    std::string out = "ad_i,ad_j,label,jaccard\n";
    std::vector<double> pos_sims, neg_sims;
    std::size_t n_pos = 0;
    for (const auto& p : res.pairs) {
        const double jac = jaccard_unigram(profiles[p.ad_i].unigrams, profiles[p.ad_j].unigrams);
        const bool positive = p.label == PairLabel::positive;
        (positive ? pos_sims : neg_sims).push_back(jac);
        n_pos += positive;
        out += corpus[p.ad_i].id + "," + corpus[p.ad_j].id + "," + (positive ? "1" : "0") + "," +
               io::format_double(jac) + "\n";
    }
    ws.write("pairs.csv", out);

    const Histogram hp = similarity_histogram(pos_sims), hn = similarity_histogram(neg_sims);
    std::string hist = "bin_lo,bin_hi,count,positive,negative\n";
    for (std::size_t b = 0; b < hp.counts.size(); ++b) {
        hist += io::format_double(hp.edges[b]) + "," + io::format_double(hp.edges[b + 1]) + "," +
                std::to_string(hp.counts[b] + hn.counts[b]) + "," + std::to_string(hp.counts[b]) + "," +
                std::to_string(hn.counts[b]) + "\n";
    }
    ws.write("histogram.csv", hist);
    rep.counts["proxy_components"] = sg.components.members.size();
    rep.counts["ads_without_phone"] = sg.components.excluded;
    rep.counts["eligible_positives"] = res.eligible_positives;
    rep.counts["positives"] = n_pos;
    rep.counts["negatives"] = res.pairs.size() - n_pos;
    rep.warnings.insert(rep.warnings.end(), res.warnings.begin(), res.warnings.end());
}

void stage_features(Workspace& ws, StageReport& rep) {
    const auto rows = io::parse_csv(io::read_file(ws.need("pairs.csv", "sample")));
    const Corpus& corpus = ws.ads();
    const auto& profiles = ws.profiles();
    Dataset d;
    d.schema_version = kPairSchemaVersion;
    d.feature_names = pair_feature_names();
    std::vector<AdPair> pairs;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() < 3) throw DataError("pairs.csv: short row");
        pairs.emplace_back(ws.index_of(rows[r][0]), ws.index_of(rows[r][1]));
        d.labels.push_back(static_cast<int>(io::parse_int(rows[r][2])));
    }
    Matrix m(pairs.size(), kPairFeatureCount);
    parallel_for(pairs.size(), ws.cfg().threads, [&](std::size_t k) {
        const PairFeatures f = compute_pair_features(profiles[pairs[k].first], profiles[pairs[k].second]);
        std::copy(f.begin(), f.end(), m.row(k).begin());
    });
    d.features = std::move(m);
    for (const auto& [i, j] : pairs) d.ids.emplace_back(corpus[i].id, corpus[j].id);
    ws.write("features.csv", features_csv(d));
    rep.counts["pairs"] = d.size();
    rep.counts["dimensions"] = kPairFeatureCount;
}

void stage_train(Workspace& ws, StageReport& rep) {
    const auto& cfg = ws.cfg();
    const Dataset d = read_features_csv(ws.need("features.csv", "features"));
    d.validate();
    if (d.feature_names != pair_feature_names() || d.schema_version != kPairSchemaVersion) {
        throw DataError("features.csv schema does not match this build; re-run 'features'");
    }

    std::vector<std::size_t> pos, neg;
    for (std::size_t r = 0; r < d.size(); ++r) (d.labels[r] ? pos : neg).push_back(r);
    Rng rng(derive_seed(cfg.seed, kSplitSeed));
    shuffle(rng, pos);
    shuffle(rng, neg);
    std::vector<std::size_t> train, test;
    for (auto* group : {&pos, &neg}) {
        const auto n_test = static_cast<std::size_t>(std::lround(cfg.holdout_fraction * static_cast<double>(group->size())));
        for (std::size_t k = 0; k < group->size(); ++k) (k < n_test ? test : train).push_back((*group)[k]);
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    const Dataset dtrain = d.subset(train), dtest = d.subset(test);

    MatchModel model;
    if (cfg.model_kind == ModelKind::forest) {
        ForestParams fp = cfg.forest;
        fp.seed = derive_seed(cfg.seed, kForestSeed);
        fp.threads = cfg.threads;
        model = train_forest(dtrain, fp);
    } else {
        model = train_logistic(dtrain, cfg.logistic);
    }
    ws.write_json("model.json", ojson(model_to_json(model)));

    const RocCurve curve = roc(model.predict(dtest.features), dtest.labels);
    const RocCurve train_curve = roc(model.predict(dtrain.features), dtrain.labels);
    ws.write("roc.csv", roc_to_csv(curve));

    const RankedFeatures imp =
        model.kind == ModelKind::forest ? feature_importance(model) : weight_importance(model);
    std::string imp_csv = "feature,importance\n";
    for (const auto& [name, v] : imp) imp_csv += name + "," + io::format_double(v) + "\n";
    ws.write("importances.csv", imp_csv);

    ojson report;
    report["model_kind"] = std::string(to_string(model.kind));
    report["n_train"] = dtrain.size();
    report["n_test"] = dtest.size();
    report["auc"] = curve.auc;
    report["train_auc"] = train_curve.auc;
    report["tpr_at_fpr_0.01"] = tpr_at_fpr(curve, 0.01);
    report["fpr_at_tpr_0.5"] = fpr_at_tpr(curve, 0.5);
    ws.write_json("train_report.json", report);
    for (const auto& [k, v] : report.items()) rep.counts[k] = v;
}

void stage_block(Workspace& ws, StageReport& rep) {
    const Corpus& corpus = ws.ads();
    const BlockIndex index = build_blocks(corpus, ws.cfg().blocking);
    const CandidateSet cs = candidate_pairs(index);
    std::string out = "ad_i,ad_j\n";
    for (const auto& [i, j] : cs.pairs) out += corpus[i].id + "," + corpus[j].id + "\n";
    ws.write("candidates.csv", out);

    ojson stats;
    std::map<KeyKind, std::size_t> per_kind;
    for (const auto& [key, _] : index.blocks) ++per_kind[key.kind];
    ojson by_kind = ojson::object();
    for (auto kind : {KeyKind::unigram, KeyKind::bigram, KeyKind::image}) {
        by_kind[std::string(to_string(kind))] = per_kind[kind];
    }
    stats["n_ads"] = index.n_ads;
    stats["rarity_threshold"] = index.rarity_threshold;
    stats["max_block_size"] = ws.cfg().blocking.max_block_size;
    stats["blocks"] = index.blocks.size();
    stats["blocks_by_kind"] = by_kind;
    stats["dropped_blocks"] = index.dropped_blocks;
    stats["candidates"] = cs.pairs.size();
    stats["total_pairs"] = cs.total_pairs;
    stats["fraction_of_total"] = cs.fraction_of_total();
    stats["reduction_ratio"] = cs.reduction_ratio;
    const auto truth = truth_pairs(corpus);
    stats["truth_pairs"] = truth.size();
    stats["blocking_recall"] = truth.empty() ? ojson(nullptr) : ojson(blocking_recall(cs.pairs, truth));
    ws.write_json("blocking_stats.json", stats);
    for (const auto& [k, v] : stats.items()) {
        if (!v.is_object()) rep.counts[k] = v;
    }
}

void stage_sweep(Workspace& ws, StageReport& rep) {
    const auto& cfg = ws.cfg();
    const MatchModel model = ws.model();
    SweepParams sp;
    sp.sample_size = cfg.sweep_sample;
    if (!cfg.thresholds.empty()) sp.thresholds = cfg.thresholds;
    sp.blocking = cfg.blocking;
    sp.seed = derive_seed(cfg.seed, kSweepSeed);
    sp.threads = cfg.threads;
    const SweepResult res = threshold_sweep(model, ws.ads(), ws.profiles(), ws.strong().graph, sp);

    std::string out = "threshold,n_components,largest_size\n";
    for (const auto& p : res.points) {
        out += io::format_double(p.threshold) + "," + std::to_string(p.n_components) + "," +
               std::to_string(p.largest_size) + "\n";
    }
    ws.write("sweep.csv", out);

    // Scores are cached for resolve, keyed to the model that produced them.
    const Corpus& corpus = ws.ads();
    std::string sc = "# model_digest=" + io::file_digest(ws.path("model.json")) + "\nad_i,ad_j,score\n";
    for (std::size_t k = 0; k < res.candidates.size(); ++k) {
        const auto [a, b] = res.candidates[k];
        sc += corpus[res.sample[a]].id + "," + corpus[res.sample[b]].id + "," + io::format_double(res.scores[k]) + "\n";
    }
    ws.write("scores.csv", sc);
    const ThresholdChoice choice = select_threshold(res.points, res.sample_size, cfg.cap_fraction);
    if (!choice.within_cap) rep.warnings.push_back("no threshold met the largest-component cap");
    ojson t;
    t["threshold"] = choice.threshold;
    t["within_cap"] = choice.within_cap;
    t["cap_fraction"] = cfg.cap_fraction;
    t["sample_size"] = res.sample_size;
    t["model_kind"] = std::string(to_string(model.kind));
    ws.write_json("threshold.json", t);
    rep.counts["sample_size"] = res.sample_size;
    rep.counts["candidates"] = res.candidates.size();
    rep.counts["threshold"] = choice.threshold;
    rep.warnings.insert(rep.warnings.end(), res.warnings.begin(), res.warnings.end());
}

double read_threshold(Workspace& ws) {
    const auto j = nlohmann::json::parse(io::read_file(ws.need("threshold.json", "sweep")), nullptr, false);
    if (j.is_discarded() || !j.contains("threshold")) throw DataError("threshold.json is malformed");
    return j["threshold"].get<double>();
}

// Scores for `candidates`, reusing the sweep's cache when it was produced by
// the current model and scoring only what it lacks.
std::vector<double> cached_scores(Workspace& ws, const MatchModel& model, std::span<const AdPair> candidates,
                                  StageReport& rep) {
    std::map<AdPair, double> cache;
    const fs::path p = ws.path("scores.csv");
    if (fs::is_regular_file(p)) {
        const std::string text = io::read_file(p);
        const std::string tag = "# model_digest=" + io::file_digest(ws.path("model.json")) + "\n";
        if (text.rfind(tag, 0) == 0) {
            const auto rows = io::parse_csv(text);
            for (std::size_t r = 1; r < rows.size(); ++r) {
                if (rows[r].size() < 3) throw DataError("scores.csv: short row");
                const std::size_t a = ws.index_of(rows[r][0]), b = ws.index_of(rows[r][1]);
                cache[{std::min(a, b), std::max(a, b)}] = io::parse_double(rows[r][2]);
            }
        }
    }
    std::vector<double> scores(candidates.size());
    std::vector<AdPair> missing;
    std::vector<std::size_t> slots;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        if (const auto it = cache.find(candidates[k]); it != cache.end()) {
            scores[k] = it->second;
        } else {
            missing.push_back(candidates[k]);
            slots.push_back(k);
        }
    }
    const auto fresh = score_candidates(model, missing, ws.profiles(), ws.cfg().threads);
    for (std::size_t k = 0; k < slots.size(); ++k) scores[slots[k]] = fresh[k];
    rep.counts["scores_reused"] = candidates.size() - missing.size();
    return scores;
}

void stage_resolve(Workspace& ws, StageReport& rep) {
    const MatchModel model = ws.model();
    const auto candidates = ws.read_pairs("candidates.csv", "block");
    const double threshold = read_threshold(ws);
    const Corpus& corpus = ws.ads();

    const auto scores = cached_scores(ws, model, candidates, rep);
    const auto strong = strong_edges(ws.strong().graph);
    const auto weak = make_weak_edges(candidates, scores);
    const ComponentSet cs = connected_components(corpus.size(), strong, weak, threshold);

    std::string comp;
    for (const auto& c : cs.components) {
        ojson j;
        j["component"] = corpus[c.id].id;
        auto members = ojson::array();
        for (auto m : c.members) members.push_back(corpus[m].id);
        j["members"] = members;
        j["strong_edges"] = c.strong_edges;
        j["weak_edges"] = c.weak_edges;
        comp += j.dump() + "\n";
    }
    ws.write("components.jsonl", comp);

    std::string edges = "i,j,kind,score\n";
    for (const auto& [i, j] : strong) edges += corpus[i].id + "," + corpus[j].id + ",strong,\n";
    std::size_t admitted = 0;
    for (const auto& e : weak) {
        admitted += e.score >= threshold;
        edges += corpus[e.i].id + "," + corpus[e.j].id + ",weak," + io::format_double(e.score) + "\n";
    }
    ws.write("edges.csv", edges);
    rep.counts["threshold"] = threshold;
    rep.counts["strong_edges"] = strong.size();
    rep.counts["weak_edges_scored"] = weak.size();
    rep.counts["weak_edges_admitted"] = admitted;
    rep.counts["components"] = cs.components.size();
    rep.counts["largest_component"] = cs.largest_size();
}

struct ComponentRecord {
    std::string id;
    std::vector<std::size_t> members;
    std::size_t edges = 0;
};

std::vector<ComponentRecord> read_components(Workspace& ws) {
    const std::string text = io::read_file(ws.need("components.jsonl", "resolve"));
    std::vector<ComponentRecord> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw DataError("components.jsonl: malformed line");
        ComponentRecord c;
        c.id = j.at("component").get<std::string>();
        for (const auto& m : j.at("members")) c.members.push_back(ws.index_of(m.get<std::string>()));
        std::sort(c.members.begin(), c.members.end());
        c.edges = j.at("strong_edges").get<std::size_t>() + j.at("weak_edges").get<std::size_t>();
        out.push_back(std::move(c));
    }
    return out;
}

std::map<std::string, int> read_labels(const fs::path& path) {
    std::map<std::string, int> labels;
    const auto rows = io::parse_csv(io::read_file(path));
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() < 2) throw DataError(path.string() + ": short row");
        const long long v = io::parse_int(rows[r][1]);
        if (v != 0 && v != 1) throw DataError(path.string() + ": labels must be 0 or 1");
        labels[rows[r][0]] = static_cast<int>(v);
    }
    return labels;
}

void stage_clusters(Workspace& ws, StageReport& rep) {
    const auto& cfg = ws.cfg();
    const Corpus& corpus = ws.ads();
    const auto& fields = ws.fields();
    const auto components = read_components(ws);
    const auto image_df = image_frequencies(corpus);

    std::vector<const ComponentRecord*> kept;
    for (const auto& c : components) {
        if (c.members.size() > cfg.min_cluster_size) kept.push_back(&c);
    }
    std::vector<ClusterFeatures> feats(kept.size());
    parallel_for(kept.size(), cfg.threads, [&](std::size_t k) {
        feats[k] = featurize_component(kept[k]->members, corpus, fields, image_df, kept[k]->edges);
    });

    std::string out = "cluster_id";
    for (const auto& n : cluster_feature_names()) out += "," + n;
    out += "\n";
    for (std::size_t k = 0; k < kept.size(); ++k) {
        out += io::csv_escape(kept[k]->id);
        for (double v : feats[k].values()) out += "," + io::format_double(v);
        out += "\n";
    }
    ws.write("cluster_features.csv", out);
    rep.counts["components"] = components.size();
    rep.counts["clusters"] = kept.size();

    // Labels: an explicit file wins; synthetic corpora fall back to the
    // planted archetype of each cluster's majority source.
    std::map<std::string, int> labels;
    if (!cfg.labels.empty()) {
        labels = read_labels(cfg.labels);
    } else if (fs::is_regular_file(ws.path("sources.csv"))) {
        std::map<std::string, Archetype> arch;
        for (const auto& [id, a] : parse_sources_csv(io::read_file(ws.path("sources.csv")))) arch[id] = a;
        for (const auto* c : kept) {
            std::size_t organized = 0, known = 0;
            for (auto m : c->members) {
                if (!corpus[m].source_id) continue;
                const auto it = arch.find(*corpus[m].source_id);
                if (it == arch.end()) continue;
                ++known;
                organized += it->second == Archetype::organized;
            }
            if (known > 0) labels[c->id] = 2 * organized > known ? 1 : 0;
        }
    }
    std::string lab = "cluster_id,label\n";
    Dataset d;
    d.feature_names = cluster_feature_names();
    for (std::size_t k = 0; k < kept.size(); ++k) {
        const auto it = labels.find(kept[k]->id);
        if (it == labels.end()) continue;
        lab += io::csv_escape(kept[k]->id) + "," + std::to_string(it->second) + "\n";
        const auto v = feats[k].values();
        d.features.append_row(v);
        d.labels.push_back(it->second);
        d.ids.emplace_back(kept[k]->id, "");
    }
    ws.write("labels.csv", lab);
    const std::size_t n_pos = static_cast<std::size_t>(std::count(d.labels.begin(), d.labels.end(), 1));
    rep.counts["labeled_clusters"] = d.size();
    rep.counts["positive_clusters"] = n_pos;
    if (d.size() == 0) {
        rep.warnings.push_back("no cluster labels available; skipping the cluster classifier");
        return;
    }

    ClusterClassifierParams cp;
    cp.n_folds = cfg.n_folds;
    cp.n_random_baselines = cfg.n_baselines;
    cp.seed = derive_seed(cfg.seed, kClusterSeed);
    cp.forest.threads = cfg.threads;
    const ClusterClassifierResult res = train_cluster_classifier(d, cp);
    ws.write_json("cluster_model.json", ojson(model_to_json(res.model)));
    ws.write("cluster_roc.csv", roc_to_csv(res.roc));
    ws.write("cluster_baseline_roc.csv", roc_to_csv(res.baseline_curve));
    ojson report;
    report["clusters"] = d.size();
    report["positives"] = n_pos;
    report["n_folds"] = cp.n_folds;
    report["auc"] = res.roc.auc;
    report["tpr_at_fpr_0.01"] = tpr_at_fpr(res.roc, 0.01);
    report["fpr_at_tpr_0.5"] = fpr_at_tpr(res.roc, 0.5);
    report["baseline_mean_auc"] = res.baseline_mean_auc;
    report["n_baselines"] = res.baseline_aucs.size();
    ws.write_json("cluster_report.json", report);
    rep.counts["auc"] = res.roc.auc;
    rep.counts["baseline_mean_auc"] = res.baseline_mean_auc;
}

struct LabeledClusters {
    std::vector<std::string> ids;
    Matrix features;
    std::vector<int> labels;
};

LabeledClusters read_labeled_clusters(Workspace& ws) {
    const auto rows = io::parse_csv(io::read_file(ws.need("cluster_features.csv", "clusters")));
    const auto labels = read_labels(ws.need("labels.csv", "clusters"));
    if (rows.empty() || rows[0].size() != 1 + kClusterFeatureCount) {
        throw DataError("cluster_features.csv: unexpected header");
    }
    LabeledClusters out;
    std::vector<double> v(kClusterFeatureCount);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto it = labels.find(rows[r][0]);
        if (it == labels.end()) continue;
        if (rows[r].size() != rows[0].size()) throw DataError("cluster_features.csv: ragged row");
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = io::parse_double(rows[r][k + 1]);
        out.ids.push_back(rows[r][0]);
        out.features.append_row(v);
        out.labels.push_back(it->second);
    }
    return out;
}

void stage_rules(Workspace& ws, StageReport& rep) {
    const auto& cfg = ws.cfg();
    const LabeledClusters lc = read_labeled_clusters(ws);
    const auto& names = cluster_feature_names();
    const RuleSet rs = learn_rules(lc.features, lc.labels, cfg.rules);
    const std::size_t n_pos = static_cast<std::size_t>(std::count(lc.labels.begin(), lc.labels.end(), 1));

    ojson j;
    j["clusters"] = lc.labels.size();
    j["positives"] = n_pos;
    j["prior"] = lc.labels.empty() ? ojson(nullptr) : ojson(static_cast<double>(n_pos) / static_cast<double>(lc.labels.size()));
    j["params"] = {{"max_rules", cfg.rules.max_rules},   {"min_support", cfg.rules.min_support},
                   {"beam_width", cfg.rules.beam_width}, {"max_conditions", cfg.rules.max_conditions},
                   {"n_cuts", cfg.rules.n_cuts}};
    j["rules"] = ojson(rules_to_json(rs.rules, names));
    ws.write_json("rules.json", j);

    std::string pn = "max_rules,step,P,N\n";
    for (std::size_t max_rules : cfg.pn_max_rules) {
        RuleParams p = cfg.rules;
        p.max_rules = max_rules;
        const RuleSet r = learn_rules(lc.features, lc.labels, p);
        const auto curve = pn_curve(r.rules, lc.features, lc.labels);
        for (std::size_t s = 0; s < curve.size(); ++s) {
            pn += std::to_string(max_rules) + "," + std::to_string(s) + "," + std::to_string(curve[s].positives) +
                  "," + std::to_string(curve[s].negatives) + "\n";
        }
    }
    ws.write("pn.csv", pn);
    rep.counts["clusters"] = lc.labels.size();
    rep.counts["rules"] = rs.rules.size();
    rep.warnings.insert(rep.warnings.end(), rs.warnings.begin(), rs.warnings.end());
}

ojson read_json_if(Workspace& ws, std::string_view name) {
    const fs::path p = ws.path(name);
    if (!fs::is_regular_file(p)) return nullptr;
    return ojson::parse(io::read_file(p));
}

void stage_eval(Workspace& ws, StageReport& rep) {
    const Corpus& corpus = ws.ads();
    const auto components = read_components(ws);
    ojson report;
    report["ads"] = corpus.size();
    report["components"] = components.size();
    std::size_t largest = 0, singletons = 0;
    for (const auto& c : components) {
        largest = std::max(largest, c.members.size());
        singletons += c.members.size() == 1;
    }
    report["largest_component"] = largest;
    report["singletons"] = singletons;

    if (has_truth(corpus)) {
        std::vector<std::size_t> component_of(corpus.size(), 0);
        for (std::size_t c = 0; c < components.size(); ++c) {
            for (auto m : components[c].members) component_of[m] = c;
        }
        const PairwiseScores s = pairwise_scores(component_of, sources_of(corpus));
        report["pairwise"] = {{"true_positives", s.true_positives}, {"predicted_pairs", s.predicted_pairs},
                              {"truth_pairs", s.truth_pairs},       {"precision", optional_json(s.precision)},
                              {"recall", optional_json(s.recall)},  {"f1", optional_json(s.f1)}};
        rep.counts["f1"] = optional_json(s.f1);
    } else {
        rep.warnings.push_back("corpus has no source_id ground truth; reporting unsupervised statistics only");
        report["pairwise"] = nullptr;
    }

    const ojson blocking = read_json_if(ws, "blocking_stats.json");
    report["blocking_recall"] = blocking.is_null() ? ojson(nullptr) : blocking.value("blocking_recall", ojson(nullptr));
    report["blocking_fraction_of_total"] =
        blocking.is_null() ? ojson(nullptr) : blocking.value("fraction_of_total", ojson(nullptr));
    const ojson train = read_json_if(ws, "train_report.json");
    report["match_auc"] = train.is_null() ? ojson(nullptr) : train["auc"];
    report["match_tpr_at_fpr_0.01"] = train.is_null() ? ojson(nullptr) : train["tpr_at_fpr_0.01"];
    const ojson threshold = read_json_if(ws, "threshold.json");
    report["threshold"] = threshold.is_null() ? ojson(nullptr) : threshold["threshold"];
    const ojson cluster = read_json_if(ws, "cluster_report.json");
    report["cluster_auc"] = cluster.is_null() ? ojson(nullptr) : cluster["auc"];
    report["cluster_baseline_auc"] = cluster.is_null() ? ojson(nullptr) : cluster["baseline_mean_auc"];
    const ojson rules = read_json_if(ws, "rules.json");
    auto table = ojson::array();
    if (!rules.is_null()) {
        for (const auto& r : rules["rules"]) {
            table.push_back({{"rule", r["rule"]}, {"support", r["support"]}, {"ratio", r["ratio"]}, {"lift", r["lift"]}});
        }
    }
    report["rules"] = table;
    ws.write_json("eval.json", report);
    rep.counts["components"] = components.size();
}

void append_metrics(const Workspace& ws, const StageReport& rep) {
    const fs::path p = ws.path("metrics.json");
    ojson all = ojson::array();
    if (fs::is_regular_file(p)) {
        all = ojson::parse(io::read_file(p), nullptr, false);
        if (all.is_discarded() || !all.is_array()) all = ojson::array();
    }
    ojson entry;
    entry["stage"] = rep.stage;
    entry["seconds"] = rep.seconds;
    entry["counts"] = rep.counts;
    entry["warnings"] = rep.warnings;
    all.push_back(entry);
    ws.write_json("metrics.json", all);
}

using StageFn = void (*)(Workspace&, StageReport&);

StageFn stage_fn(std::string_view name) {
    static const std::map<std::string, StageFn, std::less<>> table = {
        {"synth", stage_synth},       {"ingest", stage_ingest},   {"extract", stage_extract},
        {"sample", stage_sample},     {"features", stage_features}, {"train", stage_train},
        {"block", stage_block},       {"sweep", stage_sweep},     {"resolve", stage_resolve},
        {"clusters", stage_clusters}, {"rules", stage_rules},     {"eval", stage_eval}};
    const auto it = table.find(name);
    if (it == table.end()) throw UsageError("unknown stage '" + std::string(name) + "'");
    return it->second;
}

StageReport run_in(Workspace& ws, std::string_view stage) {
    const StageFn fn = stage_fn(stage);
    StageReport rep;
    rep.stage = std::string(stage);
    const auto t0 = std::chrono::steady_clock::now();
    fn(ws, rep);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& w : rep.warnings) log::warn(rep.stage + ": " + w);
    log::info(rep.stage + ": done in " + io::format_double(std::round(rep.seconds * 1000) / 1000) + " s");
    append_metrics(ws, rep);
    return rep;
}

}  // namespace

StageReport run_stage(std::string_view stage, const PipelineConfig& cfg) {
    if (stage == "pipeline") throw UsageError("use run_pipeline for the full chain");
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    Workspace ws(cfg);
    return run_in(ws, stage);
}

std::vector<StageReport> run_pipeline(const PipelineConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    // A fresh metrics log keeps repeated pipeline runs comparable.
    fs::remove(cfg.out_dir / "metrics.json");
    Workspace ws(cfg);
    std::vector<StageReport> reports;
    reports.push_back(run_in(ws, cfg.corpus.empty() ? "synth" : "ingest"));
    for (const char* s : {"extract", "sample", "features", "train", "block", "sweep", "resolve", "clusters",
                          "rules", "eval"}) {
        reports.push_back(run_in(ws, s));
    }
    ojson digests = ojson::object();
    for (const auto& [name, d] : artifact_digests(cfg.out_dir)) digests[name] = d;
    ws.write_json("digests.json", digests);
    return reports;
}

std::map<std::string, std::string> artifact_digests(const fs::path& dir) {
    std::map<std::string, std::string> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name == "metrics.json" || name == "digests.json") continue;
        out[name] = io::file_digest(entry.path());
    }
    return out;
}

PairwiseScores pairwise_scores(std::span<const std::size_t> component_of,
                               std::span<const std::optional<std::string>> source_of) {
    if (component_of.size() != source_of.size()) throw DataError("pairwise scores: size mismatch");
    auto pairs = [](std::size_t n) { return n * (n > 0 ? n - 1 : 0) / 2; };
    std::map<std::size_t, std::size_t> by_component;
    std::map<std::string, std::size_t> by_source;
    std::map<std::pair<std::size_t, std::string>, std::size_t> by_both;
    for (std::size_t k = 0; k < component_of.size(); ++k) {
        if (!source_of[k]) continue;
        ++by_component[component_of[k]];
        ++by_source[*source_of[k]];
        ++by_both[{component_of[k], *source_of[k]}];
    }
    PairwiseScores s;
    for (const auto& [_, n] : by_component) s.predicted_pairs += pairs(n);
    for (const auto& [_, n] : by_source) s.truth_pairs += pairs(n);
    for (const auto& [_, n] : by_both) s.true_positives += pairs(n);
    if (s.predicted_pairs > 0) s.precision = static_cast<double>(s.true_positives) / static_cast<double>(s.predicted_pairs);
    if (s.truth_pairs > 0) s.recall = static_cast<double>(s.true_positives) / static_cast<double>(s.truth_pairs);
    if (s.precision && s.recall) {
        const double sum = *s.precision + *s.recall;
        s.f1 = sum > 0 ? 2 * *s.precision * *s.recall / sum : 0.0;
    }
    return s;
}

}  // namespace adlink
