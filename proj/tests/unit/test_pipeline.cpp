#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "adlink/error.hpp"
#include "adlink/io.hpp"
#include "adlink/pipeline.hpp"

using namespace adlink;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("adlink_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

PipelineConfig small_config(const fs::path& out) {
    PipelineConfig c;
    c.out_dir = out;
    c.synth.n_sources = 12;
    c.n_pos = 600;
    c.n_neg = 600;
    c.forest.n_trees = 15;
    c.sweep_sample = 400;
    c.min_cluster_size = 5;
    c.n_folds = 2;
    c.n_baselines = 20;
    return c;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ADLINK_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("stage names") {
    const auto& names = stage_names();
    CHECK(names.front() == "synth");
    CHECK(names.back() == "pipeline");
    CHECK(std::set<std::string>(names.begin(), names.end()).size() == names.size());
    CHECK_THROWS_AS(run_stage("nonsense", small_config(scratch("names"))), UsageError);
}

TEST_CASE("pairwise scores") {
    using Src = std::optional<std::string>;
    const std::vector<Src> src{Src("a"), Src("a"), Src("b"), Src("b"), Src("b")};
    const std::vector<std::size_t> perfect{0, 0, 2, 2, 2};
    const PairwiseScores p = pairwise_scores(perfect, src);
    CHECK(p.true_positives == 4);
    CHECK(p.truth_pairs == 4);
    CHECK(*p.f1 == 1.0);

    const std::vector<std::size_t> singletons{0, 1, 2, 3, 4};
    const PairwiseScores s = pairwise_scores(singletons, src);
    CHECK(*s.recall == 0.0);
    CHECK_FALSE(s.precision.has_value());
    CHECK_FALSE(s.f1.has_value());

    const std::vector<std::size_t> merged{0, 0, 0, 0, 0};
    const PairwiseScores m = pairwise_scores(merged, src);
    CHECK(m.predicted_pairs == 10);
    CHECK(*m.precision == doctest::Approx(0.4));
    CHECK(*m.recall == 1.0);
    CHECK(*m.f1 == doctest::Approx(2 * 0.4 / 1.4));

    // unknown sources drop out of both sides
    const std::vector<Src> partial{Src("a"), std::nullopt, Src("a")};
    const std::vector<std::size_t> all_one{0, 0, 0};
    const PairwiseScores q = pairwise_scores(all_one, partial);
    CHECK(q.predicted_pairs == 1);
    CHECK(q.true_positives == 1);
}

TEST_CASE("pairwise scores equal a direct recount") {
    std::vector<std::optional<std::string>> src;
    std::vector<std::size_t> comp;
    for (std::size_t i = 0; i < 60; ++i) {
        src.emplace_back(std::string(1, static_cast<char>('a' + (i * 7) % 5)));
        comp.push_back((i * 11) % 6);
    }
    std::size_t tp = 0, pred = 0, truth = 0;
    for (std::size_t i = 0; i < 60; ++i) {
        for (std::size_t j = i + 1; j < 60; ++j) {
            const bool same_c = comp[i] == comp[j], same_s = src[i] == src[j];
            pred += same_c;
            truth += same_s;
            tp += same_c && same_s;
        }
    }
    const PairwiseScores s = pairwise_scores(comp, src);
    CHECK(s.true_positives == tp);
    CHECK(s.predicted_pairs == pred);
    CHECK(s.truth_pairs == truth);
    CHECK(*s.precision == doctest::Approx(double(tp) / double(pred)));
    CHECK(*s.recall == doctest::Approx(double(tp) / double(truth)));
}

TEST_CASE("early stages are deterministic") {
    std::map<std::string, std::string> first;
    for (int round = 0; round < 2; ++round) {
        const PipelineConfig c = small_config(scratch("det" + std::to_string(round)));
        for (const char* s : {"synth", "extract", "sample"}) run_stage(s, c);
        const auto d = artifact_digests(c.out_dir);
        CHECK(d.count("pairs.csv") == 1);
        CHECK(d.count("metrics.json") == 0);
        if (round == 0) first = d;
        else CHECK(d == first);
    }
}

TEST_CASE("stages report missing prerequisites") {
    const PipelineConfig c = small_config(scratch("prereq"));
    try {
        run_stage("extract", c);
        FAIL("expected a prerequisite error");
    } catch (const PrerequisiteError& e) {
        CHECK(std::string(e.what()).find("ads.jsonl") != std::string::npos);
    }
    run_stage("synth", c);
    run_stage("extract", c);
    try {
        run_stage("resolve", c);
        FAIL("expected a prerequisite error");
    } catch (const PrerequisiteError& e) {
        CHECK(e.stage() == "train");
    }
    CHECK(run_cli("resolve --out " + c.out_dir.string()) == 3);
    CHECK(run_cli("no-such-stage") == 1);
    CHECK(run_cli("synth --out " + c.out_dir.string() + " --set nosuch=1") == 1);
    CHECK(run_cli("synth --seed 3 --out " + c.out_dir.string() + " --set synth.n_sources=5 -q") == 0);
}

TEST_CASE("bad corpus input is a data error") {
    const fs::path dir = scratch("baddata");
    PipelineConfig c = small_config(dir / "out");
    c.corpus = dir / "missing.jsonl";
    CHECK_THROWS_AS(run_stage("ingest", c), DataError);
    CHECK(run_cli("ingest --out " + (dir / "out").string() + " --set corpus=" + c.corpus.string()) == 2);
}

TEST_CASE("full pipeline emits every artifact") {
    const PipelineConfig c = small_config(scratch("full"));
    const auto reports = run_pipeline(c);
    CHECK(reports.size() == 11);
    for (const char* f : {"ads.jsonl", "sources.csv", "fields.jsonl", "extraction_report.csv", "pairs.csv",
                          "histogram.csv", "features.csv", "model.json", "roc.csv", "importances.csv",
                          "train_report.json", "candidates.csv", "blocking_stats.json", "sweep.csv",
                          "threshold.json", "scores.csv", "components.jsonl", "edges.csv", "cluster_features.csv",
                          "labels.csv", "rules.json", "pn.csv", "eval.json", "metrics.json", "digests.json"}) {
        CHECK_MESSAGE(fs::is_regular_file(c.out_dir / f), f);
    }
    const auto eval = nlohmann::json::parse(io::read_file(c.out_dir / "eval.json"));
    CHECK(eval["pairwise"]["f1"].is_number());
    CHECK(eval["ads"].get<std::size_t>() > 0);
    const auto features = io::read_file(c.out_dir / "features.csv");
    CHECK(features.rfind("# schema_version=1\nad_i,ad_j,label,", 0) == 0);

    // re-running resolve reuses cached scores and leaves its outputs unchanged
    const auto before = artifact_digests(c.out_dir);
    run_stage("resolve", c);
    const auto after = artifact_digests(c.out_dir);
    CHECK(after.at("components.jsonl") == before.at("components.jsonl"));
    CHECK(after.at("edges.csv") == before.at("edges.csv"));
}

TEST_CASE("pipeline without ground truth") {
    const fs::path dir = scratch("notruth");
    PipelineConfig gen = small_config(dir / "gen");
    run_stage("synth", gen);
    std::string stripped;
    std::istringstream in(io::read_file(gen.out_dir / "ads.jsonl"));
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        j.erase("source_id");
        stripped += j.dump() + "\n";
    }
    std::ofstream(dir / "plain.jsonl") << stripped;

    PipelineConfig c = small_config(dir / "out");
    c.corpus = dir / "plain.jsonl";
    run_pipeline(c);
    const auto eval = nlohmann::json::parse(io::read_file(c.out_dir / "eval.json"));
    CHECK(eval["pairwise"].is_null());
    CHECK(eval["components"].get<std::size_t>() > 0);
}
