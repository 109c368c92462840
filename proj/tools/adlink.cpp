// adlink — entity resolution over noisy ads, one subcommand per pipeline stage.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adlink/config.hpp"
#include "adlink/error.hpp"
#include "adlink/log.hpp"
#include "adlink/pipeline.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kPrerequisite = 3 };

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string out_dir;
    std::vector<std::string> overrides;
    bool quiet = false;
    bool print_config = false;
};

adlink::PipelineConfig build_config(const Globals& g) {
    adlink::PipelineConfig cfg = g.config_path.empty() ? adlink::PipelineConfig{} : adlink::load_config(g.config_path);
    for (const auto& kv : g.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw adlink::UsageError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (g.seed) cfg.seed = *g.seed;
    if (g.threads) cfg.threads = *g.threads;
    if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adlink: link noisy ads to their sources using shared phones as proxy labels"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand
    Globals g;
    app.add_option("--config", g.config_path, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "master seed");
    app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out_dir, "artifact directory");
    app.add_option("--set", g.overrides, "override a config key (key=value), repeatable");
    app.add_flag("-q,--quiet", g.quiet, "only print warnings and errors");
    app.add_flag("--print-config", g.print_config, "print the effective config before running");

    const char* descriptions[] = {
        "generate a synthetic corpus (ads.jsonl, sources.csv)",
        "load and normalize an external corpus (ads.jsonl, rejects.csv)",
        "extract structured fields (fields.jsonl, extraction_report.csv)",
        "sample proxy-labeled pairs (pairs.csv, histogram.csv)",
        "compute pair features (features.csv)",
        "train the match function (model.json, roc.csv, importances.csv)",
        "generate candidate pairs (candidates.csv, blocking_stats.json)",
        "sweep match thresholds (sweep.csv, threshold.json)",
        "resolve components (components.jsonl, edges.csv)",
        "featurize and classify components (cluster_features.csv, labels.csv, cluster_report.json)",
        "learn cluster rules (rules.json, pn.csv)",
        "evaluate against ground truth (eval.json)",
        "run every stage in order",
    };
    const auto& names = adlink::stage_names();
    std::string chosen;
    for (std::size_t k = 0; k < names.size(); ++k) {
        app.add_subcommand(names[k], descriptions[k])->callback([&chosen, name = names[k]] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    if (g.quiet) adlink::log::threshold() = adlink::log::Level::warn;

    try {
        const adlink::PipelineConfig cfg = build_config(g);
        if (g.print_config) std::cout << cfg.dump();
        if (chosen == "pipeline") {
            adlink::run_pipeline(cfg);
        } else {
            adlink::run_stage(chosen, cfg);
        }
        return kOk;
    } catch (const adlink::PrerequisiteError& e) {
        adlink::log::write(adlink::log::Level::error, e.what());
        return kPrerequisite;
    } catch (const adlink::UsageError& e) {
        adlink::log::write(adlink::log::Level::error, e.what());
        return kUsage;
    } catch (const adlink::DataError& e) {
        adlink::log::write(adlink::log::Level::error, e.what());
        return kData;
    } catch (const std::exception& e) {
        adlink::log::write(adlink::log::Level::error, e.what());
        return kData;
    }
}
