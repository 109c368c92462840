#include <doctest.h>

#include "adlink/config.hpp"
#include "adlink/error.hpp"

using namespace adlink;

TEST_CASE("defaults validate") {
    PipelineConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.seed == 7);
    CHECK(c.model_kind == ModelKind::forest);
    CHECK(c.sweep_sample == 10000);
    CHECK(c.cap_fraction == 0.05);
}

TEST_CASE("parse keys, comments and blank lines") {
    const PipelineConfig c = parse_config(R"(
# comment
seed = 42
threads=2   # trailing comment
synth.n_sources = 10
sampler.same_city_negatives = true
model.kind = logistic
model.logistic.lr = 0.25
resolve.thresholds = 0.1, 0.5, 0.9
cluster.pn_max_rules = 1,3
out_dir = /tmp/x
)");
    CHECK(c.seed == 42);
    CHECK(c.threads == 2);
    CHECK(c.synth.n_sources == 10);
    CHECK(c.same_city_negatives);
    CHECK(c.model_kind == ModelKind::logistic);
    CHECK(c.logistic.lr == 0.25);
    CHECK(c.thresholds == std::vector<double>{0.1, 0.5, 0.9});
    CHECK(c.pn_max_rules == std::vector<std::size_t>{1, 3});
    CHECK(c.out_dir == "/tmp/x");
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("bad input is a usage error") {
    CHECK_THROWS_AS(parse_config("nosuch.key = 1"), UsageError);
    CHECK_THROWS_AS(parse_config("seed"), UsageError);
    CHECK_THROWS_AS(parse_config("seed = -3"), UsageError);
    CHECK_THROWS_AS(parse_config("seed = abc"), UsageError);
    CHECK_THROWS_AS(parse_config("sampler.same_city_negatives = maybe"), UsageError);
    CHECK_THROWS_AS(parse_config("model.kind = svm"), UsageError);
    CHECK_THROWS_AS(parse_config("model.logistic.lr = x"), UsageError);
    CHECK_THROWS_AS(load_config("/nonexistent/adlink.conf"), UsageError);
}

TEST_CASE("range checks") {
    CHECK_THROWS_AS(parse_config("resolve.thresholds = 0.5, 0.4").validate(), UsageError);
    CHECK_THROWS_AS(parse_config("resolve.thresholds = 0.5").validate(), UsageError);
    CHECK_THROWS_AS(parse_config("threads = 0").validate(), UsageError);
    CHECK_THROWS_AS(parse_config("model.holdout_fraction = 1").validate(), UsageError);
    CHECK_THROWS_AS(parse_config("cluster.n_folds = 1").validate(), UsageError);
    CHECK_THROWS_AS(parse_config("resolve.cap_fraction = 0").validate(), UsageError);
}

TEST_CASE("dump round-trips") {
    const PipelineConfig c = parse_config("seed = 9\nresolve.thresholds = 0.2,0.4\nmodel.forest.n_trees = 12\n");
    const std::string d = c.dump();
    CHECK(d.find("seed = 9\n") != std::string::npos);
    const PipelineConfig back = parse_config(d);
    CHECK(back.dump() == d);
    CHECK(back.forest.n_trees == 12);
    CHECK(back.thresholds == c.thresholds);
}
