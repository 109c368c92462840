#include <doctest.h>

#include <cmath>

#include "adlink/clusterfeat.hpp"
#include "adlink/error.hpp"
#include "adlink/random.hpp"

using namespace adlink;

namespace {

Ad ad_at(std::string id, const char* when, std::string state, std::string text = "hello there") {
    Ad a;
    a.id = std::move(id);
    a.text = std::move(text);
    a.posted_at = timefmt::parse(when);
    a.state = std::move(state);
    return a;
}

Dataset cluster_dataset(std::size_t n, double signal, std::uint64_t seed) {
    Rng rng(seed);
    Dataset d;
    d.schema_version = 1;
    d.feature_names = {"a", "b", "c"};
    for (std::size_t i = 0; i < n; ++i) {
        const int y = i % 3 == 0 ? 1 : 0;
        d.features.append_row(std::vector<double>{signal * y + uniform_real(rng), uniform_real(rng), uniform_real(rng)});
        d.labels.push_back(y);
    }
    return d;
}

}  // namespace

TEST_CASE("feature names line up with values") {
    CHECK(cluster_feature_names().size() == kClusterFeatureCount);
    CHECK(cluster_feature_names().front() == "n_ads");
    CHECK(cluster_feature_names().back() == "edge_density");
}

TEST_CASE("single ad component") {
    Corpus c{ad_at("x", "2016-03-04T10:00:00Z", "NY")};
    c[0].image_hashes = {"aa"};
    const std::vector<FieldSet> fs(1);
    const auto df = image_frequencies(c);
    const std::vector<std::size_t> members{0};
    const ClusterFeatures f = featurize_component(members, c, fs, df, 0);
    CHECK(f.n_ads == 1);
    CHECK(f.posting_weeks == 1);
    CHECK(f.posting_months == 1);
    CHECK(f.mn_weeks == 1);
    CHECK(f.std_months == 0);
    CHECK(f.std_img_freq == 0);
    CHECK(f.max_img_freq == 1);
    CHECK(f.states_norm == 1.0);
    CHECK(f.unique_imgs_norm == 1.0);
    CHECK(f.edge_density == 0.0);
    CHECK(f.min_chars == 11);
}

TEST_CASE("two ads in the same week sharing a name") {
    Corpus c{ad_at("a", "2016-03-07T10:00:00Z", "TX", "short"), ad_at("b", "2016-03-09T10:00:00Z", "TX")};
    std::vector<FieldSet> fs(2);
    fs[0].names = {"amber"};
    fs[1].names = {"amber"};
    const std::vector<std::size_t> members{0, 1};
    const ClusterFeatures f = featurize_component(members, c, fs, image_frequencies(c), 1);
    CHECK(f.posting_weeks == 1);
    CHECK(f.mn_weeks == 2);
    CHECK(f.names_norm == 0.5);
    CHECK(f.states_norm == 0.5);
    CHECK(f.edge_density == 1.0);
    CHECK(f.min_chars == 5);
    CHECK(f.unique_imgs_norm == 0.0);
}

TEST_CASE("one ad per month across January to March") {
    Corpus c{ad_at("a", "2016-01-15T00:00:00Z", "CA"), ad_at("b", "2016-02-15T00:00:00Z", "CA"),
             ad_at("c", "2016-03-15T00:00:00Z", "")};
    const std::vector<FieldSet> fs(3);
    const std::vector<std::size_t> members{0, 1, 2};
    const ClusterFeatures f = featurize_component(members, c, fs, image_frequencies(c), 2);
    CHECK(f.posting_months == 3);
    CHECK(f.mn_months == 1);
    CHECK(f.std_months == 0);
    CHECK(f.posting_weeks == 3);
    CHECK(f.states_norm == doctest::Approx(1.0 / 3));
    CHECK(f.edge_density == doctest::Approx(2.0 / 3));
}

TEST_CASE("uneven months give a population deviation") {
    Corpus c{ad_at("a", "2016-01-01T00:00:00Z", "CA"), ad_at("b", "2016-01-02T00:00:00Z", "CA"),
             ad_at("c", "2016-01-03T00:00:00Z", "CA"), ad_at("d", "2016-02-10T00:00:00Z", "CA")};
    const std::vector<FieldSet> fs(4);
    const std::vector<std::size_t> members{0, 1, 2, 3};
    const ClusterFeatures f = featurize_component(members, c, fs, image_frequencies(c), 3);
    CHECK(f.mn_months == 2);
    CHECK(f.std_months == doctest::Approx(1.0));
}

TEST_CASE("image frequencies use corpus-wide counts") {
    Corpus c;
    for (int i = 0; i < 5; ++i) c.push_back(ad_at("a" + std::to_string(i), "2016-01-01T00:00:00Z", "CA"));
    for (auto k : {0, 1, 2, 3}) c[k].image_hashes = {"hot"};
    c[0].image_hashes.push_back("rare");
    std::sort(c[0].image_hashes.begin(), c[0].image_hashes.end());
    const auto df = image_frequencies(c);
    CHECK(df.at("hot") == 4);
    const std::vector<FieldSet> fs(5);
    const std::vector<std::size_t> members{0};
    const ClusterFeatures f = featurize_component(members, c, fs, df, 0);
    CHECK(f.max_img_freq == 4);
    CHECK(f.std_img_freq == doctest::Approx(1.5));
    for (double v : f.values()) {
        CHECK(std::isfinite(v));
        CHECK(v >= 0);
    }
}

TEST_CASE("filter keeps strictly larger components") {
    std::vector<Component> comps;
    for (std::size_t size : {299, 300, 301, 5}) {
        Component c;
        c.id = comps.size();
        c.members.resize(size);
        comps.push_back(c);
    }
    const auto kept = filter_components(comps, 300);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].members.size() == 301);
    CHECK(filter_components(comps, 0).size() == 4);
}

TEST_CASE("random baselines sit near chance") {
    const Dataset d = cluster_dataset(60, 2.0, 1);
    ClusterClassifierParams p;
    p.forest.n_trees = 20;
    const auto res = train_cluster_classifier(d, p);
    CHECK(res.baseline_aucs.size() == 100);
    CHECK(res.baseline_mean_auc >= 0.45);
    CHECK(res.baseline_mean_auc <= 0.55);
    REQUIRE(res.baseline_curve.points.size() == 101);
    for (std::size_t k = 1; k < res.baseline_curve.points.size(); ++k) {
        CHECK(res.baseline_curve.points[k].tpr >= res.baseline_curve.points[k - 1].tpr);
    }
    CHECK(res.baseline_curve.points.back().tpr == 1.0);
}

TEST_CASE("planted separable labels give high out-of-fold AUC") {
    const Dataset d = cluster_dataset(60, 2.0, 2);
    ClusterClassifierParams p;
    p.forest.n_trees = 30;
    const auto res = train_cluster_classifier(d, p);
    CHECK(res.roc.auc >= 0.9);
    CHECK(res.oof_scores.size() == d.size());
    std::vector<std::size_t> pos_per_fold(p.n_folds, 0);
    for (std::size_t r = 0; r < d.size(); ++r) pos_per_fold[res.fold_of[r]] += d.labels[r];
    for (auto c : pos_per_fold) CHECK(c == 5);
    CHECK(model_to_json(train_cluster_classifier(d, p).model).dump() == model_to_json(res.model).dump());
}

TEST_CASE("cluster classifier errors") {
    Dataset d = cluster_dataset(12, 1.0, 3);  // 4 positives
    ClusterClassifierParams p;
    p.n_folds = 5;
    CHECK_THROWS_AS(train_cluster_classifier(d, p), DataError);
    std::fill(d.labels.begin(), d.labels.end(), 0);
    p.n_folds = 2;
    CHECK_THROWS_AS(train_cluster_classifier(d, p), DataError);
}
