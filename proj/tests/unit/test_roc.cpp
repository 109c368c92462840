#include <doctest.h>

#include <cmath>

#include "adlink/error.hpp"
#include "adlink/random.hpp"
#include "adlink/roc.hpp"
#include "oracles.hpp"

using namespace adlink;

namespace {

RocCurve curve_of(std::initializer_list<std::pair<double, double>> pts) {
    RocCurve c;
    for (auto [f, t] : pts) c.points.push_back({f, t, 0});
    return c;
}

}  // namespace

TEST_CASE("roc on trivial inputs") {
    const std::vector<double> s{0.9, 0.1};
    const std::vector<int> y{1, 0};
    CHECK(roc(s, y).auc == 1.0);

    const std::vector<double> flat(10, 0.3);
    const std::vector<int> yy{1, 0, 1, 0, 1, 1, 0, 0, 0, 1};
    const RocCurve c = roc(flat, yy);
    CHECK(c.auc == 0.5);
    REQUIRE(c.points.size() == 2);
    CHECK(c.points.back().fpr == 1.0);
    CHECK(c.points.back().tpr == 1.0);
}

TEST_CASE("roc requires both classes and equal lengths") {
    const std::vector<double> s{0.1, 0.2};
    CHECK_THROWS_AS(roc(s, std::vector<int>{1, 1}), DataError);
    CHECK_THROWS_AS(roc(s, std::vector<int>{0, 0}), DataError);
    CHECK_THROWS_AS(roc(s, std::vector<int>{0}), DataError);
}

TEST_CASE("sweep AUC equals the concordance oracle") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 200);
        std::vector<double> s(n);
        std::vector<int> y(n);
        // coarse scores force many ties
        const int levels = 1 + static_cast<int>(uniform_index(rng, 20));
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = trial % 2 ? uniform_real(rng) : static_cast<double>(uniform_int(rng, 0, levels)) / levels;
            y[i] = bernoulli(rng, 0.4);
        }
        y[0] = 1;
        y[1] = 0;
        const RocCurve c = roc(s, y);
        CHECK(std::abs(c.auc - oracle::concordance_auc(s, y)) <= 1e-9);
        for (std::size_t k = 1; k < c.points.size(); ++k) {
            CHECK(c.points[k].fpr >= c.points[k - 1].fpr);
            CHECK(c.points[k].tpr >= c.points[k - 1].tpr);
        }
        CHECK(c.points.front().fpr == 0.0);
        CHECK(c.points.back().tpr == 1.0);
    }
}

TEST_CASE("tpr_at_fpr interpolates") {
    CHECK(tpr_at_fpr(curve_of({{0, 0}, {0, 1}, {1, 1}}), 0.01) == 1.0);
    const RocCurve diag = curve_of({{0, 0}, {1, 1}});
    for (double x : {0.0, 0.01, 0.3, 0.77, 1.0}) CHECK(tpr_at_fpr(diag, x) == doctest::Approx(x));
    CHECK(tpr_at_fpr(curve_of({{0, 0}, {0.1, 0.8}, {1, 1}}), 0.05) == doctest::Approx(0.4));
    CHECK(fpr_at_tpr(curve_of({{0, 0}, {0.1, 0.8}, {1, 1}}), 0.4) == doctest::Approx(0.05));
    CHECK(fpr_at_tpr(diag, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("rate targets outside [0,1] are rejected") {
    const RocCurve diag = curve_of({{0, 0}, {1, 1}});
    CHECK_THROWS_AS(tpr_at_fpr(diag, -0.1), UsageError);
    CHECK_THROWS_AS(tpr_at_fpr(diag, 1.5), UsageError);
    CHECK_THROWS_AS(fpr_at_tpr(diag, 2.0), UsageError);
    CHECK_THROWS_AS(tpr_at_fpr(diag, NAN), UsageError);
}

TEST_CASE("roc csv has a header and one row per point") {
    const RocCurve c = roc(std::vector<double>{0.9, 0.5, 0.1}, std::vector<int>{1, 0, 1});
    const std::string csv = roc_to_csv(c);
    CHECK(csv.rfind("fpr,tpr,threshold\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == c.points.size() + 1);
}
