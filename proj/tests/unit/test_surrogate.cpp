#include <doctest.h>

#include <algorithm>
#include <queue>
#include <set>

#include "adlink/error.hpp"
#include "adlink/extract.hpp"
#include "adlink/pairfeat.hpp"
#include "adlink/random.hpp"
#include "adlink/surrogate.hpp"
#include "adlink/synthetic.hpp"

using namespace adlink;

namespace {

std::vector<FieldSet> with_phones(const std::vector<std::vector<std::string>>& phones) {
    std::vector<FieldSet> out(phones.size());
    for (std::size_t k = 0; k < phones.size(); ++k) out[k].phones.insert(phones[k].begin(), phones[k].end());
    return out;
}

// Independent closure: BFS over the "shares a phone" relation, checked pairwise.
std::vector<std::set<std::size_t>> bfs_components(const std::vector<FieldSet>& fs) {
    const std::size_t n = fs.size();
    auto linked = [&](std::size_t a, std::size_t b) {
        for (const auto& p : fs[a].phones) {
            if (fs[b].phones.count(p)) return true;
        }
        return false;
    };
    std::vector<bool> seen(n, false);
    std::vector<std::set<std::size_t>> out;
    for (std::size_t s = 0; s < n; ++s) {
        if (seen[s] || fs[s].phones.empty()) continue;
        std::set<std::size_t> comp;
        std::queue<std::size_t> q;
        q.push(s);
        seen[s] = true;
        while (!q.empty()) {
            const auto v = q.front();
            q.pop();
            comp.insert(v);
            for (std::size_t w = 0; w < n; ++w) {
                if (!seen[w] && linked(v, w)) {
                    seen[w] = true;
                    q.push(w);
                }
            }
        }
        out.push_back(comp);
    }
    return out;
}

std::vector<std::set<std::size_t>> as_sets(const ProxyComponents& pc) {
    std::vector<std::set<std::size_t>> out;
    for (const auto& m : pc.members) out.emplace_back(m.begin(), m.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("strong graph components") {
    const auto fs = with_phones({{"p1"}, {"p1", "p2"}, {"p2"}, {"p3"}});
    const auto r = build_strong_graph(fs);
    CHECK(as_sets(r.components) == std::vector<std::set<std::size_t>>{{0, 1, 2}, {3}});
    CHECK(r.graph.phone_to_ads.at("p2") == std::vector<std::size_t>{1, 2});
    CHECK(r.graph.ad_to_phones[1] == std::vector<std::string>{"p1", "p2"});
    CHECK(r.graph.shares_phone(0, 1));
    CHECK_FALSE(r.graph.shares_phone(0, 2));
}

TEST_CASE("no phones means no components") {
    const auto r = build_strong_graph(with_phones({{}, {}, {}}));
    CHECK(r.components.members.empty());
    CHECK(r.components.excluded == 3);
    for (const auto& c : r.components.component_of) CHECK_FALSE(c.has_value());
}

TEST_CASE("one ad with one phone is a singleton component") {
    const auto r = build_strong_graph(with_phones({{"p"}}));
    REQUIRE(r.components.members.size() == 1);
    CHECK(r.components.members[0] == std::vector<std::size_t>{0});
}

TEST_CASE("proxy components equal BFS closure on random phone assignments") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 20 + uniform_index(rng, 200);
        const std::size_t n_phones = 1 + uniform_index(rng, n);
        std::vector<std::vector<std::string>> phones(n);
        for (auto& p : phones) {
            const int k = uniform_int(rng, 0, 2);
            for (int i = 0; i < k; ++i) p.push_back("p" + std::to_string(uniform_index(rng, n_phones)));
        }
        const auto fs = with_phones(phones);
        auto oracle = bfs_components(fs);
        std::sort(oracle.begin(), oracle.end());
        CHECK(as_sets(build_strong_graph(fs).components) == oracle);
    }
}

TEST_CASE("bias excludes pairs sharing a phone") {
    const auto r1 = build_strong_graph(with_phones({{"p1"}, {"p1"}}));
    CHECK_THROWS_AS(sample_pairs(r1.components, r1.graph, {}), DataError);

    const auto r2 = build_strong_graph(with_phones({{"p1"}, {"p1", "p2"}, {"p2"}, {"p3"}}));
    SampleParams sp;
    sp.n_pos = 10;
    sp.n_neg = 10;
    const SampleResult s = sample_pairs(r2.components, r2.graph, sp);
    CHECK(s.eligible_positives == 1);
    std::vector<std::pair<std::size_t, std::size_t>> pos, neg;
    for (const auto& p : s.pairs) (p.label == PairLabel::positive ? pos : neg).emplace_back(p.ad_i, p.ad_j);
    CHECK(pos == std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}});
    // cross-component pairs: each of 0,1,2 with 3
    CHECK(neg == std::vector<std::pair<std::size_t, std::size_t>>{{0, 3}, {1, 3}, {2, 3}});
    CHECK_FALSE(s.warnings.empty());  // fewer than requested
}

TEST_CASE("sampled pairs on a synthetic corpus obey the labeling invariants") {
    SyntheticSpec spec;
    spec.n_sources = 15;
    const auto sc = generate_synthetic(spec);
    std::vector<FieldSet> fs;
    for (const auto& ad : sc.ads) fs.push_back(extract_fields(ad.text));
    const auto r = build_strong_graph(fs);
    SampleParams sp;
    sp.n_pos = 800;
    sp.n_neg = 800;
    const SampleResult s = sample_pairs(r.components, r.graph, sp);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& p : s.pairs) {
        CHECK(p.ad_i < p.ad_j);
        CHECK(seen.insert({p.ad_i, p.ad_j}).second);
        const auto ci = r.components.component_of[p.ad_i], cj = r.components.component_of[p.ad_j];
        REQUIRE(ci.has_value());
        REQUIRE(cj.has_value());
        if (p.label == PairLabel::positive) {
            CHECK(*ci == *cj);
            CHECK_FALSE(r.graph.shares_phone(p.ad_i, p.ad_j));
        } else {
            CHECK(*ci != *cj);
        }
    }
    CHECK(s.pairs.size() == 1600);

    // deterministic per seed, different across seeds
    const SampleResult again = sample_pairs(r.components, r.graph, sp);
    CHECK(again.pairs.size() == s.pairs.size());
    CHECK(std::equal(s.pairs.begin(), s.pairs.end(), again.pairs.begin(), [](const auto& a, const auto& b) {
        return a.ad_i == b.ad_i && a.ad_j == b.ad_j && a.label == b.label;
    }));
    sp.seed = 99;
    const SampleResult other = sample_pairs(r.components, r.graph, sp);
    CHECK_FALSE(std::equal(s.pairs.begin(), s.pairs.end(), other.pairs.begin(), [](const auto& a, const auto& b) {
        return a.ad_i == b.ad_i && a.ad_j == b.ad_j;
    }));
}

TEST_CASE("same-city negatives stay within a city") {
    SyntheticSpec spec;
    spec.n_sources = 12;
    const auto sc = generate_synthetic(spec);
    std::vector<FieldSet> fs;
    for (const auto& ad : sc.ads) fs.push_back(extract_fields(ad.text));
    const auto r = build_strong_graph(fs);
    SampleParams sp;
    sp.n_pos = 50;
    sp.n_neg = 200;
    sp.same_city_negatives = true;
    const SampleResult s = sample_pairs(r.components, r.graph, sp, sc.ads);
    std::size_t negatives = 0;
    for (const auto& p : s.pairs) {
        if (p.label != PairLabel::negative) continue;
        ++negatives;
        CHECK(sc.ads[p.ad_i].city == sc.ads[p.ad_j].city);
    }
    CHECK(negatives > 0);
}

TEST_CASE("jaccard similarity") {
    const std::vector<std::string> a{"a", "b", "c"}, b{"b", "c", "d"}, c{"x", "y"}, e{};
    CHECK(jaccard_unigram(a, a) == 1.0);
    CHECK(jaccard_unigram(a, c) == 0.0);
    CHECK(jaccard_unigram(a, b) == 0.5);
    CHECK(jaccard_unigram(e, e) == 1.0);
    CHECK(jaccard_unigram(unigram_set("same words here"), unigram_set("same words here")) == 1.0);
}

TEST_CASE("similarity histogram") {
    const std::vector<double> one{1.0};
    const Histogram h1 = similarity_histogram(one);
    CHECK(h1.counts.size() == 20);
    CHECK(h1.edges.size() == 21);
    CHECK(h1.counts.back() == 1);

    const std::vector<double> two{0.0, 1.0};
    const Histogram h2 = similarity_histogram(two);
    CHECK(h2.counts.front() == 1);
    CHECK(h2.counts.back() == 1);
    std::size_t total = 0;
    for (auto c : h2.counts) total += c;
    CHECK(total == 2);
}

TEST_CASE("synthetic positives contain near duplicates and dissimilar pairs") {
    SyntheticSpec spec;
    const auto sc = generate_synthetic(spec);
    std::vector<FieldSet> fs;
    std::vector<std::vector<std::string>> uni;
    for (const auto& ad : sc.ads) {
        fs.push_back(extract_fields(ad.text));
        uni.push_back(unigram_set(ad.text));
    }
    const auto r = build_strong_graph(fs);
    SampleParams sp;
    sp.n_pos = 5000;
    sp.n_neg = 1;
    const SampleResult s = sample_pairs(r.components, r.graph, sp);
    std::vector<double> sims;
    for (const auto& p : s.pairs) {
        if (p.label == PairLabel::positive) sims.push_back(jaccard_unigram(uni[p.ad_i], uni[p.ad_j]));
    }
    const Histogram h = similarity_histogram(sims);
    std::size_t high = h.counts.back() + h.counts[h.counts.size() - 2];  // [0.9, 1.0]
    std::size_t mid = 0;
    for (std::size_t b = 2; b < 6; ++b) mid += h.counts[b];  // [0.1, 0.3)
    CHECK(high > 0);
    CHECK(mid > 0);
}
