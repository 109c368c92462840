#include "adlink/surrogate.hpp"

#include <algorithm>
#include <set>

#include "adlink/error.hpp"
#include "adlink/random.hpp"
#include "adlink/union_find.hpp"

namespace adlink {

bool StrongGraph::shares_phone(std::size_t a, std::size_t b) const {
    const auto& pa = ad_to_phones[a];
    const auto& pb = ad_to_phones[b];
    auto i = pa.begin();
    auto j = pb.begin();
    while (i != pa.end() && j != pb.end()) {
        if (*i == *j) return true;
        if (*i < *j) {
            ++i;
        } else {
            ++j;
        }
    }
    return false;
}

StrongGraphResult build_strong_graph(std::span<const FieldSet> fieldsets) {
    StrongGraphResult out;
    auto& g = out.graph;
    const std::size_t n = fieldsets.size();
    g.ad_to_phones.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.ad_to_phones[i].assign(fieldsets[i].phones.begin(), fieldsets[i].phones.end());
        for (const auto& p : fieldsets[i].phones) g.phone_to_ads[p].push_back(i);
    }

    DisjointSet ds(n);
    for (const auto& [phone, ads] : g.phone_to_ads) {
        for (std::size_t k = 1; k < ads.size(); ++k) ds.unite(ads[0], ads[k]);
    }

    auto& comps = out.components;
    comps.component_of.assign(n, std::nullopt);
    std::map<std::size_t, std::size_t> root_to_component;
    for (std::size_t i = 0; i < n; ++i) {
        if (g.ad_to_phones[i].empty()) {
            ++comps.excluded;
            continue;
        }
        // Visiting ads in index order numbers components by smallest member.
        auto [it, inserted] = root_to_component.try_emplace(ds.find(i), comps.members.size());
        if (inserted) comps.members.emplace_back();
        comps.members[it->second].push_back(i);
        comps.component_of[i] = it->second;
    }
    return out;
}

namespace {

using IndexPair = std::pair<std::size_t, std::size_t>;

std::vector<IndexPair> sample_without_replacement(std::vector<IndexPair> pool, std::size_t k,
                                                  Rng& rng) {
    if (k >= pool.size()) return pool;
    for (std::size_t i = 0; i < k; ++i) {
        std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace

SampleResult sample_pairs(const ProxyComponents& components, const StrongGraph& graph,
                          const SampleParams& params, std::span<const Ad> ads) {
    SampleResult out;
    Rng rng(params.seed);

    std::vector<IndexPair> eligible;
    for (const auto& members : components.members) {
        for (std::size_t x = 0; x < members.size(); ++x) {
            for (std::size_t y = x + 1; y < members.size(); ++y) {
                if (!graph.shares_phone(members[x], members[y])) {
                    eligible.emplace_back(members[x], members[y]);
                }
            }
        }
    }
    out.eligible_positives = eligible.size();
    if (params.n_pos > 0 && eligible.empty()) {
        throw DataError(
            "no eligible positive pairs: every same-component pair shares a phone, and positives "
            "must have disjoint phone sets");
    }
    if (eligible.size() < params.n_pos) {
        out.warnings.push_back("only " + std::to_string(eligible.size()) +
                               " eligible positive pairs; requested " + std::to_string(params.n_pos));
    }
    for (auto [i, j] : sample_without_replacement(std::move(eligible), params.n_pos, rng)) {
        const auto c = *components.component_of[i];
        out.pairs.push_back({i, j, PairLabel::positive, c, c});
    }

    if (params.n_neg == 0) return out;
    if (components.members.size() < 2) {
        throw DataError("negative sampling needs at least two proxy components");
    }
    if (params.same_city_negatives && ads.empty()) {
        throw UsageError("same-city negatives need the corpus");
    }

    std::vector<std::size_t> bearing;
    for (std::size_t i = 0; i < components.component_of.size(); ++i) {
        if (components.component_of[i]) bearing.push_back(i);
    }
    auto cross = [&](std::size_t a, std::size_t b) {
        return *components.component_of[a] != *components.component_of[b];
    };

    std::vector<IndexPair> negatives;
    std::size_t available = 0;
    if (params.same_city_negatives) {
        std::vector<IndexPair> pool;
        std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> by_city;
        for (auto i : bearing) by_city[{ads[i].state, ads[i].city}].push_back(i);
        for (const auto& [city, group] : by_city) {
            for (std::size_t x = 0; x < group.size(); ++x) {
                for (std::size_t y = x + 1; y < group.size(); ++y) {
                    if (cross(group[x], group[y])) pool.emplace_back(group[x], group[y]);
                }
            }
        }
        available = pool.size();
        negatives = sample_without_replacement(std::move(pool), params.n_neg, rng);
    } else {
        std::size_t same = 0;
        for (const auto& m : components.members) same += m.size() * (m.size() - 1) / 2;
        const std::size_t total = bearing.size() * (bearing.size() - 1) / 2;
        available = total - same;
        if (params.n_neg * 2 >= available) {
            std::vector<IndexPair> pool;
            for (std::size_t x = 0; x < bearing.size(); ++x) {
                for (std::size_t y = x + 1; y < bearing.size(); ++y) {
                    if (cross(bearing[x], bearing[y])) pool.emplace_back(bearing[x], bearing[y]);
                }
            }
            negatives = sample_without_replacement(std::move(pool), params.n_neg, rng);
        } else {
            // Rejection sampling is uniform over cross-component pairs.
            std::set<IndexPair> chosen;
            while (chosen.size() < params.n_neg) {
                std::size_t a = bearing[uniform_index(rng, bearing.size())];
                std::size_t b = bearing[uniform_index(rng, bearing.size())];
                if (a == b || !cross(a, b)) continue;
                if (a > b) std::swap(a, b);
                chosen.emplace(a, b);
            }
            negatives.assign(chosen.begin(), chosen.end());
        }
    }
    if (available < params.n_neg) {
        out.warnings.push_back("only " + std::to_string(available) +
                               " eligible negative pairs; requested " + std::to_string(params.n_neg));
    }
    for (auto [i, j] : negatives) {
        out.pairs.push_back({i, j, PairLabel::negative, *components.component_of[i],
                             *components.component_of[j]});
    }
    return out;
}

double jaccard_unigram(std::span<const std::string> a, std::span<const std::string> b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i == *j) {
            ++inter;
            ++i;
            ++j;
        } else if (*i < *j) {
            ++i;
        } else {
            ++j;
        }
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

Histogram similarity_histogram(std::span<const double> sims, std::size_t bins) {
    if (bins == 0) throw UsageError("histogram needs at least one bin");
    Histogram h;
    h.counts.assign(bins, 0);
    for (std::size_t b = 0; b <= bins; ++b) {
        h.edges.push_back(static_cast<double>(b) / static_cast<double>(bins));
    }
    for (double s : sims) {
        const double clamped = std::clamp(s, 0.0, 1.0);
        auto b = static_cast<std::size_t>(clamped * static_cast<double>(bins));
        h.counts[std::min(b, bins - 1)]++;
    }
    return h;
}

}  // namespace adlink
