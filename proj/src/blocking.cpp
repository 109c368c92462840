#include "adlink/blocking.hpp"

#include <algorithm>
#include <cmath>

#include "adlink/error.hpp"
#include "adlink/extract.hpp"
#include "adlink/log.hpp"

namespace adlink {

std::string_view to_string(KeyKind k) {
    switch (k) {
        case KeyKind::unigram: return "unigram";
        case KeyKind::bigram: return "bigram";
        case KeyKind::image: return "image";
    }
    return "?";
}

std::size_t BlockingParams::effective_threshold(std::size_t n_ads) const {
    if (rarity_fraction > 0) {
        return std::max<std::size_t>(
            2, static_cast<std::size_t>(std::floor(rarity_fraction * static_cast<double>(n_ads))));
    }
    return rarity_threshold;
}

BlockIndex build_blocks(std::span<const Ad> corpus, const BlockingParams& params) {
    if (params.max_block_size < 2) throw UsageError("max_block_size must be >= 2");
    BlockIndex index;
    index.n_ads = corpus.size();
    index.rarity_threshold = params.effective_threshold(corpus.size());

    std::map<BlockKey, std::vector<std::size_t>> postings;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const Tokens t = tokenize(corpus[i].text);
        for (const auto& [u, _] : t.unigrams) postings[{KeyKind::unigram, u}].push_back(i);
        for (const auto& [b, _] : t.bigrams) postings[{KeyKind::bigram, b.first + " " + b.second}].push_back(i);
        for (const auto& h : corpus[i].image_hashes) postings[{KeyKind::image, h}].push_back(i);
    }
    for (auto& [key, ads] : postings) {
        // postings are appended in index order and each key once per ad
        const std::size_t df = ads.size();
        index.df[key.kind][key.value] = df;
        if (df < 2 || df > index.rarity_threshold) continue;
        if (df > params.max_block_size) {
            ++index.dropped_blocks;
            continue;
        }
        index.blocks.emplace(key, std::move(ads));
    }
    if (index.dropped_blocks > 0) {
        log::info("blocking: dropped " + std::to_string(index.dropped_blocks) + " oversized blocks");
    }
    return index;
}

CandidateSet candidate_pairs(const BlockIndex& index) {
    CandidateSet out;
    std::vector<AdPair> all;
    for (const auto& [key, ads] : index.blocks) {
        for (std::size_t a = 0; a < ads.size(); ++a) {
            for (std::size_t b = a + 1; b < ads.size(); ++b) all.emplace_back(ads[a], ads[b]);
        }
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    out.pairs = std::move(all);
    out.total_pairs = index.n_ads * (index.n_ads > 0 ? index.n_ads - 1 : 0) / 2;
    out.reduction_ratio = out.total_pairs ? 1.0 - out.fraction_of_total() : 0.0;
    return out;
}

double blocking_recall(std::span<const AdPair> candidates, std::span<const AdPair> truth) {
    if (truth.empty()) throw UsageError("blocking recall needs at least one true pair");
    std::size_t hit = 0;
    auto c = candidates.begin();
    for (const auto& t : truth) {
        c = std::lower_bound(c, candidates.end(), t);
        if (c != candidates.end() && *c == t) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(truth.size());
}

std::vector<AdPair> truth_pairs(std::span<const Ad> corpus) {
    std::map<std::string, std::vector<std::size_t>> by_source;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (corpus[i].source_id) by_source[*corpus[i].source_id].push_back(i);
    }
    std::vector<AdPair> out;
    for (const auto& [_, ads] : by_source) {
        for (std::size_t a = 0; a < ads.size(); ++a) {
            for (std::size_t b = a + 1; b < ads.size(); ++b) out.emplace_back(ads[a], ads[b]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace adlink
