#pragma once

// Small seeded end-to-end fixtures: a synthetic corpus with extracted fields,
// profiles, the phone graph, and a pair model trained on surrogate labels.

#include <algorithm>
#include <vector>

#include "adlink/extract.hpp"
#include "adlink/matchmodel.hpp"
#include "adlink/pairfeat.hpp"
#include "adlink/surrogate.hpp"
#include "adlink/synthetic.hpp"

namespace fixture {

struct World {
    adlink::SyntheticCorpus synth;
    std::vector<adlink::FieldSet> fields;
    std::vector<adlink::AdProfile> profiles;
    adlink::StrongGraphResult strong;
    adlink::Dataset pairs;
    adlink::MatchModel model;
};

inline adlink::Dataset pair_dataset(const World& w, const adlink::SampleResult& sample) {
    adlink::Dataset d;
    d.schema_version = adlink::kPairSchemaVersion;
    d.feature_names = adlink::pair_feature_names();
    for (const auto& p : sample.pairs) {
        const auto f = adlink::compute_pair_features(w.profiles[p.ad_i], w.profiles[p.ad_j]);
        d.features.append_row(f);
        d.labels.push_back(static_cast<int>(p.label));
    }
    return d;
}

inline World make_world(std::size_t n_sources, std::uint64_t seed, std::size_t n_pairs = 1500,
                        std::size_t n_trees = 30) {
    World w;
    adlink::SyntheticSpec spec;
    spec.n_sources = n_sources;
    spec.rng_seed = seed;
    w.synth = adlink::generate_synthetic(spec);
    for (const auto& ad : w.synth.ads) {
        w.fields.push_back(adlink::extract_fields(ad.text));
        w.profiles.push_back(adlink::make_profile(ad, w.fields.back()));
    }
    w.strong = adlink::build_strong_graph(w.fields);
    adlink::SampleParams sp;
    sp.n_pos = n_pairs;
    sp.n_neg = n_pairs;
    sp.seed = seed;
    w.pairs = pair_dataset(w, adlink::sample_pairs(w.strong.components, w.strong.graph, sp));
    adlink::ForestParams fp;
    fp.n_trees = n_trees;
    fp.seed = seed;
    w.model = adlink::train_forest(w.pairs, fp);
    return w;
}

}  // namespace fixture
