#include "adlink/clusterfeat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "adlink/error.hpp"
#include "adlink/random.hpp"
#include "adlink/text.hpp"

namespace adlink {

std::array<double, kClusterFeatureCount> ClusterFeatures::values() const {
    return {n_ads,      posting_months, posting_weeks, mn_months,    mn_weeks,
            std_months, std_weeks,      min_chars,     max_img_freq, std_img_freq,
            names_norm, unique_imgs_norm, states_norm, edge_density};
}

const std::vector<std::string>& cluster_feature_names() {
    static const std::vector<std::string> names = {
        "n_ads",      "posting_months", "posting_weeks", "mn_months",    "mn_weeks",
        "std_months", "std_weeks",      "min_chars",     "max_img_freq", "std_img_freq",
        "names_norm", "unique_imgs_norm", "states_norm", "edge_density"};
    return names;
}

std::map<std::string, std::size_t> image_frequencies(std::span<const Ad> corpus) {
    std::map<std::string, std::size_t> df;
    for (const auto& ad : corpus) {
        for (const auto& h : ad.image_hashes) ++df[h];
    }
    return df;
}

namespace {

template <class Counts>
std::pair<double, double> mean_and_std(const Counts& counts) {
    if (counts.empty()) return {0.0, 0.0};
    double sum = 0;
    for (const auto& [_, c] : counts) sum += static_cast<double>(c);
    const double mean = sum / static_cast<double>(counts.size());
    double var = 0;
    for (const auto& [_, c] : counts) {
        const double d = static_cast<double>(c) - mean;
        var += d * d;
    }
    return {mean, std::sqrt(var / static_cast<double>(counts.size()))};
}

}  // namespace

ClusterFeatures featurize_component(std::span<const std::size_t> members, std::span<const Ad> corpus,
                                    std::span<const FieldSet> fieldsets,
                                    const std::map<std::string, std::size_t>& image_df,
                                    std::size_t n_edges) {
    if (members.empty()) throw UsageError("cannot featurize an empty component");
    std::map<int, std::size_t> months, weeks;
    std::set<std::string> names, images, states;
    std::size_t min_chars = std::numeric_limits<std::size_t>::max();
    for (auto m : members) {
        const Ad& ad = corpus[m];
        ++months[timefmt::month_key(ad.posted_at)];
        ++weeks[timefmt::iso_week_key(ad.posted_at)];
        names.insert(fieldsets[m].names.begin(), fieldsets[m].names.end());
        images.insert(ad.image_hashes.begin(), ad.image_hashes.end());
        if (!ad.state.empty()) states.insert(ad.state);
        min_chars = std::min(min_chars, text::codepoint_count(ad.text));
    }
    const auto n = static_cast<double>(members.size());

    ClusterFeatures f;
    f.n_ads = n;
    f.posting_months = static_cast<double>(months.size());
    f.posting_weeks = static_cast<double>(weeks.size());
    std::tie(f.mn_months, f.std_months) = mean_and_std(months);
    std::tie(f.mn_weeks, f.std_weeks) = mean_and_std(weeks);
    f.min_chars = static_cast<double>(min_chars);

    std::map<std::string, std::size_t> freqs;
    for (const auto& h : images) {
        const auto it = image_df.find(h);
        freqs[h] = it == image_df.end() ? 0 : it->second;
    }
    for (const auto& [_, c] : freqs) f.max_img_freq = std::max(f.max_img_freq, static_cast<double>(c));
    f.std_img_freq = mean_and_std(freqs).second;

    f.names_norm = static_cast<double>(names.size()) / n;
    f.unique_imgs_norm = static_cast<double>(images.size()) / n;
    f.states_norm = static_cast<double>(states.size()) / n;
    const double possible = n * (n - 1) / 2;
    f.edge_density = possible > 0 ? std::min(1.0, static_cast<double>(n_edges) / possible) : 0.0;
    return f;
}

std::vector<Component> filter_components(std::span<const Component> components, std::size_t min_size) {
    std::vector<Component> out;
    for (const auto& c : components) {
        if (c.members.size() > min_size) out.push_back(c);
    }
    return out;
}

ClusterClassifierResult train_cluster_classifier(const Dataset& data, const ClusterClassifierParams& params) {
    data.validate();
    const std::size_t n = data.size();
    std::vector<std::size_t> pos, neg;
    for (std::size_t r = 0; r < n; ++r) (data.labels[r] ? pos : neg).push_back(r);
    if (params.n_folds < 2) throw UsageError("cluster classifier needs at least two folds");
    if (params.n_folds > pos.size() || params.n_folds > neg.size()) {
        throw DataError("cluster classifier: " + std::to_string(params.n_folds) +
                        " folds need at least that many clusters of each class (have " +
                        std::to_string(pos.size()) + " positive, " + std::to_string(neg.size()) +
                        " negative)");
    }

    ClusterClassifierResult out;
    out.fold_of.assign(n, 0);
    Rng rng(derive_seed(params.seed, 0));
    shuffle(rng, pos);
    shuffle(rng, neg);
    for (std::size_t k = 0; k < pos.size(); ++k) out.fold_of[pos[k]] = k % params.n_folds;
    for (std::size_t k = 0; k < neg.size(); ++k) out.fold_of[neg[k]] = k % params.n_folds;

    out.oof_scores.assign(n, 0.0);
    for (std::size_t fold = 0; fold < params.n_folds; ++fold) {
        std::vector<std::size_t> train, test;
        for (std::size_t r = 0; r < n; ++r) (out.fold_of[r] == fold ? test : train).push_back(r);
        ForestParams fp = params.forest;
        fp.seed = derive_seed(params.seed, 1 + fold);
        const MatchModel m = train_forest(data.subset(train), fp);
        for (auto r : test) out.oof_scores[r] = m.predict_proba(data.features.row(r));
    }
    out.roc = roc(out.oof_scores, data.labels);

    ForestParams full = params.forest;
    full.seed = derive_seed(params.seed, 1 + params.n_folds);
    out.model = train_forest(data, full);

    std::vector<double> grid(101), mean_tpr(101, 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) grid[g] = static_cast<double>(g) / 100.0;
    std::vector<double> scores(n);
    for (std::size_t b = 0; b < params.n_random_baselines; ++b) {
        Rng brng(derive_seed(params.seed, 1000 + b));
        for (auto& s : scores) s = uniform_real(brng);
        const RocCurve c = roc(scores, data.labels);
        out.baseline_aucs.push_back(c.auc);
        for (std::size_t g = 0; g < grid.size(); ++g) mean_tpr[g] += tpr_at_fpr(c, grid[g]);
    }
    if (!out.baseline_aucs.empty()) {
        const auto nb = static_cast<double>(out.baseline_aucs.size());
        for (double a : out.baseline_aucs) out.baseline_mean_auc += a / nb;
        double auc = 0;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            mean_tpr[g] /= nb;
            out.baseline_curve.points.push_back({grid[g], mean_tpr[g], 0.0});
            if (g > 0) auc += (grid[g] - grid[g - 1]) * (mean_tpr[g] + mean_tpr[g - 1]) / 2;
        }
        out.baseline_curve.auc = auc;
    }
    return out;
}

}  // namespace adlink
