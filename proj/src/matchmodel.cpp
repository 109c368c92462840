#include "adlink/matchmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "adlink/error.hpp"
#include "adlink/parallel.hpp"
#include "adlink/random.hpp"

namespace adlink {

std::string_view to_string(ModelKind k) { return k == ModelKind::forest ? "forest" : "logistic"; }

ModelKind model_kind_from_string(std::string_view s) {
    if (s == "forest") return ModelKind::forest;
    if (s == "logistic") return ModelKind::logistic;
    throw UsageError("unknown model kind '" + std::string(s) + "'");
}

void Dataset::validate() const {
    if (features.rows() != labels.size()) throw DataError("dataset: feature rows != label count");
    if (!feature_names.empty() && features.rows() > 0 && features.cols() != feature_names.size()) {
        throw DataError("dataset: column count does not match feature names");
    }
    for (double v : features.data()) {
        if (!std::isfinite(v)) throw DataError("dataset: non-finite feature value");
    }
    std::size_t pos = 0;
    for (int l : labels) {
        if (l != 0 && l != 1) throw DataError("dataset: labels must be 0 or 1");
        pos += l;
    }
    if (pos == 0 || pos == labels.size()) throw DataError("dataset: both classes must be present");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.feature_names = feature_names;
    out.schema_version = schema_version;
    for (auto r : rows) {
        out.features.append_row(features.row(r));
        out.labels.push_back(labels[r]);
        if (!ids.empty()) out.ids.push_back(ids[r]);
    }
    return out;
}

double DecisionTree::predict(std::span<const double> x) const {
    std::size_t k = 0;
    while (nodes[k].feature >= 0) {
        const auto& n = nodes[k];
        k = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                            : n.right);
    }
    return nodes[k].value;
}

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double MatchModel::predict_proba(std::span<const double> x) const {
    if (x.size() != feature_names.size()) {
        throw DataError("feature vector has " + std::to_string(x.size()) + " values, model expects " +
                        std::to_string(feature_names.size()));
    }
    if (kind == ModelKind::logistic) {
        double z = bias;
        for (std::size_t k = 0; k < x.size(); ++k) z += weights[k] * (x[k] - means[k]) / scales[k];
        return sigmoid(z);
    }
    double sum = 0;
    for (const auto& t : trees) sum += t.predict(x);
    return sum / static_cast<double>(trees.size());
}

std::vector<double> MatchModel::predict(const Matrix& rows) const {
    std::vector<double> out(rows.rows());
    for (std::size_t r = 0; r < rows.rows(); ++r) out[r] = predict_proba(rows.row(r));
    return out;
}

void MatchModel::check_schema(const std::vector<std::string>& names, int version) const {
    if (version != schema_version || names != feature_names) {
        throw DataError("feature schema mismatch: model has version " + std::to_string(schema_version) +
                        " with " + std::to_string(feature_names.size()) + " features, data has version " +
                        std::to_string(version) + " with " + std::to_string(names.size()));
    }
}

MatchModel zero_logistic(std::vector<std::string> feature_names, int schema_version) {
    MatchModel m;
    m.kind = ModelKind::logistic;
    m.schema_version = schema_version;
    m.means.assign(feature_names.size(), 0.0);
    m.scales.assign(feature_names.size(), 1.0);
    m.weights.assign(feature_names.size(), 0.0);
    m.feature_names = std::move(feature_names);
    return m;
}

LossAndGradient logistic_loss_gradient(const Matrix& x, std::span<const int> labels,
                                       std::span<const double> w, double b, double l2) {
    LossAndGradient out;
    out.grad_w.assign(w.size(), 0.0);
    const auto n = static_cast<double>(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto row = x.row(r);
        double z = b;
        for (std::size_t k = 0; k < w.size(); ++k) z += w[k] * row[k];
        const int y = labels[r];
        out.loss += y ? softplus(-z) : softplus(z);
        const double err = sigmoid(z) - y;
        for (std::size_t k = 0; k < w.size(); ++k) out.grad_w[k] += err * row[k];
        out.grad_b += err;
    }
    out.loss /= n;
    out.grad_b /= n;
    double sq = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        out.grad_w[k] = out.grad_w[k] / n + l2 * w[k];
        sq += w[k] * w[k];
    }
    out.loss += 0.5 * l2 * sq;
    return out;
}

MatchModel train_logistic(const Dataset& data, const LogisticParams& params,
                          std::vector<double>* loss_history) {
    data.validate();
    if (params.epochs < 0 || !(params.lr > 0) || params.l2 < 0) {
        throw UsageError("logistic: epochs >= 0, lr > 0 and l2 >= 0 required");
    }
    const std::size_t d = data.features.cols();
    const std::size_t n = data.size();
    MatchModel m = zero_logistic(data.feature_names, data.schema_version);
    if (m.feature_names.empty()) m = zero_logistic(std::vector<std::string>(d), data.schema_version);

    for (std::size_t k = 0; k < d; ++k) {
        double mean = 0;
        for (std::size_t r = 0; r < n; ++r) mean += data.features(r, k);
        mean /= static_cast<double>(n);
        double var = 0;
        for (std::size_t r = 0; r < n; ++r) {
            const double dv = data.features(r, k) - mean;
            var += dv * dv;
        }
        const double sd = std::sqrt(var / static_cast<double>(n));
        m.means[k] = mean;
        m.scales[k] = sd > 1e-12 ? sd : 1.0;
    }
    Matrix z(n, d);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < d; ++k) z(r, k) = (data.features(r, k) - m.means[k]) / m.scales[k];
    }

    double lr = params.lr;
    auto state = logistic_loss_gradient(z, data.labels, m.weights, m.bias, params.l2);
    if (loss_history) loss_history->assign(1, state.loss);
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        bool accepted = false;
        for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
            std::vector<double> w = m.weights;
            for (std::size_t k = 0; k < d; ++k) w[k] -= lr * state.grad_w[k];
            const double b = m.bias - lr * state.grad_b;
            auto next = logistic_loss_gradient(z, data.labels, w, b, params.l2);
            if (next.loss <= state.loss) {
                m.weights = std::move(w);
                m.bias = b;
                state = std::move(next);
                accepted = true;
            } else {
                lr *= 0.5;
            }
        }
        if (loss_history) loss_history->push_back(state.loss);
        if (!accepted) break;  // step size underflowed; at a minimum
    }
    return m;
}

// ---------------------------------------------------------------------------
// Forest

namespace {

double gini(double pos, double total) {
    if (total <= 0) return 0;
    const double p = pos / total;
    return 2.0 * p * (1.0 - p);
}

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, std::span<const int> y, const ForestParams& params, std::size_t fps,
                std::uint64_t seed)
        : x_(x), y_(y), params_(params), fps_(fps), rng_(seed) {
        tree_.seed = seed;
        tree_.importance.assign(x.cols(), 0.0);
    }

    DecisionTree build() {
        std::vector<std::size_t> sample;
        sample.reserve(x_.rows());
        if (params_.bootstrap) {
            for (std::size_t i = 0; i < x_.rows(); ++i) sample.push_back(uniform_index(rng_, x_.rows()));
            std::sort(sample.begin(), sample.end());
        } else {
            for (std::size_t i = 0; i < x_.rows(); ++i) sample.push_back(i);
        }
        grow(std::move(sample), 0);
        return std::move(tree_);
    }

private:
    struct Split {
        int feature = -1;
        double threshold = 0;
        double impurity = 0;  // weighted child impurity
    };

    int grow(std::vector<std::size_t> idx, int depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        double pos = 0;
        for (auto i : idx) pos += y_[i];
        const auto total = static_cast<double>(idx.size());
        tree_.nodes[id].value = total > 0 ? pos / total : 0.0;

        const double parent = total * gini(pos, total);
        if (depth >= params_.max_depth || pos == 0 || pos == total || idx.size() < 2 * params_.min_leaf) {
            return id;
        }
        const Split best = find_split(idx, pos);
        if (best.feature < 0 || parent - best.impurity <= 1e-12) return id;

        tree_.importance[static_cast<std::size_t>(best.feature)] += parent - best.impurity;
        std::vector<std::size_t> left, right;
        for (auto i : idx) {
            (x_(i, static_cast<std::size_t>(best.feature)) <= best.threshold ? left : right).push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();
        tree_.nodes[id].feature = best.feature;
        tree_.nodes[id].threshold = best.threshold;
        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        tree_.nodes[id].left = l;
        tree_.nodes[id].right = r;
        return id;
    }

    Split find_split(const std::vector<std::size_t>& idx, double pos_total) {
        std::vector<std::size_t> features(x_.cols());
        std::iota(features.begin(), features.end(), 0);
        for (std::size_t k = 0; k < fps_; ++k) {
            std::swap(features[k], features[k + uniform_index(rng_, features.size() - k)]);
        }
        features.resize(fps_);

        Split best;
        best.impurity = std::numeric_limits<double>::infinity();
        const std::size_t n = idx.size();
        std::vector<std::pair<double, int>> col(n);
        for (auto f : features) {
            for (std::size_t k = 0; k < n; ++k) col[k] = {x_(idx[k], f), y_[idx[k]]};
            std::sort(col.begin(), col.end());
            double left_pos = 0;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                left_pos += col[k].second;
                if (col[k].first == col[k + 1].first) continue;
                const std::size_t nl = k + 1, nr = n - nl;
                if (nl < params_.min_leaf || nr < params_.min_leaf) continue;
                const auto dl = static_cast<double>(nl), dr = static_cast<double>(nr);
                const double imp = dl * gini(left_pos, dl) + dr * gini(pos_total - left_pos, dr);
                if (imp < best.impurity - 1e-12) {
                    double thr = 0.5 * (col[k].first + col[k + 1].first);
                    if (!(thr < col[k + 1].first)) thr = col[k].first;
                    best = {static_cast<int>(f), thr, imp};
                }
            }
        }
        return best;
    }

    const Matrix& x_;
    std::span<const int> y_;
    const ForestParams& params_;
    std::size_t fps_;
    Rng rng_;
    DecisionTree tree_;
};

}  // namespace

MatchModel train_forest(const Dataset& data, const ForestParams& params) {
    data.validate();
    if (params.n_trees < 1) throw UsageError("forest: n_trees must be >= 1");
    if (params.max_depth < 0 || params.min_leaf < 1) throw UsageError("forest: bad depth or min_leaf");
    const std::size_t d = data.features.cols();
    std::size_t fps = params.features_per_split;
    if (fps == 0) fps = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(d))));
    fps = std::min(fps, d);

    MatchModel m;
    m.kind = ModelKind::forest;
    m.schema_version = data.schema_version;
    m.feature_names = data.feature_names.empty() ? std::vector<std::string>(d) : data.feature_names;

    std::vector<std::uint64_t> seeds(params.n_trees);
    for (std::size_t t = 0; t < params.n_trees; ++t) seeds[t] = derive_seed(params.seed, t);
    m.trees.resize(params.n_trees);
    parallel_for(params.n_trees, params.threads, [&](std::size_t t) {
        m.trees[t] = TreeBuilder(data.features, data.labels, params, fps, seeds[t]).build();
    });
    return m;
}

namespace {

RankedFeatures rank(const std::vector<std::string>& names, std::vector<double> values) {
    const double sum = std::accumulate(values.begin(), values.end(), 0.0);
    if (sum > 0) {
        for (auto& v : values) v /= sum;
    } else {
        for (auto& v : values) v = 1.0 / static_cast<double>(values.size());
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    RankedFeatures out;
    for (auto k : order) out.emplace_back(names[k], values[k]);
    return out;
}

}  // namespace

RankedFeatures feature_importance(const MatchModel& model) {
    if (model.kind != ModelKind::forest) {
        throw UsageError("impurity importance needs a forest model; use weight_importance for logistic");
    }
    std::vector<double> total(model.feature_names.size(), 0.0);
    for (const auto& t : model.trees) {
        const double s = std::accumulate(t.importance.begin(), t.importance.end(), 0.0);
        if (s <= 0) continue;
        for (std::size_t k = 0; k < total.size(); ++k) total[k] += t.importance[k] / s;
    }
    return rank(model.feature_names, std::move(total));
}

RankedFeatures weight_importance(const MatchModel& model) {
    if (model.kind != ModelKind::logistic) throw UsageError("weight importance needs a logistic model");
    std::vector<double> mag;
    for (double w : model.weights) mag.push_back(std::abs(w));
    return rank(model.feature_names, std::move(mag));
}

nlohmann::json model_to_json(const MatchModel& m) {
    nlohmann::json j;
    j["kind"] = std::string(to_string(m.kind));
    j["schema_version"] = m.schema_version;
    j["feature_names"] = m.feature_names;
    if (m.kind == ModelKind::logistic) {
        j["means"] = m.means;
        j["scales"] = m.scales;
        j["weights"] = m.weights;
        j["bias"] = m.bias;
    } else {
        auto trees = nlohmann::json::array();
        for (const auto& t : m.trees) {
            auto nodes = nlohmann::json::array();
            for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
            trees.push_back({{"seed", t.seed}, {"importance", t.importance}, {"nodes", nodes}});
        }
        j["trees"] = trees;
    }
    return j;
}

MatchModel model_from_json(const nlohmann::json& j) {
    try {
        MatchModel m;
        m.kind = model_kind_from_string(j.at("kind").get<std::string>());
        m.schema_version = j.at("schema_version").get<int>();
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        const std::size_t d = m.feature_names.size();
        if (m.kind == ModelKind::logistic) {
            m.means = j.at("means").get<std::vector<double>>();
            m.scales = j.at("scales").get<std::vector<double>>();
            m.weights = j.at("weights").get<std::vector<double>>();
            m.bias = j.at("bias").get<double>();
            if (m.means.size() != d || m.scales.size() != d || m.weights.size() != d) {
                throw DataError("model.json: logistic parameter length mismatch");
            }
        } else {
            for (const auto& jt : j.at("trees")) {
                DecisionTree t;
                t.seed = jt.at("seed").get<std::uint64_t>();
                t.importance = jt.at("importance").get<std::vector<double>>();
                for (const auto& jn : jt.at("nodes")) {
                    t.nodes.push_back({jn.at(0).get<int>(), jn.at(1).get<double>(), jn.at(2).get<int>(),
                                       jn.at(3).get<int>(), jn.at(4).get<double>()});
                }
                const auto count = static_cast<int>(t.nodes.size());
                if (count == 0) throw DataError("model.json: empty tree");
                for (const auto& n : t.nodes) {
                    if (n.feature >= static_cast<int>(d) ||
                        (n.feature >= 0 && (n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count))) {
                        throw DataError("model.json: malformed tree node");
                    }
                }
                m.trees.push_back(std::move(t));
            }
            if (m.trees.empty()) throw DataError("model.json: forest has no trees");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model.json: ") + e.what());
    }
}

}  // namespace adlink
