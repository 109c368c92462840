#include "adlink/roc.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "adlink/error.hpp"
#include "adlink/io.hpp"

namespace adlink {

RocCurve roc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw DataError("roc: scores and labels differ in length");
    std::size_t pos = 0;
    for (int l : labels) pos += l != 0;
    const std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0) throw DataError("roc: both classes must be present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    std::size_t tp = 0, fp = 0;
    double area2 = 0;  // twice the area, in tp*fp units
    for (std::size_t k = 0; k < order.size();) {
        const double s = scores[order[k]];
        const std::size_t tp0 = tp, fp0 = fp;
        for (; k < order.size() && scores[order[k]] == s; ++k) {
            if (labels[order[k]] != 0) {
                ++tp;
            } else {
                ++fp;
            }
        }
        area2 += static_cast<double>(fp - fp0) * static_cast<double>(tp + tp0);
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                                static_cast<double>(tp) / static_cast<double>(pos), s});
    }
    curve.auc = area2 / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
    return curve;
}

namespace {

void check_rate(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw UsageError("rate target must lie in [0, 1]");
}

}  // namespace

double tpr_at_fpr(const RocCurve& curve, double x) {
    check_rate(x);
    const auto& p = curve.points;
    if (p.empty()) throw DataError("empty ROC curve");
    std::size_t k = 0;
    while (k + 1 < p.size() && p[k + 1].fpr <= x) ++k;
    if (p[k].fpr == x || k + 1 == p.size()) return p[k].tpr;
    const double t = (x - p[k].fpr) / (p[k + 1].fpr - p[k].fpr);
    return p[k].tpr + t * (p[k + 1].tpr - p[k].tpr);
}

double fpr_at_tpr(const RocCurve& curve, double y) {
    check_rate(y);
    const auto& p = curve.points;
    if (p.empty()) throw DataError("empty ROC curve");
    std::size_t k = 0;
    while (k < p.size() && p[k].tpr < y) ++k;
    if (k == p.size()) return p.back().fpr;
    if (k == 0 || p[k].tpr == y) return p[k].fpr;
    const double t = (y - p[k - 1].tpr) / (p[k].tpr - p[k - 1].tpr);
    return p[k - 1].fpr + t * (p[k].fpr - p[k - 1].fpr);
}

std::string roc_to_csv(const RocCurve& curve) {
    std::string out = "fpr,tpr,threshold\n";
    for (const auto& pt : curve.points) {
        out += io::format_double(pt.fpr) + "," + io::format_double(pt.tpr) + "," +
               io::format_double(pt.threshold) + "\n";
    }
    return out;
}

}  // namespace adlink
