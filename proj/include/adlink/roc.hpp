#pragma once

#include <span>
#include <string>
#include <vector>

namespace adlink {

struct RocPoint {
    double fpr = 0;
    double tpr = 0;
    double threshold = 0;  // scores >= threshold are called positive
};

/// Points run from (0,0) to (1,1) with non-decreasing fpr and tpr.
struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0;
};

/// Sweeps the threshold over distinct scores. Tied scores move as one step,
/// so the trapezoid AUC counts ties as half-concordant. Labels are 0/1.
/// Throws DataError if either class is missing.
RocCurve roc(std::span<const double> scores, std::span<const int> labels);

/// Linear interpolation along the curve. Targets outside [0,1] throw UsageError.
double tpr_at_fpr(const RocCurve& curve, double fpr_target);
double fpr_at_tpr(const RocCurve& curve, double tpr_target);

/// fpr,tpr,threshold rows with a header.
std::string roc_to_csv(const RocCurve& curve);

}  // namespace adlink
