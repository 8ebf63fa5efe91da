#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geobias/core.hpp"

namespace geobias::simpson {

struct RegressionFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double t_stat = 0.0;   // slope / slope_se; +-inf on a perfect fit
    double p_value = 1.0;  // two-sided, t distribution with n - 2 df
    double r2 = 0.0;
    int n = 0;

    bool significant(double alpha) const { return p_value < alpha; }
};

// Ordinary least squares of ys on xs. Throws SampleSizeError for n < 3 and
// DegenerateDataError when xs has zero variance.
RegressionFit fit_ols(std::span<const double> xs, std::span<const double> ys);

// How records are grouped for the per-group fits: by the dataset's group
// labels, or by distinct values of a named attribute.
struct GroupKey {
    enum class Kind { label, attribute };
    Kind kind = Kind::label;
    std::string attr;

    static GroupKey by_label() { return {}; }
    static GroupKey by_attribute(std::string name) {
        return {Kind::attribute, std::move(name)};
    }
};

// Independent fit_ols per group; keys sorted. A group with fewer than 3
// records raises SampleSizeError naming the group.
std::map<std::string, RegressionFit> fit_grouped(const PointDataset& d, const std::string& xvar,
                                                 const std::string& yvar,
                                                 const GroupKey& group_key = GroupKey::by_label());

enum class SimpsonKind { none, sign_reversal, significance_loss, mixed_groups };

const char* to_string(SimpsonKind kind);

struct SimpsonFinding {
    SimpsonKind kind = SimpsonKind::none;
    RegressionFit pooled;
    std::map<std::string, RegressionFit> per_group;
    double alpha = 0.05;
    // Groups not significant at alpha; when non-empty (and signs do not
    // disagree) the verdict is `none` for lack of evidence.
    std::vector<std::string> non_significant_groups;
};

// Decision rules, in order:
//   mixed_groups      - significant group slopes disagree in sign
//   none              - some group not significant (insufficient evidence)
//   sign_reversal     - pooled significant with sign opposite the groups
//   significance_loss - pooled not significant at alpha
//   none              - otherwise
SimpsonFinding detect_simpson(const RegressionFit& pooled,
                              const std::map<std::string, RegressionFit>& per_group,
                              double alpha = 0.05);

enum class AxisNormalization { minmax, zscore };

// Per-record normalized axis values plus the group label. Axis names match
// attributes first, then the coordinate axes "x" / "y".
struct ParallelCoordsTable {
    std::vector<std::string> axes;
    std::vector<std::vector<double>> rows;  // size() == record count
    std::vector<std::string> groups;        // empty when the dataset has none
};

ParallelCoordsTable parallel_coords_table(const PointDataset& d,
                                          const std::vector<std::string>& axes,
                                          AxisNormalization normalization);

}  // namespace geobias::simpson
