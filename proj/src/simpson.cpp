#include "geobias/simpson.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "geobias/numeric.hpp"

namespace geobias::simpson {

RegressionFit fit_ols(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw ParameterError("fit_ols: xs and ys must have equal length");
    const std::size_t n = xs.size();
    if (n < 3) throw SampleSizeError("fit_ols requires n >= 3, got " + std::to_string(n));

    const double mx = num::mean(xs);
    const double my = num::mean(ys);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) throw DegenerateDataError("fit_ols: predictor has zero variance");

    RegressionFit fit;
    fit.n = static_cast<int>(n);
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    double sse = syy - fit.slope * sxy;
    if (sse < 0.0) sse = 0.0;  // rounding on near-perfect fits
    const double df = static_cast<double>(n - 2);
    const double sigma2 = sse / df;
    fit.slope_se = std::sqrt(sigma2 / sxx);
    if (fit.slope_se > 0.0) {
        fit.t_stat = fit.slope / fit.slope_se;
        fit.p_value = num::student_t_two_sided_p(fit.t_stat, df);
    } else {
        // Perfect fit: infinite t unless the slope is itself zero.
        fit.t_stat = fit.slope == 0.0 ? 0.0 : std::copysign(
            std::numeric_limits<double>::infinity(), fit.slope);
        fit.p_value = fit.slope == 0.0 ? 1.0 : 0.0;
    }
    fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 0.0;
    fit.r2 = std::clamp(fit.r2, 0.0, 1.0);
    return fit;
}

namespace {

std::string attr_group_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::map<std::string, RegressionFit> fit_grouped(const PointDataset& d, const std::string& xvar,
                                                 const std::string& yvar,
                                                 const GroupKey& group_key) {
    const auto& xs = d.attr(xvar);
    const auto& ys = d.attr(yvar);

    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> buckets;
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::string label;
        if (group_key.kind == GroupKey::Kind::label) {
            label = d.group(i);
        } else {
            label = attr_group_label(d.attr(group_key.attr)[i]);
        }
        auto& [bx, by] = buckets[label];
        bx.push_back(xs[i]);
        by.push_back(ys[i]);
    }
    if (buckets.empty()) throw EmptyInputError("fit_grouped: no records");

    std::map<std::string, RegressionFit> fits;
    for (const auto& [label, cols] : buckets) {
        if (cols.first.size() < 3)
            throw SampleSizeError("group '" + label + "' has " +
                                  std::to_string(cols.first.size()) + " records, needs >= 3");
        fits[label] = fit_ols(cols.first, cols.second);
    }
    return fits;
}

const char* to_string(SimpsonKind kind) {
    switch (kind) {
        case SimpsonKind::none: return "none";
        case SimpsonKind::sign_reversal: return "sign_reversal";
        case SimpsonKind::significance_loss: return "significance_loss";
        case SimpsonKind::mixed_groups: return "mixed_groups";
    }
    return "none";
}

SimpsonFinding detect_simpson(const RegressionFit& pooled,
                              const std::map<std::string, RegressionFit>& per_group,
                              double alpha) {
    if (per_group.empty()) throw EmptyInputError("detect_simpson: per_group is empty");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must be in (0, 1)");

    SimpsonFinding finding;
    finding.pooled = pooled;
    finding.per_group = per_group;
    finding.alpha = alpha;

    bool any_pos = false, any_neg = false;
    for (const auto& [label, fit] : per_group) {
        if (!fit.significant(alpha)) {
            finding.non_significant_groups.push_back(label);
            continue;
        }
        (fit.slope > 0.0 ? any_pos : any_neg) = true;
    }

    if (any_pos && any_neg) {
        finding.kind = SimpsonKind::mixed_groups;
        return finding;
    }
    if (!finding.non_significant_groups.empty() || (!any_pos && !any_neg)) {
        finding.kind = SimpsonKind::none;
        return finding;
    }

    const double group_sign = any_pos ? 1.0 : -1.0;
    if (pooled.significant(alpha) && pooled.slope * group_sign < 0.0) {
        finding.kind = SimpsonKind::sign_reversal;
    } else if (!pooled.significant(alpha)) {
        finding.kind = SimpsonKind::significance_loss;
    } else {
        finding.kind = SimpsonKind::none;
    }
    return finding;
}

namespace {

const std::vector<double>* axis_column(const PointDataset& d, const std::string& name) {
    if (d.has_attr(name)) return &d.attr(name);
    if (name == "x") return &d.xs();
    if (name == "y") return &d.ys();
    throw SchemaError("unknown axis '" + name + "'");
}

std::vector<double> normalize_axis(const std::vector<double>& v, AxisNormalization norm) {
    std::vector<double> out(v.size());
    if (norm == AxisNormalization::minmax) {
        const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
        const double span = *hi_it - *lo_it;
        for (std::size_t i = 0; i < v.size(); ++i)
            out[i] = span > 0.0 ? (v[i] - *lo_it) / span : 0.5;
    } else {
        const double m = num::mean(v);
        const double sd = num::sample_sd(v);
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = sd > 0.0 ? (v[i] - m) / sd : 0.0;
    }
    return out;
}

}  // namespace

ParallelCoordsTable parallel_coords_table(const PointDataset& d,
                                          const std::vector<std::string>& axes,
                                          AxisNormalization normalization) {
    if (d.empty()) throw EmptyInputError("parallel_coords_table: dataset is empty");
    if (axes.size() < 2) throw ParameterError("parallel_coords_table requires >= 2 axes");

    ParallelCoordsTable table;
    table.axes = axes;
    std::vector<std::vector<double>> cols;
    cols.reserve(axes.size());
    for (const auto& name : axes) cols.push_back(normalize_axis(*axis_column(d, name), normalization));

    table.rows.resize(d.size(), std::vector<double>(axes.size()));
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t a = 0; a < axes.size(); ++a) table.rows[i][a] = cols[a][i];
    if (d.has_groups()) table.groups = d.groups();
    return table;
}

}  // namespace geobias::simpson
