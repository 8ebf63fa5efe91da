#include "geobias/access.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

#include "geobias/errors.hpp"
#include "geobias/io.hpp"

namespace geobias::access {

void DecaySpec::validate() const {
    if (!(d0 > 0.0) || !std::isfinite(d0))
        throw ParameterError("decay spec: d0 must be positive and finite");
    if (!(w_at_d0 > 0.0) || !(w_at_d0 < 1.0))
        throw ParameterError("decay spec: w_at_d0 must lie in (0, 1)");
}

double decay_weight(double d, const DecaySpec& spec) {
    spec.validate();
    if (!(d >= 0.0) || !std::isfinite(d))
        throw ParameterError("decay_weight: distance must be >= 0 and finite");
    if (d > spec.d0) return 0.0;
    if (d == spec.d0) return spec.w_at_d0;  // calibration identity, exact by definition
    const double beta = spec.d0 * spec.d0 / std::log(1.0 / spec.w_at_d0);
    return std::exp(-d * d / beta);
}

namespace {

double population_of(const DemandSite& site, const PopulationSelector& selector) {
    if (!selector.group) return site.pop_total;
    const auto it = site.pop_by_group.find(*selector.group);
    return it == site.pop_by_group.end() ? 0.0 : it->second;
}

void validate_sites(const std::vector<DemandSite>& demand,
                    const std::vector<Facility>& facilities) {
    if (demand.empty()) throw EmptyInputError("three_sfca: no demand sites");
    if (facilities.empty()) throw EmptyInputError("three_sfca: no facilities");
    for (std::size_t i = 0; i < demand.size(); ++i) {
        const DemandSite& s = demand[i];
        if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.pop_total) ||
            s.pop_total < 0.0)
            throw ParameterError("three_sfca: demand site " + std::to_string(i) +
                                 " has a non-finite coordinate or negative population");
        for (const auto& [g, p] : s.pop_by_group)
            if (!std::isfinite(p) || p < 0.0)
                throw ParameterError("three_sfca: demand site " + std::to_string(i) +
                                     " has a negative population for group " + g);
    }
    for (std::size_t j = 0; j < facilities.size(); ++j) {
        const Facility& f = facilities[j];
        if (!std::isfinite(f.x) || !std::isfinite(f.y) || !(f.supply > 0.0) ||
            !std::isfinite(f.supply))
            throw ParameterError("three_sfca: facility " + std::to_string(j) +
                                 " has a non-finite coordinate or non-positive supply");
    }
}

}  // namespace

AccessibilityResult three_sfca(const std::vector<DemandSite>& demand,
                               const std::vector<Facility>& facilities, const DecaySpec& spec,
                               const PopulationSelector& population) {
    spec.validate();
    validate_sites(demand, facilities);

    const std::size_t nd = demand.size();
    const std::size_t nf = facilities.size();
    const double beta = spec.d0 * spec.d0 / std::log(1.0 / spec.w_at_d0);

    // Dense decay-weight matrix; zero outside the catchment radius.
    std::vector<double> w(nd * nf, 0.0);
    for (std::size_t i = 0; i < nd; ++i)
        for (std::size_t j = 0; j < nf; ++j) {
            const double d =
                std::hypot(demand[i].x - facilities[j].x, demand[i].y - facilities[j].y);
            if (d > spec.d0) continue;
            w[i * nf + j] = d == spec.d0 ? spec.w_at_d0 : std::exp(-d * d / beta);
        }

    AccessibilityResult result;
    result.a.assign(nd, 0.0);
    result.r.assign(nf, std::nullopt);

    // Step 1: catchment-local selection weights.
    std::vector<double> g(nd * nf, 0.0);
    for (std::size_t i = 0; i < nd; ++i) {
        double denom = 0.0;
        for (std::size_t j = 0; j < nf; ++j) denom += w[i * nf + j];
        if (denom <= 0.0) {
            result.unreachable_sites.push_back(i);
            continue;
        }
        for (std::size_t j = 0; j < nf; ++j) g[i * nf + j] = w[i * nf + j] / denom;
    }

    // Step 2: facility supply-to-weighted-demand ratios.
    for (std::size_t j = 0; j < nf; ++j) {
        double weighted_demand = 0.0;
        for (std::size_t i = 0; i < nd; ++i)
            weighted_demand += g[i * nf + j] * population_of(demand[i], population) * w[i * nf + j];
        result.supply_total += facilities[j].supply;
        if (weighted_demand > 0.0) {
            result.r[j] = facilities[j].supply / weighted_demand;
            result.supply_reachable += facilities[j].supply;
        } else {
            result.idle_facilities.push_back(j);
        }
    }

    // Step 3: demand-side accessibility sums.
    for (std::size_t i = 0; i < nd; ++i)
        for (std::size_t j = 0; j < nf; ++j)
            if (w[i * nf + j] > 0.0 && result.r[j])
                result.a[i] += g[i * nf + j] * w[i * nf + j] * *result.r[j];
    return result;
}

StratifiedMeans stratified_accessibility(const AccessibilityResult& result_total,
                                         const std::vector<DemandSite>& demand) {
    if (result_total.a.size() != demand.size())
        throw ParameterError("stratified_accessibility: result and demand sizes differ");
    if (demand.empty()) throw EmptyInputError("stratified_accessibility: no demand sites");

    std::set<std::string> group_names;
    for (const DemandSite& s : demand)
        for (const auto& [g, p] : s.pop_by_group) group_names.insert(g);

    StratifiedMeans means;
    double pop_sum = 0.0, weighted_sum = 0.0;
    for (std::size_t i = 0; i < demand.size(); ++i) {
        pop_sum += demand[i].pop_total;
        weighted_sum += demand[i].pop_total * result_total.a[i];
    }
    if (pop_sum <= 0.0)
        throw DegenerateDataError("stratified_accessibility: total population is zero");
    means.overall_mean = weighted_sum / pop_sum;

    for (const std::string& g : group_names) {
        double gp = 0.0, gw = 0.0;
        for (std::size_t i = 0; i < demand.size(); ++i) {
            const auto it = demand[i].pop_by_group.find(g);
            if (it == demand[i].pop_by_group.end()) continue;
            gp += it->second;
            gw += it->second * result_total.a[i];
        }
        means.group_means[g] = gp > 0.0 ? std::optional<double>(gw / gp) : std::nullopt;
    }
    return means;
}

AccessibilityResult group_specific_access(const std::vector<DemandSite>& demand,
                                          const std::vector<Facility>& facilities,
                                          const DecaySpec& spec, const std::string& group) {
    if (group.empty()) throw ParameterError("group_specific_access: group name is empty");
    return three_sfca(demand, facilities, spec, PopulationSelector::for_group(group));
}

namespace {

// Mean-aggregated raster of per-site values, min-max normalized to [0, 1];
// a constant surface maps to 0.5 everywhere.
RasterGrid normalized_raster(const std::vector<DemandSite>& demand,
                             const std::vector<double>& values, const GridSpec& grid) {
    RasterGrid out(grid);
    std::vector<std::size_t> counts(grid.cell_count(), 0);
    std::vector<double> acc(grid.cell_count(), 0.0);
    for (std::size_t i = 0; i < demand.size(); ++i) {
        int ix, iy;
        if (!grid.locate(demand[i].x, demand[i].y, ix, iy)) continue;
        acc[grid.index(ix, iy)] += values[i];
        ++counts[grid.index(ix, iy)];
    }
    for (int iy = 0; iy < grid.height; ++iy)
        for (int ix = 0; ix < grid.width; ++ix) {
            const std::size_t c = grid.index(ix, iy);
            if (counts[c] > 0) out.set(ix, iy, acc[c] / static_cast<double>(counts[c]));
        }

    const auto range = out.value_range();
    if (!range) throw EmptyInputError("normalized_difference_map: no demand site falls on the grid");
    const auto [lo, hi] = *range;
    RasterGrid norm(grid);
    out.for_each_valid([&](int ix, int iy, double v) {
        norm.set(ix, iy, hi > lo ? (v - lo) / (hi - lo) : 0.5);
    });
    return norm;
}

}  // namespace

DifferenceMaps normalized_difference_map(const AccessibilityResult& a_total,
                                         const AccessibilityResult& a_group,
                                         const std::vector<DemandSite>& demand,
                                         const GridSpec& grid) {
    if (a_total.a.size() != demand.size() || a_group.a.size() != demand.size())
        throw ParameterError("normalized_difference_map: result and demand sizes differ");
    grid.validate();

    DifferenceMaps maps{normalized_raster(demand, a_total.a, grid),
                        normalized_raster(demand, a_group.a, grid), RasterGrid(grid)};
    maps.normalized_total.for_each_valid([&](int ix, int iy, double v) {
        if (maps.normalized_group.has_value(ix, iy))
            maps.difference.set(ix, iy, v - maps.normalized_group.value(ix, iy));
    });
    return maps;
}

AccessFinding disparity_audit(const StratifiedMeans& means, double threshold_ratio) {
    if (!(threshold_ratio > 0.0) || !std::isfinite(threshold_ratio))
        throw ParameterError("disparity_audit: threshold_ratio must be positive and finite");
    if (means.group_means.size() < 2)
        throw ParameterError("disparity_audit: need at least 2 groups");
    if (means.overall_mean <= 0.0)
        throw DegenerateDataError("disparity_audit: overall mean accessibility is zero");

    AccessFinding finding;
    finding.means = means;
    finding.threshold_ratio = threshold_ratio;
    finding.min_group_ratio = std::numeric_limits<double>::infinity();
    finding.max_group_ratio = -std::numeric_limits<double>::infinity();
    bool any_ratio = false;
    for (const auto& [g, m] : means.group_means) {
        if (!m) continue;
        const double ratio = *m / means.overall_mean;
        finding.min_group_ratio = std::min(finding.min_group_ratio, ratio);
        finding.max_group_ratio = std::max(finding.max_group_ratio, ratio);
        any_ratio = true;
        if (ratio < threshold_ratio) finding.flagged_groups.push_back(g);
    }
    if (!any_ratio)
        throw DegenerateDataError("disparity_audit: every group has zero population");

    if (finding.flagged_groups.empty())
        finding.severity = Severity::info;
    else
        finding.severity = finding.min_group_ratio < 0.5 ? Severity::critical : Severity::warning;
    return finding;
}

std::vector<DemandSite> load_demand_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open demand CSV: " + path);

    std::string header;
    if (!std::getline(in, header)) throw EmptyInputError("demand CSV is empty: " + path);
    const std::vector<std::string> cols = csv::split_line(header);
    auto col_index = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(cols.begin(), cols.end(), name);
        if (it == cols.end())
            throw SchemaError("demand CSV is missing required column '" + name + "'");
        return static_cast<std::size_t>(it - cols.begin());
    };
    const std::size_t xi = col_index("x"), yi = col_index("y"), pi = col_index("pop_total");

    std::vector<std::pair<std::size_t, std::string>> group_cols;
    for (std::size_t c = 0; c < cols.size(); ++c)
        if (cols[c].rfind("pop_", 0) == 0 && cols[c] != "pop_total") {
            if (cols[c].size() == 4)
                throw SchemaError("demand CSV has a 'pop_' column with an empty group name");
            group_cols.emplace_back(c, cols[c].substr(4));
        }

    std::vector<DemandSite> demand;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> cells = csv::split_line(line);
        if (cells.size() != cols.size())
            throw ParseError("demand CSV line " + std::to_string(line_no) + ": expected " +
                             std::to_string(cols.size()) + " cells, found " +
                             std::to_string(cells.size()));
        DemandSite site;
        site.x = csv::parse_number(cells[xi], line_no, "x");
        site.y = csv::parse_number(cells[yi], line_no, "y");
        site.pop_total = csv::parse_number(cells[pi], line_no, "pop_total");
        if (site.pop_total < 0.0)
            throw ParseError("demand CSV line " + std::to_string(line_no) +
                             ": pop_total must be >= 0");
        double group_sum = 0.0;
        for (const auto& [c, g] : group_cols) {
            const double p = csv::parse_number(cells[c], line_no, "pop_" + g);
            if (p < 0.0)
                throw ParseError("demand CSV line " + std::to_string(line_no) + ": pop_" + g +
                                 " must be >= 0");
            site.pop_by_group[g] = p;
            group_sum += p;
        }
        if (group_sum > site.pop_total + 1e-9)
            throw ParseError("demand CSV line " + std::to_string(line_no) +
                             ": group populations exceed pop_total");
        demand.push_back(std::move(site));
    }
    if (demand.empty()) throw EmptyInputError("demand CSV has no data rows: " + path);
    return demand;
}

std::vector<Facility> load_facilities_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open facility CSV: " + path);

    std::string header;
    if (!std::getline(in, header)) throw EmptyInputError("facility CSV is empty: " + path);
    const std::vector<std::string> cols = csv::split_line(header);
    auto col_index = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(cols.begin(), cols.end(), name);
        if (it == cols.end())
            throw SchemaError("facility CSV is missing required column '" + name + "'");
        return static_cast<std::size_t>(it - cols.begin());
    };
    const std::size_t xi = col_index("x"), yi = col_index("y"), si = col_index("supply");

    std::vector<Facility> facilities;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> cells = csv::split_line(line);
        if (cells.size() != cols.size())
            throw ParseError("facility CSV line " + std::to_string(line_no) + ": expected " +
                             std::to_string(cols.size()) + " cells, found " +
                             std::to_string(cells.size()));
        Facility f;
        f.x = csv::parse_number(cells[xi], line_no, "x");
        f.y = csv::parse_number(cells[yi], line_no, "y");
        f.supply = csv::parse_number(cells[si], line_no, "supply");
        if (!(f.supply > 0.0))
            throw ParseError("facility CSV line " + std::to_string(line_no) +
                             ": supply must be > 0");
        facilities.push_back(f);
    }
    if (facilities.empty()) throw EmptyInputError("facility CSV has no data rows: " + path);
    return facilities;
}

namespace {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_demand_csv(const std::string& path, const std::vector<DemandSite>& demand) {
    std::set<std::string> group_names;
    for (const DemandSite& s : demand)
        for (const auto& [g, p] : s.pop_by_group) group_names.insert(g);

    std::ofstream out(path);
    if (!out) throw IoError("cannot write demand CSV: " + path);
    out << "x,y,pop_total";
    for (const std::string& g : group_names) out << ",pop_" << g;
    out << "\n";
    for (const DemandSite& s : demand) {
        out << format_full(s.x) << ',' << format_full(s.y) << ',' << format_full(s.pop_total);
        for (const std::string& g : group_names) {
            const auto it = s.pop_by_group.find(g);
            out << ',' << format_full(it == s.pop_by_group.end() ? 0.0 : it->second);
        }
        out << "\n";
    }
    if (!out) throw IoError("failed writing demand CSV: " + path);
}

void write_facilities_csv(const std::string& path, const std::vector<Facility>& facilities) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write facility CSV: " + path);
    out << "x,y,supply\n";
    for (const Facility& f : facilities)
        out << format_full(f.x) << ',' << format_full(f.y) << ',' << format_full(f.supply) << "\n";
    if (!out) throw IoError("failed writing facility CSV: " + path);
}

}  // namespace geobias::access
