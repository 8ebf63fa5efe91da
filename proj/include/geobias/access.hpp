#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geobias/core.hpp"

namespace geobias::access {

struct DemandSite {
    double x = 0.0;
    double y = 0.0;
    double pop_total = 0.0;
    std::map<std::string, double> pop_by_group;
};

struct Facility {
    double x = 0.0;
    double y = 0.0;
    double supply = 0.0;
};

// Gaussian distance decay truncated at the catchment radius d0, calibrated
// so W(0) = 1 and W(d0) = w_at_d0 exactly.
struct DecaySpec {
    double d0 = 0.0;
    double w_at_d0 = 0.01;

    void validate() const;
};

double decay_weight(double d, const DecaySpec& spec);

// Which population feeds demand: the total, or a single group's share.
struct PopulationSelector {
    std::optional<std::string> group;  // nullopt = total

    static PopulationSelector total() { return {}; }
    static PopulationSelector for_group(std::string g) { return {std::move(g)}; }
};

struct AccessibilityResult {
    std::vector<double> a;                       // per demand site, >= 0
    std::vector<std::optional<double>> r;        // per facility; no-data when unused
    std::vector<std::size_t> unreachable_sites;  // demand sites with no facility in reach
    std::vector<std::size_t> idle_facilities;    // facilities with zero reachable demand
    double supply_total = 0.0;
    double supply_reachable = 0.0;  // supply of facilities that serve anyone
};

// Three-step floating catchment area accessibility:
//   step 1: selection weight G_ij = W_ij / sum_k W_ik over facilities in reach
//   step 2: facility ratio R_j = S_j / sum_i G_ij * P_i * W_ij
//   step 3: A_i = sum_j G_ij * W_ij * R_j
AccessibilityResult three_sfca(const std::vector<DemandSite>& demand,
                               const std::vector<Facility>& facilities, const DecaySpec& spec,
                               const PopulationSelector& population = {});

struct StratifiedMeans {
    double overall_mean = 0.0;
    std::map<std::string, std::optional<double>> group_means;  // no-data for zero-pop groups
};

// Population-weighted means of the total-run A over the whole population and
// per group (groups reuse the same A surface).
StratifiedMeans stratified_accessibility(const AccessibilityResult& result_total,
                                         const std::vector<DemandSite>& demand);

// Re-runs three_sfca with the group's population as the sole demand.
AccessibilityResult group_specific_access(const std::vector<DemandSite>& demand,
                                          const std::vector<Facility>& facilities,
                                          const DecaySpec& spec, const std::string& group);

struct DifferenceMaps {
    RasterGrid normalized_total;
    RasterGrid normalized_group;
    RasterGrid difference;  // normalized_total - normalized_group, in [-1, 1]
};

// Rasterizes both accessibility surfaces (mean per cell), min-max normalizes
// each to [0, 1] (constant surface -> all 0.5), and differences them.
DifferenceMaps normalized_difference_map(const AccessibilityResult& a_total,
                                         const AccessibilityResult& a_group,
                                         const std::vector<DemandSite>& demand,
                                         const GridSpec& grid);

struct AccessFinding {
    StratifiedMeans means;
    std::vector<std::string> flagged_groups;  // mean_g / overall < threshold_ratio
    double threshold_ratio = 0.0;
    double min_group_ratio = 0.0;
    double max_group_ratio = 0.0;
    Severity severity = Severity::info;
};

// Flags groups whose mean accessibility falls below threshold_ratio times
// the overall mean.
AccessFinding disparity_audit(const StratifiedMeans& means, double threshold_ratio = 0.95);

// CSV loaders. Demand: x, y, pop_total, then any number of pop_<group>
// columns. Facilities: x, y, supply.
std::vector<DemandSite> load_demand_csv(const std::string& path);
std::vector<Facility> load_facilities_csv(const std::string& path);

void write_demand_csv(const std::string& path, const std::vector<DemandSite>& demand);
void write_facilities_csv(const std::string& path, const std::vector<Facility>& facilities);

}  // namespace geobias::access
