#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geobias/core.hpp"

namespace geobias::maup {

// Assignment of every grid cell to exactly one zone, ids dense in
// [0, zone_count).
struct ZonePartition {
    GridSpec grid;
    std::vector<int> zone_of;  // per cell, row-major
    int zone_count = 0;
};

// Groups cells into block_side x block_side blocks anchored at `offset`
// (in cell units); partial blocks at the borders form their own zones.
ZonePartition make_block_partition(const GridSpec& grid, int block_side,
                                   std::pair<int, int> offset = {0, 0});

// Arithmetic mean of valid cells per zone; a zone whose cells are all
// no-data yields nullopt.
std::vector<std::optional<double>> zonal_mean(const RasterGrid& r, const ZonePartition& p);

// Per-cell binary grid: 1 where the cell's zone mean is >= the (1-q)
// linear-interpolation quantile of zone means (ties included), else 0.
// Zones without a mean stay no-data.
RasterGrid top_quantile_binarize(const std::vector<std::optional<double>>& zone_means,
                                 const ZonePartition& p, double q = 0.25);

enum class AgreementClass { unanimous, strong_majority, split };

const char* to_string(AgreementClass c);

struct ConsistencyReport {
    double ref_cell_side = 0.0;
    GridSpec ref_grid;
    std::vector<int> per_ref_cell_agreement;  // max identical labels among the k groupings
    std::map<AgreementClass, double> class_fractions;
    int grouping_count = 0;
};

// Agreement of k >= 2 binary grids on a coarse reference grid. Each grouping
// contributes one label per reference cell (majority of constituent cells,
// tie -> 1); agreement = max count of identical labels. Classes: unanimous
// (k), strong_majority (k-1), split (everything below). For k = 2 an
// agreement of 1 is a literal 1-vs-1 split, so strong_majority is empty.
ConsistencyReport consistency_stats(const std::vector<RasterGrid>& binaries,
                                    double ref_cell_side);

struct PartitionSummary {
    int zone_count = 0;
    double threshold = 0.0;
};

struct MaupFinding {
    ConsistencyReport consistency;
    std::vector<PartitionSummary> partitions;
    std::vector<RasterGrid> binaries;  // one per partition, in input order
    double q = 0.0;
    Severity severity = Severity::info;
};

// Full audit: per-partition zonal means, top-quantile binarization, and
// cross-partition consistency. Severity rises as the unanimous fraction
// falls (1 -> info, >= 0.5 -> warning, below -> critical).
MaupFinding maup_audit(const RasterGrid& r, const std::vector<ZonePartition>& partitions,
                       double q = 0.25, double ref_cell_side = 10.0);

}  // namespace geobias::maup
