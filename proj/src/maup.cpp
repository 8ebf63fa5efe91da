#include "geobias/maup.hpp"

#include <algorithm>
#include <cmath>

#include "geobias/errors.hpp"
#include "geobias/numeric.hpp"

namespace geobias::maup {

namespace {

int floor_div(int a, int b) {
    const int q = a / b;
    return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

void require_partition_matches(const RasterGrid& r, const ZonePartition& p,
                               const char* where) {
    if (!r.spec().same_layout(p.grid))
        throw ParameterError(std::string(where) + ": grid and partition layouts differ");
    if (p.zone_of.size() != p.grid.cell_count() || p.zone_count < 1)
        throw ParameterError(std::string(where) + ": malformed zone partition");
}

}  // namespace

const char* to_string(AgreementClass c) {
    switch (c) {
        case AgreementClass::unanimous: return "unanimous";
        case AgreementClass::strong_majority: return "strong_majority";
        case AgreementClass::split: return "split";
    }
    return "unknown";
}

ZonePartition make_block_partition(const GridSpec& grid, int block_side,
                                   std::pair<int, int> offset) {
    grid.validate();
    if (block_side < 1) throw ParameterError("make_block_partition: block_side must be >= 1");

    const int bx_min = floor_div(0 - offset.first, block_side);
    const int by_min = floor_div(0 - offset.second, block_side);
    const int bx_max = floor_div(grid.width - 1 - offset.first, block_side);
    const int by_max = floor_div(grid.height - 1 - offset.second, block_side);
    const int blocks_x = bx_max - bx_min + 1;
    const int blocks_y = by_max - by_min + 1;

    ZonePartition p;
    p.grid = grid;
    p.zone_of.resize(grid.cell_count());
    p.zone_count = blocks_x * blocks_y;
    for (int iy = 0; iy < grid.height; ++iy) {
        const int by = floor_div(iy - offset.second, block_side) - by_min;
        for (int ix = 0; ix < grid.width; ++ix) {
            const int bx = floor_div(ix - offset.first, block_side) - bx_min;
            p.zone_of[grid.index(ix, iy)] = by * blocks_x + bx;
        }
    }
    return p;
}

std::vector<std::optional<double>> zonal_mean(const RasterGrid& r, const ZonePartition& p) {
    require_partition_matches(r, p, "zonal_mean");

    std::vector<double> sums(static_cast<std::size_t>(p.zone_count), 0.0);
    std::vector<std::size_t> counts(static_cast<std::size_t>(p.zone_count), 0);
    r.for_each_valid([&](int ix, int iy, double v) {
        const int z = p.zone_of[p.grid.index(ix, iy)];
        sums[static_cast<std::size_t>(z)] += v;
        ++counts[static_cast<std::size_t>(z)];
    });

    std::vector<std::optional<double>> means(static_cast<std::size_t>(p.zone_count));
    for (std::size_t z = 0; z < means.size(); ++z)
        if (counts[z] > 0) means[z] = sums[z] / static_cast<double>(counts[z]);
    return means;
}

RasterGrid top_quantile_binarize(const std::vector<std::optional<double>>& zone_means,
                                 const ZonePartition& p, double q) {
    if (!(q > 0.0) || !(q < 1.0))
        throw ParameterError("top_quantile_binarize: q must be in (0, 1)");
    if (zone_means.size() != static_cast<std::size_t>(p.zone_count))
        throw ParameterError("top_quantile_binarize: zone mean count does not match partition");

    std::vector<double> present;
    present.reserve(zone_means.size());
    for (const auto& m : zone_means)
        if (m) present.push_back(*m);
    if (present.empty()) throw EmptyInputError("top_quantile_binarize: all zones are no-data");

    const double threshold = num::quantile_linear(std::move(present), 1.0 - q);

    RasterGrid out(p.grid);
    for (int iy = 0; iy < p.grid.height; ++iy)
        for (int ix = 0; ix < p.grid.width; ++ix) {
            const auto& m = zone_means[static_cast<std::size_t>(p.zone_of[p.grid.index(ix, iy)])];
            if (m) out.set(ix, iy, *m >= threshold ? 1.0 : 0.0);
        }
    return out;
}

ConsistencyReport consistency_stats(const std::vector<RasterGrid>& binaries,
                                    double ref_cell_side) {
    if (binaries.size() < 2)
        throw ParameterError("consistency_stats: need at least 2 binary grids");
    if (!(ref_cell_side > 0.0) || !std::isfinite(ref_cell_side))
        throw ParameterError("consistency_stats: ref_cell_side must be positive and finite");
    const GridSpec& spec = binaries.front().spec();
    for (const RasterGrid& b : binaries)
        if (!b.spec().same_layout(spec))
            throw ParameterError("consistency_stats: binary grid layouts differ");

    const int k = static_cast<int>(binaries.size());
    ConsistencyReport rep;
    rep.ref_cell_side = ref_cell_side;
    rep.grouping_count = k;
    rep.ref_grid.origin_x = spec.origin_x;
    rep.ref_grid.origin_y = spec.origin_y;
    rep.ref_grid.cell_size = ref_cell_side;
    rep.ref_grid.width = static_cast<int>(
        std::ceil(spec.width * spec.cell_size / ref_cell_side - 1e-12));
    rep.ref_grid.height = static_cast<int>(
        std::ceil(spec.height * spec.cell_size / ref_cell_side - 1e-12));
    rep.ref_grid.validate();

    const std::size_t ref_cells = rep.ref_grid.cell_count();
    // ones[g][c] / labeled[g][c]: constituent label counts per grouping and ref cell.
    std::vector<std::vector<std::size_t>> ones(binaries.size(),
                                               std::vector<std::size_t>(ref_cells, 0));
    std::vector<std::vector<std::size_t>> labeled(binaries.size(),
                                                  std::vector<std::size_t>(ref_cells, 0));
    for (std::size_t g = 0; g < binaries.size(); ++g) {
        binaries[g].for_each_valid([&](int ix, int iy, double v) {
            int rx = static_cast<int>(
                std::floor((spec.cell_center_x(ix) - spec.origin_x) / ref_cell_side));
            int ry = static_cast<int>(
                std::floor((spec.cell_center_y(iy) - spec.origin_y) / ref_cell_side));
            rx = std::clamp(rx, 0, rep.ref_grid.width - 1);
            ry = std::clamp(ry, 0, rep.ref_grid.height - 1);
            const std::size_t rc = rep.ref_grid.index(rx, ry);
            if (v >= 0.5) ++ones[g][rc];
            ++labeled[g][rc];
        });
    }

    // Agreement 0 marks reference cells excluded because some grouping has no
    // labeled constituent cells there; real agreements are always >= 1.
    rep.per_ref_cell_agreement.assign(ref_cells, 0);
    std::map<AgreementClass, std::size_t> class_counts{
        {AgreementClass::unanimous, 0},
        {AgreementClass::strong_majority, 0},
        {AgreementClass::split, 0},
    };
    std::size_t counted = 0;
    for (std::size_t rc = 0; rc < ref_cells; ++rc) {
        int votes_one = 0;
        bool usable = true;
        for (std::size_t g = 0; g < binaries.size(); ++g) {
            if (labeled[g][rc] == 0) {
                usable = false;
                break;
            }
            // Majority label of the constituent cells; exact tie -> 1.
            if (2 * ones[g][rc] >= labeled[g][rc]) ++votes_one;
        }
        if (!usable) continue;
        const int agreement = std::max(votes_one, k - votes_one);
        rep.per_ref_cell_agreement[rc] = agreement;
        AgreementClass cls;
        if (agreement == k)
            cls = AgreementClass::unanimous;
        else if (k > 2 && agreement == k - 1)
            cls = AgreementClass::strong_majority;
        else
            cls = AgreementClass::split;
        ++class_counts[cls];
        ++counted;
    }
    if (counted == 0)
        throw EmptyWindowError("consistency_stats: no reference cell is labeled by every grouping");

    for (const auto& [cls, n] : class_counts)
        rep.class_fractions[cls] = static_cast<double>(n) / static_cast<double>(counted);
    return rep;
}

MaupFinding maup_audit(const RasterGrid& r, const std::vector<ZonePartition>& partitions,
                       double q, double ref_cell_side) {
    if (partitions.size() < 2)
        throw ParameterError("maup_audit: need at least 2 partitions");

    MaupFinding finding;
    finding.q = q;
    for (const ZonePartition& p : partitions) {
        const auto means = zonal_mean(r, p);
        RasterGrid binary = top_quantile_binarize(means, p, q);

        std::vector<double> present;
        for (const auto& m : means)
            if (m) present.push_back(*m);
        PartitionSummary summary;
        summary.zone_count = p.zone_count;
        summary.threshold = num::quantile_linear(std::move(present), 1.0 - q);
        finding.partitions.push_back(summary);
        finding.binaries.push_back(std::move(binary));
    }
    finding.consistency = consistency_stats(finding.binaries, ref_cell_side);

    const double unanimous = finding.consistency.class_fractions[AgreementClass::unanimous];
    if (unanimous >= 1.0)
        finding.severity = Severity::info;
    else if (unanimous >= 0.5)
        finding.severity = Severity::warning;
    else
        finding.severity = Severity::critical;
    return finding;
}

}  // namespace geobias::maup
