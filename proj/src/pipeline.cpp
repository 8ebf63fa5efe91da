#include "geobias/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "geobias/errors.hpp"
#include "geobias/gwr.hpp"
#include "geobias/kde.hpp"
#include "geobias/maup.hpp"
#include "geobias/rng.hpp"
#include "geobias/simpson.hpp"
#include "geobias/svg.hpp"
#include "geobias/synthgen.hpp"
#include "geobias/version.hpp"

namespace geobias::pipeline {

namespace {

report::AuditReport base_report(const RunContext& ctx) {
    report::AuditReport rep;
    rep.tool_version = kToolVersion;
    rep.config = ctx.config;
    rep.seed = ctx.seed;
    if (ctx.timestamp) rep.created_at = report::now_rfc3339();
    return rep;
}

void write_artifact(const RunContext& ctx, const std::string& name, const std::string& bytes) {
    const std::filesystem::path dir(ctx.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + ctx.out_dir + ": " + ec.message());
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw IoError("cannot write artifact " + (dir / name).string());
    out << bytes;
    if (!out) throw IoError("failed writing artifact " + (dir / name).string());
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string g4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// Group labels feed artifact filenames; anything outside [A-Za-z0-9_-]
// becomes '_'.
std::string safe_name(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') c = '_';
    return out;
}

}  // namespace

report::AuditReport run_simpson(const PointDataset& d, const SimpsonOptions& opt,
                                const RunContext& ctx) {
    if (!d.has_groups()) throw SchemaError("simpson audit requires grouped records");
    const simpson::RegressionFit pooled = simpson::fit_ols(d.attr(opt.x_attr), d.attr(opt.y_attr));
    const auto per_group = simpson::fit_grouped(d, opt.x_attr, opt.y_attr);
    const simpson::SimpsonFinding verdict = simpson::detect_simpson(pooled, per_group, opt.alpha);

    const std::vector<std::string> groups = d.distinct_groups();
    svg::ScatterOptions sopt;
    sopt.x_axis = opt.x_attr;
    sopt.y_axis = opt.y_attr;
    sopt.title = "per-group and pooled trends";
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const simpson::RegressionFit& fit = per_group.at(groups[i]);
        sopt.group_lines.push_back(svg::FitLine{fit.slope, fit.intercept, groups[i],
                                                svg::to_hex(svg::categorical_color(i)), false});
    }
    sopt.pooled_line = svg::FitLine{pooled.slope, pooled.intercept, "pooled", "#000000", true};
    write_artifact(ctx, "scatter.svg", svg::render_scatter(d, sopt));

    const auto table = simpson::parallel_coords_table(
        d, {"x", "y", opt.x_attr, opt.y_attr}, simpson::AxisNormalization::minmax);
    svg::ParallelCoordsOptions popt;
    popt.title = "normalized record profiles";
    write_artifact(ctx, "parallel_coords.svg", svg::render_parallel_coords(table, popt));

    report::Finding f;
    f.id = "simpson-paradox";
    f.level = report::Level::data;
    f.kind = std::string("simpson.") + simpson::to_string(verdict.kind);
    switch (verdict.kind) {
        case simpson::SimpsonKind::none: f.severity = Severity::info; break;
        case simpson::SimpsonKind::sign_reversal: f.severity = Severity::critical; break;
        case simpson::SimpsonKind::significance_loss:
        case simpson::SimpsonKind::mixed_groups: f.severity = Severity::warning; break;
    }
    f.metrics["alpha"] = verdict.alpha;
    f.metrics["pooled_slope"] = pooled.slope;
    f.metrics["pooled_p_value"] = pooled.p_value;
    f.metrics["pooled_r2"] = pooled.r2;
    f.metrics["sample_n"] = pooled.n;
    f.metrics["group_count"] = static_cast<double>(per_group.size());
    for (const auto& [label, fit] : per_group) {
        f.metrics["group_" + label + "_slope"] = fit.slope;
        f.metrics["group_" + label + "_p_value"] = fit.p_value;
    }
    f.artifacts = {"parallel_coords.svg", "scatter.svg"};
    f.notes.push_back(
        "decision order: mixed_groups, insufficient group evidence, sign_reversal, "
        "significance_loss");
    if (!verdict.non_significant_groups.empty()) {
        std::string note = "groups not significant at alpha:";
        for (const std::string& g : verdict.non_significant_groups) note += " " + g;
        f.notes.push_back(note);
    }

    report::AuditReport rep = base_report(ctx);
    rep.findings.push_back(std::move(f));
    report::write_report(rep, ctx.out_dir);
    return rep;
}

report::AuditReport run_gwr(const PointDataset& d, const GwrOptions& opt, const RunContext& ctx) {
    const Rect bbox = bounding_box(d);
    const GridSpec grid = grid_over(bbox, opt.grid_side, opt.grid_side);

    double bandwidth = opt.bandwidth;
    double cv_lo = 0.0, cv_hi = 0.0;
    const bool cv_selected = !(bandwidth > 0.0);
    if (cv_selected) {
        const double diameter = std::hypot(bbox.width(), bbox.height());
        cv_lo = opt.bw_lo > 0.0 ? opt.bw_lo : diameter / 64.0;
        cv_hi = opt.bw_hi > 0.0 ? opt.bw_hi : diameter / 4.0;
        if (!(cv_lo < cv_hi)) throw ParameterError("gwr: bandwidth search range is empty");
        bandwidth =
            gwr::select_bandwidth_cv(d, opt.x1_attr, opt.y_attr, cv_lo, cv_hi, (cv_hi - cv_lo) * 1e-3);
    }

    const gwr::CoefficientSurface surface =
        gwr::gwr_fit(d, opt.x1_attr, opt.y_attr, bandwidth, grid);
    const gwr::GwrFinding finding = gwr::continuity_audit(surface, opt.threshold_quantile);

    {
        svg::HeatmapOptions hopt;
        hopt.title = "local slope estimate";
        write_artifact(ctx, "slope_surface.svg", svg::render_heatmap(surface.slope, hopt));
    }
    {
        svg::HeatmapOptions hopt;
        hopt.title = "slope discontinuity score";
        hopt.flagged_cells = finding.flagged_cells;
        write_artifact(ctx, "discontinuity.svg", svg::render_heatmap(finding.discontinuity, hopt));
    }
    {
        svg::HeatmapOptions hopt;
        hopt.ramp = svg::Ramp::diverging;
        const auto range = surface.residual.value_range();
        if (range) {
            const double m = std::max(std::abs(range->first), std::abs(range->second));
            hopt.value_range = {{-m, m}};
        }
        hopt.title = "mean residual per cell";
        write_artifact(ctx, "residual_mean.svg", svg::render_heatmap(surface.residual, hopt));
    }

    report::Finding f;
    f.id = "gwr-discontinuity";
    f.level = report::Level::modeling;
    f.kind = "gwr.discontinuity";
    f.severity = finding.severity;
    f.metrics["bandwidth"] = bandwidth;
    f.metrics["rank_correlation"] = finding.rank_correlation;
    f.metrics["threshold"] = finding.threshold;
    f.metrics["threshold_quantile"] = finding.threshold_quantile;
    f.metrics["flagged_cell_count"] = static_cast<double>(finding.flagged_cells.size());
    f.metrics["cells_used"] = static_cast<double>(finding.cells_used);
    f.metrics["sample_n"] = static_cast<double>(d.size());
    if (cv_selected) {
        f.metrics["cv_search_lo"] = cv_lo;
        f.metrics["cv_search_hi"] = cv_hi;
    }
    f.artifacts = {"discontinuity.svg", "residual_mean.svg", "slope_surface.svg"};
    f.notes.push_back("Gaussian kernel weights w_i = exp(-d_i^2 / (2 bw^2)) at cell centers");
    f.notes.push_back(cv_selected
                          ? "bandwidth selected by leave-one-out cross-validation (golden section)"
                          : "bandwidth fixed by configuration");

    report::AuditReport rep = base_report(ctx);
    rep.findings.push_back(std::move(f));
    report::write_report(rep, ctx.out_dir);
    return rep;
}

report::AuditReport run_kde_sweep(const PointDataset& d, const KdeSweepOptions& opt,
                                  const RunContext& ctx) {
    if (d.size() < 2) throw SampleSizeError("kde sweep: need at least 2 points");
    const kde::Bandwidth2D silver = kde::silverman_bandwidth(d);
    const Rect bbox = bounding_box(d);
    const double span = std::max(bbox.width(), bbox.height());

    const double h_lo = opt.h_lo > 0.0 ? opt.h_lo : 0.25 * 0.5 * (silver.hx + silver.hy);
    const double h_hi = opt.h_hi > 0.0 ? opt.h_hi : 0.5 * span;
    if (!(h_lo < h_hi)) throw ParameterError("kde sweep: h_lo must be below h_hi");

    const double pad = 0.1 * span;
    const Rect padded{bbox.min_x - pad, bbox.min_y - pad, bbox.max_x + pad, bbox.max_y + pad};
    const GridSpec grid = grid_over(padded, opt.grid_side, opt.grid_side);

    const kde::KdeFinding finding = kde::false_center_audit(
        kde::bandwidth_sweep(d, h_lo, h_hi, opt.steps, grid), d, opt.radius_factor);

    std::vector<std::string> artifacts;
    std::string csv = "bandwidth,mode_x,mode_y,mode_density,flagged\n";
    for (std::size_t k = 0; k < finding.mode_tracks.size(); ++k) {
        const kde::ModeTrack& track = finding.mode_tracks[k];
        const double mode_x = grid.cell_center_x(track.mode_ix);
        const double mode_y = grid.cell_center_y(track.mode_iy);
        csv += g17(track.bandwidth) + "," + g17(mode_x) + "," + g17(mode_y) + "," +
               g17(track.mode_density) + "," + (track.false_center ? "1" : "0") + "\n";

        char name[32];
        std::snprintf(name, sizeof(name), "sweep_%02zu.svg", k);
        svg::HeatmapOptions hopt;
        hopt.title = "bandwidth " + g4(track.bandwidth) +
                     (track.false_center ? " (false center)" : "");
        if (track.false_center)
            hopt.flagged_cells = {grid.index(track.mode_ix, track.mode_iy)};
        write_artifact(ctx, name,
                       svg::render_heatmap(
                           kde::kde_grid(d, kde::Bandwidth2D{track.bandwidth, track.bandwidth},
                                         grid),
                           hopt));
        artifacts.push_back(name);
    }
    write_artifact(ctx, "sweep.csv", csv);
    artifacts.push_back("sweep.csv");
    std::sort(artifacts.begin(), artifacts.end());

    report::Finding f;
    f.id = "kde-false-center";
    f.level = report::Level::modeling;
    f.kind = "kde.false_center";
    const std::size_t flagged = finding.false_center_bandwidths.size();
    if (flagged == 0)
        f.severity = Severity::info;
    else
        f.severity = 2 * flagged > finding.sweep_bandwidths.size() ? Severity::critical
                                                                   : Severity::warning;
    f.metrics["steps"] = static_cast<double>(finding.sweep_bandwidths.size());
    f.metrics["h_lo"] = h_lo;
    f.metrics["h_hi"] = h_hi;
    f.metrics["flagged_bandwidth_count"] = static_cast<double>(flagged);
    f.metrics["median_nn_distance"] = finding.median_nn_dist;
    f.metrics["radius_factor"] = finding.radius_factor;
    f.metrics["silverman_hx"] = silver.hx;
    f.metrics["silverman_hy"] = silver.hy;
    f.artifacts = artifacts;
    f.notes.push_back("bandwidths geometrically spaced; mode = first argmax cell in row-major order");
    f.notes.push_back(
        "a bandwidth is flagged when its mode cell lies farther from any data point than "
        "radius_factor times the median nearest-neighbor distance");

    report::AuditReport rep = base_report(ctx);
    rep.findings.push_back(std::move(f));
    report::write_report(rep, ctx.out_dir);
    return rep;
}

report::AuditReport run_kde_window(const PointDataset& local, const PointDataset& global,
                                   const KdeWindowOptions& opt, const RunContext& ctx) {
    const kde::Bandwidth2D h_local = kde::silverman_bandwidth(local);
    const kde::Bandwidth2D h_global = kde::silverman_bandwidth(global);

    const Rect bbox = bounding_box(global);
    const double pad_x = 0.05 * bbox.width(), pad_y = 0.05 * bbox.height();
    const Rect padded{bbox.min_x - pad_x, bbox.min_y - pad_y, bbox.max_x + pad_x,
                      bbox.max_y + pad_y};
    const GridSpec grid = grid_over(padded, opt.grid_side, opt.grid_side);

    const RasterGrid density_local = kde::kde_grid(local, h_local, grid);
    const RasterGrid density_global = kde::kde_grid(global, h_global, grid);
    const kde::VectorField grad_local = kde::gradient_field(density_local);
    const kde::VectorField grad_global = kde::gradient_field(density_global);
    const kde::DivergenceStats stats =
        kde::gradient_divergence(grad_local, grad_global, opt.window);

    {
        svg::HeatmapOptions hopt;
        hopt.title = "local subset density and gradients";
        hopt.quiver = &grad_local;
        hopt.quiver_stride = opt.quiver_stride;
        write_artifact(ctx, "density_local.svg", svg::render_heatmap(density_local, hopt));
    }
    {
        svg::HeatmapOptions hopt;
        hopt.title = "full dataset density and gradients";
        hopt.quiver = &grad_global;
        hopt.quiver_stride = opt.quiver_stride;
        write_artifact(ctx, "density_global.svg", svg::render_heatmap(density_global, hopt));
    }

    report::Finding f;
    f.id = "kde-bandwidth-divergence";
    f.level = report::Level::modeling;
    f.kind = "kde.bandwidth_divergence";
    constexpr double kPi = 3.14159265358979323846;
    if (stats.mean_angle > kPi / 2)
        f.severity = Severity::critical;
    else if (stats.mean_angle > kPi / 4)
        f.severity = Severity::warning;
    else
        f.severity = Severity::info;
    f.metrics["mean_angle"] = stats.mean_angle;
    f.metrics["max_angle"] = stats.max_angle;
    f.metrics["cells_used"] = static_cast<double>(stats.cells_used);
    f.metrics["cells_skipped"] = static_cast<double>(stats.cells_skipped);
    f.metrics["local_hx"] = h_local.hx;
    f.metrics["local_hy"] = h_local.hy;
    f.metrics["global_hx"] = h_global.hx;
    f.metrics["global_hy"] = h_global.hy;
    f.metrics["window_min_x"] = opt.window.min_x;
    f.metrics["window_min_y"] = opt.window.min_y;
    f.metrics["window_max_x"] = opt.window.max_x;
    f.metrics["window_max_y"] = opt.window.max_y;
    f.artifacts = {"density_global.svg", "density_local.svg"};
    f.notes.push_back(
        "angles compare KDE gradient directions of the local subset against the full dataset, "
        "each at its own Silverman bandwidth");

    report::AuditReport rep = base_report(ctx);
    rep.findings.push_back(std::move(f));
    report::write_report(rep, ctx.out_dir);
    return rep;
}

report::AuditReport run_maup(const RasterGrid& surface, const MaupOptions& opt,
                             const RunContext& ctx) {
    if (opt.block_sides.size() < 2)
        throw ParameterError("maup: need at least 2 block sides");

    std::vector<maup::ZonePartition> partitions;
    partitions.reserve(opt.block_sides.size());
    for (int side : opt.block_sides)
        partitions.push_back(maup::make_block_partition(surface.spec(), side, opt.offset));

    const maup::MaupFinding finding =
        maup::maup_audit(surface, partitions, opt.q, opt.ref_cell_side);

    std::vector<std::string> artifacts;
    {
        svg::HeatmapOptions hopt;
        hopt.title = "audited surface";
        write_artifact(ctx, "surface.svg", svg::render_heatmap(surface, hopt));
        artifacts.push_back("surface.svg");
    }
    for (std::size_t i = 0; i < partitions.size(); ++i) {
        char name[48];
        std::snprintf(name, sizeof(name), "partition_%zu_side%d.svg", i, opt.block_sides[i]);
        svg::HeatmapOptions hopt;
        hopt.value_range = {{0.0, 1.0}};
        hopt.zones = &partitions[i];
        hopt.title = "top-quantile zones, block side " + std::to_string(opt.block_sides[i]);
        write_artifact(ctx, name, svg::render_heatmap(finding.binaries[i], hopt));
        artifacts.push_back(name);
    }
    {
        RasterGrid agreement(finding.consistency.ref_grid);
        for (int iy = 0; iy < agreement.height(); ++iy)
            for (int ix = 0; ix < agreement.width(); ++ix) {
                const int a = finding.consistency.per_ref_cell_agreement[agreement.spec().index(
                    ix, iy)];
                if (a > 0) agreement.set(ix, iy, a);
            }
        svg::HeatmapOptions hopt;
        hopt.value_range = {{1.0, static_cast<double>(finding.consistency.grouping_count)}};
        hopt.title = "cross-partition agreement";
        write_artifact(ctx, "consistency.svg", svg::render_heatmap(agreement, hopt));
        artifacts.push_back("consistency.svg");
    }
    std::sort(artifacts.begin(), artifacts.end());

    report::Finding f;
    f.id = "maup-consistency";
    f.level = report::Level::interpretation;
    f.kind = "maup.inconsistency";
    f.severity = finding.severity;
    const auto& fractions = finding.consistency.class_fractions;
    f.metrics["fraction_unanimous"] = fractions.at(maup::AgreementClass::unanimous);
    f.metrics["fraction_strong_majority"] = fractions.at(maup::AgreementClass::strong_majority);
    f.metrics["fraction_split"] = fractions.at(maup::AgreementClass::split);
    f.metrics["q"] = finding.q;
    f.metrics["ref_cell_side"] = finding.consistency.ref_cell_side;
    f.metrics["grouping_count"] = static_cast<double>(finding.consistency.grouping_count);
    for (std::size_t i = 0; i < finding.partitions.size(); ++i) {
        const std::string prefix = "partition_" + std::to_string(i) + "_";
        f.metrics[prefix + "block_side"] = static_cast<double>(opt.block_sides[i]);
        f.metrics[prefix + "zone_count"] = static_cast<double>(finding.partitions[i].zone_count);
        f.metrics[prefix + "threshold"] = finding.partitions[i].threshold;
    }
    f.artifacts = artifacts;
    f.notes.push_back(
        "reference-cell labels take the majority of constituent cells, exact tie counted as 1; "
        "zones tied with the quantile threshold are all included");
    f.notes.push_back(
        "agreement classes: unanimous = all groupings agree, strong_majority = exactly one "
        "dissents, split = anything below; with two groupings a 1-1 disagreement is a split. "
        "This class mapping is an interpretation choice, not an established convention");

    report::AuditReport rep = base_report(ctx);
    rep.findings.push_back(std::move(f));
    report::write_report(rep, ctx.out_dir);
    return rep;
}

report::AuditReport run_access(const std::vector<access::DemandSite>& demand,
                               const std::vector<access::Facility>& facilities,
                               const AccessOptions& opt, const RunContext& ctx) {
    const access::AccessibilityResult total =
        access::three_sfca(demand, facilities, opt.decay, access::PopulationSelector::total());
    const access::StratifiedMeans means = access::stratified_accessibility(total, demand);
    const access::AccessFinding disparity = access::disparity_audit(means, opt.threshold_ratio);

    double served = 0.0;
    for (std::size_t i = 0; i < demand.size(); ++i) served += demand[i].pop_total * total.a[i];
    const double conservation_residual =
        total.supply_reachable > 0.0
            ? std::abs(served - total.supply_reachable) / total.supply_reachable
            : 0.0;

    Rect bbox{demand[0].x, demand[0].y, demand[0].x, demand[0].y};
    for (const access::DemandSite& s : demand) {
        bbox.min_x = std::min(bbox.min_x, s.x);
        bbox.min_y = std::min(bbox.min_y, s.y);
        bbox.max_x = std::max(bbox.max_x, s.x);
        bbox.max_y = std::max(bbox.max_y, s.y);
    }
    const GridSpec grid = grid_over(bbox, opt.grid_side, opt.grid_side);

    std::vector<std::string> artifacts;
    bool total_written = false;
    for (const auto& [group, group_mean] : means.group_means) {
        const access::AccessibilityResult group_run =
            access::group_specific_access(demand, facilities, opt.decay, group);
        const access::DifferenceMaps maps =
            access::normalized_difference_map(total, group_run, demand, grid);
        if (!total_written) {
            svg::HeatmapOptions hopt;
            hopt.value_range = {{0.0, 1.0}};
            hopt.title = "normalized accessibility, total population";
            write_artifact(ctx, "normalized_total.svg",
                           svg::render_heatmap(maps.normalized_total, hopt));
            artifacts.push_back("normalized_total.svg");
            total_written = true;
        }
        const std::string tag = safe_name(group);
        {
            svg::HeatmapOptions hopt;
            hopt.value_range = {{0.0, 1.0}};
            hopt.title = "normalized accessibility, " + group;
            write_artifact(ctx, "normalized_" + tag + ".svg",
                           svg::render_heatmap(maps.normalized_group, hopt));
            artifacts.push_back("normalized_" + tag + ".svg");
        }
        {
            svg::HeatmapOptions hopt;
            hopt.ramp = svg::Ramp::diverging;
            hopt.value_range = {{-1.0, 1.0}};
            hopt.title = "normalized difference, total minus " + group;
            write_artifact(ctx, "difference_" + tag + ".svg",
                           svg::render_heatmap(maps.difference, hopt));
            artifacts.push_back("difference_" + tag + ".svg");
        }
    }
    std::sort(artifacts.begin(), artifacts.end());

    report::Finding f;
    f.id = "access-disparity";
    f.level = report::Level::interpretation;
    f.kind = "access.disparity";
    f.severity = disparity.severity;
    f.metrics["overall_mean"] = means.overall_mean;
    f.metrics["conservation_residual"] = conservation_residual;
    f.metrics["threshold_ratio"] = disparity.threshold_ratio;
    f.metrics["min_group_ratio"] = disparity.min_group_ratio;
    f.metrics["max_group_ratio"] = disparity.max_group_ratio;
    f.metrics["flagged_group_count"] = static_cast<double>(disparity.flagged_groups.size());
    f.metrics["unreachable_site_count"] = static_cast<double>(total.unreachable_sites.size());
    f.metrics["idle_facility_count"] = static_cast<double>(total.idle_facilities.size());
    f.metrics["supply_total"] = total.supply_total;
    f.metrics["supply_reachable"] = total.supply_reachable;
    f.metrics["d0"] = opt.decay.d0;
    f.metrics["w_at_d0"] = opt.decay.w_at_d0;
    for (const auto& [group, group_mean] : means.group_means) {
        if (!group_mean) continue;
        f.metrics["mean_" + group] = *group_mean;
        f.metrics["ratio_" + group] = *group_mean / means.overall_mean;
    }
    f.artifacts = artifacts;
    if (disparity.flagged_groups.empty()) {
        f.notes.push_back("no group falls below the disparity threshold");
    } else {
        std::string note = "groups below the disparity threshold:";
        for (const std::string& g : disparity.flagged_groups) note += " " + g;
        f.notes.push_back(note);
    }
    for (const auto& [group, group_mean] : means.group_means)
        if (!group_mean)
            f.notes.push_back("group " + group + " has zero population; mean undefined");
    f.notes.push_back(
        "group means reuse the total-population accessibility surface; the per-group maps "
        "re-run the model with that group as the sole demand");

    report::AuditReport rep = base_report(ctx);
    rep.findings.push_back(std::move(f));
    report::write_report(rep, ctx.out_dir);
    return rep;
}

const std::vector<std::string>& demo_experiments() {
    static const std::vector<std::string> kNames = {"simpson",   "gwr",  "kde-window",
                                                    "kde-sweep", "maup", "access"};
    return kNames;
}

PointDataset demo_simpson_data(std::uint64_t seed) {
    return synth::gen_simpson_regions(synth::SimpsonParams{}, seed);
}

PointDataset demo_gwr_data(std::uint64_t seed) {
    return synth::gen_gwr_surface(synth::GwrSurfaceParams{}, seed);
}

PointDataset demo_kde_window_global(std::uint64_t seed) {
    Pcg32 rng(seed);
    PointDataset d({}, false);
    for (int i = 0; i < 50; ++i) {
        const double x = rng.uniform(0.0, 20.0);
        const double y = rng.uniform(0.0, 20.0);
        d.add(x, y, {});
    }
    for (int i = 0; i < 5; ++i) {
        const double x = rng.gaussian(5.0, 0.4);
        const double y = rng.gaussian(5.0, 0.4);
        d.add(x, y, {});
    }
    return d;
}

PointDataset demo_kde_window_local(const PointDataset& global) {
    if (global.size() < 5)
        throw ParameterError("demo_kde_window_local: global dataset too small");
    PointDataset d({}, false);
    for (std::size_t i = global.size() - 5; i < global.size(); ++i)
        d.add(global.x(i), global.y(i), {});
    return d;
}

Rect demo_kde_window_rect() { return Rect{3.0, 3.0, 7.0, 7.0}; }

PointDataset demo_kde_sweep_data(std::uint64_t seed) {
    // Clusters at the vertices of an equilateral triangle with an empty
    // centroid; wide bandwidths pull the density mode into that gap.
    return synth::gen_clusters({{0.0, 0.0}, {20.0, 0.0}, {10.0, 17.320508075688772}},
                               {1.0, 1.0, 1.0}, {100, 100, 20}, seed);
}

RasterGrid demo_maup_surface(std::uint64_t seed) {
    return synth::gen_random_surface(100, 25, seed);
}

void demo_access_data(std::uint64_t seed, std::vector<access::DemandSite>& demand,
                      std::vector<access::Facility>& facilities) {
    Pcg32 rng(seed);
    demand.clear();
    facilities.clear();
    // 15 x 15 site lattice; group_c concentrated on the eastern side, far
    // from every facility, so the demo exhibits a genuine disparity.
    for (int j = 0; j < 15; ++j)
        for (int i = 0; i < 15; ++i) {
            access::DemandSite s;
            s.x = 1.0 + 2.0 * i;
            s.y = 1.0 + 2.0 * j;
            const double base = 40.0 + 20.0 * rng.next_double();
            const double c_share = s.x >= 20.0 ? 0.6 : 0.05;
            const double a = base * 0.7 * (1.0 - c_share);
            const double b = base * 0.3 * (1.0 - c_share);
            const double c = base * c_share;
            s.pop_by_group["group_a"] = a;
            s.pop_by_group["group_b"] = b;
            s.pop_by_group["group_c"] = c;
            s.pop_total = a + b + c;
            demand.push_back(std::move(s));
        }
    facilities = {{4.0, 6.0, 30.0}, {6.0, 16.0, 40.0}, {4.0, 24.0, 25.0}, {10.0, 10.0, 35.0}};
}

report::AuditReport run_demo(const std::string& experiment, std::uint64_t seed, RunContext ctx) {
    ctx.seed = seed;
    ctx.config["experiment"] = experiment;
    ctx.config["seed"] = seed;

    if (experiment == "simpson")
        return run_simpson(demo_simpson_data(seed), SimpsonOptions{}, ctx);
    if (experiment == "gwr") return run_gwr(demo_gwr_data(seed), GwrOptions{}, ctx);
    if (experiment == "kde-window") {
        const PointDataset global = demo_kde_window_global(seed);
        const PointDataset local = demo_kde_window_local(global);
        KdeWindowOptions opt;
        opt.window = demo_kde_window_rect();
        return run_kde_window(local, global, opt, ctx);
    }
    if (experiment == "kde-sweep")
        return run_kde_sweep(demo_kde_sweep_data(seed), KdeSweepOptions{}, ctx);
    if (experiment == "maup") return run_maup(demo_maup_surface(seed), MaupOptions{}, ctx);
    if (experiment == "access") {
        std::vector<access::DemandSite> demand;
        std::vector<access::Facility> facilities;
        demo_access_data(seed, demand, facilities);
        AccessOptions opt;
        opt.decay = access::DecaySpec{12.0, 0.01};
        return run_access(demand, facilities, opt, ctx);
    }
    throw ParameterError("unknown demo experiment '" + experiment + "'");
}

}  // namespace geobias::pipeline
