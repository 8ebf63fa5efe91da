#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "geobias/access.hpp"
#include "geobias/core.hpp"
#include "geobias/report.hpp"

namespace geobias::pipeline {

// Shared run parameters: where artifacts land, the seed echoed into the
// report, and whether a wall-clock timestamp is recorded.
struct RunContext {
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool timestamp = true;
    nlohmann::json config = nlohmann::json::object();
};

struct SimpsonOptions {
    std::string x_attr = "var1";
    std::string y_attr = "var2";
    double alpha = 0.05;
};

report::AuditReport run_simpson(const PointDataset& d, const SimpsonOptions& opt,
                                const RunContext& ctx);

struct GwrOptions {
    std::string x1_attr = "x1";
    std::string y_attr = "y";
    double bandwidth = 0.0;  // 0 = leave-one-out CV selection
    double bw_lo = 0.0;      // CV search range; 0 = derived from the domain diameter
    double bw_hi = 0.0;
    int grid_side = 32;
    double threshold_quantile = 0.95;
};

report::AuditReport run_gwr(const PointDataset& d, const GwrOptions& opt, const RunContext& ctx);

struct KdeSweepOptions {
    double h_lo = 0.0;  // 0 = a quarter of the Silverman scale
    double h_hi = 0.0;  // 0 = half the larger bounding-box span
    int steps = 8;
    int grid_side = 128;
    double radius_factor = 2.0;
};

report::AuditReport run_kde_sweep(const PointDataset& d, const KdeSweepOptions& opt,
                                  const RunContext& ctx);

struct KdeWindowOptions {
    Rect window;
    int grid_side = 128;
    int quiver_stride = 4;
};

// Compares the gradient structure of a local subset's KDE against the full
// dataset's KDE inside `window`, each at its own Silverman bandwidth.
report::AuditReport run_kde_window(const PointDataset& local, const PointDataset& global,
                                   const KdeWindowOptions& opt, const RunContext& ctx);

struct MaupOptions {
    std::vector<int> block_sides = {5, 10, 20, 25};
    std::pair<int, int> offset = {0, 0};
    double q = 0.25;
    double ref_cell_side = 10.0;
};

report::AuditReport run_maup(const RasterGrid& surface, const MaupOptions& opt,
                             const RunContext& ctx);

struct AccessOptions {
    access::DecaySpec decay{10.0, 0.01};
    double threshold_ratio = 0.95;
    int grid_side = 32;
};

report::AuditReport run_access(const std::vector<access::DemandSite>& demand,
                               const std::vector<access::Facility>& facilities,
                               const AccessOptions& opt, const RunContext& ctx);

// Demo experiment names accepted by run_demo, in help order.
const std::vector<std::string>& demo_experiments();

// Generates the experiment's bundled synthetic inputs and runs its audit.
// Unknown names raise ParameterError.
report::AuditReport run_demo(const std::string& experiment, std::uint64_t seed, RunContext ctx);

// Demo input builders, exposed for tests.
PointDataset demo_simpson_data(std::uint64_t seed);
PointDataset demo_gwr_data(std::uint64_t seed);
PointDataset demo_kde_window_global(std::uint64_t seed);  // background plus a tight cluster
PointDataset demo_kde_window_local(const PointDataset& global);
Rect demo_kde_window_rect();
PointDataset demo_kde_sweep_data(std::uint64_t seed);  // clusters at triangle vertices
RasterGrid demo_maup_surface(std::uint64_t seed);
void demo_access_data(std::uint64_t seed, std::vector<access::DemandSite>& demand,
                      std::vector<access::Facility>& facilities);

}  // namespace geobias::pipeline
