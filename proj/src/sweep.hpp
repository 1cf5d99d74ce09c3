#pragma once

#include "config.hpp"
#include "metrics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace uavsim::sweep {

enum class Axis { ue, uav };

struct SweepRow {
    std::uint32_t axis_value = 0;
    std::uint64_t seed = 0;
    metrics::MetricsReport report;
};

struct SweepResult {
    Axis axis = Axis::ue;
    std::vector<SweepRow> rows; // ascending (axis value, seed)
};

// Default axis grids mirroring the evaluation sweeps: UE counts
// {100,250,500,750,1000}, UAV counts {1..10}.
std::vector<std::uint32_t> default_axis_values(Axis axis);

// Run the full cross product of axis values and seeds 1..config.seeds.
SweepResult run_sweep(const cfg::ScenarioConfig& config, Axis axis);
SweepResult run_sweep(const cfg::ScenarioConfig& config, Axis axis,
                      const std::vector<std::uint32_t>& axis_values);

// One CSV per metric, named <metric>.csv, header "axis,seed,value", '\n'
// newlines, C-locale numbers. Returns the written paths. Partial files are
// removed if any write fails.
std::vector<std::string> write_csvs(const SweepResult& result,
                                    const std::string& out_dir);

// run_sweep + write_csvs + optional per-run trace files
// (trace_<axis>_<seed>.txt). Removes already-written CSVs when a run aborts,
// then rethrows.
std::vector<std::string> run_sweep_to_dir(const cfg::ScenarioConfig& config,
                                          Axis axis, const std::string& out_dir,
                                          bool write_traces);

} // namespace uavsim::sweep
