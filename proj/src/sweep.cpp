#include "sweep.hpp"

#include "simengine.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

namespace uavsim::sweep {

namespace fs = std::filesystem;

std::vector<std::uint32_t> default_axis_values(Axis axis) {
    if (axis == Axis::ue) return {100, 250, 500, 750, 1000};
    return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
}

SweepResult run_sweep(const cfg::ScenarioConfig& config, Axis axis) {
    return run_sweep(config, axis, default_axis_values(axis));
}

SweepResult run_sweep(const cfg::ScenarioConfig& config, Axis axis,
                      const std::vector<std::uint32_t>& axis_values) {
    SweepResult result;
    result.axis = axis;
    for (std::uint32_t value : axis_values) {
        cfg::ScenarioConfig point = config;
        if (axis == Axis::ue)
            point.e = value;
        else
            point.u = value;
        for (std::uint64_t seed = 1; seed <= config.seeds; ++seed) {
            auto run = sim::run(point, seed);
            result.rows.push_back({value, seed, run.report});
        }
    }
    return result;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace

std::vector<std::string> write_csvs(const SweepResult& result,
                                    const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::vector<std::string> written;
    try {
        for (std::size_t metric = 0; metric < metrics::MetricsReport::kCount;
             ++metric) {
            const fs::path path =
                fs::path(out_dir) /
                (std::string(metrics::MetricsReport::name(metric)) + ".csv");
            std::ofstream out(path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write " + path.string());
            // Built by hand so an embedding app's global locale cannot leak
            // grouping separators into the numbers.
            std::string body = "axis,seed,value\n";
            for (const auto& row : result.rows) {
                body += std::to_string(row.axis_value);
                body += ',';
                body += std::to_string(row.seed);
                body += ',';
                body += format_double(row.report.value(metric));
                body += '\n';
            }
            out << body;
            if (!out) throw std::runtime_error("short write to " + path.string());
            written.push_back(path.string());
        }
    } catch (...) {
        for (const auto& path : written) fs::remove(path);
        throw;
    }
    return written;
}

std::vector<std::string> run_sweep_to_dir(const cfg::ScenarioConfig& config,
                                          Axis axis, const std::string& out_dir,
                                          bool write_traces) {
    fs::create_directories(out_dir);
    SweepResult result;
    result.axis = axis;
    std::vector<std::string> trace_files;
    try {
        for (std::uint32_t value : default_axis_values(axis)) {
            cfg::ScenarioConfig point = config;
            if (axis == Axis::ue)
                point.e = value;
            else
                point.u = value;
            for (std::uint64_t seed = 1; seed <= config.seeds; ++seed) {
                auto run = sim::run(point, seed);
                result.rows.push_back({value, seed, run.report});
                if (write_traces) {
                    const fs::path path =
                        fs::path(out_dir) / ("trace_" + std::to_string(value) +
                                             "_" + std::to_string(seed) + ".txt");
                    std::ofstream out(path, std::ios::binary);
                    out << metrics::serialize(run.records);
                    if (!out)
                        throw std::runtime_error("cannot write " + path.string());
                    trace_files.push_back(path.string());
                }
            }
        }
    } catch (...) {
        for (const auto& path : trace_files) fs::remove(path);
        throw;
    }
    auto written = write_csvs(result, out_dir);
    written.insert(written.end(), trace_files.begin(), trace_files.end());
    return written;
}

} // namespace uavsim::sweep
