// Command-line front end; talks to the core exclusively through the C API.

#include "uavsim/uavsim.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRunAbort = 2;

int exit_code_for(uavsim_status status) {
    switch (status) {
    case UAVSIM_OK: return kExitOk;
    case UAVSIM_ERR_CONFIG: return kExitConfigError;
    case UAVSIM_ERR_ARGUMENT: return kExitConfigError;
    case UAVSIM_ERR_RUN: return kExitRunAbort;
    }
    return kExitRunAbort;
}

int bail(uavsim_status status, const char* context) {
    std::cerr << "uavsim: " << context << ": " << uavsim_last_error() << "\n";
    return exit_code_for(status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"uavsim — deterministic simulator for UAV-assisted wireless networks"};
    std::string config_path;
    std::string axis;
    std::string out_dir;
    std::string seeds;
    std::string horizon;
    std::uint64_t seed = 1;
    bool trace = false;

    app.add_option("--config", config_path, "scenario config file (key = value)");
    app.add_option("--axis", axis, "sweep axis: ue or uav")
        ->check(CLI::IsMember({"ue", "uav"}));
    app.add_option("--seeds", seeds, "number of seeds per sweep point");
    app.add_option("--out", out_dir, "output directory for CSV/trace files");
    app.add_option("--horizon", horizon, "simulated horizon in seconds");
    app.add_option("--seed", seed, "seed for a single (non-sweep) run")
        ->check(CLI::NonNegativeNumber);
    app.add_flag("--trace", trace, "emit the full event trace");
    CLI11_PARSE(app, argc, argv);

    uavsim_config* config = nullptr;
    uavsim_status status = config_path.empty()
                               ? uavsim_config_create(&config)
                               : uavsim_config_load(config_path.c_str(), &config);
    if (status != UAVSIM_OK) return bail(status, "loading config");

    if ((status = uavsim_config_apply_env(config)) != UAVSIM_OK) {
        uavsim_config_free(config);
        return bail(status, "applying environment overrides");
    }
    if (!seeds.empty() &&
        (status = uavsim_config_set(config, "seeds", seeds.c_str())) != UAVSIM_OK) {
        uavsim_config_free(config);
        return bail(status, "--seeds");
    }
    if (!horizon.empty() &&
        (status = uavsim_config_set(config, "horizon", horizon.c_str())) !=
            UAVSIM_OK) {
        uavsim_config_free(config);
        return bail(status, "--horizon");
    }
    if ((status = uavsim_config_validate(config)) != UAVSIM_OK) {
        uavsim_config_free(config);
        return bail(status, "validating config");
    }

    // Echo the resolved configuration for reproducibility.
    char* rendered = nullptr;
    if ((status = uavsim_config_render(config, &rendered)) != UAVSIM_OK) {
        uavsim_config_free(config);
        return bail(status, "rendering config");
    }
    std::cout << rendered;
    uavsim_string_free(rendered);

    if (!axis.empty()) {
        const std::string dir = out_dir.empty() ? "out" : out_dir;
        status = uavsim_run_sweep(config, axis.c_str(), dir.c_str(), trace ? 1 : 0);
        uavsim_config_free(config);
        if (status != UAVSIM_OK) return bail(status, "sweep");
        std::cout << "# sweep complete: " << dir << "\n";
        return kExitOk;
    }

    uavsim_result* result = nullptr;
    status = uavsim_run(config, seed, &result);
    uavsim_config_free(config);
    if (status != UAVSIM_OK) return bail(status, "run");

    for (size_t i = 0; i < uavsim_metric_count(); ++i) {
        double value = 0.0;
        uavsim_result_metric(result, i, &value);
        std::printf("%s = %.12g\n", uavsim_metric_name(i), value);
    }
    if (trace) {
        char* text = nullptr;
        if ((status = uavsim_result_trace(result, &text)) != UAVSIM_OK) {
            uavsim_result_free(result);
            return bail(status, "trace");
        }
        if (out_dir.empty()) {
            std::cout << text;
        } else {
            std::filesystem::create_directories(out_dir);
            std::ofstream out(std::filesystem::path(out_dir) / "trace.txt",
                              std::ios::binary);
            out << text;
        }
        uavsim_string_free(text);
    }
    uavsim_result_free(result);
    return kExitOk;
}
