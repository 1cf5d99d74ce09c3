#pragma once

#include "radio.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uavsim::cfg {

class config_error : public std::runtime_error {
  public:
    config_error(std::string key, const std::string& what)
        : std::runtime_error("config: key '" + key + "': " + what),
          key_(std::move(key)) {}
    const std::string& key() const { return key_; }

  private:
    std::string key_;
};

// Where a resolved value came from; echoed next to each key for
// reproducibility.
enum class Source { scenario_default, engine_default, file, env, override_ };

struct ScenarioConfig {
    // Scenario parameters (flat key = value, keys lowercased symbols).
    double a = 10000.0;    // simulation area side, m
    double m = 10.0;       // MBS density per sq.km
    std::uint32_t k = 12;  // demand zones per MBS
    std::uint32_t u = 5;   // UAVs (sweep range 1-10)
    double g = 500.0;      // UAV radio range, m
    double mu = 256.0;     // offered traffic per UE, kbit/s
    double alpha = 4.0;    // pathloss exponent
    double beta = 10e6;    // system bandwidth, Hz
    std::uint32_t e = 500; // active UEs (sweep range 100-1000)
    std::uint32_t max_cm = 5;
    std::uint32_t max_cu = 5;
    std::uint32_t n = 5;   // orthogonal bands (range 2-5)
    double s = 2.0;        // service requests per UE per second
    double w = -11.0;      // antenna constant, dB
    double q = 35.0;       // transmission power, dBm
    double c = 1.0;        // network intensity constant

    // Engine knobs.
    double horizon = 60.0;
    double epoch_interval = 1.0;
    std::uint32_t seeds = 10;
    double gamma1 = 1.0 / 3.0;
    double gamma2 = 1.0 / 3.0;
    double gamma3 = 1.0 / 3.0;
    double v0_dbm = -104.0; // thermal noise floor at 10 MHz
    std::uint32_t t_u = 20;
    double r_c = 20.0;
    double r_e = 1.0;
    std::uint32_t standby = 0;
    double launch_delay = 5.0;
    double hello_interval = 1.0;
    std::uint32_t hello_miss_limit = 3;
    double kappa = 0.1;
    double reset_threshold = 0.5;
    std::uint64_t max_iterations = 0; // 0 = auto, k * u per round
    double cell_radius = 2000.0;
    double uav_spawn_radius = 2000.0;
    double mean_packet_bits = 1000.0;
    double per_iteration_cost = 0.001; // s of processing per iteration
    bool propagation_delay = true;
    std::optional<double> nr_th; // unset = captured at the initial mapping
    std::optional<double> cf_th;
    std::optional<double> lh_th;
    std::string failures; // scripted kills, "time:uav_index;..."

    std::map<std::string, Source> provenance; // key -> origin of its value

    std::vector<std::pair<double, std::uint32_t>> parsed_failures() const;
};

// All defaults with provenance recorded.
ScenarioConfig default_config();

// Parse flat key = value text ('#' starts a comment). Unknown keys and
// malformed values are rejected with the offending key named. Missing keys
// keep their defaults.
ScenarioConfig parse_config(const std::string& text);

// parse_config over a file's contents; nonexistent path is a config_error.
ScenarioConfig load_config(const std::string& path);

// Apply one key=value override (CLI or env), tagging its provenance.
void apply_override(ScenarioConfig& config, const std::string& key,
                    const std::string& value, Source source);

// Apply UAVSIM_<KEY> environment overrides for every known key.
void apply_env_overrides(ScenarioConfig& config);

// Render the fully resolved config as loadable text, one provenance comment
// per key. Loading the rendered text resolves to an identical render.
std::string render_config(const ScenarioConfig& config);

// Range/invariant checks; throws config_error naming the key.
void validate(const ScenarioConfig& config);

// Linear-domain physical constants derived once from the config.
radio::RadioParams radio_params(const ScenarioConfig& config);

} // namespace uavsim::cfg
