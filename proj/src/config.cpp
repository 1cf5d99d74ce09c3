#include "config.hpp"

#include "units.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace uavsim::cfg {

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

double parse_double(const std::string& text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw std::runtime_error("not a number: '" + text + "'");
    return v;
}

template <typename Int>
Int parse_int(const std::string& text) {
    Int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw std::runtime_error("not an integer: '" + text + "'");
    return v;
}

struct Field {
    const char* name;
    Source default_source;
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

const std::vector<Field>& fields() {
    auto d = [](double ScenarioConfig::* member) {
        return std::pair{
            std::function([member](ScenarioConfig& c, const std::string& v) {
                c.*member = parse_double(v);
            }),
            std::function([member](const ScenarioConfig& c) {
                return format_double(c.*member);
            })};
    };
    auto u32 = [](std::uint32_t ScenarioConfig::* member) {
        return std::pair{
            std::function([member](ScenarioConfig& c, const std::string& v) {
                c.*member = parse_int<std::uint32_t>(v);
            }),
            std::function([member](const ScenarioConfig& c) {
                return std::to_string(c.*member);
            })};
    };
    auto u64 = [](std::uint64_t ScenarioConfig::* member) {
        return std::pair{
            std::function([member](ScenarioConfig& c, const std::string& v) {
                c.*member = parse_int<std::uint64_t>(v);
            }),
            std::function([member](const ScenarioConfig& c) {
                return std::to_string(c.*member);
            })};
    };
    auto b = [](bool ScenarioConfig::* member) {
        return std::pair{
            std::function([member](ScenarioConfig& c, const std::string& v) {
                if (v != "0" && v != "1") throw std::runtime_error("expected 0 or 1");
                c.*member = v == "1";
            }),
            std::function([member](const ScenarioConfig& c) {
                return std::string(c.*member ? "1" : "0");
            })};
    };
    auto opt = [](std::optional<double> ScenarioConfig::* member) {
        return std::pair{
            std::function([member](ScenarioConfig& c, const std::string& v) {
                if (v == "auto")
                    c.*member = std::nullopt;
                else
                    c.*member = parse_double(v);
            }),
            std::function([member](const ScenarioConfig& c) {
                return (c.*member) ? format_double(*(c.*member))
                                   : std::string("auto");
            })};
    };
    auto str = [](std::string ScenarioConfig::* member) {
        return std::pair{
            std::function([member](ScenarioConfig& c, const std::string& v) {
                c.*member = v;
            }),
            std::function(
                [member](const ScenarioConfig& c) { return c.*member; })};
    };

    static const std::vector<Field> table = [&] {
        std::vector<Field> t;
        auto add = [&t](const char* name, Source src, auto accessors) {
            t.push_back({name, src, accessors.first, accessors.second});
        };
        add("a", Source::scenario_default, d(&ScenarioConfig::a));
        add("m", Source::scenario_default, d(&ScenarioConfig::m));
        add("k", Source::scenario_default, u32(&ScenarioConfig::k));
        add("u", Source::engine_default, u32(&ScenarioConfig::u));
        add("g", Source::scenario_default, d(&ScenarioConfig::g));
        add("mu", Source::scenario_default, d(&ScenarioConfig::mu));
        add("alpha", Source::scenario_default, d(&ScenarioConfig::alpha));
        add("beta", Source::scenario_default, d(&ScenarioConfig::beta));
        add("e", Source::engine_default, u32(&ScenarioConfig::e));
        add("max_cm", Source::scenario_default, u32(&ScenarioConfig::max_cm));
        add("max_cu", Source::scenario_default, u32(&ScenarioConfig::max_cu));
        add("n", Source::engine_default, u32(&ScenarioConfig::n));
        add("s", Source::scenario_default, d(&ScenarioConfig::s));
        add("w", Source::scenario_default, d(&ScenarioConfig::w));
        add("q", Source::scenario_default, d(&ScenarioConfig::q));
        add("c", Source::engine_default, d(&ScenarioConfig::c));
        add("horizon", Source::engine_default, d(&ScenarioConfig::horizon));
        add("epoch_interval", Source::engine_default, d(&ScenarioConfig::epoch_interval));
        add("seeds", Source::engine_default, u32(&ScenarioConfig::seeds));
        add("gamma1", Source::engine_default, d(&ScenarioConfig::gamma1));
        add("gamma2", Source::engine_default, d(&ScenarioConfig::gamma2));
        add("gamma3", Source::engine_default, d(&ScenarioConfig::gamma3));
        add("v0_dbm", Source::engine_default, d(&ScenarioConfig::v0_dbm));
        add("t_u", Source::engine_default, u32(&ScenarioConfig::t_u));
        add("r_c", Source::engine_default, d(&ScenarioConfig::r_c));
        add("r_e", Source::engine_default, d(&ScenarioConfig::r_e));
        add("standby", Source::engine_default, u32(&ScenarioConfig::standby));
        add("launch_delay", Source::engine_default, d(&ScenarioConfig::launch_delay));
        add("hello_interval", Source::engine_default, d(&ScenarioConfig::hello_interval));
        add("hello_miss_limit", Source::engine_default, u32(&ScenarioConfig::hello_miss_limit));
        add("kappa", Source::engine_default, d(&ScenarioConfig::kappa));
        add("reset_threshold", Source::engine_default, d(&ScenarioConfig::reset_threshold));
        add("max_iterations", Source::engine_default, u64(&ScenarioConfig::max_iterations));
        add("cell_radius", Source::engine_default, d(&ScenarioConfig::cell_radius));
        add("uav_spawn_radius", Source::engine_default, d(&ScenarioConfig::uav_spawn_radius));
        add("mean_packet_bits", Source::engine_default, d(&ScenarioConfig::mean_packet_bits));
        add("per_iteration_cost", Source::engine_default, d(&ScenarioConfig::per_iteration_cost));
        add("propagation_delay", Source::engine_default, b(&ScenarioConfig::propagation_delay));
        add("nr_th", Source::engine_default, opt(&ScenarioConfig::nr_th));
        add("cf_th", Source::engine_default, opt(&ScenarioConfig::cf_th));
        add("lh_th", Source::engine_default, opt(&ScenarioConfig::lh_th));
        add("failures", Source::engine_default, str(&ScenarioConfig::failures));
        return t;
    }();
    return table;
}

const Field* find_field(const std::string& key) {
    for (const auto& f : fields())
        if (key == f.name) return &f;
    return nullptr;
}

const char* source_name(Source s) {
    switch (s) {
    case Source::scenario_default: return "scenario default";
    case Source::engine_default: return "engine default";
    case Source::file: return "file";
    case Source::env: return "env";
    case Source::override_: return "override";
    }
    return "?";
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

std::vector<std::pair<double, std::uint32_t>>
ScenarioConfig::parsed_failures() const {
    std::vector<std::pair<double, std::uint32_t>> out;
    std::stringstream ss(failures);
    std::string item;
    while (std::getline(ss, item, ';')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw config_error("failures", "expected time:uav_index, got '" + item + "'");
        try {
            const double t = parse_double(trim(item.substr(0, colon)));
            const auto idx = parse_int<std::uint32_t>(trim(item.substr(colon + 1)));
            out.emplace_back(t, idx);
        } catch (const std::exception& e) {
            throw config_error("failures", e.what());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

ScenarioConfig default_config() {
    ScenarioConfig config;
    for (const auto& f : fields()) config.provenance[f.name] = f.default_source;
    return config;
}

void apply_override(ScenarioConfig& config, const std::string& key,
                    const std::string& value, Source source) {
    const Field* field = find_field(key);
    if (!field) throw config_error(key, "unknown key");
    try {
        field->set(config, value);
    } catch (const std::exception& e) {
        throw config_error(key, e.what());
    }
    config.provenance[key] = source;
}

namespace {

// Provenance annotations written by render_config ("# key: source"); parsing
// them back makes the resolved echo a true fixed point.
std::optional<std::pair<std::string, Source>>
parse_source_comment(const std::string& comment) {
    const auto colon = comment.find(':');
    if (colon == std::string::npos) return std::nullopt;
    const std::string key = trim(comment.substr(0, colon));
    const std::string source = trim(comment.substr(colon + 1));
    if (!find_field(key)) return std::nullopt;
    if (source == "scenario default")
        return std::pair{key, Source::scenario_default};
    if (source == "engine default") return std::pair{key, Source::engine_default};
    if (source == "file") return std::pair{key, Source::file};
    if (source == "env") return std::pair{key, Source::env};
    if (source == "override") return std::pair{key, Source::override_};
    return std::nullopt;
}

} // namespace

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig config = default_config();
    std::map<std::string, Source> annotated;
    std::stringstream ss(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        std::string comment;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            comment = trim(line.substr(hash + 1));
            line.erase(hash);
        }
        if (auto annotation = parse_source_comment(comment))
            annotated[annotation->first] = annotation->second;
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("<line " + std::to_string(line_no) + ">",
                               "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        apply_override(config, key, trim(line.substr(eq + 1)), Source::file);
        if (auto it = annotated.find(key); it != annotated.end())
            config.provenance[key] = it->second;
    }
    return config;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error(path, "cannot open config file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

void apply_env_overrides(ScenarioConfig& config) {
    for (const auto& f : fields()) {
        std::string var = "UAVSIM_";
        for (const char* p = f.name; *p; ++p)
            var += static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
        if (const char* value = std::getenv(var.c_str()))
            apply_override(config, f.name, value, Source::env);
    }
}

std::string render_config(const ScenarioConfig& config) {
    std::string out = "# resolved configuration\n";
    for (const auto& f : fields()) {
        const auto it = config.provenance.find(f.name);
        const Source src = it == config.provenance.end() ? f.default_source
                                                         : it->second;
        out += "# ";
        out += f.name;
        out += ": ";
        out += source_name(src);
        out += "\n";
        out += f.name;
        out += " = ";
        out += f.get(config);
        out += "\n";
    }
    return out;
}

void validate(const ScenarioConfig& config) {
    auto require = [](bool ok, const char* key, const char* what) {
        if (!ok) throw config_error(key, what);
    };
    require(config.a > 0, "a", "area side must be > 0");
    require(config.m > 0, "m", "MBS density must be > 0");
    require(config.k >= 1, "k", "need at least one demand zone");
    require(config.g > 0, "g", "radio range must be > 0");
    require(config.mu > 0, "mu", "offered traffic must be > 0");
    require(config.alpha >= 2, "alpha", "pathloss exponent must be >= 2");
    require(config.beta > 0, "beta", "bandwidth must be > 0");
    require(config.e >= 1, "e", "need at least one UE");
    require(config.n >= 1, "n", "need at least one band");
    require(config.s >= 0, "s", "request rate must be >= 0");
    require(config.c > 0, "c", "intensity constant must be > 0");
    require(config.horizon > 0, "horizon", "horizon must be > 0");
    require(config.epoch_interval > 0, "epoch_interval", "epoch interval must be > 0");
    require(config.seeds >= 1, "seeds", "need at least one seed");
    require(config.t_u >= 1, "t_u", "need at least one user slot");
    require(config.r_c > 0, "r_c", "UAV resources must be > 0");
    require(config.r_e > 0, "r_e", "per-UE resources must be > 0");
    require(config.launch_delay >= 0, "launch_delay", "launch delay must be >= 0");
    require(config.hello_interval > 0, "hello_interval", "hello interval must be > 0");
    require(config.hello_miss_limit >= 1, "hello_miss_limit", "miss limit must be >= 1");
    require(config.kappa >= 0 && config.kappa <= 1, "kappa", "kappa must be in [0,1]");
    require(config.reset_threshold >= 0 && config.reset_threshold <= 1,
            "reset_threshold", "reset threshold must be in [0,1]");
    require(config.cell_radius > 0, "cell_radius", "cell radius must be > 0");
    require(config.uav_spawn_radius > 0, "uav_spawn_radius", "spawn radius must be > 0");
    require(config.mean_packet_bits > 0, "mean_packet_bits", "packet size must be > 0");
    require(config.per_iteration_cost >= 0, "per_iteration_cost", "cost must be >= 0");
    require(config.gamma1 >= 0 && config.gamma2 >= 0 && config.gamma3 >= 0,
            "gamma1", "gamma weights must be >= 0");
    for (const auto& [t, idx] : config.parsed_failures()) {
        require(t >= 0, "failures", "failure time must be >= 0");
        require(idx < config.u, "failures", "failure index beyond UAV count");
    }
}

radio::RadioParams radio_params(const ScenarioConfig& config) {
    radio::RadioParams params;
    params.tx_power_q = dbm_to_mw(config.q);
    params.antenna_w = db_to_linear(config.w);
    params.thermal_noise_v0 = dbm_to_mw(config.v0_dbm);
    params.pathloss_alpha = config.alpha;
    params.bandwidth_beta = config.beta;
    params.num_bands_n = config.n;
    params.intensity_const_c = config.c;
    params.validate();
    return params;
}

} // namespace uavsim::cfg
