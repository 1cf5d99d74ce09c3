#include "uavsim/uavsim.h"

#include "config.hpp"
#include "metrics.hpp"
#include "simengine.hpp"
#include "sweep.hpp"

#include <cstring>
#include <string>

struct uavsim_config {
    uavsim::cfg::ScenarioConfig value;
};

struct uavsim_result {
    uavsim::sim::SimResult value;
};

namespace {

thread_local std::string g_last_error;

uavsim_status fail(uavsim_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

template <typename Fn>
uavsim_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const uavsim::cfg::config_error& e) {
        return fail(UAVSIM_ERR_CONFIG, e.what());
    } catch (const std::exception& e) {
        return fail(UAVSIM_ERR_RUN, e.what());
    }
}

} // namespace

extern "C" {

uavsim_status uavsim_config_create(uavsim_config** out) {
    if (!out) return fail(UAVSIM_ERR_ARGUMENT, "null output pointer");
    return guarded([&] {
        *out = new uavsim_config{uavsim::cfg::default_config()};
        return UAVSIM_OK;
    });
}

uavsim_status uavsim_config_load(const char* path, uavsim_config** out) {
    if (!path || !out) return fail(UAVSIM_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new uavsim_config{uavsim::cfg::load_config(path)};
        return UAVSIM_OK;
    });
}

uavsim_status uavsim_config_parse(const char* text, uavsim_config** out) {
    if (!text || !out) return fail(UAVSIM_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new uavsim_config{uavsim::cfg::parse_config(text)};
        return UAVSIM_OK;
    });
}

uavsim_status uavsim_config_set(uavsim_config* config, const char* key,
                                const char* value) {
    if (!config || !key || !value)
        return fail(UAVSIM_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        uavsim::cfg::apply_override(config->value, key, value,
                                    uavsim::cfg::Source::override_);
        return UAVSIM_OK;
    });
}

uavsim_status uavsim_config_apply_env(uavsim_config* config) {
    if (!config) return fail(UAVSIM_ERR_ARGUMENT, "null config");
    return guarded([&] {
        uavsim::cfg::apply_env_overrides(config->value);
        return UAVSIM_OK;
    });
}

uavsim_status uavsim_config_render(const uavsim_config* config,
                                   char** out_text) {
    if (!config || !out_text) return fail(UAVSIM_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out_text = dup_string(uavsim::cfg::render_config(config->value));
        return UAVSIM_OK;
    });
}

uavsim_status uavsim_config_validate(const uavsim_config* config) {
    if (!config) return fail(UAVSIM_ERR_ARGUMENT, "null config");
    return guarded([&] {
        uavsim::cfg::validate(config->value);
        return UAVSIM_OK;
    });
}

void uavsim_config_free(uavsim_config* config) { delete config; }

uavsim_status uavsim_run(const uavsim_config* config, uint64_t seed,
                         uavsim_result** out) {
    if (!config || !out) return fail(UAVSIM_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new uavsim_result{uavsim::sim::run(config->value, seed)};
        return UAVSIM_OK;
    });
}

size_t uavsim_metric_count(void) {
    return uavsim::metrics::MetricsReport::kCount;
}

const char* uavsim_metric_name(size_t index) {
    if (index >= uavsim::metrics::MetricsReport::kCount) return nullptr;
    return uavsim::metrics::MetricsReport::name(index);
}

uavsim_status uavsim_result_metric(const uavsim_result* result, size_t index,
                                   double* out_value) {
    if (!result || !out_value) return fail(UAVSIM_ERR_ARGUMENT, "null argument");
    if (index >= uavsim::metrics::MetricsReport::kCount)
        return fail(UAVSIM_ERR_ARGUMENT, "metric index out of range");
    *out_value = result->value.report.value(index);
    return UAVSIM_OK;
}

uavsim_status uavsim_result_trace(const uavsim_result* result,
                                  char** out_text) {
    if (!result || !out_text) return fail(UAVSIM_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out_text = dup_string(uavsim::metrics::serialize(result->value.records));
        return UAVSIM_OK;
    });
}

void uavsim_result_free(uavsim_result* result) { delete result; }

uavsim_status uavsim_run_sweep(const uavsim_config* config, const char* axis,
                               const char* out_dir, int write_traces) {
    if (!config || !axis || !out_dir)
        return fail(UAVSIM_ERR_ARGUMENT, "null argument");
    uavsim::sweep::Axis parsed;
    const std::string axis_name = axis;
    if (axis_name == "ue")
        parsed = uavsim::sweep::Axis::ue;
    else if (axis_name == "uav")
        parsed = uavsim::sweep::Axis::uav;
    else
        return fail(UAVSIM_ERR_ARGUMENT, "axis must be 'ue' or 'uav'");
    return guarded([&] {
        uavsim::sweep::run_sweep_to_dir(config->value, parsed, out_dir,
                                        write_traces != 0);
        return UAVSIM_OK;
    });
}

void uavsim_string_free(char* text) { delete[] text; }

const char* uavsim_last_error(void) { return g_last_error.c_str(); }

} // extern "C"
