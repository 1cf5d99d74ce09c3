#include "radio.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace uavsim::radio {

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw std::domain_error("radio: " + what);
}

} // namespace

void RadioParams::validate() const {
    if (!(tx_power_q > 0.0)) throw std::invalid_argument("radio: tx_power_q must be > 0");
    if (!(antenna_w > 0.0)) throw std::invalid_argument("radio: antenna_w must be > 0");
    if (!(thermal_noise_v0 >= 0.0)) throw std::invalid_argument("radio: thermal_noise_v0 must be >= 0");
    if (!(pathloss_alpha >= 2.0)) throw std::invalid_argument("radio: pathloss_alpha must be >= 2");
    if (!(bandwidth_beta > 0.0)) throw std::invalid_argument("radio: bandwidth_beta must be > 0");
    if (num_bands_n < 1) throw std::invalid_argument("radio: num_bands_n must be >= 1");
    if (!(intensity_const_c > 0.0)) throw std::invalid_argument("radio: intensity_const_c must be > 0");
}

void LinkGeometry::validate() const {
    if (!(distance_g > 0.0)) throw std::invalid_argument("radio: distance_g must be > 0");
    for (double d : interferer_distances)
        if (!(d > 0.0)) throw std::invalid_argument("radio: interferer distance must be > 0");
}

double sinr(const RadioParams& params, const LinkGeometry& geom) {
    params.validate();
    geom.validate();
    const double qw = params.tx_power_q * params.antenna_w;
    const double signal = qw * std::pow(geom.distance_g, -params.pathloss_alpha);
    double denom = params.thermal_noise_v0;
    for (double d : geom.interferer_distances)
        denom += qw * std::pow(d, -params.pathloss_alpha);
    if (denom <= 0.0)
        fail("zero denominator: noiseless link with no interferers is ill-posed");
    return signal / denom;
}

double data_rate(const RadioParams& params, double sinr_value) {
    params.validate();
    if (sinr_value < 0.0) fail("sinr must be >= 0");
    return params.bandwidth_beta * std::log2(1.0 + sinr_value);
}

double per_ue_capacity(const RadioParams& params, double sir,
                       std::uint32_t below_threshold_y) {
    params.validate();
    if (below_threshold_y == 0) fail("below_threshold_y must be >= 1 (no users counted)");
    if (!(sir > 0.0)) fail("sir must be > 0");
    const double share =
        params.bandwidth_beta /
        (static_cast<double>(below_threshold_y) * static_cast<double>(params.num_bands_n));
    return share * std::log2(1.0 + sir);
}

double network_intensity(const RadioParams& params, double distance_g,
                         double sir) {
    params.validate();
    if (!(distance_g > 0.0)) fail("distance_g must be > 0");
    if (!(sir > 0.0)) fail("sir must be > 0");
    const double area = std::numbers::pi * distance_g * distance_g;
    return (params.intensity_const_c / area) *
           std::pow(1.0 / sir, params.pathloss_alpha);
}

double per_ue_capacity_intensity_form(const RadioParams& params,
                                      double arrival_lambda, double distance_g,
                                      std::uint32_t below_threshold_y) {
    params.validate();
    if (!(arrival_lambda > 0.0)) fail("arrival_lambda must be > 0");
    if (!(distance_g > 0.0)) fail("distance_g must be > 0");
    if (below_threshold_y == 0) fail("below_threshold_y must be >= 1");
    const double load = arrival_lambda * std::numbers::pi * distance_g * distance_g /
                        params.intensity_const_c;
    const double share =
        params.bandwidth_beta /
        (static_cast<double>(below_threshold_y) * static_cast<double>(params.num_bands_n));
    return share * std::log2(1.0 + std::pow(load, -params.pathloss_alpha / 2.0));
}

} // namespace uavsim::radio
