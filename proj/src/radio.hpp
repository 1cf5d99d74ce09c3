#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace uavsim::radio {

// Physical-layer constants in linear units. tx_power_q and thermal_noise_v0
// are milliwatts, antenna_w is a unitless gain, bandwidth_beta is Hz.
struct RadioParams {
    double tx_power_q = 1.0;
    double antenna_w = 1.0;
    double thermal_noise_v0 = 0.0;
    double pathloss_alpha = 4.0;
    double bandwidth_beta = 10e6;
    std::uint32_t num_bands_n = 1;
    double intensity_const_c = 1.0;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// Serving-link distance plus one distance per co-channel interferer, meters.
struct LinkGeometry {
    double distance_g = 1.0;
    std::vector<double> interferer_distances;

    void validate() const;
};

// Signal to interference-plus-noise ratio of the serving link:
//   Q*W*G^-a / (sum_i Q*W*d_i^-a + V0)
// A noiseless link with no interferers has a zero denominator and is
// rejected as ill-posed.
double sinr(const RadioParams& params, const LinkGeometry& geom);

// Achievable rate in bit/s: beta * log2(1 + sinr).
double data_rate(const RadioParams& params, double sinr_value);

// Per-UE capacity in bit/s: (beta / (y*N)) * log2(1 + sir), where y is the
// number of users whose SIR sits below the threshold value.
double per_ue_capacity(const RadioParams& params, double sir,
                       std::uint32_t below_threshold_y);

// Network intensity (per m^2) seen by a UE at serving distance G:
//   (c / (pi*G^2)) * (1/sir)^a
double network_intensity(const RadioParams& params, double distance_g,
                         double sir);

// Intensity-form per-UE capacity estimator:
//   (beta / (y*N)) * log2(1 + (lambda*pi*G^2 / c)^(-a/2))
// Kept separate from per_ue_capacity: the two forms do not agree
// algebraically and this one is an estimator over the arrival rate.
double per_ue_capacity_intensity_form(const RadioParams& params,
                                      double arrival_lambda, double distance_g,
                                      std::uint32_t below_threshold_y);

} // namespace uavsim::radio
