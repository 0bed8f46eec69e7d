// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "csiauth/rng.hpp"

namespace csiauth::chan {

/// Indoor WLAN TGn multipath environments B-F (IEEE 802.11-03/940r4).
enum class TgnModelId { B, C, D, E, F };

TgnModelId parse_tgn_model(std::string_view name);
std::string to_string(TgnModelId id);

/// Nominal per-model figures: RMS delay spread and cluster count.
struct TgnModel {
    TgnModelId id = TgnModelId::B;
    double rms_delay_ns = 15.0;
    int num_clusters = 2;

    static TgnModel from_id(TgnModelId id);
};

/// Per-tap delays (ns) and mean linear powers sigma^2(l), normalized so the
/// powers sum to one.
struct PowerDelayProfile {
    std::vector<double> tap_delays_ns;  // non-negative, strictly increasing
    std::vector<double> tap_powers;     // linear scale, sums to 1

    std::size_t tap_count() const { return tap_delays_ns.size(); }

    /// Power-weighted RMS delay spread of this profile, in ns.
    double rms_delay_ns() const;
};

/// Bell-shaped Doppler spectrum parameters. The spectrum itself only enters
/// the generator through its autocorrelation, so the shape constant A and
/// the spread f_d = v0 / lambda are all that is kept.
struct DopplerParams {
    double v0_mps = 1.0;
    double wavelength_m = 0.125;
    double bell_constant = 9.0;

    double doppler_hz() const;
};

/// One Rayleigh realization of the tap vector, tied to the profile whose
/// per-tap variances it was drawn from.
struct ChannelState {
    std::vector<std::complex<double>> taps;
    std::shared_ptr<const PowerDelayProfile> pdp;
};

/// Attacker placement: distance from the legitimate transmitter and the
/// Bob/Mallory mean-power ratio Theta = sigma^2_ba / sigma^2_ma.
struct SpatialParams {
    double d_bm_m = 0.0;
    double theta = 1.0;
};

/// f_d = v0 / lambda.
double doppler_spread(double v0_mps, double wavelength_m);

/// Autocorrelation of the Bell Doppler spectrum at lag dt:
/// R(dt) = exp(-2 pi f_d dt / sqrt(A)). Value in (0, 1].
double autocorrelation(double f_d_hz, double dt_s, double bell_constant = 9.0);

/// Time interval equivalent to a spatial separation d_bm at terminal speed
/// f_d * lambda: d_bm / (f_d * lambda).
double equivalent_interval(double d_bm_m, double f_d_hz, double wavelength_m);

/// Spatial correlation rho(d_bm) = R(equivalent interval); exactly 1 when
/// d_bm == 0 regardless of f_d.
double spatial_correlation(double d_bm_m, double f_d_hz, double wavelength_m,
                           double bell_constant = 9.0);

/// Tap delay/power table for a TGn model, cluster powers combined per tap
/// and normalized to unit total power.
PowerDelayProfile build_pdp(TgnModelId model);

/// Single-cluster exponential-decay profile whose sampled RMS delay spread
/// matches the request; for sensitivity experiments outside the TGn tables.
PowerDelayProfile exponential_pdp(double rms_delay_ns, double tap_spacing_ns);

/// Draw h[l] ~ CN(0, sigma^2(l)) independently per tap.
ChannelState sample_initial_channel(std::shared_ptr<const PowerDelayProfile> pdp, Rng& rng);

/// Gauss-Markov step h'[l] = r h[l] + sqrt(1 - r^2) w[l], w ~ CN(0, sigma^2(l));
/// preserves the marginal tap variance.
ChannelState evolve_channel(const ChannelState& state, double r, Rng& rng);

/// Correlated attacker draw (1/sqrt(theta)) (rho h[l] + sqrt(1 - rho^2) w[l]);
/// output tap variance is sigma^2(l) / theta.
ChannelState attacker_channel(const ChannelState& state, double rho, double theta, Rng& rng);

}  // namespace csiauth::chan
