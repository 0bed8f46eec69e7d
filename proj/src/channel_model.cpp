// SPDX-License-Identifier: Apache-2.0
#include "csiauth/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "csiauth/errors.hpp"

namespace csiauth::chan {

namespace {

// Cluster tables from IEEE 802.11-03/940r4 Appendix C (NLOS). Each cluster
// lists per-tap powers in dB starting at `first_tap` into the shared delay
// grid of its model.
struct Cluster {
    int first_tap;
    std::vector<double> powers_db;
};

struct ModelTable {
    std::vector<double> delays_ns;
    std::vector<Cluster> clusters;
};

const ModelTable& model_table(TgnModelId id) {
    static const ModelTable b{
        {0, 10, 20, 30, 40, 50, 60, 70, 80},
        {{0, {0.0, -5.4, -10.8, -16.2, -21.7}},
         {2, {-3.2, -6.3, -9.4, -12.5, -15.6, -18.7, -21.8}}}};
    static const ModelTable c{
        {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 110, 140, 170, 200},
        {{0, {0.0, -2.1, -4.3, -6.5, -8.6, -10.8, -13.0, -15.2, -17.3, -19.5}},
         {6, {-5.0, -7.2, -9.3, -11.5, -13.7, -15.8, -18.0, -20.2}}}};
    static const ModelTable d{
        {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 110, 140, 170, 200, 240, 290, 340, 390},
        {{0, {0.0, -0.9, -1.7, -2.6, -3.5, -4.3, -5.2, -6.1, -6.9, -7.8, -9.0, -11.1, -13.7,
              -16.3, -19.3, -23.2}},
         {10, {-6.6, -9.5, -12.1, -14.7, -17.4, -21.9, -25.5}},
         {14, {-18.8, -23.2, -25.2, -26.7}}}};
    static const ModelTable e{
        {0, 10, 20, 30, 50, 80, 110, 140, 180, 230, 280, 330, 380, 430, 490, 560, 640, 730},
        {{0, {-2.6, -3.0, -3.5, -3.9, -4.5, -5.6, -6.9, -8.2, -9.8, -11.7, -13.9, -16.1, -18.3,
              -20.5, -22.9}},
         {4, {-1.8, -3.2, -4.5, -5.8, -7.1, -9.9, -10.3, -14.3, -14.7, -18.7, -19.9, -22.4}},
         {8, {-7.9, -9.6, -14.2, -13.8, -18.6, -18.1, -22.8}},
         {14, {-20.6, -20.5, -20.7, -24.6}}}};
    static const ModelTable f{
        {0, 10, 20, 30, 50, 80, 110, 140, 180, 230, 280, 330, 400, 490, 600, 730, 880, 1050},
        {{0, {-3.3, -3.6, -3.9, -4.2, -4.6, -5.3, -6.2, -7.1, -8.2, -9.5, -11.0, -12.5, -14.3,
              -16.7, -19.9}},
         {4, {-1.8, -2.8, -3.5, -4.4, -5.3, -7.4, -7.0, -10.3, -10.4, -13.8, -15.7, -19.9}},
         {8, {-5.7, -6.7, -10.4, -9.6, -14.1, -12.7, -18.5}},
         {12, {-8.8, -13.3, -18.7}},
         {14, {-12.9, -14.2}},
         {16, {-16.3, -21.2}}}};
    switch (id) {
        case TgnModelId::B: return b;
        case TgnModelId::C: return c;
        case TgnModelId::D: return d;
        case TgnModelId::E: return e;
        case TgnModelId::F: return f;
    }
    throw std::invalid_argument("unknown TGn model");
}

}  // namespace

TgnModelId parse_tgn_model(std::string_view name) {
    if (name.size() == 1) {
        switch (name[0]) {
            case 'B': case 'b': return TgnModelId::B;
            case 'C': case 'c': return TgnModelId::C;
            case 'D': case 'd': return TgnModelId::D;
            case 'E': case 'e': return TgnModelId::E;
            case 'F': case 'f': return TgnModelId::F;
        }
    }
    throw UsageError("unknown TGn model '" + std::string(name) + "' (expected B..F)");
}

std::string to_string(TgnModelId id) {
    switch (id) {
        case TgnModelId::B: return "B";
        case TgnModelId::C: return "C";
        case TgnModelId::D: return "D";
        case TgnModelId::E: return "E";
        case TgnModelId::F: return "F";
    }
    return "?";
}

TgnModel TgnModel::from_id(TgnModelId id) {
    switch (id) {
        case TgnModelId::B: return {id, 15.0, 2};
        case TgnModelId::C: return {id, 30.0, 2};
        case TgnModelId::D: return {id, 50.0, 3};
        case TgnModelId::E: return {id, 100.0, 4};
        case TgnModelId::F: return {id, 150.0, 6};
    }
    throw std::invalid_argument("unknown TGn model");
}

double PowerDelayProfile::rms_delay_ns() const {
    double mean = 0.0;
    double second = 0.0;
    for (std::size_t l = 0; l < tap_count(); ++l) {
        mean += tap_powers[l] * tap_delays_ns[l];
        second += tap_powers[l] * tap_delays_ns[l] * tap_delays_ns[l];
    }
    return std::sqrt(std::max(0.0, second - mean * mean));
}

double DopplerParams::doppler_hz() const { return doppler_spread(v0_mps, wavelength_m); }

double doppler_spread(double v0_mps, double wavelength_m) {
    if (wavelength_m <= 0.0) {
        throw std::domain_error("doppler_spread: wavelength must be positive");
    }
    if (v0_mps < 0.0) {
        throw std::domain_error("doppler_spread: speed must be non-negative");
    }
    return v0_mps / wavelength_m;
}

double autocorrelation(double f_d_hz, double dt_s, double bell_constant) {
    if (f_d_hz < 0.0) {
        throw std::domain_error("autocorrelation: Doppler spread must be non-negative");
    }
    if (dt_s < 0.0) {
        throw std::domain_error("autocorrelation: time lag must be non-negative");
    }
    if (bell_constant <= 0.0) {
        throw std::domain_error("autocorrelation: Bell constant must be positive");
    }
    return std::exp(-2.0 * std::numbers::pi * f_d_hz * dt_s / std::sqrt(bell_constant));
}

double equivalent_interval(double d_bm_m, double f_d_hz, double wavelength_m) {
    if (f_d_hz <= 0.0) {
        throw std::domain_error("equivalent_interval: Doppler spread must be positive");
    }
    if (wavelength_m <= 0.0) {
        throw std::domain_error("equivalent_interval: wavelength must be positive");
    }
    if (d_bm_m < 0.0) {
        throw std::domain_error("equivalent_interval: distance must be non-negative");
    }
    return d_bm_m / (f_d_hz * wavelength_m);
}

double spatial_correlation(double d_bm_m, double f_d_hz, double wavelength_m,
                           double bell_constant) {
    if (d_bm_m == 0.0) {
        return 1.0;
    }
    return autocorrelation(f_d_hz, equivalent_interval(d_bm_m, f_d_hz, wavelength_m),
                           bell_constant);
}

PowerDelayProfile build_pdp(TgnModelId model) {
    const ModelTable& table = model_table(model);
    PowerDelayProfile pdp;
    pdp.tap_delays_ns = table.delays_ns;
    pdp.tap_powers.assign(table.delays_ns.size(), 0.0);
    for (const Cluster& cluster : table.clusters) {
        for (std::size_t i = 0; i < cluster.powers_db.size(); ++i) {
            pdp.tap_powers[cluster.first_tap + i] += std::pow(10.0, cluster.powers_db[i] / 10.0);
        }
    }
    const double total = std::accumulate(pdp.tap_powers.begin(), pdp.tap_powers.end(), 0.0);
    for (double& p : pdp.tap_powers) {
        p /= total;
    }
    return pdp;
}

PowerDelayProfile exponential_pdp(double rms_delay_ns, double tap_spacing_ns) {
    if (rms_delay_ns < 0.0) {
        throw std::domain_error("exponential_pdp: RMS delay must be non-negative");
    }
    if (tap_spacing_ns <= 0.0) {
        throw std::domain_error("exponential_pdp: tap spacing must be positive");
    }
    PowerDelayProfile pdp;
    if (rms_delay_ns == 0.0) {
        pdp.tap_delays_ns = {0.0};
        pdp.tap_powers = {1.0};
        return pdp;
    }

    // Truncation at 10x the requested spread keeps the tail below 5e-5.
    const int taps = std::max<int>(2, static_cast<int>(std::ceil(10.0 * rms_delay_ns /
                                                                 tap_spacing_ns)) + 1);
    pdp.tap_delays_ns.resize(taps);
    pdp.tap_powers.resize(taps);
    for (int l = 0; l < taps; ++l) {
        pdp.tap_delays_ns[l] = l * tap_spacing_ns;
    }

    auto sampled_rms = [&](double decay_ns) {
        double total = 0.0, mean = 0.0, second = 0.0;
        for (int l = 0; l < taps; ++l) {
            const double p = std::exp(-pdp.tap_delays_ns[l] / decay_ns);
            total += p;
            mean += p * pdp.tap_delays_ns[l];
            second += p * pdp.tap_delays_ns[l] * pdp.tap_delays_ns[l];
        }
        mean /= total;
        second /= total;
        return std::sqrt(std::max(0.0, second - mean * mean));
    };

    // The sampled RMS is monotone in the decay constant; bisect to match.
    double lo = rms_delay_ns * 1e-3;
    double hi = rms_delay_ns * 1e3;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (sampled_rms(mid) < rms_delay_ns ? lo : hi) = mid;
    }
    const double decay = 0.5 * (lo + hi);

    double total = 0.0;
    for (int l = 0; l < taps; ++l) {
        pdp.tap_powers[l] = std::exp(-pdp.tap_delays_ns[l] / decay);
        total += pdp.tap_powers[l];
    }
    for (double& p : pdp.tap_powers) {
        p /= total;
    }
    return pdp;
}

ChannelState sample_initial_channel(std::shared_ptr<const PowerDelayProfile> pdp, Rng& rng) {
    if (!pdp || pdp->tap_count() == 0) {
        throw std::invalid_argument("sample_initial_channel: empty power delay profile");
    }
    ChannelState state;
    state.pdp = std::move(pdp);
    state.taps.resize(state.pdp->tap_count());
    for (std::size_t l = 0; l < state.taps.size(); ++l) {
        state.taps[l] = rng.complex_gaussian(state.pdp->tap_powers[l]);
    }
    return state;
}

ChannelState evolve_channel(const ChannelState& state, double r, Rng& rng) {
    if (r < 0.0 || r > 1.0) {
        throw std::domain_error("evolve_channel: correlation coefficient outside [0, 1]");
    }
    ChannelState next;
    next.pdp = state.pdp;
    next.taps.resize(state.taps.size());
    const double innovation = std::sqrt(1.0 - r * r);
    for (std::size_t l = 0; l < state.taps.size(); ++l) {
        next.taps[l] = r * state.taps[l] +
                       innovation * rng.complex_gaussian(state.pdp->tap_powers[l]);
    }
    return next;
}

ChannelState attacker_channel(const ChannelState& state, double rho, double theta, Rng& rng) {
    if (rho < 0.0 || rho > 1.0) {
        throw std::domain_error("attacker_channel: correlation coefficient outside [0, 1]");
    }
    if (theta <= 0.0) {
        throw std::domain_error("attacker_channel: power ratio Theta must be positive");
    }
    ChannelState mallory;
    mallory.pdp = state.pdp;
    mallory.taps.resize(state.taps.size());
    const double innovation = std::sqrt(1.0 - rho * rho);
    const double scale = 1.0 / std::sqrt(theta);
    for (std::size_t l = 0; l < state.taps.size(); ++l) {
        mallory.taps[l] = scale * (rho * state.taps[l] +
                                   innovation * rng.complex_gaussian(state.pdp->tap_powers[l]));
    }
    return mallory;
}

}  // namespace csiauth::chan
