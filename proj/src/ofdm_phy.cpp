// SPDX-License-Identifier: Apache-2.0
#include "csiauth/ofdm_phy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace csiauth::ofdm {

namespace {

// IEEE 802.11 legacy LTF sequence over subcarriers -26..26 (DC omitted).
constexpr double kLtfLower[26] = {1, 1, -1, -1, 1,  1,  -1, 1, -1, 1, 1, 1, 1,
                                  1, 1, -1, -1, 1,  1,  -1, 1, -1, 1, 1, 1, 1};
constexpr double kLtfUpper[26] = {1,  -1, -1, 1,  1, -1, 1, -1, 1, -1, -1, -1, -1,
                                  -1, 1,  1,  -1, -1, 1, -1, 1, -1, 1,  1,  1,  1};

}  // namespace

std::vector<double> CsiVector::magnitudes() const {
    std::vector<double> mags(estimates.size());
    for (std::size_t m = 0; m < estimates.size(); ++m) {
        mags[m] = std::abs(estimates[m]);
    }
    return mags;
}

const LtfSymbol& standard_ltf() {
    static const LtfSymbol ltf = [] {
        LtfSymbol s;
        s.values.reserve(52);
        s.values.insert(s.values.end(), std::begin(kLtfLower), std::end(kLtfLower));
        s.values.insert(s.values.end(), std::begin(kLtfUpper), std::end(kLtfUpper));
        return s;
    }();
    return ltf;
}

const std::vector<int>& logical_subcarrier_indices() {
    static const std::vector<int> indices = [] {
        std::vector<int> v;
        for (int k = -26; k <= 26; ++k) {
            if (k != 0) {
                v.push_back(k);
            }
        }
        return v;
    }();
    return indices;
}

std::vector<int> occupied_bin_map(int total_subcarriers) {
    std::vector<int> bins;
    bins.reserve(52);
    for (int k : logical_subcarrier_indices()) {
        bins.push_back(k >= 0 ? k : k + total_subcarriers);
    }
    return bins;
}

namespace {

std::vector<double> tap_sample_delays(const chan::ChannelState& state, const OfdmConfig& config,
                                      bool* beyond_cp) {
    const auto& delays = state.pdp->tap_delays_ns;
    std::vector<double> samples(delays.size());
    *beyond_cp = false;
    for (std::size_t l = 0; l < delays.size(); ++l) {
        samples[l] = delays[l] / config.sample_period_ns();
        if (delays[l] > config.cyclic_prefix_ns()) {
            *beyond_cp = true;
        }
        if (samples[l] >= config.total_subcarriers) {
            throw std::domain_error("channel_frequency_response: tap delay exceeds the DFT span");
        }
    }
    return samples;
}

std::complex<double> dft_at_bin(const chan::ChannelState& state,
                                const std::vector<double>& samples, int bin, int total) {
    std::complex<double> h{0.0, 0.0};
    for (std::size_t l = 0; l < state.taps.size(); ++l) {
        const double phase = -2.0 * std::numbers::pi * bin * samples[l] / total;
        h += state.taps[l] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return h;
}

}  // namespace

CfrResult channel_frequency_response(const chan::ChannelState& state, const OfdmConfig& config) {
    CfrResult result;
    const std::vector<double> samples =
        tap_sample_delays(state, config, &result.beyond_cp_span);
    const std::vector<int> bins = occupied_bin_map(config.total_subcarriers);
    result.values.reserve(bins.size());
    for (int bin : bins) {
        result.values.push_back(dft_at_bin(state, samples, bin, config.total_subcarriers));
    }
    return result;
}

std::vector<std::complex<double>> cfr_all_bins(const chan::ChannelState& state,
                                               const OfdmConfig& config) {
    bool beyond_cp = false;
    const std::vector<double> samples = tap_sample_delays(state, config, &beyond_cp);
    std::vector<std::complex<double>> values(config.total_subcarriers);
    for (int bin = 0; bin < config.total_subcarriers; ++bin) {
        values[bin] = dft_at_bin(state, samples, bin, config.total_subcarriers);
    }
    return values;
}

AwgnResult add_awgn(std::span<const std::complex<double>> signal, double snr_db, Rng& rng,
                    OfdmConfig::SnrReference reference) {
    if (signal.empty()) {
        throw std::invalid_argument("add_awgn: empty signal");
    }
    AwgnResult result;
    result.samples.assign(signal.begin(), signal.end());
    if (std::isinf(snr_db) && snr_db > 0.0) {
        return result;  // no-noise sentinel
    }

    double reference_power = 1.0;
    if (reference == OfdmConfig::SnrReference::RxPower) {
        reference_power = 0.0;
        for (const auto& x : signal) {
            reference_power += std::norm(x);
        }
        reference_power /= static_cast<double>(signal.size());
    }
    if (reference_power == 0.0) {
        result.zero_power_input = true;
        result.noise_variance = 1.0;
    } else {
        result.noise_variance = reference_power / std::pow(10.0, snr_db / 10.0);
    }
    for (auto& x : result.samples) {
        x += rng.complex_gaussian(result.noise_variance);
    }
    return result;
}

CsiVector ls_estimate(std::span<const std::complex<double>> received, const LtfSymbol& ltf) {
    if (received.size() != ltf.values.size()) {
        throw std::invalid_argument("ls_estimate: received length does not match the LTF");
    }
    CsiVector csi;
    csi.estimates.resize(received.size());
    for (std::size_t m = 0; m < received.size(); ++m) {
        csi.estimates[m] = received[m] / ltf.values[m];
    }
    return csi;
}

CsiVector simulate_csi(const chan::ChannelState& state, double snr_db, const OfdmConfig& config,
                       Rng& rng) {
    const LtfSymbol& ltf = standard_ltf();
    CfrResult cfr = channel_frequency_response(state, config);

    std::vector<std::complex<double>> transmitted(cfr.values.size());
    for (std::size_t m = 0; m < cfr.values.size(); ++m) {
        transmitted[m] = ltf.values[m] * cfr.values[m];
    }
    AwgnResult noisy = add_awgn(transmitted, snr_db, rng, config.snr_reference);

    CsiVector csi = ls_estimate(noisy.samples, ltf);
    csi.meta.snr_db = snr_db;
    csi.meta.source = "sim";
    csi.meta.zero_power_noise = noisy.zero_power_input;
    csi.meta.beyond_cp_span = cfr.beyond_cp_span;
    return csi;
}

}  // namespace csiauth::ofdm
