// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "csiauth/ofdm_phy.hpp"

using namespace csiauth;
using namespace csiauth::ofdm;

namespace {

// Brute-force M'-point DFT of the zero-padded tap vector, independent of
// the implementation under test.
std::vector<std::complex<double>> dft_oracle(const chan::ChannelState& state,
                                             const OfdmConfig& config) {
    std::vector<std::complex<double>> padded(config.total_subcarriers, {0.0, 0.0});
    for (std::size_t l = 0; l < state.taps.size(); ++l) {
        const int n = static_cast<int>(
            std::lround(state.pdp->tap_delays_ns[l] / config.sample_period_ns()));
        padded[n] += state.taps[l];
    }
    std::vector<std::complex<double>> bins(config.total_subcarriers);
    for (int m = 0; m < config.total_subcarriers; ++m) {
        std::complex<double> acc{0.0, 0.0};
        for (int n = 0; n < config.total_subcarriers; ++n) {
            const double phase = -2.0 * std::numbers::pi * m * n / config.total_subcarriers;
            acc += padded[n] * std::polar(1.0, phase);
        }
        bins[m] = acc;
    }
    return bins;
}

chan::ChannelState state_from(std::vector<double> delays_ns,
                              std::vector<std::complex<double>> taps) {
    auto pdp = std::make_shared<chan::PowerDelayProfile>();
    pdp->tap_delays_ns = std::move(delays_ns);
    pdp->tap_powers.assign(pdp->tap_delays_ns.size(), 1.0 / pdp->tap_delays_ns.size());
    chan::ChannelState state;
    state.pdp = std::move(pdp);
    state.taps = std::move(taps);
    return state;
}

}  // namespace

TEST_SUITE("ofdm_phy") {

TEST_CASE("standard LTF is the fixed 52-entry BPSK sequence") {
    const LtfSymbol& ltf = standard_ltf();
    REQUIRE(ltf.values.size() == 52);
    for (double v : ltf.values) {
        CHECK(v * v == 1.0);
    }
    CHECK(ltf.values[0] == 1.0);
    CHECK(ltf.values[1] == 1.0);
    CHECK(ltf.values[2] == -1.0);
    CHECK(ltf.values[3] == -1.0);
    CHECK(&standard_ltf() == &ltf);  // stable across calls
    CHECK(standard_ltf().values == ltf.values);
}

TEST_CASE("occupied bins cover -26..-1,+1..+26 without DC") {
    const std::vector<int> bins = occupied_bin_map(64);
    REQUIRE(bins.size() == 52);
    CHECK(bins.front() == 38);  // -26 mod 64
    CHECK(bins[25] == 63);      // -1 mod 64
    CHECK(bins[26] == 1);
    CHECK(bins.back() == 26);
    for (int bin : bins) {
        CHECK(bin != 0);
        CHECK(bin != 32);
    }
}

TEST_CASE("flat single-tap channel has unit response everywhere") {
    const auto state = state_from({0.0}, {{1.0, 0.0}});
    const CfrResult cfr = channel_frequency_response(state, {});
    REQUIRE(cfr.values.size() == 52);
    for (const auto& h : cfr.values) {
        CHECK(h.real() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(h.imag() == doctest::Approx(0.0).epsilon(1e-15));
    }
    CHECK_FALSE(cfr.beyond_cp_span);
}

TEST_CASE("two equal taps null out the Nyquist bin") {
    const auto state = state_from({0.0, 50.0}, {{0.5, 0.0}, {0.5, 0.0}});
    const auto bins = cfr_all_bins(state, {});
    CHECK(std::abs(bins[32]) <= 1e-12);  // 0.5 * |1 + e^{-j pi}|
    CHECK(std::abs(bins[0]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("occupied-bin response matches the brute-force DFT oracle") {
    Rng rng(31);
    auto pdp = std::make_shared<const chan::PowerDelayProfile>(
        chan::build_pdp(chan::TgnModelId::D));
    const chan::ChannelState state = chan::sample_initial_channel(pdp, rng);
    const OfdmConfig config;
    const CfrResult cfr = channel_frequency_response(state, config);
    const auto oracle = dft_oracle(state, config);
    const std::vector<int> bins = occupied_bin_map(config.total_subcarriers);
    for (std::size_t m = 0; m < bins.size(); ++m) {
        CHECK(std::abs(cfr.values[m] - oracle[bins[m]]) <= 1e-12);
    }
}

TEST_CASE("frequency response is linear in the taps") {
    Rng rng(37);
    auto pdp = std::make_shared<const chan::PowerDelayProfile>(
        chan::build_pdp(chan::TgnModelId::C));
    const chan::ChannelState h1 = chan::sample_initial_channel(pdp, rng);
    const chan::ChannelState h2 = chan::sample_initial_channel(pdp, rng);
    const double a = 0.7, b = -1.3;
    chan::ChannelState combo;
    combo.pdp = pdp;
    combo.taps.resize(h1.taps.size());
    for (std::size_t l = 0; l < h1.taps.size(); ++l) {
        combo.taps[l] = a * h1.taps[l] + b * h2.taps[l];
    }
    const auto r1 = channel_frequency_response(h1, {});
    const auto r2 = channel_frequency_response(h2, {});
    const auto rc = channel_frequency_response(combo, {});
    for (std::size_t m = 0; m < rc.values.size(); ++m) {
        CHECK(std::abs(rc.values[m] - (a * r1.values[m] + b * r2.values[m])) <= 1e-12);
    }
}

TEST_CASE("taps past the guard interval raise the flag") {
    Rng rng(41);
    auto pdp = std::make_shared<const chan::PowerDelayProfile>(
        chan::build_pdp(chan::TgnModelId::F));  // delays reach 1050 ns > 800 ns
    const chan::ChannelState state = chan::sample_initial_channel(pdp, rng);
    CHECK(channel_frequency_response(state, {}).beyond_cp_span);
    const CsiVector csi = simulate_csi(state, kNoNoise, {}, rng);
    CHECK(csi.meta.beyond_cp_span);
}

TEST_CASE("no-noise sentinel leaves the signal untouched") {
    Rng rng(43);
    std::vector<std::complex<double>> signal{{1.0, 2.0}, {-0.5, 0.25}};
    const AwgnResult out = add_awgn(signal, kNoNoise, rng);
    CHECK(out.samples == signal);
    CHECK(out.noise_variance == 0.0);
}

TEST_CASE("AWGN hits the requested SNR") {
    Rng rng(47);
    const int n = 100000;
    std::vector<std::complex<double>> signal(n, {1.0, 0.0});
    const AwgnResult out = add_awgn(signal, 10.0, rng);
    double noise_power = 0.0;
    for (int i = 0; i < n; ++i) {
        noise_power += std::norm(out.samples[i] - signal[i]);
    }
    noise_power /= n;
    const double measured_snr_db = 10.0 * std::log10(1.0 / noise_power);
    CHECK(std::abs(measured_snr_db - 10.0) <= 0.1);
}

TEST_CASE("zero-power input yields flagged unit-variance noise") {
    Rng rng(53);
    std::vector<std::complex<double>> zeros(64, {0.0, 0.0});
    const AwgnResult out = add_awgn(zeros, 20.0, rng);
    CHECK(out.zero_power_input);
    CHECK(out.noise_variance == 1.0);
    double any = 0.0;
    for (const auto& x : out.samples) {
        any += std::norm(x);
    }
    CHECK(any > 0.0);
}

TEST_CASE("LS estimation inverts the noiseless channel exactly") {
    const LtfSymbol& ltf = standard_ltf();
    std::vector<std::complex<double>> received(ltf.values.begin(), ltf.values.end());
    const CsiVector flat = ls_estimate(received, ltf);
    for (const auto& e : flat.estimates) {
        CHECK(e == std::complex<double>(1.0, 0.0));
    }

    Rng rng(59);
    auto pdp = std::make_shared<const chan::PowerDelayProfile>(
        chan::build_pdp(chan::TgnModelId::B));
    const chan::ChannelState state = chan::sample_initial_channel(pdp, rng);
    const CfrResult cfr = channel_frequency_response(state, {});
    std::vector<std::complex<double>> tx(cfr.values.size());
    for (std::size_t m = 0; m < tx.size(); ++m) {
        tx[m] = ltf.values[m] * cfr.values[m];
    }
    const CsiVector est = ls_estimate(tx, ltf);
    CHECK(est.estimates == cfr.values);
}

TEST_CASE("LS error variance tracks 1/SNR") {
    Rng rng(61);
    auto pdp = std::make_shared<const chan::PowerDelayProfile>(
        chan::build_pdp(chan::TgnModelId::B));
    const OfdmConfig config;

    auto nmse_at = [&](double snr_db, int trials) {
        double err = 0.0, ref = 0.0;
        for (int t = 0; t < trials; ++t) {
            const chan::ChannelState state = chan::sample_initial_channel(pdp, rng);
            const CfrResult truth = channel_frequency_response(state, config);
            const CsiVector est = simulate_csi(state, snr_db, config, rng);
            for (std::size_t m = 0; m < truth.values.size(); ++m) {
                err += std::norm(est.estimates[m] - truth.values[m]);
                ref += std::norm(truth.values[m]);
            }
        }
        return err / ref;
    };

    CHECK(nmse_at(50.0, 10000) <= 1e-4);  // LS NMSE ~ 1/SNR = 1e-5
    const double nmse_10 = nmse_at(10.0, 10000);
    const double nmse_13 = nmse_at(13.0, 10000);
    CHECK(nmse_10 / nmse_13 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("simulate_csi composes the chain deterministically") {
    const auto flat = state_from({0.0}, {{1.0, 0.0}});
    Rng rng(67);
    const CsiVector csi = simulate_csi(flat, kNoNoise, {}, rng);
    for (const auto& e : csi.estimates) {
        CHECK(std::abs(e - std::complex<double>(1.0, 0.0)) <= 1e-15);
    }
    CHECK(csi.meta.snr_db.has_value());

    auto pdp = std::make_shared<const chan::PowerDelayProfile>(
        chan::build_pdp(chan::TgnModelId::B));
    Rng a(71), b(71);
    const chan::ChannelState sa = chan::sample_initial_channel(pdp, a);
    const chan::ChannelState sb = chan::sample_initial_channel(pdp, b);
    const CsiVector ca = simulate_csi(sa, 15.0, {}, a);
    const CsiVector cb = simulate_csi(sb, 15.0, {}, b);
    CHECK(ca.estimates == cb.estimates);
}

TEST_CASE("high-SNR magnitudes match the noiseless response closely") {
    Rng rng(73);
    auto pdp = std::make_shared<const chan::PowerDelayProfile>(
        chan::build_pdp(chan::TgnModelId::B));
    const chan::ChannelState state = chan::sample_initial_channel(pdp, rng);
    const CfrResult truth = channel_frequency_response(state, {});
    const CsiVector est = simulate_csi(state, 50.0, {}, rng);
    double err = 0.0, ref = 0.0;
    for (std::size_t m = 0; m < truth.values.size(); ++m) {
        const double diff = std::abs(est.estimates[m]) - std::abs(truth.values[m]);
        err += diff * diff;
        ref += std::norm(truth.values[m]);
    }
    CHECK(std::sqrt(err / ref) < 0.01);
}

}  // TEST_SUITE
