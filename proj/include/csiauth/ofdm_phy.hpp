// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csiauth/channel_model.hpp"
#include "csiauth/rng.hpp"

namespace csiauth::ofdm {

/// Pass as snr_db to disable noise entirely.
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// 802.11n legacy OFDM mode: 64-point transform, 52 occupied LTF
/// subcarriers, 20 MHz, legacy 0.8 us guard interval.
struct OfdmConfig {
    int total_subcarriers = 64;     // M'
    int occupied_subcarriers = 52;  // M
    double carrier_hz = 2.4e9;
    double bandwidth_hz = 20e6;

    /// Reference power for the SNR definition: measured received power
    /// (default) or an assumed unit-power transmit constellation.
    enum class SnrReference { RxPower, UnitTx };
    SnrReference snr_reference = SnrReference::RxPower;

    double sample_period_ns() const { return 1e9 / bandwidth_hz; }
    double cyclic_prefix_ns() const { return 800.0; }
};

/// Frequency-domain BPSK training values X[m] over the occupied subcarriers.
struct LtfSymbol {
    std::vector<double> values;  // each +1 or -1
};

struct CsiMeta {
    std::optional<double> snr_db;
    std::optional<double> timestamp_s;
    std::string source;
    bool zero_power_noise = false;  // AWGN was asked for on a zero-power signal
    bool beyond_cp_span = false;    // a tap delay exceeded the guard interval
};

/// Per-subcarrier channel estimates over the M occupied subcarriers, in
/// logical subcarrier order -26..-1, +1..+26.
struct CsiVector {
    std::vector<std::complex<double>> estimates;
    CsiMeta meta;

    std::vector<double> magnitudes() const;
};

/// The fixed 52-entry legacy long training sequence; stable across calls.
const LtfSymbol& standard_ltf();

/// Logical occupied subcarrier indices {-26..-1, +1..+26}.
const std::vector<int>& logical_subcarrier_indices();

/// DFT bin (0..M'-1) for each occupied subcarrier, logical order.
std::vector<int> occupied_bin_map(int total_subcarriers = 64);

struct CfrResult {
    std::vector<std::complex<double>> values;  // occupied subcarriers, logical order
    bool beyond_cp_span = false;
};

/// Channel frequency response H[m] = sum_l h[l] exp(-j 2 pi m n_l / M') over
/// the occupied subcarriers, with tap delays rounded to the nearest sample.
CfrResult channel_frequency_response(const chan::ChannelState& state, const OfdmConfig& config);

/// Same transform evaluated at every DFT bin 0..M'-1 (diagnostic view).
std::vector<std::complex<double>> cfr_all_bins(const chan::ChannelState& state,
                                               const OfdmConfig& config);

struct AwgnResult {
    std::vector<std::complex<double>> samples;
    double noise_variance = 0.0;
    bool zero_power_input = false;
};

/// Adds i.i.d. CN(0, sigma_z^2) noise with sigma_z^2 chosen so that
/// reference power / sigma_z^2 = 10^(snr_db/10). A zero-power signal under
/// RxPower reference gets unit-variance noise and a flag.
AwgnResult add_awgn(std::span<const std::complex<double>> signal, double snr_db, Rng& rng,
                    OfdmConfig::SnrReference reference = OfdmConfig::SnrReference::RxPower);

/// Least-squares estimate: estimates[m] = received[m] / X[m].
CsiVector ls_estimate(std::span<const std::complex<double>> received, const LtfSymbol& ltf);

/// Full LTF estimation chain: CFR -> X[m] H[m] -> AWGN -> LS.
CsiVector simulate_csi(const chan::ChannelState& state, double snr_db, const OfdmConfig& config,
                       Rng& rng);

}  // namespace csiauth::ofdm
