// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "csiauth/channel_model.hpp"
#include "csiauth/ofdm_phy.hpp"

namespace csiauth::data {

/// Everything needed to synthesize one labeled pair deterministically.
struct PairGenConfig {
    chan::TgnModelId model = chan::TgnModelId::B;
    double snr_db = 20.0;
    double dt_s = 0.003;          // transmission interval Delta t_k
    double v0_mps = 1.0;          // terminal speed
    double wavelength_m = 0.125;  // 2.4 GHz band
    double d_bm_wavelengths = 1.0;
    double theta = 1.0;
    std::uint64_t seed = 1;
};

enum class ProvenanceKind : std::uint8_t { Synthetic = 0, Experimental = 1 };

/// Fixed-width generation record carried by every pair; enough to re-derive
/// a synthetic pair from scratch or to trace an experimental one back to
/// its capture.
struct Provenance {
    ProvenanceKind kind = ProvenanceKind::Synthetic;
    chan::TgnModelId model = chan::TgnModelId::B;
    std::array<std::uint8_t, 6> mac{};  // experimental only
    double snr_db = 0.0;
    double dt_s = 0.0;
    double v0_mps = 0.0;
    double wavelength_m = 0.0;
    double d_bm_wavelengths = 0.0;
    double theta = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t cell_index = 0;
    std::uint32_t pair_index = 0;
    std::uint32_t delta_k = 0;      // experimental only
    double timestamp_a = 0.0;       // experimental only
    double timestamp_b = 0.0;       // experimental only

    bool operator==(const Provenance&) const = default;
};

/// Two CSI vectors plus the binary label V (0 = same transmitter,
/// 1 = different transmitter).
struct LabeledPair {
    ofdm::CsiVector csi_a;
    ofdm::CsiVector csi_b;
    std::uint8_t label = 0;
    Provenance prov;
};

struct Dataset {
    std::uint32_t schema_version = 1;
    std::string tag;
    std::vector<LabeledPair> pairs;

    std::size_t count_label(int label) const;
};

/// True when estimates, labels, flags and provenance all match exactly.
bool datasets_equal(const Dataset& a, const Dataset& b);

/// Synthesize the V=0 and V=1 pairs of one draw: h_ba[k] -> evolve ->
/// h_ba[k+1], attacker h_ma[k+1] correlated by rho(d_bm); three CSI
/// estimations at the configured SNR. Estimates are quantized to the f32
/// storage grid so in-memory pairs equal their on-disk representation.
std::pair<LabeledPair, LabeledPair> generate_pair(const PairGenConfig& config,
                                                  const ofdm::OfdmConfig& ofdm = {});

/// Full training cross product (models x SNRs x distances), balanced labels.
struct TrainGridConfig {
    std::vector<chan::TgnModelId> models = {chan::TgnModelId::B, chan::TgnModelId::C,
                                            chan::TgnModelId::D, chan::TgnModelId::E,
                                            chan::TgnModelId::F};
    std::vector<double> snrs_db = {5, 8, 10, 12, 13, 14, 15, 16, 17, 18, 19, 20, 50};
    std::vector<double> distances_wl = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
    double dt_s = 0.003;
    double v0_mps = 1.0;
    double wavelength_m = 0.125;
    double theta = 1.0;
    int pairs_per_cell = 20;  // per label
    std::uint64_t seed = 0;
};

Dataset generate_training_grid(const TrainGridConfig& config);
/// Plain-loop reference implementation; must match the parallel one
/// bit for bit.
Dataset generate_training_grid_serial(const TrainGridConfig& config);

enum class TestAxis { Snr, Interval, Distance };

TestAxis parse_test_axis(std::string_view name);  // "snr", "dt", "d"
std::string to_string(TestAxis axis);

/// One dataset per value of a single swept axis; the other parameters stay
/// at their baseline. Draws are seeded independently of the swept value
/// (common random numbers), so sweeps measure the parameter effect rather
/// than sampling noise.
struct TestGridConfig {
    std::vector<chan::TgnModelId> models = {chan::TgnModelId::B, chan::TgnModelId::C,
                                            chan::TgnModelId::D, chan::TgnModelId::E,
                                            chan::TgnModelId::F};
    double snr_db = 5.0;
    double dt_s = 0.003;
    double d_bm_wavelengths = 0.25;
    double v0_mps = 1.0;
    double wavelength_m = 0.125;
    double theta = 1.0;
    std::vector<double> snr_values = {0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22};
    std::vector<double> dt_values = {0.003, 0.006, 0.009, 0.012, 0.015,
                                     0.018, 0.021, 0.024, 0.027};
    std::vector<double> distance_values = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
    int pairs_per_cell = 50;  // per label, per model
    std::uint64_t seed = 0;
};

std::vector<Dataset> generate_test_grid(TestAxis axis, const TestGridConfig& config);

/// Pairs for one fixed parameter setting (used by test grids and sanity runs).
Dataset generate_cell(const PairGenConfig& base, int pairs_per_label, std::uint64_t master_seed);

// ---- container I/O -------------------------------------------------------

/// Self-describing binary container; see README for the byte layout.
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

/// FNV-1a 64-bit digest of a file's bytes (manifests, determinism checks).
std::uint64_t file_digest(const std::filesystem::path& path);

// ---- raw capture ingestion ------------------------------------------------

/// One row of the raw capture CSV: transmitter MAC, RSSI, noise floor,
/// timestamp, and 64 complex subcarrier values parsed from interleaved
/// signed 8-bit (imaginary, real) pairs.
struct RawCsiRecord {
    std::array<std::uint8_t, 6> mac{};
    double rssi_dbm = 0.0;
    double noise_floor = 0.0;
    double timestamp_s = 0.0;
    std::array<std::complex<double>, 64> subcarriers{};
};

struct IngestReport {
    std::size_t total_rows = 0;
    std::size_t malformed_rows = 0;
    std::vector<std::size_t> bad_line_numbers;  // 1-based, capped at 10
    bool empty_input = false;
};

/// Parses the capture CSV; malformed rows are counted and reported, and
/// more than 5% of them is a hard error listing the offending lines.
std::vector<RawCsiRecord> ingest_raw_csv(const std::filesystem::path& path,
                                         IngestReport* report = nullptr);

std::array<std::uint8_t, 6> parse_mac(std::string_view text);
std::string format_mac(const std::array<std::uint8_t, 6>& mac);

/// Builds (k, k+delta_k_same, V=0) and (k, k+delta_k_diff, V=1) pairs from a
/// time-ordered single-transmitter record stream, extracting the occupied
/// subcarriers of each record.
Dataset build_experimental_pairs(std::span<const RawCsiRecord> records, int delta_k_same = 1,
                                 int delta_k_diff = 100, std::string* warning = nullptr);

}  // namespace csiauth::data
