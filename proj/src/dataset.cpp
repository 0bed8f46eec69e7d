// SPDX-License-Identifier: Apache-2.0
#include "csiauth/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "csiauth/errors.hpp"

namespace csiauth::data {

namespace {

std::shared_ptr<const chan::PowerDelayProfile> shared_tgn_pdp(chan::TgnModelId model) {
    static const std::array<std::shared_ptr<const chan::PowerDelayProfile>, 5> cache = [] {
        std::array<std::shared_ptr<const chan::PowerDelayProfile>, 5> c;
        for (int i = 0; i < 5; ++i) {
            c[i] = std::make_shared<const chan::PowerDelayProfile>(
                chan::build_pdp(static_cast<chan::TgnModelId>(i)));
        }
        return c;
    }();
    return cache[static_cast<int>(model)];
}

// Snap to the 32-bit float grid used by the container so that a generated
// dataset and its on-disk image are the same values.
void quantize_csi(ofdm::CsiVector& csi) {
    for (auto& e : csi.estimates) {
        e = {static_cast<double>(static_cast<float>(e.real())),
             static_cast<double>(static_cast<float>(e.imag()))};
    }
}

void validate_config(const PairGenConfig& config) {
    if (config.dt_s <= 0.0) {
        throw std::invalid_argument("generate_pair: transmission interval must be positive");
    }
    if (config.d_bm_wavelengths < 0.0) {
        throw std::invalid_argument("generate_pair: attacker distance must be non-negative");
    }
    if (std::isnan(config.snr_db) || (std::isinf(config.snr_db) && config.snr_db < 0.0)) {
        throw std::invalid_argument("generate_pair: SNR must be finite or the no-noise sentinel");
    }
    if (config.theta <= 0.0) {
        throw std::invalid_argument("generate_pair: Theta must be positive");
    }
}

Provenance synthetic_provenance(const PairGenConfig& config) {
    Provenance prov;
    prov.kind = ProvenanceKind::Synthetic;
    prov.model = config.model;
    prov.snr_db = config.snr_db;
    prov.dt_s = config.dt_s;
    prov.v0_mps = config.v0_mps;
    prov.wavelength_m = config.wavelength_m;
    prov.d_bm_wavelengths = config.d_bm_wavelengths;
    prov.theta = config.theta;
    prov.seed = config.seed;
    return prov;
}

}  // namespace

std::size_t Dataset::count_label(int label) const {
    std::size_t n = 0;
    for (const auto& p : pairs) {
        if (p.label == label) {
            ++n;
        }
    }
    return n;
}

bool datasets_equal(const Dataset& a, const Dataset& b) {
    if (a.schema_version != b.schema_version || a.tag != b.tag ||
        a.pairs.size() != b.pairs.size()) {
        return false;
    }
    auto csi_equal = [](const ofdm::CsiVector& x, const ofdm::CsiVector& y) {
        return x.estimates == y.estimates && x.meta.beyond_cp_span == y.meta.beyond_cp_span &&
               x.meta.zero_power_noise == y.meta.zero_power_noise;
    };
    for (std::size_t i = 0; i < a.pairs.size(); ++i) {
        const LabeledPair& pa = a.pairs[i];
        const LabeledPair& pb = b.pairs[i];
        if (pa.label != pb.label || !(pa.prov == pb.prov) || !csi_equal(pa.csi_a, pb.csi_a) ||
            !csi_equal(pa.csi_b, pb.csi_b)) {
            return false;
        }
    }
    return true;
}

std::pair<LabeledPair, LabeledPair> generate_pair(const PairGenConfig& config,
                                                  const ofdm::OfdmConfig& ofdm) {
    validate_config(config);
    Rng rng(config.seed);
    auto pdp = shared_tgn_pdp(config.model);

    const double f_d = chan::doppler_spread(config.v0_mps, config.wavelength_m);
    const double r = chan::autocorrelation(f_d, config.dt_s);
    const double rho = chan::spatial_correlation(config.d_bm_wavelengths * config.wavelength_m,
                                                 f_d, config.wavelength_m);

    const chan::ChannelState h_k = chan::sample_initial_channel(pdp, rng);
    const chan::ChannelState h_k1 = chan::evolve_channel(h_k, r, rng);
    const chan::ChannelState h_ma = chan::attacker_channel(h_k1, rho, config.theta, rng);

    ofdm::CsiVector csi_k = ofdm::simulate_csi(h_k, config.snr_db, ofdm, rng);
    ofdm::CsiVector csi_k1 = ofdm::simulate_csi(h_k1, config.snr_db, ofdm, rng);
    ofdm::CsiVector csi_ma = ofdm::simulate_csi(h_ma, config.snr_db, ofdm, rng);
    quantize_csi(csi_k);
    quantize_csi(csi_k1);
    quantize_csi(csi_ma);

    const Provenance prov = synthetic_provenance(config);
    LabeledPair same{csi_k, std::move(csi_k1), 0, prov};
    LabeledPair rogue{std::move(csi_k), std::move(csi_ma), 1, prov};
    return {std::move(same), std::move(rogue)};
}

namespace {

struct GridShape {
    std::size_t n_models, n_snrs, n_dists;
    int pairs_per_cell;

    std::size_t cells() const { return n_models * n_snrs * n_dists; }
    std::size_t units() const { return cells() * pairs_per_cell; }
};

// One unit = one generate_pair draw; the unit index alone determines the
// cell parameters and the child seed, so scheduling order cannot matter.
void make_training_unit(const TrainGridConfig& config, const GridShape& shape, std::size_t unit,
                        LabeledPair* out) {
    const std::size_t cell = unit / shape.pairs_per_cell;
    const std::uint32_t pair_index = static_cast<std::uint32_t>(unit % shape.pairs_per_cell);
    const std::size_t model_idx = cell / (shape.n_snrs * shape.n_dists);
    const std::size_t rest = cell % (shape.n_snrs * shape.n_dists);
    const std::size_t snr_idx = rest / shape.n_dists;
    const std::size_t dist_idx = rest % shape.n_dists;

    PairGenConfig pc;
    pc.model = config.models[model_idx];
    pc.snr_db = config.snrs_db[snr_idx];
    pc.dt_s = config.dt_s;
    pc.v0_mps = config.v0_mps;
    pc.wavelength_m = config.wavelength_m;
    pc.d_bm_wavelengths = config.distances_wl[dist_idx];
    pc.theta = config.theta;
    pc.seed = child_seed(config.seed, unit);

    auto [same, rogue] = generate_pair(pc);
    same.prov.cell_index = cell;
    same.prov.pair_index = pair_index;
    rogue.prov.cell_index = cell;
    rogue.prov.pair_index = pair_index;
    out[0] = std::move(same);
    out[1] = std::move(rogue);
}

GridShape training_shape(const TrainGridConfig& config) {
    if (config.models.empty() || config.snrs_db.empty() || config.distances_wl.empty() ||
        config.pairs_per_cell <= 0) {
        throw std::invalid_argument("training grid: empty axis or non-positive cell count");
    }
    return {config.models.size(), config.snrs_db.size(), config.distances_wl.size(),
            config.pairs_per_cell};
}

}  // namespace

Dataset generate_training_grid(const TrainGridConfig& config) {
    const GridShape shape = training_shape(config);
    Dataset ds;
    ds.tag = "train";
    ds.pairs.resize(2 * shape.units());
    const std::int64_t units = static_cast<std::int64_t>(shape.units());
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t unit = 0; unit < units; ++unit) {
        try {
            make_training_unit(config, shape, static_cast<std::size_t>(unit),
                               &ds.pairs[2 * static_cast<std::size_t>(unit)]);
        } catch (...) {
#pragma omp critical
            if (!error) {
                error = std::current_exception();
            }
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return ds;
}

Dataset generate_training_grid_serial(const TrainGridConfig& config) {
    const GridShape shape = training_shape(config);
    Dataset ds;
    ds.tag = "train";
    ds.pairs.resize(2 * shape.units());
    for (std::size_t unit = 0; unit < shape.units(); ++unit) {
        make_training_unit(config, shape, unit, &ds.pairs[2 * unit]);
    }
    return ds;
}

TestAxis parse_test_axis(std::string_view name) {
    if (name == "snr") {
        return TestAxis::Snr;
    }
    if (name == "dt") {
        return TestAxis::Interval;
    }
    if (name == "d") {
        return TestAxis::Distance;
    }
    throw UsageError("unknown test axis '" + std::string(name) + "' (expected snr, dt or d)");
}

std::string to_string(TestAxis axis) {
    switch (axis) {
        case TestAxis::Snr: return "snr";
        case TestAxis::Interval: return "dt";
        case TestAxis::Distance: return "d";
    }
    return "?";
}

std::vector<Dataset> generate_test_grid(TestAxis axis, const TestGridConfig& config) {
    if (config.models.empty() || config.pairs_per_cell <= 0) {
        throw std::invalid_argument("test grid: empty model list or non-positive cell count");
    }
    const std::vector<double>* values = nullptr;
    switch (axis) {
        case TestAxis::Snr: values = &config.snr_values; break;
        case TestAxis::Interval: values = &config.dt_values; break;
        case TestAxis::Distance: values = &config.distance_values; break;
    }
    if (values->empty()) {
        throw std::invalid_argument("test grid: swept axis has no values");
    }

    std::vector<Dataset> datasets;
    datasets.reserve(values->size());
    for (double value : *values) {
        PairGenConfig base;
        base.snr_db = config.snr_db;
        base.dt_s = config.dt_s;
        base.d_bm_wavelengths = config.d_bm_wavelengths;
        base.v0_mps = config.v0_mps;
        base.wavelength_m = config.wavelength_m;
        base.theta = config.theta;

        char tag[48];
        switch (axis) {
            case TestAxis::Snr:
                base.snr_db = value;
                std::snprintf(tag, sizeof tag, "snr=%g", value);
                break;
            case TestAxis::Interval:
                base.dt_s = value;
                std::snprintf(tag, sizeof tag, "dt_ms=%g", value * 1e3);
                break;
            case TestAxis::Distance:
                base.d_bm_wavelengths = value;
                std::snprintf(tag, sizeof tag, "d_wl=%g", value);
                break;
        }

        Dataset ds;
        ds.tag = tag;
        const std::size_t per_model = static_cast<std::size_t>(config.pairs_per_cell);
        const std::int64_t units = static_cast<std::int64_t>(config.models.size() * per_model);
        ds.pairs.resize(2 * static_cast<std::size_t>(units));
        std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 16)
        for (std::int64_t unit = 0; unit < units; ++unit) {
            try {
                const std::size_t u = static_cast<std::size_t>(unit);
                const std::size_t model_idx = u / per_model;
                PairGenConfig pc = base;
                pc.model = config.models[model_idx];
                // Seeded without the swept value: the same draws are reused
                // at every setting of the axis.
                pc.seed = child_seed(config.seed, u);
                auto [same, rogue] = generate_pair(pc);
                same.prov.cell_index = model_idx;
                same.prov.pair_index = static_cast<std::uint32_t>(u % per_model);
                rogue.prov.cell_index = model_idx;
                rogue.prov.pair_index = same.prov.pair_index;
                ds.pairs[2 * u] = std::move(same);
                ds.pairs[2 * u + 1] = std::move(rogue);
            } catch (...) {
#pragma omp critical
                if (!error) {
                    error = std::current_exception();
                }
            }
        }
        if (error) {
            std::rethrow_exception(error);
        }
        datasets.push_back(std::move(ds));
    }
    return datasets;
}

Dataset generate_cell(const PairGenConfig& base, int pairs_per_label, std::uint64_t master_seed) {
    if (pairs_per_label <= 0) {
        throw std::invalid_argument("generate_cell: non-positive pair count");
    }
    Dataset ds;
    ds.tag = "cell";
    ds.pairs.resize(2 * static_cast<std::size_t>(pairs_per_label));
    const std::int64_t units = pairs_per_label;
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t unit = 0; unit < units; ++unit) {
        try {
            PairGenConfig pc = base;
            pc.seed = child_seed(master_seed, static_cast<std::uint64_t>(unit));
            auto [same, rogue] = generate_pair(pc);
            same.prov.pair_index = static_cast<std::uint32_t>(unit);
            rogue.prov.pair_index = static_cast<std::uint32_t>(unit);
            ds.pairs[2 * unit] = std::move(same);
            ds.pairs[2 * unit + 1] = std::move(rogue);
        } catch (...) {
#pragma omp critical
            if (!error) {
                error = std::current_exception();
            }
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return ds;
}

}  // namespace csiauth::data
