// SPDX-License-Identifier: Apache-2.0
#include <numeric>
#include <vector>

#include <doctest.h>
#include <omp.h>

#include "csiauth/dataset.hpp"
#include "csiauth/models.hpp"

using namespace csiauth;

namespace {

struct ThreadCountGuard {
    int saved;
    explicit ThreadCountGuard(int n) : saved(omp_get_max_threads()) {
        omp_set_num_threads(n);
    }
    ~ThreadCountGuard() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_SUITE("parallel") {

TEST_CASE("grid generation is identical for any worker count") {
    data::TrainGridConfig cfg;
    cfg.pairs_per_cell = 2;
    cfg.models = {chan::TgnModelId::B, chan::TgnModelId::D};
    cfg.snrs_db = {10.0, 50.0};
    cfg.distances_wl = {0.25, 1.0};
    cfg.seed = 404;

    data::Dataset one, many, serial;
    {
        ThreadCountGuard guard(1);
        one = data::generate_training_grid(cfg);
    }
    {
        ThreadCountGuard guard(4);
        many = data::generate_training_grid(cfg);
    }
    serial = data::generate_training_grid_serial(cfg);
    CHECK(data::datasets_equal(one, many));
    CHECK(data::datasets_equal(one, serial));
}

TEST_CASE("test grids are identical for any worker count") {
    data::TestGridConfig cfg;
    cfg.models = {chan::TgnModelId::C};
    cfg.pairs_per_cell = 8;
    cfg.seed = 405;
    std::vector<data::Dataset> one, many;
    {
        ThreadCountGuard guard(1);
        one = data::generate_test_grid(data::TestAxis::Distance, cfg);
    }
    {
        ThreadCountGuard guard(4);
        many = data::generate_test_grid(data::TestAxis::Distance, cfg);
    }
    REQUIRE(one.size() == many.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(data::datasets_equal(one[i], many[i]));
    }
}

TEST_CASE("batch gradients and scores do not depend on the worker count") {
    data::PairGenConfig pc;
    pc.model = chan::TgnModelId::B;
    pc.snr_db = 20.0;
    const data::Dataset ds = data::generate_cell(pc, 24, 406);
    const nn::PairBatch batch = nn::PairBatch::from_dataset(ds, 52);
    const nn::SiameseWeights w = nn::init_weights(nn::ArchSpec::cnn(), 407);
    std::vector<std::size_t> indices(batch.size());
    std::iota(indices.begin(), indices.end(), std::size_t{0});

    std::vector<double> g1, g4, gs;
    double l1 = 0.0, l4 = 0.0, ls = 0.0;
    std::vector<double> s1, s4;
    {
        ThreadCountGuard guard(1);
        nn::batch_gradient(w, batch, indices, 1.0, &g1, &l1);
        s1 = nn::score_batch(w, batch);
    }
    {
        ThreadCountGuard guard(4);
        nn::batch_gradient(w, batch, indices, 1.0, &g4, &l4);
        s4 = nn::score_batch(w, batch);
    }
    nn::batch_gradient_serial(w, batch, indices, 1.0, &gs, &ls);
    CHECK(g1 == g4);
    CHECK(g1 == gs);
    CHECK(l1 == l4);
    CHECK(l1 == ls);
    CHECK(s1 == s4);
}

TEST_CASE("trained weights are identical for any worker count") {
    data::PairGenConfig pc;
    pc.model = chan::TgnModelId::B;
    pc.snr_db = 20.0;
    pc.d_bm_wavelengths = 1.0;
    const data::Dataset ds = data::generate_cell(pc, 48, 408);
    nn::TrainConfig cfg;
    cfg.epochs = 2;
    cfg.seed = 409;

    nn::TrainResult one, many;
    {
        ThreadCountGuard guard(1);
        one = nn::train(ds, nn::ArchSpec::cnn(), cfg);
    }
    {
        ThreadCountGuard guard(4);
        many = nn::train(ds, nn::ArchSpec::cnn(), cfg);
    }
    CHECK(one.weights.params == many.weights.params);
    CHECK(one.epoch_loss == many.epoch_loss);
}

}  // TEST_SUITE
