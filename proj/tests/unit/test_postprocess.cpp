#include <doctest.h>

#include <vector>

#include "../support/oracles.hpp"
#include "softseg/postprocess.hpp"
#include "softseg/synth.hpp"

using namespace softseg;
using namespace softseg::testing;

namespace {

ProbabilityMap prob_row(std::vector<double> values) {
    return ProbabilityMap(Volume3D::real(Dims3(values.size(), 1, 1), std::move(values)));
}

bool subset_of(const Volume3D& a, const Volume3D& b) {
    const auto da = a.mask_data();
    const auto db = b.mask_data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        if (da[i] && !db[i]) return false;
    }
    return true;
}

// Axis-aligned run of `len` voxels starting at (x0, y, z).
void put_run(Volume3D& vol, std::size_t x0, std::size_t y, std::size_t z, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
        vol.mask_data()[linear_index(x0 + i, y, z, vol.dims())] = 1;
    }
}

}  // namespace

TEST_CASE("binarize includes the boundary") {
    const ProbabilityMap p = prob_row({0.2, 0.5, 0.8});
    const Volume3D at_half = binarize(p, 0.5);
    CHECK(at_half.mask_data()[0] == 0);
    CHECK(at_half.mask_data()[1] == 1);  // 0.5 >= 0.5
    CHECK(at_half.mask_data()[2] == 1);

    CHECK(binarize(p, 0.0).popcount() == 3);
    const Volume3D at_one = binarize(prob_row({0.2, 1.0, 0.8}), 1.0);
    CHECK(at_one.popcount() == 1);

    CHECK_THROWS_AS(binarize(p, 1.5), std::invalid_argument);
}

TEST_CASE("binarize is monotone in the threshold") {
    SplitMix64 rng(81);
    for (int trial = 0; trial < 30; ++trial) {
        const Dims3 d(1 + rng.next() % 6, 1 + rng.next() % 6, 1 + rng.next() % 6);
        const ProbabilityMap p(random_real(rng, d, 0.0, 1.0));
        const double t1 = rng.next_unit();
        const double t2 = rng.next_unit();
        const double lo = std::min(t1, t2);
        const double hi = std::max(t1, t2);
        CHECK(subset_of(binarize(p, hi), binarize(p, lo)));
    }
}

TEST_CASE("component filter keeps 19 voxels, drops 18") {
    // Two straight runs in separate slices: 18 voxels and 19 voxels.
    Volume3D m = Volume3D::mask(Dims3(24, 4, 4));
    put_run(m, 0, 1, 1, 18);
    put_run(m, 0, 2, 3, 19);

    const Volume3D kept = filter_small_components(m, 19, Connectivity::Face6);
    CHECK(kept.popcount() == 19);
    CHECK(kept.mask_at(0, 2, 3) == 1);
    CHECK(kept.mask_at(0, 1, 1) == 0);
}

TEST_CASE("component filter identity and empty cases") {
    SplitMix64 rng(82);
    const Volume3D m = random_mask(rng, Dims3(6, 6, 6), 0.3);
    CHECK(filter_small_components(m, 1, Connectivity::Face6) == m);

    const Volume3D empty = Volume3D::mask(Dims3(4, 4, 4));
    CHECK(filter_small_components(empty, 19, Connectivity::Face6).popcount() == 0);

    CHECK_THROWS_AS(filter_small_components(m, 0, Connectivity::Face6), std::invalid_argument);
}

TEST_CASE("component filter output is a subset and idempotent") {
    SplitMix64 rng(83);
    for (int trial = 0; trial < 30; ++trial) {
        const Dims3 d(1 + rng.next() % 8, 1 + rng.next() % 8, 1 + rng.next() % 8);
        const Volume3D m = random_mask(rng, d, 0.35);
        for (Connectivity conn : {Connectivity::Face6, Connectivity::Full26}) {
            const Volume3D once = filter_small_components(m, 3, conn);
            CHECK(subset_of(once, m));
            CHECK(filter_small_components(once, 3, conn) == once);
        }
    }
}

TEST_CASE("optimal threshold picks the lowest grid value above the background") {
    // Probabilities: 0.9 on truth voxels, 0.1 elsewhere.
    const Dims3 d(4, 4, 1);
    Volume3D truth = Volume3D::mask(d);
    put_run(truth, 0, 0, 0, 3);
    std::vector<double> p(d.voxel_count(), 0.1);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (truth.mask_data()[i]) p[i] = 0.9;
    }
    std::vector<LabeledProbability> cases;
    cases.push_back({truth, ProbabilityMap(Volume3D::real(d, p))});

    const std::vector<double> grid = default_threshold_grid();
    CHECK(optimal_threshold(cases, grid) == 0.15);
}

TEST_CASE("optimal threshold on an exact binary prediction returns the smallest positive grid value") {
    const Dims3 d(3, 3, 1);
    Volume3D truth = Volume3D::mask(d);
    put_run(truth, 0, 1, 0, 2);
    std::vector<LabeledProbability> cases;
    cases.push_back({truth, ProbabilityMap(truth.as_real())});
    CHECK(optimal_threshold(cases, default_threshold_grid()) == 0.05);
}

TEST_CASE("optimal threshold breaks ties toward the smaller value") {
    const Dims3 d(2, 1, 1);
    const Volume3D truth = Volume3D::mask(d, {1, 0});
    std::vector<LabeledProbability> cases;
    cases.push_back({truth, ProbabilityMap(Volume3D::real(d, {0.9, 0.1}))});
    // Both grid values give identical predictions, hence identical mean dice.
    const std::vector<double> grid{0.5, 0.3};
    CHECK(optimal_threshold(cases, grid) == 0.3);

    CHECK_THROWS_AS(optimal_threshold({}, grid), std::invalid_argument);
    CHECK_THROWS_AS(optimal_threshold(cases, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("optimal threshold equals the exhaustive oracle on random case sets") {
    SplitMix64 rng(84);
    const std::vector<double> grid = default_threshold_grid();
    for (int trial = 0; trial < 25; ++trial) {
        const Dims3 d(1 + rng.next() % 6, 1 + rng.next() % 6, 1 + rng.next() % 6);
        std::vector<LabeledProbability> cases;
        const std::size_t n_cases = 1 + rng.next() % 4;
        for (std::size_t c = 0; c < n_cases; ++c) {
            cases.push_back({random_mask(rng, d, 0.4),
                             ProbabilityMap(random_real(rng, d, 0.0, 1.0))});
        }
        CHECK(optimal_threshold(cases, grid) == oracle_optimal_threshold(cases, grid));
    }
}
