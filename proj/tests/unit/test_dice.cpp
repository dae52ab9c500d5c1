#include <doctest.h>

#include <cmath>
#include <vector>

#include "../support/oracles.hpp"
#include "softseg/dice.hpp"
#include "softseg/synth.hpp"

using namespace softseg;
using namespace softseg::testing;

namespace {

Volume3D mask_row(std::vector<std::uint8_t> values) {
    const Dims3 d(values.size(), 1, 1);
    return Volume3D::mask(d, std::move(values));
}

ProbabilityMap prob_row(std::vector<double> values) {
    const Dims3 d(values.size(), 1, 1);
    return ProbabilityMap(Volume3D::real(d, std::move(values)));
}

}  // namespace

TEST_CASE("confusion counts") {
    const Volume3D t = mask_row({1, 1, 0, 0});
    const Volume3D p = mask_row({1, 0, 1, 0});
    const ConfusionCounts c = confusion_counts(t, p);
    CHECK(c.tp == 1);
    CHECK(c.fp == 1);
    CHECK(c.fn == 1);
    CHECK(c.tn == 1);

    const ConfusionCounts same = confusion_counts(t, t);
    CHECK(same.fp == 0);
    CHECK(same.fn == 0);

    const ConfusionCounts none = confusion_counts(t, mask_row({0, 0, 0, 0}));
    CHECK(none.tp == 0);
    CHECK(none.fp == 0);
    CHECK(none.fn == 2);

    CHECK_THROWS_AS(confusion_counts(t, mask_row({1, 0})), std::invalid_argument);
}

TEST_CASE("dice loss fixture values") {
    const Volume3D t = mask_row({1, 1, 0, 0}).as_real();
    const LossValue loss = dice_loss(t, prob_row({1.0, 0.5, 0.5, 0.0}));
    CHECK(loss.numerator == 1.5);
    CHECK(loss.denominator == 2.0);
    CHECK(loss.value == -0.75);
}

TEST_CASE("dice loss identities") {
    const Volume3D t = mask_row({1, 0, 1, 0});
    CHECK(dice_loss(t.as_real(), prob_row({1.0, 0.0, 1.0, 0.0})).value == -1.0);

    // Both empty: perfect agreement by convention.
    const Volume3D zero = mask_row({0, 0, 0});
    CHECK(dice_loss(zero.as_real(), prob_row({0.0, 0.0, 0.0})).value == -1.0);

    CHECK_THROWS_AS(dice_loss(t.as_real(), prob_row({1.0})), std::invalid_argument);
}

TEST_CASE("soft dice loss fixture") {
    const Volume3D t = mask_row({1, 0, 0});
    const Volume3D d = mask_row({0, 1, 0});
    const LossValue loss = soft_dice_loss(t, d, 0.3, prob_row({1.0, 1.0, 0.0}));
    CHECK(loss.numerator == 1.3);
    CHECK(loss.denominator == doctest::Approx(1.65).epsilon(1e-15));
    CHECK(loss.value == doctest::Approx(-1.3 / 1.65).epsilon(1e-15));
}

TEST_CASE("soft dice loss degenerate forms match plain dice loss bit for bit") {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const Dims3 dims(1 + rng.next() % 6, 1 + rng.next() % 6, 1 + rng.next() % 6);
        const Volume3D t = random_mask(rng, dims, 0.4);
        Volume3D d = random_mask(rng, dims, 0.4);
        auto dd = d.mask_data();
        const auto tt = t.mask_data();
        for (std::size_t i = 0; i < dd.size(); ++i) {
            if (tt[i]) dd[i] = 0;  // keep D disjoint from T
        }
        const ProbabilityMap p(random_real(rng, dims, 0.0, 1.0));

        // gamma = 0 reduces to the plain loss.
        const LossValue soft0 = soft_dice_loss(t, d, 0.0, p);
        const LossValue plain = dice_loss(t.as_real(), p);
        CHECK(soft0.value == plain.value);
        CHECK(soft0.numerator == plain.numerator);
        CHECK(soft0.denominator == plain.denominator);

        // Empty D likewise.
        const LossValue soft_empty = soft_dice_loss(t, Volume3D::mask(dims), 0.3, p);
        CHECK(soft_empty.value == plain.value);

        // General gamma equals dice_loss on the composite target.
        const double gamma = 0.3;
        std::vector<double> composite(t.voxel_count());
        for (std::size_t i = 0; i < composite.size(); ++i) {
            composite[i] = tt[i] ? 1.0 : (dd[i] ? gamma : 0.0);
        }
        const LossValue soft = soft_dice_loss(t, d, gamma, p);
        const LossValue direct = dice_loss(Volume3D::real(dims, composite), p);
        CHECK(soft.value == direct.value);
    }
}

TEST_CASE("soft dice loss rejects overlapping T and D") {
    const Volume3D t = mask_row({1, 0});
    const Volume3D d = mask_row({1, 0});
    CHECK_THROWS_WITH_AS(soft_dice_loss(t, d, 0.3, prob_row({0.5, 0.5})),
                         doctest::Contains("disjoint"), std::invalid_argument);
}

TEST_CASE("Eq.(1) from counts equals Eq.(2) for binary masks") {
    SplitMix64 rng(47);
    for (int trial = 0; trial < 200; ++trial) {
        const Dims3 dims(1 + rng.next() % 8, 1 + rng.next() % 8, 1 + rng.next() % 8);
        const Volume3D t = random_mask(rng, dims, 0.35);
        const Volume3D p = random_mask(rng, dims, 0.35);
        const ConfusionCounts c = confusion_counts(t, p);
        const double denom = static_cast<double>(c.tp) + 0.5 * static_cast<double>(c.fp) +
                             0.5 * static_cast<double>(c.fn);
        const double eq1 = denom == 0.0 ? -1.0 : -static_cast<double>(c.tp) / denom;
        const double eq2 = dice_loss(t.as_real(), ProbabilityMap(p.as_real())).value;
        CHECK(std::abs(eq1 - eq2) <= 1e-12);
    }
}

TEST_CASE("loss value stays within [-1, 0]") {
    SplitMix64 rng(53);
    for (int trial = 0; trial < 100; ++trial) {
        const Dims3 dims(1 + rng.next() % 6, 1 + rng.next() % 6, 1 + rng.next() % 6);
        const ProbabilityMap p(random_real(rng, dims, 0.0, 1.0));
        const Volume3D t = random_mask(rng, dims, 0.5);
        const double v = dice_loss(t.as_real(), p).value;
        CHECK(v <= 0.0);
        CHECK(v >= -1.0);
    }
}

TEST_CASE("gradient closed-form spots") {
    {
        const Volume3D s = mask_row({1}).as_real();
        const Volume3D g = dice_loss_gradient(s, prob_row({1.0}));
        CHECK(g.real_data()[0] == -0.5);  // N = 1, Dn = 1
    }
    {
        const Volume3D s = mask_row({0}).as_real();
        const Volume3D g = dice_loss_gradient(s, prob_row({0.5}));
        CHECK(g.real_data()[0] == 0.0);  // N = 0 and S_j = 0
    }
    CHECK_THROWS_WITH_AS(dice_loss_gradient(mask_row({0}).as_real(), prob_row({0.0})),
                         doctest::Contains("undefined"), std::runtime_error);
}

TEST_CASE("gradient matches central finite differences") {
    SplitMix64 rng(61);
    const double h = 1e-6;
    for (int trial = 0; trial < 30; ++trial) {
        const Dims3 dims(1 + rng.next() % 8, 1 + rng.next() % 8, 1 + rng.next() % 8);
        Volume3D s = random_mask(rng, dims, 0.4);
        if (s.popcount() == 0) s.mask_data()[0] = 1;
        const Volume3D s_real = s.as_real();
        std::vector<double> p(dims.voxel_count());
        for (double& v : p) v = 0.01 + 0.98 * rng.next_unit();

        const Volume3D grad =
            dice_loss_gradient(s_real, ProbabilityMap(Volume3D::real(dims, p)));
        for (std::size_t j = 0; j < p.size(); ++j) {
            std::vector<double> plus = p, minus = p;
            plus[j] += h;
            minus[j] -= h;
            const double lp =
                dice_loss(s_real, ProbabilityMap(Volume3D::real(dims, plus))).value;
            const double lm =
                dice_loss(s_real, ProbabilityMap(Volume3D::real(dims, minus))).value;
            const double fd = (lp - lm) / (2.0 * h);
            const double a = grad.real_data()[j];
            const double rel = std::abs(a - fd) / std::max(std::abs(fd), 1e-12);
            CHECK(rel < 1e-6);
        }
    }
}
