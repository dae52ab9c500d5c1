#include "softseg/dice.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace softseg {

namespace {

void require_same_dims(const Dims3& a, const Dims3& b, const char* op) {
    if (!(a == b)) {
        throw std::invalid_argument(std::string(op) + ": volume dimensions mismatch");
    }
}

// Reads truth values as doubles regardless of dtype, checking [0, 1].
struct TruthView {
    explicit TruthView(const Volume3D& vol) : vol_(vol) {
        if (!vol.is_mask() && !vol.is_real()) {
            throw std::invalid_argument("truth volume has unknown dtype");
        }
    }
    double operator[](std::size_t i) const {
        const double v = vol_.is_mask() ? static_cast<double>(vol_.mask_data()[i])
                                        : vol_.real_data()[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("truth values must lie in [0, 1]");
        }
        return v;
    }
    const Volume3D& vol_;
};

}  // namespace

ConfusionCounts confusion_counts(const Volume3D& truth, const Volume3D& pred) {
    require_same_dims(truth.dims(), pred.dims(), "confusion_counts");
    const auto t = truth.mask_data();
    const auto p = pred.mask_data();
    ConfusionCounts c;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i]) {
            if (p[i]) ++c.tp; else ++c.fn;
        } else {
            if (p[i]) ++c.fp; else ++c.tn;
        }
    }
    return c;
}

LossValue dice_loss(const Volume3D& truth, const ProbabilityMap& pred) {
    require_same_dims(truth.dims(), pred.dims(), "dice_loss");
    const TruthView t(truth);
    const auto p = pred.data();

    double num = 0.0;
    double sum_p = 0.0;
    double sum_t = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double ti = t[i];
        num += ti * p[i];
        sum_p += p[i];
        sum_t += ti;
    }
    const double den = 0.5 * sum_p + 0.5 * sum_t;
    if (den == 0.0) {
        return LossValue{-1.0, 0.0, 0.0};  // both empty: perfect agreement
    }
    return LossValue{-(num / den), num, den};
}

LossValue soft_dice_loss(const Volume3D& truth, const Volume3D& dilated, double gamma,
                         const ProbabilityMap& pred) {
    require_same_dims(truth.dims(), dilated.dims(), "soft_dice_loss");
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("soft_dice_loss: gamma must lie in [0, 1)");
    }
    const auto t = truth.mask_data();
    const auto d = dilated.mask_data();

    std::vector<double> composite(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] && d[i]) {
            throw std::invalid_argument("soft_dice_loss: T and D must be disjoint");
        }
        composite[i] = t[i] ? 1.0 : (d[i] ? gamma : 0.0);
    }
    return dice_loss(Volume3D::real(truth.dims(), std::move(composite)), pred);
}

Volume3D dice_loss_gradient(const Volume3D& truth_soft, const ProbabilityMap& pred) {
    require_same_dims(truth_soft.dims(), pred.dims(), "dice_loss_gradient");
    const TruthView s(truth_soft);
    const auto p = pred.data();

    double num = 0.0;
    double sum_p = 0.0;
    double sum_s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double si = s[i];
        num += si * p[i];
        sum_p += p[i];
        sum_s += si;
    }
    const double den = 0.5 * sum_p + 0.5 * sum_s;
    if (den == 0.0) {
        throw std::runtime_error("dice_loss_gradient: gradient undefined for empty truth and prediction");
    }
    const double den_sq = den * den;

    Volume3D grad = Volume3D::real(truth_soft.dims());
    auto g = grad.real_data();
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = -(s[i] * den - 0.5 * num) / den_sq;
    }
    return grad;
}

}  // namespace softseg
