#pragma once

#include <cstdint>

#include "softseg/volume.hpp"

namespace softseg {

// Voxel tallies for a pair of binary masks.
struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;
};

// Dice loss value with the two reduction terms it was built from:
//   value = -numerator / denominator,  numerator = sum(S*P),
//   denominator = 0.5*sum(P) + 0.5*sum(S).
// When both sums are zero the loss is defined as -1 (perfect agreement on
// an empty volume); no epsilon smoothing anywhere.
struct LossValue {
    double value = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
};

ConfusionCounts confusion_counts(const Volume3D& truth, const Volume3D& pred);

// Dice loss -sum(T*P) / (0.5*sum(P) + 0.5*sum(T)). The truth volume may be a
// binary mask or a soft (real-valued) mask with values in [0, 1]. Sums run in
// flat-index ascending order so results are bit-reproducible.
LossValue dice_loss(const Volume3D& truth, const ProbabilityMap& pred);

// Soft Dice loss on the composite target T + gamma*D, where D is the dilated
// region mask disjoint from T. Bit-for-bit equal to dice_loss(T + gamma*D, P).
LossValue soft_dice_loss(const Volume3D& truth, const Volume3D& dilated, double gamma,
                         const ProbabilityMap& pred);

// dL/dP for L = -N/Dn with N = sum(S*P), Dn = 0.5*sum(P) + 0.5*sum(S):
//   dL/dP_j = -(S_j*Dn - 0.5*N) / Dn^2
// Throws when Dn == 0 (empty truth and prediction).
Volume3D dice_loss_gradient(const Volume3D& truth_soft, const ProbabilityMap& pred);

}  // namespace softseg
