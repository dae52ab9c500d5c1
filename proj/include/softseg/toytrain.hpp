#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "softseg/metrics.hpp"
#include "softseg/postprocess.hpp"
#include "softseg/softmask.hpp"
#include "softseg/volume.hpp"

namespace softseg {

inline constexpr std::size_t kFeatureCount = 4;

// Per-voxel features: raw intensity, 3x3x3 box mean, central-difference
// gradient magnitude, constant 1 bias. Out-of-bounds neighbors clamp to the
// nearest in-bounds voxel.
struct FeatureVolume {
    Dims3 dims;
    std::vector<std::array<double, kFeatureCount>> values;
};

FeatureVolume extract_features(const Volume3D& intensity);

// Per-feature standardization parameters over a dataset. The bias channel
// keeps identity stats so the uniform (f - mean) / std transform leaves it
// at 1.
struct FeatureStats {
    std::array<double, kFeatureCount> mean{0.0, 0.0, 0.0, 0.0};
    std::array<double, kFeatureCount> stddev{1.0, 1.0, 1.0, 1.0};
};

// Mean and population stddev (floored at 1e-12) over all voxels of all
// volumes, in case order then flat-index order.
FeatureStats compute_feature_stats(std::span<const FeatureVolume> volumes);

void standardize_features(FeatureVolume& features, const FeatureStats& stats);

// Per-voxel logistic segmenter: P_i = sigmoid(w . f_i).
struct ToyModel {
    std::array<double, kFeatureCount> weights{0.0, 0.0, 0.0, 0.0};
};

ProbabilityMap forward(const ToyModel& model, const FeatureVolume& features);

enum class LossMode { Binary, Soft };

struct TrainConfig {
    LossMode loss_mode = LossMode::Binary;
    SoftMaskSpec softmask_spec{};      // used when loss_mode == Soft
    double learning_rate = 1e-3;
    std::size_t iterations = 500;
    std::array<double, kFeatureCount> init_weights{0.0, 0.0, 0.0, 0.0};
    bool feature_standardization = true;
};

// One case: the intensity volume doubles as the FLAIR proxy when building
// soft targets. case_id is carried through to metrics rows.
struct TrainCase {
    std::string case_id;
    Volume3D intensity;
    Volume3D truth;
};

struct TrainResult {
    ToyModel model;
    std::vector<double> history;  // mean loss at the weights of each iteration, pre-update
    FeatureStats stats;           // standardization used; identity when disabled
};

// Full-batch gradient descent on the (soft) Dice loss, deterministic: fixed
// case order, fixed reduction order, per-case losses averaged (not pooled).
TrainResult train(std::span<const TrainCase> cases, const TrainConfig& config);

// Mean loss / mean weight-space gradient over cases at the given weights,
// computed from already-standardized features and prepared targets. These are
// the exact quantities the train loop steps on, exposed for gradient checks.
double mean_loss(const ToyModel& model, std::span<const FeatureVolume> features,
                 std::span<const Volume3D> targets);
std::array<double, kFeatureCount> loss_weight_gradient(const ToyModel& model,
                                                       std::span<const FeatureVolume> features,
                                                       std::span<const Volume3D> targets);

// Threshold maximizing mean dice over the calibration cases' truths.
double calibrate_threshold(const ToyModel& model, const FeatureStats& stats,
                           std::span<const TrainCase> cases, std::span<const double> grid);

struct EvalResult {
    std::vector<MetricsRow> rows;
    MetricsRow mean;
};

// forward -> binarize -> filter_small_components -> metrics per case.
EvalResult evaluate(const ToyModel& model, const FeatureStats& stats,
                    std::span<const TrainCase> cases, const PostprocSpec& postproc);

// 5-line text format: "TOYMODEL 1" then one weight per line, 17 significant
// digits.
std::string model_to_string(const ToyModel& model);
ToyModel model_from_string(const std::string& text);
void save_model(const ToyModel& model, const std::filesystem::path& path);
ToyModel load_model(const std::filesystem::path& path);

}  // namespace softseg
