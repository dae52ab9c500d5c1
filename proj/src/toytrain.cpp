#include "softseg/toytrain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "softseg/dice.hpp"

namespace softseg {

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

std::size_t clamp_coord(std::ptrdiff_t c, std::size_t n) {
    if (c < 0) return 0;
    if (static_cast<std::size_t>(c) >= n) return n - 1;
    return static_cast<std::size_t>(c);
}

// Loss and weight-space gradient for one case; chain rule through the
// sigmoid: dL/dw_k = sum_j dL/dP_j * P_j(1-P_j) * f_jk.
struct CaseGrad {
    double loss = 0.0;
    std::array<double, kFeatureCount> grad{0.0, 0.0, 0.0, 0.0};
};

CaseGrad case_loss_and_gradient(const ToyModel& model, const FeatureVolume& features,
                                const Volume3D& target) {
    const ProbabilityMap pred = forward(model, features);
    const LossValue loss = dice_loss(target, pred);
    const Volume3D grad_p = dice_loss_gradient(target, pred);

    CaseGrad out;
    out.loss = loss.value;
    const auto p = pred.data();
    const auto g = grad_p.real_data();
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double chain = g[j] * p[j] * (1.0 - p[j]);
        const auto& f = features.values[j];
        for (std::size_t k = 0; k < kFeatureCount; ++k) {
            out.grad[k] += chain * f[k];
        }
    }
    return out;
}

Volume3D make_target(const TrainCase& c, const TrainConfig& config) {
    if (config.loss_mode == LossMode::Soft) {
        return build_soft_mask(c.truth, c.intensity, config.softmask_spec).values;
    }
    return c.truth.as_real();
}

std::vector<ProbabilityMap> predict_cases(const ToyModel& model, const FeatureStats& stats,
                                          std::span<const TrainCase> cases) {
    std::vector<ProbabilityMap> probs;
    probs.reserve(cases.size());
    for (const TrainCase& c : cases) {
        FeatureVolume f = extract_features(c.intensity);
        standardize_features(f, stats);
        probs.push_back(forward(model, f));
    }
    return probs;
}

}  // namespace

FeatureVolume extract_features(const Volume3D& intensity) {
    if (!intensity.is_real()) {
        throw std::invalid_argument("extract_features: intensity must be Real64");
    }
    const Dims3& d = intensity.dims();
    const auto v = intensity.real_data();
    const auto at = [&](std::ptrdiff_t x, std::ptrdiff_t y, std::ptrdiff_t z) {
        return v[clamp_coord(x, d.nx) + d.nx * (clamp_coord(y, d.ny) + d.ny * clamp_coord(z, d.nz))];
    };

    FeatureVolume out;
    out.dims = d;
    out.values.resize(d.voxel_count());
    std::size_t idx = 0;
    for (std::size_t z = 0; z < d.nz; ++z) {
        for (std::size_t y = 0; y < d.ny; ++y) {
            for (std::size_t x = 0; x < d.nx; ++x, ++idx) {
                const auto px = static_cast<std::ptrdiff_t>(x);
                const auto py = static_cast<std::ptrdiff_t>(y);
                const auto pz = static_cast<std::ptrdiff_t>(z);

                double box_sum = 0.0;
                for (std::ptrdiff_t dz = -1; dz <= 1; ++dz) {
                    for (std::ptrdiff_t dy = -1; dy <= 1; ++dy) {
                        for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
                            box_sum += at(px + dx, py + dy, pz + dz);
                        }
                    }
                }
                const double gx = (at(px + 1, py, pz) - at(px - 1, py, pz)) / 2.0;
                const double gy = (at(px, py + 1, pz) - at(px, py - 1, pz)) / 2.0;
                const double gz = (at(px, py, pz + 1) - at(px, py, pz - 1)) / 2.0;

                out.values[idx] = {v[idx], box_sum / 27.0,
                                   std::sqrt(gx * gx + gy * gy + gz * gz), 1.0};
            }
        }
    }
    return out;
}

FeatureStats compute_feature_stats(std::span<const FeatureVolume> volumes) {
    FeatureStats stats;
    std::uint64_t n = 0;
    std::array<double, kFeatureCount> sum{0.0, 0.0, 0.0, 0.0};
    for (const FeatureVolume& vol : volumes) {
        for (const auto& f : vol.values) {
            for (std::size_t k = 0; k < kFeatureCount; ++k) sum[k] += f[k];
            ++n;
        }
    }
    if (n == 0) {
        throw std::invalid_argument("compute_feature_stats: no voxels");
    }
    std::array<double, kFeatureCount> mean{};
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        mean[k] = sum[k] / static_cast<double>(n);
    }
    std::array<double, kFeatureCount> sq{0.0, 0.0, 0.0, 0.0};
    for (const FeatureVolume& vol : volumes) {
        for (const auto& f : vol.values) {
            for (std::size_t k = 0; k < kFeatureCount; ++k) {
                const double dev = f[k] - mean[k];
                sq[k] += dev * dev;
            }
        }
    }
    // Bias channel keeps identity stats; the others floor the stddev.
    for (std::size_t k = 0; k + 1 < kFeatureCount; ++k) {
        stats.mean[k] = mean[k];
        stats.stddev[k] = std::max(std::sqrt(sq[k] / static_cast<double>(n)), 1e-12);
    }
    return stats;
}

void standardize_features(FeatureVolume& features, const FeatureStats& stats) {
    for (auto& f : features.values) {
        for (std::size_t k = 0; k < kFeatureCount; ++k) {
            f[k] = (f[k] - stats.mean[k]) / stats.stddev[k];
        }
    }
}

ProbabilityMap forward(const ToyModel& model, const FeatureVolume& features) {
    Volume3D out = Volume3D::real(features.dims);
    auto p = out.real_data();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& f = features.values[i];
        double t = 0.0;
        for (std::size_t k = 0; k < kFeatureCount; ++k) t += model.weights[k] * f[k];
        p[i] = sigmoid(t);
    }
    return ProbabilityMap(std::move(out));
}

double mean_loss(const ToyModel& model, std::span<const FeatureVolume> features,
                 std::span<const Volume3D> targets) {
    if (features.empty() || features.size() != targets.size()) {
        throw std::invalid_argument("mean_loss: case list mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        sum += dice_loss(targets[i], forward(model, features[i])).value;
    }
    return sum / static_cast<double>(features.size());
}

std::array<double, kFeatureCount> loss_weight_gradient(const ToyModel& model,
                                                       std::span<const FeatureVolume> features,
                                                       std::span<const Volume3D> targets) {
    if (features.empty() || features.size() != targets.size()) {
        throw std::invalid_argument("loss_weight_gradient: case list mismatch");
    }
    std::array<double, kFeatureCount> total{0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < features.size(); ++i) {
        const CaseGrad cg = case_loss_and_gradient(model, features[i], targets[i]);
        for (std::size_t k = 0; k < kFeatureCount; ++k) total[k] += cg.grad[k];
    }
    for (double& g : total) g /= static_cast<double>(features.size());
    return total;
}

TrainResult train(std::span<const TrainCase> cases, const TrainConfig& config) {
    if (cases.empty()) {
        throw std::invalid_argument("train: no training cases");
    }
    if (config.iterations < 1) {
        throw std::invalid_argument("train: iterations must be >= 1");
    }
    if (!(config.learning_rate >= 0.0)) {
        throw std::invalid_argument("train: learning rate must be >= 0");
    }
    for (const TrainCase& c : cases) {
        if (c.truth.popcount() == 0) {
            throw std::runtime_error("train: case '" + c.case_id + "' has an empty truth mask");
        }
    }

    std::vector<FeatureVolume> features;
    features.reserve(cases.size());
    for (const TrainCase& c : cases) {
        features.push_back(extract_features(c.intensity));
    }
    FeatureStats stats;
    if (config.feature_standardization) {
        stats = compute_feature_stats(features);
        for (FeatureVolume& f : features) standardize_features(f, stats);
    }
    std::vector<Volume3D> targets;
    targets.reserve(cases.size());
    for (const TrainCase& c : cases) {
        targets.push_back(make_target(c, config));
    }

    TrainResult result;
    result.model.weights = config.init_weights;
    result.stats = stats;
    result.history.reserve(config.iterations);

    const double n = static_cast<double>(cases.size());
    for (std::size_t it = 0; it < config.iterations; ++it) {
        std::array<double, kFeatureCount> grad{0.0, 0.0, 0.0, 0.0};
        double loss_sum = 0.0;
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const CaseGrad cg = case_loss_and_gradient(result.model, features[i], targets[i]);
            loss_sum += cg.loss;
            for (std::size_t k = 0; k < kFeatureCount; ++k) grad[k] += cg.grad[k];
        }
        result.history.push_back(loss_sum / n);
        for (std::size_t k = 0; k < kFeatureCount; ++k) {
            const double mean_grad = grad[k] / n;
            result.model.weights[k] -= config.learning_rate * mean_grad;
        }
    }
    return result;
}

double calibrate_threshold(const ToyModel& model, const FeatureStats& stats,
                           std::span<const TrainCase> cases, std::span<const double> grid) {
    if (cases.empty()) {
        throw std::invalid_argument("calibrate_threshold: no cases");
    }
    std::vector<ProbabilityMap> probs = predict_cases(model, stats, cases);
    std::vector<LabeledProbability> labeled;
    labeled.reserve(cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) {
        labeled.push_back(LabeledProbability{cases[i].truth, std::move(probs[i])});
    }
    return optimal_threshold(labeled, grid);
}

EvalResult evaluate(const ToyModel& model, const FeatureStats& stats,
                    std::span<const TrainCase> cases, const PostprocSpec& postproc) {
    if (cases.empty()) {
        throw std::invalid_argument("evaluate: no cases");
    }
    EvalResult result;
    std::vector<ProbabilityMap> probs = predict_cases(model, stats, cases);
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const Volume3D mask = filter_small_components(
            binarize(probs[i], postproc.threshold), postproc.min_component_size, postproc.conn);
        MetricsRow row;
        row.case_id = cases[i].case_id;
        row.dice = dice_coefficient(cases[i].truth, mask);
        const auto [precision, recall] = precision_recall(cases[i].truth, mask);
        row.precision = precision;
        row.recall = recall;
        result.rows.push_back(std::move(row));
    }
    result.mean = aggregate_metrics(result.rows);
    return result;
}

std::string model_to_string(const ToyModel& model) {
    std::string out = "TOYMODEL 1\n";
    char buf[64];
    for (double w : model.weights) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", w);
        out += buf;
    }
    return out;
}

ToyModel model_from_string(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "TOYMODEL 1") {
        throw std::runtime_error("model: bad header, expected 'TOYMODEL 1'");
    }
    ToyModel model;
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        if (!std::getline(in, line)) {
            throw std::runtime_error("model: missing weight line " + std::to_string(k + 1));
        }
        char* end = nullptr;
        model.weights[k] = std::strtod(line.c_str(), &end);
        if (end == line.c_str() || *end != '\0') {
            throw std::runtime_error("model: malformed weight '" + line + "'");
        }
    }
    return model;
}

void save_model(const ToyModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open file for writing: " + path.string());
    }
    out << model_to_string(model);
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

ToyModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_string(buf.str());
}

}  // namespace softseg
