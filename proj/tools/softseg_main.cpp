// softseg: soft-label lesion segmentation toolkit.
//
// Subcommands: synth, build-softmask, eval, sweep, train, postprocess,
// metrics. Exit codes: 0 success, 1 usage/validation error, 2 data/IO error.
// All outputs are deterministic: identical flags and input files produce
// bit-identical files.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "softseg/dice.hpp"
#include "softseg/metrics.hpp"
#include "softseg/morphology.hpp"
#include "softseg/postprocess.hpp"
#include "softseg/softmask.hpp"
#include "softseg/svol.hpp"
#include "softseg/synth.hpp"
#include "softseg/toytrain.hpp"
#include "softseg/volume.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace softseg;

namespace {

// Semantic flag errors that CLI11's per-option checks cannot express.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Connectivity conn_from_flag(int flag) {
    return flag == 26 ? Connectivity::Full26 : Connectivity::Face6;
}

std::string fmt_metric(double value01) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", value01 * 100.0);
    return buf;
}

std::string fmt_loss(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

std::string fmt_gamma(double gamma) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", gamma);
    std::string s = buf;
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
        s += ".0";
    }
    return s;
}

void require_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw UsageError("--gamma must lie in [0, 1)");
    }
}

ProbabilityMap load_probability(const fs::path& path) {
    Volume3D vol = load_svol(path);
    if (vol.is_mask()) vol = vol.as_real();
    return ProbabilityMap(std::move(vol));
}

Volume3D load_mask(const fs::path& path) {
    Volume3D vol = load_svol(path);
    if (!vol.is_mask()) {
        throw std::runtime_error("expected a u8 mask volume in " + path.string());
    }
    return vol;
}

// ---------------------------------------------------------------------------
// Dataset directory layout: <id>_flair.svol, <id>_r1.svol, <id>_r2.svol plus
// manifest.csv with header case_id,seed,lesion_voxels_r1,lesion_voxels_r2.

constexpr const char* kManifestHeader = "case_id,seed,lesion_voxels_r1,lesion_voxels_r2";

struct DatasetCase {
    std::string case_id;
    std::uint64_t seed = 0;
    Volume3D flair;
    Volume3D truth_r1;
    Volume3D truth_r2;
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
        throw std::runtime_error("manifest: malformed " + what + " '" + text + "'");
    }
    return std::stoull(text);
}

std::vector<DatasetCase> load_dataset(const fs::path& dir,
                                      const std::vector<std::uint64_t>& seed_filter) {
    const fs::path manifest_path = dir / "manifest.csv";
    std::ifstream in(manifest_path);
    if (!in) {
        throw std::runtime_error("cannot open file: " + manifest_path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != kManifestHeader) {
        throw std::runtime_error("manifest: bad header in " + manifest_path.string());
    }

    const std::set<std::uint64_t> wanted(seed_filter.begin(), seed_filter.end());
    std::set<std::uint64_t> found;
    std::vector<DatasetCase> cases;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 4) {
            throw std::runtime_error("manifest: expected 4 fields, got '" + line + "'");
        }
        const std::uint64_t seed = parse_u64(fields[1], "seed");
        if (!wanted.empty() && !wanted.count(seed)) continue;
        found.insert(seed);

        DatasetCase c;
        c.case_id = fields[0];
        c.seed = seed;
        c.flair = load_svol(dir / (c.case_id + "_flair.svol"));
        if (!c.flair.is_real()) {
            throw std::runtime_error("dataset: " + c.case_id + "_flair.svol is not f64");
        }
        c.truth_r1 = load_mask(dir / (c.case_id + "_r1.svol"));
        c.truth_r2 = load_mask(dir / (c.case_id + "_r2.svol"));
        cases.push_back(std::move(c));
    }
    for (std::uint64_t s : wanted) {
        if (!found.count(s)) {
            throw std::runtime_error("dataset: seed " + std::to_string(s) +
                                     " not present in " + manifest_path.string());
        }
    }
    if (cases.empty()) {
        throw std::runtime_error("dataset: no cases selected from " + manifest_path.string());
    }
    return cases;
}

std::vector<TrainCase> to_train_cases(const std::vector<DatasetCase>& cases, bool rater2) {
    std::vector<TrainCase> out;
    out.reserve(cases.size());
    for (const DatasetCase& c : cases) {
        out.push_back(TrainCase{c.case_id, c.flair, rater2 ? c.truth_r2 : c.truth_r1});
    }
    return out;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
    std::uint64_t seed = 1;
    std::size_t count = 1;
    std::string out_dir;
    std::vector<std::size_t> dims{32, 32, 32};
    unsigned lesions = 3;
    unsigned radius_min = 2;
    unsigned radius_max = 5;
    double base_intensity = 100.0;
    double contrast = 80.0;
    double noise_sigma = 5.0;
    unsigned rater2_erosion = 1;
};

void run_synth(const SynthArgs& args) {
    SynthParams params;
    params.dims = Dims3(args.dims[0], args.dims[1], args.dims[2]);
    params.lesion_count = args.lesions;
    params.radius_min = args.radius_min;
    params.radius_max = args.radius_max;
    params.base_intensity = args.base_intensity;
    params.contrast = args.contrast;
    params.noise_sigma = args.noise_sigma;
    params.rater2_erosion = args.rater2_erosion;
    params.validate();

    const fs::path dir(args.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " +
                                 ec.message());
    }

    std::string manifest = std::string(kManifestHeader) + "\n";
    for (std::size_t i = 0; i < args.count; ++i) {
        const std::uint64_t seed = args.seed + i;
        const SynthCase c = generate_case(seed, params);

        char id[32];
        std::snprintf(id, sizeof(id), "case%04zu", i);
        save_svol(c.intensity, dir / (std::string(id) + "_flair.svol"));
        save_svol(c.truth_r1, dir / (std::string(id) + "_r1.svol"));
        save_svol(c.truth_r2, dir / (std::string(id) + "_r2.svol"));

        manifest += std::string(id) + "," + std::to_string(seed) + "," +
                    std::to_string(c.truth_r1.popcount()) + "," +
                    std::to_string(c.truth_r2.popcount()) + "\n";
    }
    std::ofstream mf(dir / "manifest.csv", std::ios::binary);
    if (!mf) {
        throw std::runtime_error("cannot open file for writing: " +
                                 (dir / "manifest.csv").string());
    }
    mf << manifest;
    if (!mf) {
        throw std::runtime_error("write failed: " + (dir / "manifest.csv").string());
    }
}

// ---------------------------------------------------------------------------
// build-softmask

struct BuildSoftmaskArgs {
    std::string mask_path;
    std::string flair_path;
    unsigned target_size = 120;
    double gamma = 0.3;
    double flair_percentile = 10.0;
    std::string out_path;
};

void run_build_softmask(const BuildSoftmaskArgs& args, Connectivity conn) {
    require_gamma(args.gamma);
    if (args.target_size < 100) {
        throw UsageError("--target-size must be >= 100");
    }
    SoftMaskSpec spec;
    spec.target_percent = args.target_size;
    spec.gamma = args.gamma;
    spec.flair_percentile = args.flair_percentile;
    spec.conn = conn;

    const Volume3D mask = load_mask(args.mask_path);
    const Volume3D flair = load_svol(args.flair_path);
    const SoftMask sm = build_soft_mask(mask, flair, spec);
    save_svol(sm.values, args.out_path);
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string truth_path;
    std::string pred_path;
    double threshold = 0.5;
    std::uint64_t min_component = 1;
    bool soft = false;
    std::string dilated_path;
    double gamma = 0.3;
    std::string case_id = "case";
};

void run_eval(const EvalArgs& args, Connectivity conn) {
    const Volume3D truth = load_mask(args.truth_path);
    const ProbabilityMap pred = load_probability(args.pred_path);

    LossValue loss{};
    if (args.soft) {
        require_gamma(args.gamma);
        if (args.dilated_path.empty()) {
            throw UsageError("--soft requires --dilated");
        }
        const Volume3D dilated = load_mask(args.dilated_path);
        loss = soft_dice_loss(truth, dilated, args.gamma, pred);
    } else {
        loss = dice_loss(truth, pred);
    }

    Volume3D mask = binarize(pred, args.threshold);
    if (args.min_component > 1) {
        mask = filter_small_components(mask, args.min_component, conn);
    }
    const double dice = dice_coefficient(truth, mask);
    const auto [precision, recall] = precision_recall(truth, mask);

    std::cout << args.case_id << "," << fmt_metric(dice) << "," << fmt_metric(precision) << ","
              << fmt_metric(recall) << "," << fmt_loss(loss.value) << "\n";
}

// ---------------------------------------------------------------------------
// metrics

struct MetricsArgs {
    std::string truth_path;
    std::string pred_path;
    std::string case_id = "case";
};

void run_metrics(const MetricsArgs& args) {
    const Volume3D truth = load_mask(args.truth_path);
    const Volume3D pred = load_mask(args.pred_path);
    const double dice = dice_coefficient(truth, pred);
    const auto [precision, recall] = precision_recall(truth, pred);
    std::cout << args.case_id << "," << fmt_metric(dice) << "," << fmt_metric(precision) << ","
              << fmt_metric(recall) << "\n";
}

// ---------------------------------------------------------------------------
// postprocess

struct PostprocessArgs {
    std::string pred_path;
    double threshold = 0.5;
    std::uint64_t min_component = 19;
    std::string out_path;
};

void run_postprocess(const PostprocessArgs& args, Connectivity conn) {
    const ProbabilityMap pred = load_probability(args.pred_path);
    const Volume3D mask =
        filter_small_components(binarize(pred, args.threshold), args.min_component, conn);
    save_svol(mask, args.out_path);
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
    std::string data_dir;
    std::vector<std::uint64_t> seeds;
    std::string mode = "binary";
    unsigned target_size = 120;
    double gamma = 0.3;
    double flair_percentile = 10.0;
    double learning_rate = 1e-3;
    std::size_t iterations = 500;
    std::vector<double> init_weights{0.0, 0.0, 0.0, 0.0};
    bool no_standardize = false;
    std::string out_path;
    std::string history_path;
};

TrainConfig make_train_config(const TrainArgs& args, Connectivity conn) {
    TrainConfig config;
    if (args.mode == "binary") {
        config.loss_mode = LossMode::Binary;
    } else if (args.mode == "soft") {
        config.loss_mode = LossMode::Soft;
    } else {
        throw UsageError("--mode must be 'binary' or 'soft'");
    }
    require_gamma(args.gamma);
    if (args.target_size < 100) {
        throw UsageError("--target-size must be >= 100");
    }
    config.softmask_spec.target_percent = args.target_size;
    config.softmask_spec.gamma = args.gamma;
    config.softmask_spec.flair_percentile = args.flair_percentile;
    config.softmask_spec.conn = conn;
    config.learning_rate = args.learning_rate;
    config.iterations = args.iterations;
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        config.init_weights[k] = args.init_weights[k];
    }
    config.feature_standardization = !args.no_standardize;
    return config;
}

void run_train(const TrainArgs& args, Connectivity conn) {
    if (args.learning_rate < 0.0) {
        throw UsageError("--lr must be >= 0");
    }
    const TrainConfig config = make_train_config(args, conn);
    const std::vector<DatasetCase> dataset = load_dataset(args.data_dir, args.seeds);
    const std::vector<TrainCase> cases = to_train_cases(dataset, /*rater2=*/false);

    const TrainResult result = train(cases, config);
    save_model(result.model, args.out_path);

    if (!args.history_path.empty()) {
        std::ofstream out(args.history_path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot open file for writing: " + args.history_path);
        }
        out << "iteration,loss\n";
        char buf[64];
        for (std::size_t i = 0; i < result.history.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, result.history[i]);
            out << buf;
        }
        if (!out) {
            throw std::runtime_error("write failed: " + args.history_path);
        }
    }
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
    std::string config_path;
    std::string out_path;
    bool holdout = false;
};

void check_known_keys(const json& obj, const std::set<std::string>& allowed,
                      const std::string& where) {
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            throw std::runtime_error("sweep config: unknown key '" + item.key() + "' in " + where);
        }
    }
}

void run_sweep(const SweepArgs& args, Connectivity conn) {
    std::ifstream in(args.config_path);
    if (!in) {
        throw std::runtime_error("cannot open file: " + args.config_path);
    }
    json config;
    try {
        config = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("sweep config: " + std::string(e.what()));
    }
    check_known_keys(config,
                     {"dataset_dir", "seeds", "target_percents", "gammas", "train", "postproc"},
                     "top level");
    if (!config.contains("dataset_dir")) {
        throw std::runtime_error("sweep config: missing 'dataset_dir'");
    }

    // Relative dataset paths resolve against the config file's directory.
    fs::path dataset_dir = config["dataset_dir"].get<std::string>();
    if (dataset_dir.is_relative()) {
        dataset_dir = fs::path(args.config_path).parent_path() / dataset_dir;
    }

    std::vector<std::uint64_t> seeds;
    if (config.contains("seeds")) {
        seeds = config["seeds"].get<std::vector<std::uint64_t>>();
    }
    std::vector<unsigned> percents{100, 110, 120, 130, 140};
    if (config.contains("target_percents")) {
        percents = config["target_percents"].get<std::vector<unsigned>>();
    }
    std::vector<double> gammas{0.0, 0.2, 0.3, 0.4};
    if (config.contains("gammas")) {
        gammas = config["gammas"].get<std::vector<double>>();
    }
    if (percents.empty() || gammas.empty()) {
        throw std::runtime_error("sweep config: target_percents and gammas must be nonempty");
    }
    for (unsigned p : percents) {
        if (p < 100) throw std::runtime_error("sweep config: target_percents must be >= 100");
    }
    for (double g : gammas) {
        if (!(g >= 0.0 && g < 1.0)) {
            throw std::runtime_error("sweep config: gammas must lie in [0, 1)");
        }
    }
    std::sort(percents.begin(), percents.end());
    std::sort(gammas.begin(), gammas.end());

    TrainConfig base_config;
    base_config.loss_mode = LossMode::Soft;
    base_config.softmask_spec.conn = conn;
    if (config.contains("train")) {
        const json& t = config["train"];
        check_known_keys(
            t, {"learning_rate", "iterations", "flair_percentile", "feature_standardization"},
            "'train'");
        if (t.contains("learning_rate")) base_config.learning_rate = t["learning_rate"].get<double>();
        if (t.contains("iterations")) base_config.iterations = t["iterations"].get<std::size_t>();
        if (t.contains("flair_percentile")) {
            base_config.softmask_spec.flair_percentile = t["flair_percentile"].get<double>();
        }
        if (t.contains("feature_standardization")) {
            base_config.feature_standardization = t["feature_standardization"].get<bool>();
        }
    }
    PostprocSpec post;
    post.conn = conn;
    if (config.contains("postproc")) {
        const json& p = config["postproc"];
        check_known_keys(p, {"min_component_size"}, "'postproc'");
        if (p.contains("min_component_size")) {
            post.min_component_size = p["min_component_size"].get<std::uint64_t>();
        }
    }

    const std::vector<DatasetCase> dataset = load_dataset(dataset_dir, seeds);
    std::vector<DatasetCase> train_set, eval_set;
    if (args.holdout) {
        // Even seeds train, odd seeds evaluate.
        for (const DatasetCase& c : dataset) {
            (c.seed % 2 == 0 ? train_set : eval_set).push_back(c);
        }
        if (train_set.empty() || eval_set.empty()) {
            throw std::runtime_error("sweep: --holdout needs both even- and odd-seed cases");
        }
    } else {
        train_set = dataset;
        eval_set = dataset;
    }

    const std::vector<TrainCase> train_cases = to_train_cases(train_set, false);
    const std::vector<TrainCase> eval_r1 = to_train_cases(eval_set, false);
    const std::vector<TrainCase> eval_r2 = to_train_cases(eval_set, true);
    const std::vector<double> grid = default_threshold_grid();

    std::string csv =
        "target_percent,gamma,dice_r1,dice_r2,precision_r1,precision_r2,recall_r1,recall_r2\n";
    for (unsigned pct : percents) {
        for (double gamma : gammas) {
            TrainConfig cfg = base_config;
            cfg.softmask_spec.target_percent = pct;
            cfg.softmask_spec.gamma = gamma;

            const TrainResult tr = train(train_cases, cfg);
            PostprocSpec run_post = post;
            run_post.threshold = calibrate_threshold(tr.model, tr.stats, train_cases, grid);

            const EvalResult r1 = evaluate(tr.model, tr.stats, eval_r1, run_post);
            const EvalResult r2 = evaluate(tr.model, tr.stats, eval_r2, run_post);

            csv += std::to_string(pct) + "," + fmt_gamma(gamma) + "," +
                   fmt_metric(r1.mean.dice) + "," + fmt_metric(r2.mean.dice) + "," +
                   fmt_metric(r1.mean.precision) + "," + fmt_metric(r2.mean.precision) + "," +
                   fmt_metric(r1.mean.recall) + "," + fmt_metric(r2.mean.recall) + "\n";
        }
    }

    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open file for writing: " + args.out_path);
    }
    out << csv;
    if (!out) {
        throw std::runtime_error("write failed: " + args.out_path);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"soft-label lesion segmentation toolkit"};
    app.require_subcommand(1);

    int conn_flag = 6;
    app.add_option("--conn", conn_flag, "structuring-element connectivity")
        ->check(CLI::IsMember({6, 26}));

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic lesion dataset");
    synth->fallthrough();
    synth->add_option("--seed", synth_args.seed, "seed of the first case");
    synth->add_option("--count", synth_args.count, "number of cases")
        ->required()
        ->check(CLI::PositiveNumber);
    synth->add_option("--out", synth_args.out_dir, "output directory")->required();
    synth->add_option("--dims", synth_args.dims, "volume extents nx ny nz")->expected(3);
    synth->add_option("--lesions", synth_args.lesions, "lesions per case");
    synth->add_option("--radius-min", synth_args.radius_min, "minimum lesion radius");
    synth->add_option("--radius-max", synth_args.radius_max, "maximum lesion radius");
    synth->add_option("--base", synth_args.base_intensity, "background intensity");
    synth->add_option("--contrast", synth_args.contrast, "lesion intensity above background");
    synth->add_option("--noise", synth_args.noise_sigma, "Gaussian noise sigma");
    synth->add_option("--rater2-erosion", synth_args.rater2_erosion,
                      "erosion steps for the stricter rater");

    BuildSoftmaskArgs bsm_args;
    CLI::App* bsm = app.add_subcommand("build-softmask", "construct a soft labeled mask");
    bsm->fallthrough();
    bsm->add_option("--mask", bsm_args.mask_path, "expert binary mask (u8 svol)")->required();
    bsm->add_option("--flair", bsm_args.flair_path, "FLAIR intensity volume (f64 svol)")
        ->required();
    bsm->add_option("--target-size", bsm_args.target_size, "target size as % of mask voxels");
    bsm->add_option("--gamma", bsm_args.gamma, "soft label value");
    bsm->add_option("--flair-percentile", bsm_args.flair_percentile,
                    "gate percentile over lesion FLAIR")
        ->check(CLI::Range(0.0, 100.0));
    bsm->add_option("--out", bsm_args.out_path, "output soft mask (f64 svol)")->required();

    EvalArgs eval_args;
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a probabilistic prediction");
    eval_cmd->fallthrough();
    eval_cmd->add_option("--truth", eval_args.truth_path, "truth mask (u8 svol)")->required();
    eval_cmd->add_option("--pred", eval_args.pred_path, "predicted probability map (svol)")
        ->required();
    eval_cmd->add_option("--threshold", eval_args.threshold, "binarization threshold")
        ->check(CLI::Range(0.0, 1.0));
    eval_cmd->add_option("--min-component", eval_args.min_component,
                         "drop components smaller than this")
        ->check(CLI::PositiveNumber);
    eval_cmd->add_flag("--soft", eval_args.soft, "report the soft Dice loss");
    eval_cmd->add_option("--dilated", eval_args.dilated_path, "dilated-region mask (u8 svol)");
    eval_cmd->add_option("--gamma", eval_args.gamma, "soft label value");
    eval_cmd->add_option("--case-id", eval_args.case_id, "label for the CSV row");

    MetricsArgs metrics_args;
    CLI::App* metrics_cmd = app.add_subcommand("metrics", "compare two binary masks");
    metrics_cmd->fallthrough();
    metrics_cmd->add_option("--truth", metrics_args.truth_path, "truth mask (u8 svol)")
        ->required();
    metrics_cmd->add_option("--pred", metrics_args.pred_path, "predicted mask (u8 svol)")
        ->required();
    metrics_cmd->add_option("--case-id", metrics_args.case_id, "label for the CSV row");

    PostprocessArgs post_args;
    CLI::App* post_cmd = app.add_subcommand("postprocess", "binarize and filter a prediction");
    post_cmd->fallthrough();
    post_cmd->add_option("--pred", post_args.pred_path, "probability map (svol)")->required();
    post_cmd->add_option("--threshold", post_args.threshold, "binarization threshold")
        ->check(CLI::Range(0.0, 1.0));
    post_cmd->add_option("--min-component", post_args.min_component,
                         "keep components of at least this many voxels")
        ->check(CLI::PositiveNumber);
    post_cmd->add_option("--out", post_args.out_path, "output mask (u8 svol)")->required();

    TrainArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train", "train the toy segmenter");
    train_cmd->fallthrough();
    train_cmd->add_option("--data", train_args.data_dir, "dataset directory")->required();
    train_cmd->add_option("--seeds", train_args.seeds, "restrict to these dataset seeds")
        ->delimiter(',');
    train_cmd->add_option("--mode", train_args.mode, "loss mode: binary or soft");
    train_cmd->add_option("--target-size", train_args.target_size,
                          "soft mask target size (soft mode)");
    train_cmd->add_option("--gamma", train_args.gamma, "soft label value (soft mode)");
    train_cmd->add_option("--flair-percentile", train_args.flair_percentile,
                          "soft mask gate percentile")
        ->check(CLI::Range(0.0, 100.0));
    train_cmd->add_option("--lr", train_args.learning_rate, "learning rate");
    train_cmd->add_option("--iterations", train_args.iterations, "gradient descent iterations")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--init", train_args.init_weights, "initial weights")->expected(4);
    train_cmd->add_flag("--no-standardize", train_args.no_standardize,
                        "disable feature standardization");
    train_cmd->add_option("--out", train_args.out_path, "output model file")->required();
    train_cmd->add_option("--history", train_args.history_path, "per-iteration loss CSV");

    SweepArgs sweep_args;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "dilation-size x soft-label grid sweep");
    sweep_cmd->fallthrough();
    sweep_cmd->add_option("--config", sweep_args.config_path, "sweep config JSON")->required();
    sweep_cmd->add_option("--out", sweep_args.out_path, "output CSV")->required();
    sweep_cmd->add_flag("--holdout", sweep_args.holdout,
                        "train on even seeds, evaluate on odd seeds");

    try {
        app.parse(argc, argv);
        const Connectivity conn = conn_from_flag(conn_flag);
        if (*synth) run_synth(synth_args);
        if (*bsm) run_build_softmask(bsm_args, conn);
        if (*eval_cmd) run_eval(eval_args, conn);
        if (*metrics_cmd) run_metrics(metrics_args);
        if (*post_cmd) run_postprocess(post_args, conn);
        if (*train_cmd) run_train(train_args, conn);
        if (*sweep_cmd) run_sweep(sweep_args, conn);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
