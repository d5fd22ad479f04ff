// difem: extract features, train, predict, evaluate, cross-validate and
// generate synthetic corpora.
//
// Exit codes: 0 success, 2 input/config error, 3 data/contract error.

#include "difem/classifiers.hpp"
#include "difem/errors.hpp"
#include "difem/evaluation.hpp"
#include "difem/feature_cache.hpp"
#include "difem/features.hpp"
#include "difem/model_io.hpp"
#include "difem/synthgen.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace difem;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitData = 3;

struct FeatureFlags {
    bool no_velocity = false;
    bool no_overlap = false;
    std::string normalize;  // "WxH" or empty
    double confidence_floor = 0.0;
    bool per_frame_velocity = false;
};

struct ClassifierFlags {
    std::string classifier = "forest";
    std::size_t n_trees = 100;
    std::size_t n_estimators = 100;
    std::size_t k = 5;
};

struct Options {
    std::uint64_t seed = 42;
    int jobs = 0;
    bool quiet = false;

    std::string manifest;
    std::string features;
    std::string model;
    std::string out;
    std::string report;
    std::size_t folds = 5;

    FeatureFlags feature;
    ClassifierFlags clf;

    SynthCorpusSpec synth;
};

std::optional<FrameSize> parse_frame_size(const std::string& text)
{
    if (text.empty()) {
        return std::nullopt;
    }
    double w = 0.0;
    double h = 0.0;
    char sep = 0;
    std::istringstream in(text);
    if (!(in >> w >> sep >> h) || (sep != 'x' && sep != 'X') || !in.eof() || w <= 0.0 || h <= 0.0) {
        throw ConfigError("--normalize expects WIDTHxHEIGHT, got \"" + text + "\"");
    }
    return FrameSize{w, h};
}

FeatureConfig feature_config(const FeatureFlags& flags)
{
    FeatureConfig config;
    config.enable_velocity = !flags.no_velocity;
    config.enable_overlap = !flags.no_overlap;
    config.normalize_to = parse_frame_size(flags.normalize);
    config.confidence_floor = flags.confidence_floor;
    config.per_frame_velocity = flags.per_frame_velocity;
    if (!config.enable_velocity && !config.enable_overlap) {
        throw ConfigError("--no-velocity and --no-overlap together leave no features");
    }
    if (!(flags.confidence_floor >= 0.0 && flags.confidence_floor <= 1.0)) {
        throw ConfigError("--confidence-floor must lie in [0, 1]");
    }
    return config;
}

ClassifierConfig classifier_config(const Options& opt)
{
    const auto kind = parse_classifier_kind(opt.clf.classifier);
    if (!kind) {
        throw ConfigError("unknown classifier \"" + opt.clf.classifier + "\" (tree, forest, adaboost, knn)");
    }
    ClassifierConfig config;
    config.kind = *kind;
    config.n_trees = opt.clf.n_trees;
    config.n_estimators = opt.clf.n_estimators;
    config.k = opt.clf.k;
    config.seed = opt.seed;
    config.jobs = opt.jobs;
    if (config.n_trees == 0 || config.n_estimators == 0 || config.k == 0) {
        throw ConfigError("--trees, --estimators and --k must be positive");
    }
    return config;
}

ordered_json feature_json(const FeatureConfig& c)
{
    ordered_json j;
    j["velocity"] = c.enable_velocity;
    j["overlap"] = c.enable_overlap;
    j["normalize"] = c.normalize_to ? ordered_json{{"width", c.normalize_to->width}, {"height", c.normalize_to->height}}
                                    : ordered_json(nullptr);
    j["confidence_floor"] = c.confidence_floor;
    j["per_frame_velocity"] = c.per_frame_velocity;
    return j;
}

ordered_json classifier_json(const ClassifierConfig& c)
{
    ordered_json j;
    j["kind"] = std::string(to_string(c.kind));
    switch (c.kind) {
    case ClassifierKind::RandomForest:
        j["n_trees"] = c.n_trees;
        break;
    case ClassifierKind::AdaBoost:
        j["n_estimators"] = c.n_estimators;
        break;
    case ClassifierKind::KNearestNeighbor:
        j["k"] = c.k;
        break;
    case ClassifierKind::DecisionTree:
        break;
    }
    return j;
}

std::string absolute(const std::string& path)
{
    return path.empty() ? path : fs::absolute(path).lexically_normal().string();
}

// Resolved configuration written next to a run's outputs.
void write_sidecar(const fs::path& path, const std::string& command, ordered_json inputs, ordered_json outputs,
                   ordered_json settings)
{
    ordered_json doc;
    doc["command"] = command;
    doc["inputs"] = std::move(inputs);
    doc["outputs"] = std::move(outputs);
    for (auto& [key, value] : settings.items()) {
        doc[key] = value;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << doc.dump(2) << '\n';
}

fs::path sidecar_for(const std::string& output)
{
    return fs::path(output + ".config.json");
}

void ensure_parent(const fs::path& path)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
}

Dataset dataset_from(const FeatureTable& table)
{
    if (table.rows.empty()) {
        throw SchemaError("feature CSV has no rows");
    }
    return table.to_dataset();
}

// ---------------------------------------------------------------- extract

struct ExtractFailure {
    std::string video;
    std::string message;
};

int cmd_extract(const Options& opt)
{
    const FeatureConfig config = feature_config(opt.feature);
    const auto entries = read_manifest(opt.manifest);

    std::vector<std::optional<FeatureVector>> results(entries.size());
    std::vector<std::string> errors(entries.size());
    const int threads = opt.jobs > 0 ? opt.jobs : omp_get_max_threads();
    const auto n = static_cast<std::ptrdiff_t>(entries.size());

#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const ManifestEntry& entry = entries[static_cast<std::size_t>(i)];
        try {
            const VideoPoseSequence seq = load_video_dir(entry.resolved, entry.video_dir, entry.label);
            results[static_cast<std::size_t>(i)] = extract_features(seq, config);
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(i)] = e.what();
        }
    }

    std::vector<FeatureVector> rows;
    std::vector<ExtractFailure> failures;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (results[i]) {
            rows.push_back(std::move(*results[i]));
        } else {
            failures.push_back({entries[i].video_dir, errors[i]});
        }
    }

    ensure_parent(opt.out);
    write_feature_csv(fs::path(opt.out), rows, config.enable_velocity, config.enable_overlap);

    const fs::path error_report = opt.out + ".errors.csv";
    fs::remove(error_report);
    if (!failures.empty()) {
        std::ofstream err(error_report, std::ios::binary);
        err << "video_dir,error\n";
        for (const ExtractFailure& f : failures) {
            std::string message = f.message;
            for (char& c : message) {
                if (c == ',' || c == '\n') {
                    c = ';';
                }
            }
            err << f.video << ',' << message << '\n';
            std::cerr << "difem extract: skipped " << f.video << ": " << f.message << '\n';
        }
    }

    ordered_json outputs{{"features", absolute(opt.out)}};
    if (!failures.empty()) {
        outputs["errors"] = absolute(error_report.string());
    }
    write_sidecar(sidecar_for(opt.out), "extract", {{"manifest", absolute(opt.manifest)}}, outputs,
                  {{"features", feature_json(config)}, {"jobs", opt.jobs}});

    if (!opt.quiet) {
        std::cout << "extracted " << rows.size() << " of " << entries.size() << " videos -> " << opt.out << '\n';
    }
    if (!failures.empty()) {
        std::cerr << "difem extract: " << failures.size() << " video(s) failed; see " << error_report.string()
                  << '\n';
        return kExitData;
    }
    return 0;
}

// ---------------------------------------------------------------- train

double training_accuracy(const TrainedModel& model, const Dataset& data)
{
    const auto preds = predict_all(model, data);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        hits += preds[i] == data.label(i);
    }
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

int cmd_train(const Options& opt)
{
    const ClassifierConfig config = classifier_config(opt);
    const FeatureTable table = read_feature_csv(fs::path(opt.features));
    const Dataset data = dataset_from(table);

    const TrainedModel model = train(data, config);
    ensure_parent(opt.model);
    save_model(model, opt.model);

    write_sidecar(sidecar_for(opt.model), "train", {{"features", absolute(opt.features)}},
                  {{"model", absolute(opt.model)}},
                  {{"classifier", classifier_json(config)},
                   {"seed", opt.seed},
                   {"feature_columns", table.feature_columns}});

    if (!opt.quiet) {
        const auto counts = data.class_counts();
        std::printf("trained %s on %zu rows x %zu features (NonFight %zu, Fight %zu)\n",
                    std::string(to_string(config.kind)).c_str(), data.size(), data.dimension(), counts[0],
                    counts[1]);
        std::printf("training accuracy %.4f\nmodel written to %s\n", training_accuracy(model, data),
                    opt.model.c_str());
    }
    return 0;
}

// ---------------------------------------------------------------- predict

int cmd_predict(const Options& opt)
{
    const TrainedModel model = load_model(opt.model);
    const FeatureTable table = read_feature_csv(fs::path(opt.features));

    std::ostringstream out;
    out << "video_id,predicted,label\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const Label label = predict(model, table.rows[i]);
        out << table.video_ids[i] << ',' << to_string(label) << ',';
        if (table.labels[i]) {
            out << to_string(*table.labels[i]);
        }
        out << '\n';
    }

    ensure_parent(opt.out);
    std::ofstream file(opt.out, std::ios::binary);
    if (!file) {
        throw IoError("cannot write " + opt.out);
    }
    file << out.str();
    write_sidecar(sidecar_for(opt.out), "predict", {{"model", absolute(opt.model)}, {"features", absolute(opt.features)}},
                  {{"predictions", absolute(opt.out)}}, {{"kind", std::string(to_string(model_kind(model)))}});
    if (!opt.quiet) {
        std::cout << "wrote " << table.rows.size() << " predictions -> " << opt.out << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------- evaluate / cv

void write_text_file(const fs::path& path, const std::string& text)
{
    ensure_parent(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
}

int cmd_evaluate(const Options& opt)
{
    const TrainedModel model = load_model(opt.model);
    const Dataset data = dataset_from(read_feature_csv(fs::path(opt.features)));
    const EvaluationReport report = evaluate(model, data);

    std::ostringstream text;
    write_report_text(text, report, std::string(to_string(model_kind(model))) + " on " + opt.features);
    std::ostringstream csv;
    write_report_csv(csv, report);
    write_text_file(opt.report + ".txt", text.str());
    write_text_file(opt.report + ".csv", csv.str());
    write_sidecar(sidecar_for(opt.report), "evaluate",
                  {{"model", absolute(opt.model)}, {"features", absolute(opt.features)}},
                  {{"text", absolute(opt.report + ".txt")}, {"csv", absolute(opt.report + ".csv")}},
                  {{"kind", std::string(to_string(model_kind(model)))}});
    if (!opt.quiet) {
        std::cout << text.str();
    }
    return 0;
}

int cmd_cv(const Options& opt)
{
    const ClassifierConfig config = classifier_config(opt);
    const Dataset data = dataset_from(read_feature_csv(fs::path(opt.features)));
    const CvReport report = kfold_cv(data, opt.folds, config, opt.seed);

    std::ostringstream text;
    write_cv_report_text(text, report, std::string(to_string(config.kind)) + " on " + opt.features);
    std::ostringstream csv;
    write_cv_report_csv(csv, report);
    write_text_file(opt.report + ".txt", text.str());
    write_text_file(opt.report + ".csv", csv.str());
    write_sidecar(sidecar_for(opt.report), "cv", {{"features", absolute(opt.features)}},
                  {{"text", absolute(opt.report + ".txt")}, {"csv", absolute(opt.report + ".csv")}},
                  {{"classifier", classifier_json(config)}, {"folds", opt.folds}, {"seed", opt.seed}});
    if (!opt.quiet) {
        std::cout << text.str();
    }
    return 0;
}

// ---------------------------------------------------------------- synth

int cmd_synth(const Options& opt)
{
    SynthCorpusSpec spec = opt.synth;
    spec.seed = opt.seed;
    const auto videos = generate_corpus(spec);
    write_corpus(videos, opt.out);
    const fs::path manifest = fs::path(opt.out) / "manifest.csv";
    write_sidecar(fs::path(opt.out) / "synth.config.json", "synth", ordered_json::object(),
                  {{"root", absolute(opt.out)}, {"manifest", absolute(manifest.string())}},
                  {{"n_fight", spec.n_fight},
                   {"n_nonfight", spec.n_nonfight},
                   {"n_frames", spec.n_frames},
                   {"n_persons", spec.n_persons},
                   {"seed", spec.seed},
                   {"presets",
                    {{"fight", {{"velocity_scale", kFightVelocityScale}, {"proximity_scale", kFightProximityScale}}},
                     {"nonfight",
                      {{"velocity_scale", kNonFightVelocityScale}, {"proximity_scale", kNonFightProximityScale}}}}}});
    if (!opt.quiet) {
        std::cout << "wrote " << videos.size() << " videos -> " << manifest.string() << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------- wiring

void add_feature_flags(CLI::App* cmd, FeatureFlags& f)
{
    cmd->add_flag("--no-velocity", f.no_velocity, "Drop the three velocity features");
    cmd->add_flag("--no-overlap", f.no_overlap, "Drop the two joint-overlap features");
    cmd->add_option("--normalize", f.normalize, "Divide velocities by the diagonal of a WIDTHxHEIGHT frame");
    cmd->add_option("--confidence-floor", f.confidence_floor, "Minimum keypoint confidence")->capture_default_str();
    cmd->add_flag("--per-frame-velocity", f.per_frame_velocity,
                  "Average velocities per frame pair before taking statistics");
}

void add_classifier_flags(CLI::App* cmd, ClassifierFlags& c)
{
    cmd->add_option("-c,--classifier", c.classifier, "tree, forest, adaboost or knn")->capture_default_str();
    cmd->add_option("--trees", c.n_trees, "Random forest size")->capture_default_str();
    cmd->add_option("--estimators", c.n_estimators, "AdaBoost rounds")->capture_default_str();
    cmd->add_option("--k", c.k, "Neighbours for kNN")->capture_default_str();
}

int run(int argc, char** argv)
{
    Options opt;
    CLI::App app{"Skeleton-based fight detection features and classifiers"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", opt.seed, "Random seed")->capture_default_str();
    app.add_option("-j,--jobs", opt.jobs, "Worker threads (0 = all cores)")->capture_default_str();
    app.add_flag("-q,--quiet", opt.quiet, "Suppress progress output");

    auto* extract = app.add_subcommand("extract", "Feature CSV from a manifest of keypoint directories");
    extract->add_option("-m,--manifest", opt.manifest, "CSV with columns video_dir,label")->required();
    extract->add_option("-o,--out", opt.out, "Feature CSV to write")->required();
    add_feature_flags(extract, opt.feature);

    auto* train_cmd = app.add_subcommand("train", "Train a classifier on a feature CSV");
    train_cmd->add_option("-f,--features", opt.features, "Labelled feature CSV")->required();
    train_cmd->add_option("-o,--model", opt.model, "Model file to write")->required();
    add_classifier_flags(train_cmd, opt.clf);

    auto* predict_cmd = app.add_subcommand("predict", "Predict labels for a feature CSV");
    predict_cmd->add_option("-M,--model", opt.model, "Model file")->required();
    predict_cmd->add_option("-f,--features", opt.features, "Feature CSV")->required();
    predict_cmd->add_option("-o,--out", opt.out, "Predictions CSV to write")->required();

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a model on a labelled feature CSV");
    evaluate_cmd->add_option("-M,--model", opt.model, "Model file")->required();
    evaluate_cmd->add_option("-f,--features", opt.features, "Labelled feature CSV")->required();
    evaluate_cmd->add_option("-r,--report", opt.report, "Report path prefix (.txt and .csv are added)")->required();

    auto* cv_cmd = app.add_subcommand("cv", "Stratified k-fold cross-validation");
    cv_cmd->add_option("-f,--features", opt.features, "Labelled feature CSV")->required();
    cv_cmd->add_option("-r,--report", opt.report, "Report path prefix (.txt and .csv are added)")->required();
    cv_cmd->add_option("--folds", opt.folds, "Number of folds")->capture_default_str();
    add_classifier_flags(cv_cmd, opt.clf);

    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic keypoint corpus and manifest");
    synth_cmd->add_option("-o,--out", opt.out, "Output directory")->required();
    synth_cmd->add_option("--fight", opt.synth.n_fight, "Fight videos")->capture_default_str();
    synth_cmd->add_option("--nonfight", opt.synth.n_nonfight, "NonFight videos")->capture_default_str();
    synth_cmd->add_option("--frames", opt.synth.n_frames, "Frames per video")->capture_default_str();
    synth_cmd->add_option("--persons", opt.synth.n_persons, "Persons per video")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    if (extract->parsed()) {
        return cmd_extract(opt);
    }
    if (train_cmd->parsed()) {
        return cmd_train(opt);
    }
    if (predict_cmd->parsed()) {
        return cmd_predict(opt);
    }
    if (evaluate_cmd->parsed()) {
        return cmd_evaluate(opt);
    }
    if (cv_cmd->parsed()) {
        return cmd_cv(opt);
    }
    return cmd_synth(opt);
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const IoError& e) {
        std::cerr << "difem: " << e.what() << '\n';
        return kExitInput;
    } catch (const ConfigError& e) {
        std::cerr << "difem: " << e.what() << '\n';
        return kExitInput;
    } catch (const SchemaError& e) {
        std::cerr << "difem: " << e.what() << '\n';
        return kExitInput;
    } catch (const ParseError& e) {
        std::cerr << "difem: " << e.what() << '\n';
        return kExitInput;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "difem: " << e.what() << '\n';
        return kExitInput;
    } catch (const Error& e) {
        std::cerr << "difem: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "difem: " << e.what() << '\n';
        return kExitData;
    }
}
