// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// non-zero when any criterion fails.
//
// The dataset-backed check reads DIFEM_RWF2000_TRAIN_MANIFEST and
// DIFEM_RWF2000_TEST_MANIFEST (manifest CSVs of pre-extracted keypoint
// directories); it is skipped when either is unset.

#include "difem/classifiers.hpp"
#include "difem/errors.hpp"
#include "difem/evaluation.hpp"
#include "difem/features.hpp"
#include "difem/model_io.hpp"
#include "difem/synthgen.hpp"
#include "fixtures.hpp"
#include "oracle/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace difem;

namespace {

enum class Outcome { Pass, Fail, Skip };

struct Result {
    Outcome outcome;
    std::string detail;
};

Result pass(std::string detail) { return {Outcome::Pass, std::move(detail)}; }
Result fail(std::string detail) { return {Outcome::Fail, std::move(detail)}; }
Result skip(std::string detail) { return {Outcome::Skip, std::move(detail)}; }

std::string format(const char* fmt, auto... args)
{
    char buffer[512];
    std::snprintf(buffer, sizeof buffer, fmt, args...);
    return buffer;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

const std::span<const JointSpec> kJoints{selected_joints()};

// ------------------------------------------------------------------ features

Result feature_oracle()
{
    const auto start = std::chrono::steady_clock::now();
    Rng rng(20240601);
    double worst = 0.0;
    std::size_t mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
        const VideoPoseSequence seq = fixtures::random_sequence(rng, 4, 40);
        const auto got = extract_features(seq).values();
        const auto expected = oracle::features(seq, kJoints);
        for (std::size_t c = 0; c < kFeatureCount; ++c) {
            const double scale = std::max(std::abs(got[c]), std::abs(expected[c]));
            const double rel = scale == 0.0 ? 0.0 : std::abs(got[c] - expected[c]) / scale;
            worst = std::max(worst, rel);
            mismatches += rel > 1e-9;
        }
    }
    const double elapsed = seconds_since(start);
    const std::string detail =
        format("1000 sequences, worst relative error %.3g (limit 1e-9), %.2f s (limit 60 s)", worst, elapsed);
    return mismatches == 0 && elapsed < 60.0 ? pass(detail) : fail(detail);
}

Result velocity_suite()
{
    const bool examples = joint_velocity({5, 5, 1}, {5, 5, 1}, 0.8) == 0.0 &&
                          joint_velocity({10, 10, 1}, {13, 14, 1}, 1.0) == 5.0 &&
                          joint_velocity({10, 10, 1}, {13, 14, 1}, 0.8) == std::sqrt(20.0);
    Rng rng(77);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Keypoint a{rng.uniform(0, 640), rng.uniform(0, 360), 1.0};
        const Keypoint b{rng.uniform(0, 640), rng.uniform(0, 360), 1.0};
        const double w = rng.uniform(0.05, 2.0);
        const double c = rng.uniform(0.01, 100.0);
        const double base = joint_velocity(a, b, w);
        const double scaled = joint_velocity(a, b, c * w);
        const double expected = std::sqrt(c) * base;
        worst = std::max(worst, expected == 0.0 ? 0.0 : std::abs(scaled - expected) / expected);
    }
    const std::string detail =
        format("examples 0, 5, sqrt(20) %s; weight scaling over 10000 cases, worst relative error %.3g (limit 1e-12)",
               examples ? "exact" : "WRONG", worst);
    return examples && worst <= 1e-12 ? pass(detail) : fail(detail);
}

Result overlap_suite()
{
    const std::size_t three = joint_overlap_count(fixtures::reach_frame(3), kJoints).count;
    const std::size_t four = joint_overlap_count(fixtures::reach_frame(4), kJoints).count;
    Rng rng(4242);
    std::size_t mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
        const FramePoses frame = fixtures::random_frame(rng, 4);
        mismatches += joint_overlap_count(frame, kJoints).count != oracle::overlap_count(frame, kJoints);
    }
    const std::string detail =
        format("reach fixtures count %zu and %zu (expected 3 and 4); %zu/1000 random frames differ from the "
               "double-loop oracle",
               three, four, mismatches);
    return three == 3 && four == 4 && mismatches == 0 ? pass(detail) : fail(detail);
}

// ------------------------------------------------------------------ classifiers

Result classifier_suite()
{
    std::vector<std::string> problems;

    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        Dataset data(5);
        std::vector<double> row(5);
        for (int i = 0; i < 100; ++i) {
            for (double& v : row) {
                v = rng.uniform(0.0, 10.0);
            }
            data.add(row, rng.bernoulli(0.5) ? Label::Fight : Label::NonFight);
        }
        const DecisionTree tree = train_tree(data);
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (tree.predict(data.row(i)) != data.label(i)) {
                problems.push_back("tree misfits consistent training data");
                trial = 20;
                break;
            }
        }
    }

    const double alpha_error = std::abs(samme_alpha(0.25) - std::log(3.0));
    if (alpha_error > 1e-12) {
        problems.push_back(format("alpha(0.25) off by %.3g", alpha_error));
    }

    const Dataset knn_data = fixtures::gaussian_blobs(rng, 100, 5, 1.0);
    const KnnModel knn = train_knn(knn_data, 5);
    std::size_t knn_mismatch = 0;
    std::vector<double> query(5);
    for (int i = 0; i < 500; ++i) {
        for (double& v : query) {
            v = rng.uniform(-2.0, 3.0);
        }
        knn_mismatch += knn_predict(knn, query) != oracle::knn(knn_data, query, 5);
    }
    if (knn_mismatch != 0) {
        problems.push_back(format("kNN differs from the sorting oracle on %zu/500 queries", knn_mismatch));
    }

    const std::string a = serialize_model(train_forest(knn_data, 100, 42));
    const std::string b = serialize_model(train_forest(knn_data, 100, 42));
    if (a != b) {
        problems.push_back("forest serialisation differs between identical-seed runs");
    }

    if (!problems.empty()) {
        std::string detail;
        for (const auto& p : problems) {
            detail += (detail.empty() ? "" : "; ") + p;
        }
        return fail(detail);
    }
    return pass(format("tree 100%% training accuracy x20; |alpha(0.25) - ln 3| = %.3g; kNN 500/500 match; "
                       "forest models byte-identical (%zu bytes)",
                       alpha_error, a.size()));
}

// ------------------------------------------------------------------ metrics

Result metrics_suite()
{
    std::vector<std::string> problems;
    const ConfusionMatrix cm =
        confusion(std::vector<Label>{Label::Fight, Label::NonFight, Label::Fight, Label::Fight},
                  std::vector<Label>{Label::Fight, Label::NonFight, Label::NonFight, Label::Fight});
    if (!(cm.tn == 1 && cm.fp == 1 && cm.fn == 0 && cm.tp == 2)) {
        problems.push_back("confusion fixture");
    }
    const EvaluationReport r = metrics(ConfusionMatrix{8, 2, 1, 9});
    const ClassMetrics& fight = r.per_class[label_index(Label::Fight)];
    if (r.accuracy != 17.0 / 20.0 || fight.precision != 9.0 / 11.0 || fight.recall != 9.0 / 10.0) {
        problems.push_back("precision/recall fixture");
    }
    const double f1 = 2.0 * (9.0 / 11.0) * 0.9 / (9.0 / 11.0 + 0.9);
    if (std::abs(fight.f1 - f1) > 1e-15) {
        problems.push_back("F1 fixture");
    }
    const EvaluationReport empty_fight = metrics(ConfusionMatrix{5, 0, 0, 0});
    const ClassMetrics& ef = empty_fight.per_class[label_index(Label::Fight)];
    if (ef.precision != 0.0 || ef.recall != 0.0 || ef.f1 != 0.0) {
        problems.push_back("0/0 rule");
    }

    for (std::size_t n : {10u, 11u, 1000u}) {
        std::vector<Label> labels;
        for (std::size_t i = 0; i < n; ++i) {
            labels.push_back(i % 2 == 0 ? Label::Fight : Label::NonFight);
        }
        const auto fold = stratified_folds(labels, 5, 42);
        std::vector<std::size_t> sizes(5, 0);
        std::vector<std::array<std::size_t, 2>> per_class(5, {0, 0});
        bool in_range = fold.size() == n;
        for (std::size_t i = 0; i < fold.size() && in_range; ++i) {
            in_range = fold[i] < 5;
            if (in_range) {
                ++sizes[fold[i]];
                ++per_class[fold[i]][label_index(labels[i])];
            }
        }
        const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
        bool stratified = true;
        for (std::size_t c = 0; c < 2; ++c) {
            std::size_t cmin = n;
            std::size_t cmax = 0;
            for (const auto& pc : per_class) {
                cmin = std::min(cmin, pc[c]);
                cmax = std::max(cmax, pc[c]);
            }
            stratified = stratified && cmax - cmin <= 1;
        }
        if (!in_range || *hi - *lo > 1 || !stratified) {
            problems.push_back(format("fold partition for n = %zu", n));
        }
    }

    if (!problems.empty()) {
        std::string detail = "wrong:";
        for (const auto& p : problems) {
            detail += " " + p + ";";
        }
        return fail(detail);
    }
    return pass("confusion (1,1,0,2), precision 9/11, recall 0.9, F1, 0/0 -> 0 exact; "
                "folds for n = 10, 11, 1000 partition rows with sizes and class counts within 1");
}

// ------------------------------------------------------------------ synthetic benchmark

const std::vector<VideoPoseSequence>& synthetic_corpus()
{
    static const std::vector<VideoPoseSequence> videos = generate_corpus(SynthCorpusSpec{});
    return videos;
}

double cv_accuracy(const FeatureConfig& config)
{
    Dataset data(0);
    bool first = true;
    for (const FeatureVector& fv : extract_features_batch(synthetic_corpus(), config, 0)) {
        const auto values = fv.enabled_values();
        if (first) {
            data = Dataset(values.size());
            first = false;
        }
        data.add(values, *fv.label);
    }
    ClassifierConfig rf;
    rf.kind = ClassifierKind::RandomForest;
    rf.n_trees = 100;
    rf.seed = 42;
    rf.jobs = 0;
    return kfold_cv(data, 5, rf, 42).averaged.accuracy;
}

Result end_to_end()
{
    const auto start = std::chrono::steady_clock::now();
    synthetic_corpus();
    const double accuracy = cv_accuracy(FeatureConfig{});
    const double elapsed = seconds_since(start);
    const std::string detail = format("200 videos, RF(100, seed 42), 5-fold mean accuracy %.4f (limit >= 0.95), "
                                      "%.1f s (limit 300 s)",
                                      accuracy, elapsed);
    return accuracy >= 0.95 && elapsed < 300.0 ? pass(detail) : fail(detail);
}

Result ablation_ordering()
{
    FeatureConfig velocity_only;
    velocity_only.enable_overlap = false;
    FeatureConfig overlap_only;
    overlap_only.enable_velocity = false;
    const double both = cv_accuracy(FeatureConfig{});
    const double vel = cv_accuracy(velocity_only);
    const double ovl = cv_accuracy(overlap_only);
    const std::string detail =
        format("velocity+overlap %.4f >= velocity-only %.4f >= overlap-only %.4f", both, vel, ovl);
    return both >= vel && vel >= ovl ? pass(detail) : fail(detail);
}

// ------------------------------------------------------------------ dataset-backed

Dataset features_from_manifest(const char* manifest)
{
    std::vector<VideoPoseSequence> videos;
    for (const ManifestEntry& entry : read_manifest(manifest)) {
        videos.push_back(load_video_dir(entry.resolved, entry.video_dir, entry.label));
    }
    Dataset data(kFeatureCount);
    for (const FeatureVector& fv : extract_features_batch(videos, FeatureConfig{}, 0)) {
        data.add(fv.values(), *fv.label);
    }
    return data;
}

Result rwf2000()
{
    const char* train_manifest = std::getenv("DIFEM_RWF2000_TRAIN_MANIFEST");
    const char* test_manifest = std::getenv("DIFEM_RWF2000_TEST_MANIFEST");
    if (train_manifest == nullptr || test_manifest == nullptr) {
        return skip("DIFEM_RWF2000_TRAIN_MANIFEST / DIFEM_RWF2000_TEST_MANIFEST not set");
    }
    const Dataset train_set = features_from_manifest(train_manifest);
    const Dataset test_set = features_from_manifest(test_manifest);
    const TrainedModel model = train_forest(train_set, 100, 42);
    const double accuracy = evaluate(model, test_set).accuracy;
    const std::string detail = format("%zu train / %zu test videos, RF accuracy %.4f (target 0.9650 +- 0.02)",
                                      train_set.size(), test_set.size(), accuracy);
    return std::abs(accuracy - 0.965) <= 0.02 ? pass(detail) : fail(detail);
}

} // namespace

int main()
{
    const std::pair<const char*, std::function<Result()>> criteria[] = {
        {"feature-oracle-equivalence", feature_oracle},
        {"joint-velocity-suite", velocity_suite},
        {"joint-overlap-suite", overlap_suite},
        {"classifier-correctness", classifier_suite},
        {"metrics-suite", metrics_suite},
        {"synthetic-end-to-end", end_to_end},
        {"ablation-ordering", ablation_ordering},
        {"rwf2000-accuracy", rwf2000},
    };

    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Result result;
        try {
            result = check();
        } catch (const std::exception& e) {
            result = fail(std::string("exception: ") + e.what());
        }
        const char* tag = result.outcome == Outcome::Pass ? "PASS" : result.outcome == Outcome::Fail ? "FAIL" : "SKIP";
        failures += result.outcome == Outcome::Fail;
        std::printf("%s %s: %s\n", tag, name, result.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
