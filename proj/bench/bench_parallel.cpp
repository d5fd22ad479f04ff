// Serial reference vs OpenMP kernel, one pair per hot path.

#include "difem/classifiers.hpp"
#include "difem/dataset.hpp"
#include "difem/evaluation.hpp"
#include "difem/features.hpp"
#include "difem/synthgen.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace difem;

const std::vector<VideoPoseSequence>& corpus()
{
    static const std::vector<VideoPoseSequence> videos = [] {
        SynthCorpusSpec spec;
        spec.n_fight = 24;
        spec.n_nonfight = 24;
        return generate_corpus(spec);
    }();
    return videos;
}

const Dataset& feature_data()
{
    static const Dataset data = [] {
        Dataset d(kFeatureCount);
        for (const FeatureVector& fv : extract_features_batch_serial(corpus(), FeatureConfig{})) {
            const auto v = fv.values();
            d.add(v, *fv.label);
        }
        return d;
    }();
    return data;
}

Dataset random_points(std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    Dataset d(kFeatureCount);
    std::vector<double> row(kFeatureCount);
    for (std::size_t i = 0; i < n; ++i) {
        const Label label = i % 2 == 0 ? Label::Fight : Label::NonFight;
        for (double& v : row) {
            v = rng.normal() + (label == Label::Fight ? 1.0 : 0.0);
        }
        d.add(row, label);
    }
    return d;
}

void BM_ExtractSerial(benchmark::State& state)
{
    corpus();
    for (auto _ : state) {
        benchmark::DoNotOptimize(extract_features_batch_serial(corpus(), FeatureConfig{}));
    }
}

void BM_ExtractParallel(benchmark::State& state)
{
    corpus();
    for (auto _ : state) {
        benchmark::DoNotOptimize(extract_features_batch(corpus(), FeatureConfig{}, 0));
    }
}

void BM_ForestSerial(benchmark::State& state)
{
    feature_data();
    for (auto _ : state) {
        benchmark::DoNotOptimize(train_forest_serial(feature_data(), 100, 42));
    }
}

void BM_ForestParallel(benchmark::State& state)
{
    feature_data();
    for (auto _ : state) {
        benchmark::DoNotOptimize(train_forest(feature_data(), 100, 42, 0));
    }
}

void BM_KnnSerial(benchmark::State& state)
{
    const KnnModel model = train_knn(random_points(2000, 1), 5);
    const Dataset queries = random_points(2000, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(knn_predict_batch_serial(model, queries));
    }
}

void BM_KnnParallel(benchmark::State& state)
{
    const KnnModel model = train_knn(random_points(2000, 1), 5);
    const Dataset queries = random_points(2000, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(knn_predict_batch(model, queries, 0));
    }
}

void BM_CvSerial(benchmark::State& state)
{
    feature_data();
    ClassifierConfig config;
    config.n_trees = 30;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kfold_cv_serial(feature_data(), 5, config, 42));
    }
}

void BM_CvParallel(benchmark::State& state)
{
    feature_data();
    ClassifierConfig config;
    config.n_trees = 30;
    config.jobs = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kfold_cv(feature_data(), 5, config, 42));
    }
}

} // namespace

BENCHMARK(BM_ExtractSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExtractParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForestSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForestParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KnnSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KnnParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CvSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CvParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
