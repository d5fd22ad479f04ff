#pragma once

#include "difem/classifiers.hpp"
#include "difem/dataset.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace difem {

// Fight is the positive class.
struct ConfusionMatrix {
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tp = 0;

    std::size_t total() const noexcept { return tn + fp + fn + tp; }
    ConfusionMatrix& operator+=(const ConfusionMatrix& other) noexcept;
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvaluationReport {
    ConfusionMatrix confusion;
    double accuracy = 0.0;
    std::array<ClassMetrics, 2> per_class{};  // indexed by label_index()
};

struct CvReport {
    std::vector<EvaluationReport> per_fold;
    // Arithmetic means of the per-fold values; `averaged.confusion` is the
    // pooled sum over folds.
    EvaluationReport averaged;
    std::uint64_t seed = 0;
};

// Throws ContractViolation on length mismatch or empty input.
ConfusionMatrix confusion(std::span<const Label> preds, std::span<const Label> truths);
// 0/0 is defined as 0. Throws ContractViolation when cm is empty.
EvaluationReport metrics(const ConfusionMatrix& cm);

EvaluationReport evaluate(const TrainedModel& model, const Dataset& test);

// Stratified fold id per row: each class is shuffled with Rng(derive_seed(seed, class))
// then dealt round-robin, the second class continuing where the first stopped.
std::vector<std::size_t> stratified_folds(std::span<const Label> labels, std::size_t k,
                                          std::uint64_t seed);

// Throws ContractViolation when |data| < k or a class is absent, and
// StratificationError when a training partition would hold a single class.
// Folds run on up to config.jobs OpenMP threads; the report does not depend
// on the thread count.
CvReport kfold_cv(const Dataset& data, std::size_t k, const ClassifierConfig& config,
                  std::uint64_t seed);
CvReport kfold_cv_serial(const Dataset& data, std::size_t k, const ClassifierConfig& config,
                         std::uint64_t seed);

// Human-readable report: confusion matrix and a Class/Precision/Recall/F1
// table.
void write_report_text(std::ostream& out, const EvaluationReport& report, const std::string& title);
void write_cv_report_text(std::ostream& out, const CvReport& report, const std::string& title);

// Machine-readable: one row per (scope, class) plus accuracy and confusion cells.
void write_report_csv(std::ostream& out, const EvaluationReport& report);
void write_cv_report_csv(std::ostream& out, const CvReport& report);

} // namespace difem
