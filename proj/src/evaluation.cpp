#include "difem/evaluation.hpp"

#include "difem/errors.hpp"
#include "parallel.hpp"

#include <cstdio>
#include <ostream>
#include <string>

namespace difem {

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) noexcept
{
    tn += other.tn;
    fp += other.fp;
    fn += other.fn;
    tp += other.tp;
    return *this;
}

ConfusionMatrix confusion(std::span<const Label> preds, std::span<const Label> truths)
{
    if (preds.size() != truths.size()) {
        throw ContractViolation("prediction and truth lists differ in length");
    }
    if (preds.empty()) {
        throw ContractViolation("confusion matrix of zero samples");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const bool predicted_fight = preds[i] == Label::Fight;
        if (truths[i] == Label::Fight) {
            ++(predicted_fight ? cm.tp : cm.fn);
        } else {
            ++(predicted_fight ? cm.fp : cm.tn);
        }
    }
    return cm;
}

namespace {

double ratio(std::size_t num, std::size_t den) noexcept
{
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ClassMetrics class_metrics(std::size_t correct, std::size_t predicted, std::size_t actual) noexcept
{
    ClassMetrics m;
    m.precision = ratio(correct, predicted);
    m.recall = ratio(correct, actual);
    const double sum = m.precision + m.recall;
    m.f1 = sum > 0.0 ? 2.0 * m.precision * m.recall / sum : 0.0;
    return m;
}

} // namespace

EvaluationReport metrics(const ConfusionMatrix& cm)
{
    if (cm.total() == 0) {
        throw ContractViolation("metrics of an empty confusion matrix");
    }
    EvaluationReport report;
    report.confusion = cm;
    report.accuracy = ratio(cm.tp + cm.tn, cm.total());
    report.per_class[label_index(Label::NonFight)] = class_metrics(cm.tn, cm.tn + cm.fn, cm.tn + cm.fp);
    report.per_class[label_index(Label::Fight)] = class_metrics(cm.tp, cm.tp + cm.fp, cm.tp + cm.fn);
    return report;
}

EvaluationReport evaluate(const TrainedModel& model, const Dataset& test)
{
    const std::vector<Label> preds = predict_all(model, test);
    return metrics(confusion(preds, test.labels()));
}

std::vector<std::size_t> stratified_folds(std::span<const Label> labels, std::size_t k, std::uint64_t seed)
{
    if (k == 0) {
        throw ContractViolation("k must be at least 1");
    }
    std::vector<std::size_t> fold(labels.size());
    std::size_t offset = 0;
    for (Label cls : {Label::NonFight, Label::Fight}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) {
                members.push_back(i);
            }
        }
        Rng rng(derive_seed(seed, label_index(cls)));
        for (std::size_t i = members.size(); i > 1; --i) {
            std::swap(members[i - 1], members[rng.below(i)]);
        }
        for (std::size_t pos = 0; pos < members.size(); ++pos) {
            fold[members[pos]] = (offset + pos) % k;
        }
        offset += members.size();
    }
    return fold;
}

namespace {

struct FoldPlan {
    std::vector<std::vector<std::size_t>> train;
    std::vector<std::vector<std::size_t>> test;
};

FoldPlan plan_folds(const Dataset& data, std::size_t k, std::uint64_t seed)
{
    if (k < 2) {
        throw ContractViolation("cross-validation needs k >= 2");
    }
    if (data.size() < k) {
        throw ContractViolation("cross-validation needs at least k rows");
    }
    const auto counts = data.class_counts();
    if (counts[0] == 0 || counts[1] == 0) {
        throw ContractViolation("cross-validation needs both classes present");
    }

    const auto fold = stratified_folds(data.labels(), k, seed);
    FoldPlan plan;
    plan.train.resize(k);
    plan.test.resize(k);
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t f = 0; f < k; ++f) {
            (fold[i] == f ? plan.test[f] : plan.train[f]).push_back(i);
        }
    }
    for (std::size_t f = 0; f < k; ++f) {
        std::array<std::size_t, 2> train_counts{};
        for (std::size_t i : plan.train[f]) {
            ++train_counts[label_index(data.label(i))];
        }
        if (train_counts[0] == 0 || train_counts[1] == 0) {
            throw StratificationError("training partition of fold " + std::to_string(f) +
                                      " holds a single class");
        }
    }
    return plan;
}

EvaluationReport run_fold(const Dataset& data, const FoldPlan& plan, std::size_t f,
                          const ClassifierConfig& config)
{
    const TrainedModel model = train(data.subset(plan.train[f]), config);
    return evaluate(model, data.subset(plan.test[f]));
}

CvReport assemble(std::vector<EvaluationReport> folds, std::uint64_t seed)
{
    CvReport report;
    report.seed = seed;
    EvaluationReport& mean = report.averaged;
    for (const EvaluationReport& r : folds) {
        mean.confusion += r.confusion;
        mean.accuracy += r.accuracy;
        for (std::size_t c = 0; c < 2; ++c) {
            mean.per_class[c].precision += r.per_class[c].precision;
            mean.per_class[c].recall += r.per_class[c].recall;
            mean.per_class[c].f1 += r.per_class[c].f1;
        }
    }
    const double n = static_cast<double>(folds.size());
    mean.accuracy /= n;
    for (ClassMetrics& m : mean.per_class) {
        m.precision /= n;
        m.recall /= n;
        m.f1 /= n;
    }
    report.per_fold = std::move(folds);
    return report;
}

} // namespace

CvReport kfold_cv(const Dataset& data, std::size_t k, const ClassifierConfig& config, std::uint64_t seed)
{
    const FoldPlan plan = plan_folds(data, k, seed);
    ClassifierConfig inner = config;
    inner.jobs = 1;
    std::vector<EvaluationReport> folds(k);
    detail::parallel_for(k, config.jobs,
                         [&](std::size_t f) { folds[f] = run_fold(data, plan, f, inner); });
    return assemble(std::move(folds), seed);
}

CvReport kfold_cv_serial(const Dataset& data, std::size_t k, const ClassifierConfig& config,
                         std::uint64_t seed)
{
    const FoldPlan plan = plan_folds(data, k, seed);
    ClassifierConfig inner = config;
    inner.jobs = 1;
    std::vector<EvaluationReport> folds;
    for (std::size_t f = 0; f < k; ++f) {
        folds.push_back(run_fold(data, plan, f, inner));
    }
    return assemble(std::move(folds), seed);
}

namespace {

std::string fixed(double value, int decimals = 4)
{
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
    return buffer;
}

std::string pad(std::string text, std::size_t width)
{
    if (text.size() < width) {
        text.insert(0, width - text.size(), ' ');
    }
    return text;
}

void write_tables(std::ostream& out, const EvaluationReport& r)
{
    const ConfusionMatrix& cm = r.confusion;
    out << "Accuracy: " << fixed(r.accuracy) << " (" << fixed(100.0 * r.accuracy, 2) << "%, n = "
        << cm.total() << ")\n\n";
    out << "Confusion matrix (rows: true class, columns: predicted class)\n";
    out << pad("", 10) << pad("NonFight", 10) << pad("Fight", 10) << '\n';
    out << pad("NonFight", 10) << pad(std::to_string(cm.tn), 10) << pad(std::to_string(cm.fp), 10) << '\n';
    out << pad("Fight", 10) << pad(std::to_string(cm.fn), 10) << pad(std::to_string(cm.tp), 10) << "\n\n";
    out << pad("Class", 10) << pad("Precision", 11) << pad("Recall", 11) << pad("F1-score", 11) << '\n';
    for (Label cls : {Label::NonFight, Label::Fight}) {
        const ClassMetrics& m = r.per_class[label_index(cls)];
        out << pad(std::string(to_string(cls)), 10) << pad(fixed(m.precision), 11) << pad(fixed(m.recall), 11)
            << pad(fixed(m.f1), 11) << '\n';
    }
}

void write_csv_row(std::ostream& out, const std::string& scope, const EvaluationReport& r)
{
    char buffer[64];
    auto number = [&](double v) {
        std::snprintf(buffer, sizeof buffer, "%.9g", v);
        return std::string(buffer);
    };
    const ConfusionMatrix& cm = r.confusion;
    out << scope << ',' << number(r.accuracy) << ',' << cm.tn << ',' << cm.fp << ',' << cm.fn << ',' << cm.tp;
    for (const ClassMetrics& m : r.per_class) {
        out << ',' << number(m.precision) << ',' << number(m.recall) << ',' << number(m.f1);
    }
    out << '\n';
}

constexpr const char* kReportCsvHeader =
    "scope,accuracy,tn,fp,fn,tp,nonfight_precision,nonfight_recall,nonfight_f1,"
    "fight_precision,fight_recall,fight_f1\n";

} // namespace

void write_report_text(std::ostream& out, const EvaluationReport& report, const std::string& title)
{
    out << "== " << title << " ==\n\n";
    write_tables(out, report);
}

void write_cv_report_text(std::ostream& out, const CvReport& report, const std::string& title)
{
    out << "== " << title << " ==\n";
    out << report.per_fold.size() << "-fold stratified cross-validation, seed " << report.seed << "\n\n";
    out << "Mean over folds (confusion matrix pooled over folds)\n";
    write_tables(out, report.averaged);
    out << "\n-- Per-fold results --\n";
    for (std::size_t f = 0; f < report.per_fold.size(); ++f) {
        out << "\nFold " << f << '\n';
        write_tables(out, report.per_fold[f]);
    }
}

void write_report_csv(std::ostream& out, const EvaluationReport& report)
{
    out << kReportCsvHeader;
    write_csv_row(out, "all", report);
}

void write_cv_report_csv(std::ostream& out, const CvReport& report)
{
    out << kReportCsvHeader;
    for (std::size_t f = 0; f < report.per_fold.size(); ++f) {
        write_csv_row(out, "fold_" + std::to_string(f), report.per_fold[f]);
    }
    write_csv_row(out, "mean", report.averaged);
}

} // namespace difem
