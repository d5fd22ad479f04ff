#pragma once

// Decision tree (CART, Gini), random forest, two-class discrete AdaBoost
// (SAMME over Gini stumps) and k-nearest neighbours. Every tie resolves to
// Label::NonFight.

#include "difem/dataset.hpp"
#include "difem/rng.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace difem {

// 1 - p0^2 - p1^2. Throws ContractViolation on an empty count.
double gini(std::size_t n0, std::size_t n1);
double gini(double w0, double w1);

// Flat node: a leaf when feature < 0. Rows with value <= threshold go left.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    Label label = Label::NonFight;
    std::array<double, 2> class_counts{};  // weighted counts of the rows that reached the node

    bool is_leaf() const noexcept { return feature < 0; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root, pre-order
    std::size_t dimension = 0;

    Label predict(std::span<const double> x) const;
    std::size_t leaf_of(std::span<const double> x) const;
    std::size_t depth() const;
};

struct TreeOptions {
    std::optional<std::size_t> max_features;  // per-node feature subset size
    std::optional<std::size_t> max_depth;     // unlimited when empty
};

// Weighted CART over data rows `rows` (repetitions allowed) with per-entry
// weights. `rng` is required when options.max_features is set.
DecisionTree fit_tree(const Dataset& data, std::span<const std::size_t> rows,
                      std::span<const double> weights, const TreeOptions& options, Rng* rng);

// Unweighted CART with no depth limit. Throws ContractViolation on empty data.
DecisionTree train_tree(const Dataset& data, std::optional<std::size_t> max_features, Rng& rng);
DecisionTree train_tree(const Dataset& data);

struct ForestModel {
    std::vector<DecisionTree> trees;
    std::uint64_t seed = 42;
    std::size_t features_per_split = 1;
    std::size_t dimension = 0;

    std::array<std::size_t, 2> vote_counts(std::span<const double> x) const;
    Label predict(std::span<const double> x) const;
};

// Tree t is fit on a bootstrap sample drawn from Rng(derive_seed(seed, t)),
// with floor(sqrt(d)) features per split. The parallel variant trains trees
// on up to `jobs` OpenMP threads (0 = runtime default) and yields the same
// model as the serial reference.
ForestModel train_forest(const Dataset& data, std::size_t n_trees = 100, std::uint64_t seed = 42,
                         int jobs = 0);
ForestModel train_forest_serial(const Dataset& data, std::size_t n_trees = 100,
                                std::uint64_t seed = 42);

struct BoostStage {
    DecisionTree stump;
    double alpha;
};

struct BoostModel {
    std::vector<BoostStage> stages;
    std::size_t n_estimators = 100;
    std::size_t dimension = 0;

    // Sum of alpha_m * h_m(x), h_m in {-1, +1} (+1 = Fight).
    double decision_function(std::span<const double> x) const;
    Label predict(std::span<const double> x) const;
};

// Error floor used when a stump classifies every weighted row correctly.
inline constexpr double kBoostMinError = 1e-10;

// ln((1 - error) / error), error clamped below at kBoostMinError.
double samme_alpha(double error) noexcept;

struct BoostRound {
    std::size_t round;
    double error;
    double alpha;
    std::span<const double> weights;  // after the update and renormalisation
};

using BoostObserver = std::function<void(const BoostRound&)>;

// Throws ContractViolation on empty or single-class data.
BoostModel train_adaboost(const Dataset& data, std::size_t n_estimators = 100,
                          const BoostObserver& observer = {});

struct KnnModel {
    Dataset data;
    std::size_t k = 5;
};

// Throws ContractViolation unless 1 <= k <= data.size().
KnnModel train_knn(Dataset data, std::size_t k = 5);
// Majority of the k nearest rows (Euclidean; distance ties -> lower row index).
Label knn_predict(const KnnModel& model, std::span<const double> query);
std::vector<Label> knn_predict_batch(const KnnModel& model, const Dataset& queries, int jobs = 0);
std::vector<Label> knn_predict_batch_serial(const KnnModel& model, const Dataset& queries);

enum class ClassifierKind { DecisionTree, RandomForest, AdaBoost, KNearestNeighbor };

std::string_view to_string(ClassifierKind kind);
// "tree", "forest", "adaboost", "knn" (also the to_string names).
std::optional<ClassifierKind> parse_classifier_kind(std::string_view text);

struct ClassifierConfig {
    ClassifierKind kind = ClassifierKind::RandomForest;
    std::size_t n_trees = 100;
    std::size_t n_estimators = 100;
    std::size_t k = 5;
    std::uint64_t seed = 42;
    int jobs = 1;
};

using TrainedModel = std::variant<DecisionTree, ForestModel, BoostModel, KnnModel>;

TrainedModel train(const Dataset& data, const ClassifierConfig& config);
ClassifierKind model_kind(const TrainedModel& model) noexcept;
std::size_t model_dimension(const TrainedModel& model) noexcept;

// Throws DimensionError when fv.size() differs from the training dimension.
Label predict(const TrainedModel& model, std::span<const double> fv);
std::vector<Label> predict_all(const TrainedModel& model, const Dataset& data);

} // namespace difem
