#include "difem/classifiers.hpp"

#include "difem/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace difem {

double gini(std::size_t n0, std::size_t n1)
{
    if (n0 + n1 == 0) {
        throw ContractViolation("gini impurity of an empty node");
    }
    return gini(static_cast<double>(n0), static_cast<double>(n1));
}

double gini(double w0, double w1)
{
    const double total = w0 + w1;
    if (!(total > 0.0)) {
        throw ContractViolation("gini impurity of an empty node");
    }
    const double p0 = w0 / total;
    const double p1 = w1 / total;
    return 1.0 - p0 * p0 - p1 * p1;
}

namespace {

Label majority(const std::array<double, 2>& counts) noexcept
{
    return counts[1] > counts[0] ? Label::Fight : Label::NonFight;
}

struct Entry {
    std::size_t row;
    double weight;
};

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double decrease = -std::numeric_limits<double>::infinity();
};

double midpoint(double lo, double hi) noexcept
{
    const double mid = lo + (hi - lo) / 2.0;
    return (mid >= lo && mid < hi) ? mid : lo;
}

class TreeBuilder {
public:
    TreeBuilder(const Dataset& data, const TreeOptions& options, Rng* rng)
        : data_(data), options_(options), rng_(rng)
    {
        tree_.dimension = data.dimension();
    }

    DecisionTree build(std::vector<Entry> entries)
    {
        grow(entries, 0);
        return std::move(tree_);
    }

private:
    int grow(std::vector<Entry>& entries, std::size_t depth)
    {
        std::array<double, 2> counts{};
        for (const Entry& e : entries) {
            counts[label_index(data_.label(e.row))] += e.weight;
        }
        const int index = static_cast<int>(tree_.nodes.size());
        TreeNode leaf;
        leaf.label = majority(counts);
        leaf.class_counts = counts;
        tree_.nodes.push_back(leaf);

        const bool pure = counts[0] == 0.0 || counts[1] == 0.0;
        if (pure || (options_.max_depth && depth >= *options_.max_depth)) {
            return index;
        }
        const SplitChoice split = choose_split(entries, counts);
        if (split.feature < 0) {
            return index;
        }

        const auto feature = static_cast<std::size_t>(split.feature);
        std::vector<Entry> left;
        std::vector<Entry> right;
        for (const Entry& e : entries) {
            (data_.value(e.row, feature) <= split.threshold ? left : right).push_back(e);
        }
        entries.clear();
        entries.shrink_to_fit();

        const int left_index = grow(left, depth + 1);
        const int right_index = grow(right, depth + 1);
        TreeNode& node = tree_.nodes[static_cast<std::size_t>(index)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left_index;
        node.right = right_index;
        return index;
    }

    // Features in the order they are examined, and how many must be examined
    // before the search may stop at the first feature that has a candidate.
    std::vector<std::size_t> feature_order(std::size_t& required)
    {
        const std::size_t d = data_.dimension();
        std::vector<std::size_t> order(d);
        std::iota(order.begin(), order.end(), std::size_t{0});
        required = d;
        if (!options_.max_features || *options_.max_features >= d) {
            return order;
        }
        if (rng_ == nullptr) {
            throw ContractViolation("feature subsampling needs a random generator");
        }
        const std::size_t m = std::max<std::size_t>(1, *options_.max_features);
        for (std::size_t i = 0; i + 1 < d; ++i) {
            const std::size_t j = i + rng_->below(d - i);
            std::swap(order[i], order[j]);
        }
        std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
        required = m;
        return order;
    }

    SplitChoice choose_split(const std::vector<Entry>& entries, const std::array<double, 2>& counts)
    {
        const double total = counts[0] + counts[1];
        const double parent = gini(counts[0], counts[1]);
        std::size_t required = 0;
        const std::vector<std::size_t> order = feature_order(required);

        SplitChoice best;
        std::vector<std::pair<double, const Entry*>> sorted(entries.size());
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            if (pos >= required && best.feature >= 0) {
                break;
            }
            const std::size_t f = order[pos];
            for (std::size_t i = 0; i < entries.size(); ++i) {
                sorted[i] = {data_.value(entries[i].row, f), &entries[i]};
            }
            std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
                return a.first < b.first || (a.first == b.first && a.second->row < b.second->row);
            });

            std::array<double, 2> left{};
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                left[label_index(data_.label(sorted[i].second->row))] += sorted[i].second->weight;
                if (!(sorted[i].first < sorted[i + 1].first)) {
                    continue;
                }
                const std::array<double, 2> right{counts[0] - left[0], counts[1] - left[1]};
                const double w_left = left[0] + left[1];
                const double w_right = total - w_left;
                const double decrease = parent - (w_left / total) * gini(left[0], left[1]) -
                                        (w_right / total) * gini(std::max(0.0, right[0]), std::max(0.0, right[1]));
                if (decrease > best.decrease) {
                    best.decrease = decrease;
                    best.feature = static_cast<int>(f);
                    best.threshold = midpoint(sorted[i].first, sorted[i + 1].first);
                }
            }
        }
        return best;
    }

    const Dataset& data_;
    const TreeOptions& options_;
    Rng* rng_;
    DecisionTree tree_;
};

void require_non_empty(const Dataset& data)
{
    if (data.empty()) {
        throw ContractViolation("cannot train on an empty dataset");
    }
}

void check_dimension(std::size_t expected, std::span<const double> x)
{
    if (x.size() != expected) {
        throw DimensionError(expected, x.size());
    }
}

} // namespace

Label DecisionTree::predict(std::span<const double> x) const
{
    return nodes[leaf_of(x)].label;
}

std::size_t DecisionTree::leaf_of(std::span<const double> x) const
{
    check_dimension(dimension, x);
    std::size_t at = 0;
    while (!nodes[at].is_leaf()) {
        const TreeNode& node = nodes[at];
        at = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                                  : node.right);
    }
    return at;
}

std::size_t DecisionTree::depth() const
{
    std::size_t deepest = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [at, level] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, level);
        if (!nodes[at].is_leaf()) {
            stack.emplace_back(static_cast<std::size_t>(nodes[at].left), level + 1);
            stack.emplace_back(static_cast<std::size_t>(nodes[at].right), level + 1);
        }
    }
    return deepest;
}

DecisionTree fit_tree(const Dataset& data, std::span<const std::size_t> rows,
                      std::span<const double> weights, const TreeOptions& options, Rng* rng)
{
    if (rows.empty()) {
        throw ContractViolation("cannot fit a tree on zero rows");
    }
    if (rows.size() != weights.size()) {
        throw ContractViolation("row and weight lists differ in length");
    }
    std::vector<Entry> entries(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        entries[i] = {rows[i], weights[i]};
    }
    return TreeBuilder(data, options, rng).build(std::move(entries));
}

DecisionTree train_tree(const Dataset& data, std::optional<std::size_t> max_features, Rng& rng)
{
    require_non_empty(data);
    std::vector<std::size_t> rows(data.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const std::vector<double> weights(data.size(), 1.0);
    return fit_tree(data, rows, weights, TreeOptions{max_features, std::nullopt}, &rng);
}

DecisionTree train_tree(const Dataset& data)
{
    Rng unused(0);
    return train_tree(data, std::nullopt, unused);
}

std::array<std::size_t, 2> ForestModel::vote_counts(std::span<const double> x) const
{
    check_dimension(dimension, x);
    std::array<std::size_t, 2> votes{};
    for (const DecisionTree& tree : trees) {
        ++votes[label_index(tree.predict(x))];
    }
    return votes;
}

Label ForestModel::predict(std::span<const double> x) const
{
    const auto votes = vote_counts(x);
    return votes[1] > votes[0] ? Label::Fight : Label::NonFight;
}

namespace {

std::size_t forest_features_per_split(std::size_t d)
{
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));
}

DecisionTree train_forest_tree(const Dataset& data, std::uint64_t seed, std::size_t tree_index,
                               std::size_t features_per_split)
{
    Rng rng(derive_seed(seed, tree_index));
    std::vector<std::size_t> sample(data.size());
    for (std::size_t& row : sample) {
        row = rng.below(data.size());
    }
    const std::vector<double> weights(sample.size(), 1.0);
    return fit_tree(data, sample, weights, TreeOptions{features_per_split, std::nullopt}, &rng);
}

ForestModel empty_forest(const Dataset& data, std::size_t n_trees, std::uint64_t seed)
{
    require_non_empty(data);
    if (n_trees == 0) {
        throw ContractViolation("a forest needs at least one tree");
    }
    ForestModel model;
    model.seed = seed;
    model.dimension = data.dimension();
    model.features_per_split = forest_features_per_split(data.dimension());
    model.trees.resize(n_trees);
    return model;
}

} // namespace

ForestModel train_forest(const Dataset& data, std::size_t n_trees, std::uint64_t seed, int jobs)
{
    ForestModel model = empty_forest(data, n_trees, seed);
    detail::parallel_for(n_trees, jobs, [&](std::size_t t) {
        model.trees[t] = train_forest_tree(data, seed, t, model.features_per_split);
    });
    return model;
}

ForestModel train_forest_serial(const Dataset& data, std::size_t n_trees, std::uint64_t seed)
{
    ForestModel model = empty_forest(data, n_trees, seed);
    for (std::size_t t = 0; t < n_trees; ++t) {
        model.trees[t] = train_forest_tree(data, seed, t, model.features_per_split);
    }
    return model;
}

double samme_alpha(double error) noexcept
{
    const double e = std::max(error, kBoostMinError);
    return std::log((1.0 - e) / e);
}

double BoostModel::decision_function(std::span<const double> x) const
{
    check_dimension(dimension, x);
    double score = 0.0;
    for (const BoostStage& stage : stages) {
        score += stage.alpha * (stage.stump.predict(x) == Label::Fight ? 1.0 : -1.0);
    }
    return score;
}

Label BoostModel::predict(std::span<const double> x) const
{
    return decision_function(x) > 0.0 ? Label::Fight : Label::NonFight;
}

BoostModel train_adaboost(const Dataset& data, std::size_t n_estimators, const BoostObserver& observer)
{
    require_non_empty(data);
    const auto counts = data.class_counts();
    if (counts[0] == 0 || counts[1] == 0) {
        throw ContractViolation("AdaBoost needs both classes in the training data");
    }

    BoostModel model;
    model.n_estimators = n_estimators;
    model.dimension = data.dimension();

    const std::size_t n = data.size();
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::vector<double> weights(n, 1.0 / static_cast<double>(n));
    std::vector<char> missed(n);
    const TreeOptions stump_options{std::nullopt, std::size_t{1}};

    for (std::size_t round = 0; round < n_estimators; ++round) {
        DecisionTree stump = fit_tree(data, rows, weights, stump_options, nullptr);

        double error = 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            missed[i] = stump.predict(data.row(i)) != data.label(i);
            total += weights[i];
            if (missed[i]) {
                error += weights[i];
            }
        }
        error /= total;

        if (error >= 0.5) {
            break;
        }
        const double alpha = samme_alpha(error);
        model.stages.push_back({std::move(stump), alpha});
        if (error <= 0.0) {
            if (observer) {
                observer({round, error, alpha, weights});
            }
            break;
        }

        const double boost = std::exp(alpha);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (missed[i]) {
                weights[i] *= boost;
            }
            sum += weights[i];
        }
        for (double& w : weights) {
            w /= sum;
        }
        if (observer) {
            observer({round, error, alpha, weights});
        }
    }
    return model;
}

KnnModel train_knn(Dataset data, std::size_t k)
{
    if (k == 0 || k > data.size()) {
        throw ContractViolation("kNN needs 1 <= k <= stored rows (k = " + std::to_string(k) +
                                ", rows = " + std::to_string(data.size()) + ")");
    }
    return KnnModel{std::move(data), k};
}

Label knn_predict(const KnnModel& model, std::span<const double> query)
{
    const Dataset& data = model.data;
    if (model.k == 0 || model.k > data.size()) {
        throw ContractViolation("kNN model stores fewer rows than k");
    }
    check_dimension(data.dimension(), query);

    std::vector<std::pair<double, std::size_t>> distances(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto row = data.row(i);
        double d2 = 0.0;
        for (std::size_t f = 0; f < row.size(); ++f) {
            const double diff = row[f] - query[f];
            d2 += diff * diff;
        }
        distances[i] = {d2, i};
    }
    const auto k = static_cast<std::ptrdiff_t>(model.k);
    std::partial_sort(distances.begin(), distances.begin() + k, distances.end());

    std::array<std::size_t, 2> votes{};
    for (std::ptrdiff_t i = 0; i < k; ++i) {
        ++votes[label_index(data.label(distances[static_cast<std::size_t>(i)].second))];
    }
    return votes[1] > votes[0] ? Label::Fight : Label::NonFight;
}

std::vector<Label> knn_predict_batch(const KnnModel& model, const Dataset& queries, int jobs)
{
    std::vector<Label> out(queries.size());
    detail::parallel_for(queries.size(), jobs,
                         [&](std::size_t i) { out[i] = knn_predict(model, queries.row(i)); });
    return out;
}

std::vector<Label> knn_predict_batch_serial(const KnnModel& model, const Dataset& queries)
{
    std::vector<Label> out;
    out.reserve(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        out.push_back(knn_predict(model, queries.row(i)));
    }
    return out;
}

std::string_view to_string(ClassifierKind kind)
{
    switch (kind) {
    case ClassifierKind::DecisionTree: return "decision_tree";
    case ClassifierKind::RandomForest: return "random_forest";
    case ClassifierKind::AdaBoost: return "adaboost";
    case ClassifierKind::KNearestNeighbor: return "knn";
    }
    return "unknown";
}

std::optional<ClassifierKind> parse_classifier_kind(std::string_view text)
{
    std::string lowered;
    for (char c : text) {
        lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (lowered == "tree" || lowered == "decision_tree") {
        return ClassifierKind::DecisionTree;
    }
    if (lowered == "forest" || lowered == "rf" || lowered == "random_forest") {
        return ClassifierKind::RandomForest;
    }
    if (lowered == "adaboost" || lowered == "boost") {
        return ClassifierKind::AdaBoost;
    }
    if (lowered == "knn" || lowered == "k_nearest_neighbor") {
        return ClassifierKind::KNearestNeighbor;
    }
    return std::nullopt;
}

TrainedModel train(const Dataset& data, const ClassifierConfig& config)
{
    switch (config.kind) {
    case ClassifierKind::DecisionTree: return train_tree(data);
    case ClassifierKind::RandomForest: return train_forest(data, config.n_trees, config.seed, config.jobs);
    case ClassifierKind::AdaBoost: return train_adaboost(data, config.n_estimators);
    case ClassifierKind::KNearestNeighbor: return train_knn(data, config.k);
    }
    throw ConfigError("unknown classifier kind");
}

ClassifierKind model_kind(const TrainedModel& model) noexcept
{
    return static_cast<ClassifierKind>(model.index());
}

std::size_t model_dimension(const TrainedModel& model) noexcept
{
    return std::visit(
        [](const auto& m) -> std::size_t {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, KnnModel>) {
                return m.data.dimension();
            } else {
                return m.dimension;
            }
        },
        model);
}

Label predict(const TrainedModel& model, std::span<const double> fv)
{
    check_dimension(model_dimension(model), fv);
    return std::visit(
        [&](const auto& m) -> Label {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, KnnModel>) {
                return knn_predict(m, fv);
            } else {
                return m.predict(fv);
            }
        },
        model);
}

std::vector<Label> predict_all(const TrainedModel& model, const Dataset& data)
{
    std::vector<Label> out;
    out.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        out.push_back(predict(model, data.row(i)));
    }
    return out;
}

} // namespace difem
