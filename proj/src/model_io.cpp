#include "difem/model_io.hpp"

#include "difem/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace difem {

using nlohmann::ordered_json;

namespace {

constexpr const char* kFormatName = "difem-model";

ordered_json tree_to_json(const DecisionTree& tree)
{
    ordered_json nodes = ordered_json::array();
    for (const TreeNode& node : tree.nodes) {
        ordered_json j;
        j["feature"] = node.feature;
        j["threshold"] = node.threshold;
        j["left"] = node.left;
        j["right"] = node.right;
        j["label"] = static_cast<int>(node.label);
        j["class_counts"] = {node.class_counts[0], node.class_counts[1]};
        nodes.push_back(std::move(j));
    }
    return ordered_json{{"nodes", std::move(nodes)}};
}

DecisionTree tree_from_json(const ordered_json& j, std::size_t dimension)
{
    DecisionTree tree;
    tree.dimension = dimension;
    const auto& nodes = j.at("nodes");
    if (!nodes.is_array() || nodes.empty()) {
        throw SchemaError("tree has no nodes");
    }
    const auto count = static_cast<int>(nodes.size());
    for (const auto& n : nodes) {
        TreeNode node;
        node.feature = n.at("feature").get<int>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<int>();
        node.right = n.at("right").get<int>();
        const int label = n.at("label").get<int>();
        if (label != 0 && label != 1) {
            throw SchemaError("tree node label must be 0 or 1");
        }
        node.label = static_cast<Label>(label);
        node.class_counts = {n.at("class_counts").at(0).get<double>(),
                             n.at("class_counts").at(1).get<double>()};
        if (!node.is_leaf()) {
            if (node.feature >= static_cast<int>(dimension) || node.left <= 0 || node.right <= 0 ||
                node.left >= count || node.right >= count) {
                throw SchemaError("tree node references an invalid feature or child");
            }
        }
        tree.nodes.push_back(node);
    }
    // Children always follow their parent in pre-order, so traversal terminates.
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const TreeNode& node = tree.nodes[i];
        if (!node.is_leaf() && (static_cast<std::size_t>(node.left) <= i || static_cast<std::size_t>(node.right) <= i)) {
            throw SchemaError("tree children must follow their parent");
        }
    }
    return tree;
}

} // namespace

std::string serialize_model(const TrainedModel& model)
{
    ordered_json doc;
    doc["format"] = kFormatName;
    doc["version"] = kModelFormatVersion;
    doc["kind"] = std::string(to_string(model_kind(model)));
    doc["dimension"] = model_dimension(model);

    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, DecisionTree>) {
                doc["hyperparameters"] = {{"criterion", "gini"}, {"max_depth", nullptr}};
                doc["tree"] = tree_to_json(m);
            } else if constexpr (std::is_same_v<M, ForestModel>) {
                doc["hyperparameters"] = {{"n_trees", m.trees.size()},
                                          {"seed", m.seed},
                                          {"features_per_split", m.features_per_split},
                                          {"criterion", "gini"}};
                ordered_json trees = ordered_json::array();
                for (const DecisionTree& tree : m.trees) {
                    trees.push_back(tree_to_json(tree));
                }
                doc["trees"] = std::move(trees);
            } else if constexpr (std::is_same_v<M, BoostModel>) {
                doc["hyperparameters"] = {{"n_estimators", m.n_estimators}, {"algorithm", "SAMME"},
                                          {"learning_rate", 1.0}};
                ordered_json stages = ordered_json::array();
                for (const BoostStage& stage : m.stages) {
                    stages.push_back(ordered_json{{"alpha", stage.alpha}, {"stump", tree_to_json(stage.stump)}});
                }
                doc["stages"] = std::move(stages);
            } else {
                doc["hyperparameters"] = {{"k", m.k}, {"metric", "euclidean"}};
                ordered_json rows = ordered_json::array();
                ordered_json labels = ordered_json::array();
                for (std::size_t i = 0; i < m.data.size(); ++i) {
                    const auto row = m.data.row(i);
                    rows.push_back(ordered_json(std::vector<double>(row.begin(), row.end())));
                    labels.push_back(static_cast<int>(m.data.label(i)));
                }
                doc["rows"] = std::move(rows);
                doc["labels"] = std::move(labels);
            }
        },
        model);
    return doc.dump(1) + "\n";
}

TrainedModel deserialize_model(std::string_view text)
{
    ordered_json doc;
    try {
        doc = ordered_json::parse(text.begin(), text.end());
    } catch (const ordered_json::parse_error& e) {
        throw SchemaError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != kFormatName) {
            throw SchemaError("not a difem model file");
        }
        if (doc.at("version").get<int>() != kModelFormatVersion) {
            throw SchemaError("unsupported model format version " + doc.at("version").dump());
        }
        const auto kind = parse_classifier_kind(doc.at("kind").get<std::string>());
        if (!kind) {
            throw SchemaError("unknown model kind " + doc.at("kind").dump());
        }
        const auto dimension = doc.at("dimension").get<std::size_t>();
        const auto& hp = doc.at("hyperparameters");

        switch (*kind) {
        case ClassifierKind::DecisionTree:
            return tree_from_json(doc.at("tree"), dimension);
        case ClassifierKind::RandomForest: {
            ForestModel forest;
            forest.dimension = dimension;
            forest.seed = hp.at("seed").get<std::uint64_t>();
            forest.features_per_split = hp.at("features_per_split").get<std::size_t>();
            for (const auto& t : doc.at("trees")) {
                forest.trees.push_back(tree_from_json(t, dimension));
            }
            if (forest.trees.size() != hp.at("n_trees").get<std::size_t>()) {
                throw SchemaError("forest tree count does not match n_trees");
            }
            return forest;
        }
        case ClassifierKind::AdaBoost: {
            BoostModel boost;
            boost.dimension = dimension;
            boost.n_estimators = hp.at("n_estimators").get<std::size_t>();
            for (const auto& s : doc.at("stages")) {
                boost.stages.push_back({tree_from_json(s.at("stump"), dimension), s.at("alpha").get<double>()});
            }
            return boost;
        }
        case ClassifierKind::KNearestNeighbor: {
            Dataset data(dimension);
            const auto& rows = doc.at("rows");
            const auto& labels = doc.at("labels");
            if (rows.size() != labels.size()) {
                throw SchemaError("kNN rows and labels differ in length");
            }
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const int label = labels[i].get<int>();
                if (label != 0 && label != 1) {
                    throw SchemaError("kNN label must be 0 or 1");
                }
                data.add(rows[i].get<std::vector<double>>(), static_cast<Label>(label));
            }
            return train_knn(std::move(data), hp.at("k").get<std::size_t>());
        }
        }
    } catch (const ordered_json::exception& e) {
        throw SchemaError(std::string("malformed model file: ") + e.what());
    } catch (const DimensionError& e) {
        throw SchemaError(std::string("malformed model file: ") + e.what());
    } catch (const ContractViolation& e) {
        throw SchemaError(std::string("malformed model file: ") + e.what());
    }
    throw SchemaError("unknown model kind");
}

void save_model(const TrainedModel& model, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << serialize_model(model);
}

TrainedModel load_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return deserialize_model(buffer.str());
}

} // namespace difem
