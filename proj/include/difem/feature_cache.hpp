#pragma once

// Feature cache CSV:
//   video_id,label,mean_vel,max_vel,var_vel,mean_overlap,var_overlap
// Ablation runs keep only the enabled group's columns. Values use 9
// significant digits.

#include "difem/dataset.hpp"
#include "difem/features.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace difem {

std::string feature_csv_header(bool velocity_enabled, bool overlap_enabled);

// All vectors must share the same enabled groups (ConfigError otherwise).
void write_feature_csv(std::ostream& out, std::span<const FeatureVector> features,
                       bool velocity_enabled = true, bool overlap_enabled = true);
void write_feature_csv(const std::filesystem::path& path, std::span<const FeatureVector> features,
                       bool velocity_enabled = true, bool overlap_enabled = true);

struct FeatureTable {
    std::vector<std::string> feature_columns;
    std::vector<std::string> video_ids;
    std::vector<std::optional<Label>> labels;  // empty label cell -> nullopt
    std::vector<std::vector<double>> rows;

    std::size_t dimension() const noexcept { return feature_columns.size(); }
    // Throws SchemaError if a row is unlabelled.
    Dataset to_dataset() const;
};

// Throws SchemaError on a header that is not a whole-group subset of the
// cache columns, or on malformed cells.
FeatureTable read_feature_csv(std::istream& in);
FeatureTable read_feature_csv(const std::filesystem::path& path);

} // namespace difem
