#pragma once

// Versioned JSON model files; schema in docs/FORMATS.md.

#include "difem/classifiers.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace difem {

inline constexpr int kModelFormatVersion = 1;

std::string serialize_model(const TrainedModel& model);
// Throws SchemaError on an unknown format, version or malformed body.
TrainedModel deserialize_model(std::string_view text);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

} // namespace difem
