#include "difem/errors.hpp"

namespace difem {

namespace {

std::string with_frame(const std::string& what, std::optional<std::size_t> frame_index)
{
    if (!frame_index) {
        return what;
    }
    return "frame " + std::to_string(*frame_index) + ": " + what;
}

} // namespace

ParseError::ParseError(const std::string& what, std::size_t offset,
                       std::optional<std::size_t> frame_index)
    : Error(with_frame(what + " (byte " + std::to_string(offset) + ")", frame_index)),
      offset_(offset), frame_index_(frame_index)
{
}

SchemaError::SchemaError(const std::string& what, std::optional<std::size_t> person_index,
                         std::optional<std::size_t> frame_index)
    : Error(with_frame(person_index ? "person " + std::to_string(*person_index) + ": " + what : what,
                       frame_index)),
      person_index_(person_index), frame_index_(frame_index)
{
}

DuplicateFrameError::DuplicateFrameError(std::size_t frame_index)
    : Error("duplicate frame index " + std::to_string(frame_index)), frame_index_(frame_index)
{
}

DimensionError::DimensionError(std::size_t expected, std::size_t actual)
    : Error("feature dimension mismatch: model expects " + std::to_string(expected) + ", got " +
            std::to_string(actual)),
      expected_(expected), actual_(actual)
{
}

} // namespace difem
