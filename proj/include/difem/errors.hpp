#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace difem {

// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed frame document. `offset` is the byte position reported by the
// JSON reader; `frame_index` is filled in when the error is raised while
// loading a whole sequence.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset,
               std::optional<std::size_t> frame_index = std::nullopt);

    std::size_t offset() const noexcept { return offset_; }
    std::optional<std::size_t> frame_index() const noexcept { return frame_index_; }

private:
    std::size_t offset_;
    std::optional<std::size_t> frame_index_;
};

// Well-formed document with the wrong shape (bad keypoint list, wrong types).
class SchemaError : public Error {
public:
    SchemaError(const std::string& what, std::optional<std::size_t> person_index = std::nullopt,
                std::optional<std::size_t> frame_index = std::nullopt);

    std::optional<std::size_t> person_index() const noexcept { return person_index_; }
    std::optional<std::size_t> frame_index() const noexcept { return frame_index_; }

private:
    std::optional<std::size_t> person_index_;
    std::optional<std::size_t> frame_index_;
};

class DuplicateFrameError : public Error {
public:
    explicit DuplicateFrameError(std::size_t frame_index);
    std::size_t frame_index() const noexcept { return frame_index_; }

private:
    std::size_t frame_index_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Caller broke a documented precondition.
class ContractViolation : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    DimensionError(std::size_t expected, std::size_t actual);
    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

class StratificationError : public Error {
public:
    using Error::Error;
};

// File-system and file-format problems outside the frame parser.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace difem
