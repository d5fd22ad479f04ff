#pragma once

// Pose keypoint ingestion: BODY-25 frame documents as written by OpenPose
// (`<video>_<%012d>_keypoints.json`), one directory per video.

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace difem {

inline constexpr std::size_t kBody25Keypoints = 25;
inline constexpr std::size_t kValuesPerPerson = kBody25Keypoints * 3;

enum class Label : int { NonFight = 0, Fight = 1 };

inline std::size_t label_index(Label label) noexcept { return static_cast<std::size_t>(label); }

std::string_view to_string(Label label);
// Accepts "Fight"/"NonFight" (any case, "Non-Fight" too) and "1"/"0".
std::optional<Label> parse_label(std::string_view text);

struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    double confidence = 0.0;

    // Detector convention for an undetected joint.
    bool is_missing() const noexcept { return x == 0.0 && y == 0.0 && confidence == 0.0; }
    friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct PersonPose {
    std::array<Keypoint, kBody25Keypoints> keypoints{};
    friend bool operator==(const PersonPose&, const PersonPose&) = default;
};

struct FramePoses {
    std::size_t frame_index = 0;
    std::vector<PersonPose> persons;
    friend bool operator==(const FramePoses&, const FramePoses&) = default;
};

struct VideoPoseSequence {
    std::string video_id;
    std::vector<FramePoses> frames;  // ascending, unique frame_index
    std::optional<Label> label;
};

// A keypoint is usable when it was detected (confidence > 0, so the (0,0,0)
// triple never qualifies) and its confidence reaches the floor.
bool is_valid(const Keypoint& kp, double confidence_floor = 0.0) noexcept;

// Parses one frame document. The returned frame_index is 0; load_sequence
// assigns the real index. Throws ParseError / SchemaError.
FramePoses parse_frame(std::string_view raw_bytes);

// Inverse of parse_frame for the fields it reads.
std::string serialize_frame(const FramePoses& frame);

struct FrameSource {
    std::size_t frame_index;
    std::string bytes;
};

// Sorts by frame_index. Throws DuplicateFrameError, or the frame's
// ParseError / SchemaError tagged with its frame index.
VideoPoseSequence load_sequence(std::vector<FrameSource> frame_sources, std::string video_id);

// Numeric frame index embedded in an OpenPose output name, e.g.
// "clip_000000000042_keypoints.json" -> 42. Falls back to the last digit
// run in the stem. Empty if the name holds no digits.
std::optional<std::size_t> frame_index_from_filename(std::string_view filename);

// Reads every *.json file in `dir` as one frame. Throws IoError when the
// directory is unreadable or a file name has no frame number.
VideoPoseSequence load_video_dir(const std::filesystem::path& dir, std::string video_id,
                                 std::optional<Label> label = std::nullopt);

// Writes `seq` in the per-frame file layout (`<stem>_<%012d>_keypoints.json`).
void write_video_dir(const VideoPoseSequence& seq, const std::filesystem::path& dir,
                     std::string_view stem);

struct ManifestEntry {
    std::string video_dir;          // as written in the manifest
    std::filesystem::path resolved; // relative paths resolved against the manifest's directory
    Label label;
};

// CSV with header `video_dir,label`. Throws IoError / SchemaError.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest);
void write_manifest(const std::filesystem::path& manifest,
                    const std::vector<std::pair<std::string, Label>>& rows);

} // namespace difem
