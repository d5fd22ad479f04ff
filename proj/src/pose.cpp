#include "difem/pose.hpp"

#include "difem/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace difem {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Label label)
{
    return label == Label::Fight ? "Fight" : "NonFight";
}

std::optional<Label> parse_label(std::string_view text)
{
    std::string lowered;
    for (char c : text) {
        if (c != '-' && c != '_' && c != ' ') {
            lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (lowered == "fight" || lowered == "1") {
        return Label::Fight;
    }
    if (lowered == "nonfight" || lowered == "0") {
        return Label::NonFight;
    }
    return std::nullopt;
}

bool is_valid(const Keypoint& kp, double confidence_floor) noexcept
{
    return !kp.is_missing() && kp.confidence > 0.0 && kp.confidence >= confidence_floor;
}

FramePoses parse_frame(std::string_view raw_bytes)
{
    json doc;
    try {
        doc = json::parse(raw_bytes.begin(), raw_bytes.end());
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }

    if (!doc.is_object()) {
        throw SchemaError("frame document is not a JSON object");
    }
    const auto people = doc.find("people");
    if (people == doc.end() || !people->is_array()) {
        throw SchemaError("frame document has no \"people\" array");
    }

    FramePoses frame;
    frame.persons.reserve(people->size());
    for (std::size_t p = 0; p < people->size(); ++p) {
        const json& entry = (*people)[p];
        if (!entry.is_object()) {
            throw SchemaError("entry is not an object", p);
        }
        const auto flat = entry.find("pose_keypoints_2d");
        if (flat == entry.end() || !flat->is_array()) {
            throw SchemaError("missing \"pose_keypoints_2d\" array", p);
        }
        if (flat->size() != kValuesPerPerson) {
            throw SchemaError("keypoint list has " + std::to_string(flat->size()) +
                                  " numbers, expected 75",
                              p);
        }
        PersonPose person;
        for (std::size_t k = 0; k < kBody25Keypoints; ++k) {
            double xyc[3];
            for (std::size_t c = 0; c < 3; ++c) {
                const json& value = (*flat)[3 * k + c];
                if (!value.is_number()) {
                    throw SchemaError("non-numeric value at flat index " + std::to_string(3 * k + c), p);
                }
                xyc[c] = value.get<double>();
                if (!std::isfinite(xyc[c])) {
                    throw SchemaError("non-finite value at flat index " + std::to_string(3 * k + c), p);
                }
            }
            if (xyc[2] < 0.0 || xyc[2] > 1.0) {
                throw SchemaError("confidence outside [0,1] at keypoint " + std::to_string(k), p);
            }
            person.keypoints[k] = {xyc[0], xyc[1], xyc[2]};
        }
        frame.persons.push_back(person);
    }
    return frame;
}

std::string serialize_frame(const FramePoses& frame)
{
    json people = json::array();
    for (const PersonPose& person : frame.persons) {
        json flat = json::array();
        for (const Keypoint& kp : person.keypoints) {
            flat.push_back(kp.x);
            flat.push_back(kp.y);
            flat.push_back(kp.confidence);
        }
        people.push_back(json{{"pose_keypoints_2d", std::move(flat)}});
    }
    json doc;
    doc["version"] = 1.3;
    doc["people"] = std::move(people);
    return doc.dump();
}

VideoPoseSequence load_sequence(std::vector<FrameSource> frame_sources, std::string video_id)
{
    std::sort(frame_sources.begin(), frame_sources.end(),
              [](const FrameSource& a, const FrameSource& b) { return a.frame_index < b.frame_index; });
    for (std::size_t i = 1; i < frame_sources.size(); ++i) {
        if (frame_sources[i].frame_index == frame_sources[i - 1].frame_index) {
            throw DuplicateFrameError(frame_sources[i].frame_index);
        }
    }

    VideoPoseSequence seq;
    seq.video_id = std::move(video_id);
    seq.frames.reserve(frame_sources.size());
    for (const FrameSource& source : frame_sources) {
        try {
            FramePoses frame = parse_frame(source.bytes);
            frame.frame_index = source.frame_index;
            seq.frames.push_back(std::move(frame));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), e.offset(), source.frame_index);
        } catch (const SchemaError& e) {
            throw SchemaError(e.what(), std::nullopt, source.frame_index);
        }
    }
    return seq;
}

std::optional<std::size_t> frame_index_from_filename(std::string_view filename)
{
    std::string_view stem = filename;
    if (const auto slash = stem.find_last_of("/\\"); slash != std::string_view::npos) {
        stem.remove_prefix(slash + 1);
    }
    if (const auto dot = stem.rfind('.'); dot != std::string_view::npos) {
        stem = stem.substr(0, dot);
    }
    constexpr std::string_view suffix = "_keypoints";
    if (stem.size() > suffix.size() && stem.substr(stem.size() - suffix.size()) == suffix) {
        stem.remove_suffix(suffix.size());
    }

    // Last run of digits.
    std::size_t end = stem.size();
    while (end > 0 && !std::isdigit(static_cast<unsigned char>(stem[end - 1]))) {
        --end;
    }
    if (end == 0) {
        return std::nullopt;
    }
    std::size_t begin = end;
    while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) {
        --begin;
    }
    std::size_t value = 0;
    for (std::size_t i = begin; i < end; ++i) {
        value = value * 10 + static_cast<std::size_t>(stem[i] - '0');
    }
    return value;
}

namespace {

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n\"");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n\"");
    return std::string(s.substr(first, last - first + 1));
}

} // namespace

VideoPoseSequence load_video_dir(const fs::path& dir, std::string video_id, std::optional<Label> label)
{
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw IoError("not a directory: " + dir.string());
    }
    std::vector<FrameSource> sources;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") {
            continue;
        }
        const auto index = frame_index_from_filename(entry.path().filename().string());
        if (!index) {
            throw IoError("no frame number in file name " + entry.path().string());
        }
        sources.push_back({*index, read_file(entry.path())});
    }
    if (ec) {
        throw IoError("cannot list " + dir.string() + ": " + ec.message());
    }
    VideoPoseSequence seq = load_sequence(std::move(sources), std::move(video_id));
    seq.label = label;
    return seq;
}

void write_video_dir(const VideoPoseSequence& seq, const fs::path& dir, std::string_view stem)
{
    fs::create_directories(dir);
    for (const FramePoses& frame : seq.frames) {
        char index[32];
        std::snprintf(index, sizeof index, "%012zu", frame.frame_index);
        const fs::path path = dir / (std::string(stem) + "_" + index + "_keypoints.json");
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw IoError("cannot write " + path.string());
        }
        out << serialize_frame(frame);
    }
}

std::vector<ManifestEntry> read_manifest(const fs::path& manifest)
{
    std::ifstream in(manifest);
    if (!in) {
        throw IoError("cannot open manifest " + manifest.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError("manifest is empty, expected header video_dir,label");
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || trim(line.substr(0, comma)) != "video_dir" ||
        trim(line.substr(comma + 1)) != "label") {
        throw SchemaError("manifest header must be video_dir,label");
    }

    const fs::path base = manifest.parent_path();
    std::vector<ManifestEntry> entries;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto split = line.rfind(',');
        if (split == std::string::npos) {
            throw SchemaError("manifest line " + std::to_string(line_no) + " has no label column");
        }
        ManifestEntry entry;
        entry.video_dir = trim(line.substr(0, split));
        const auto label = parse_label(trim(line.substr(split + 1)));
        if (!label) {
            throw SchemaError("manifest line " + std::to_string(line_no) + " has an unknown label");
        }
        entry.label = *label;
        const fs::path dir(entry.video_dir);
        entry.resolved = dir.is_absolute() ? dir : base / dir;
        entries.push_back(std::move(entry));
    }
    return entries;
}

void write_manifest(const fs::path& manifest, const std::vector<std::pair<std::string, Label>>& rows)
{
    std::ofstream out(manifest);
    if (!out) {
        throw IoError("cannot write manifest " + manifest.string());
    }
    out << "video_dir,label\n";
    for (const auto& [dir, label] : rows) {
        out << dir << ',' << to_string(label) << '\n';
    }
}

} // namespace difem
