#include "difem/feature_cache.hpp"

#include "difem/errors.hpp"

#include <array>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string_view>

namespace difem {

namespace {

constexpr std::array<std::string_view, 3> kVelocityColumns{"mean_vel", "max_vel", "var_vel"};
constexpr std::array<std::string_view, 2> kOverlapColumns{"mean_overlap", "var_overlap"};

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
            cell.pop_back();
        }
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

void append_number(std::string& out, double value)
{
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.9g", value);
    out += ',';
    out += buffer;
}

} // namespace

std::string feature_csv_header(bool velocity_enabled, bool overlap_enabled)
{
    std::string header = "video_id,label";
    if (velocity_enabled) {
        for (auto column : kVelocityColumns) {
            header += ',';
            header += column;
        }
    }
    if (overlap_enabled) {
        for (auto column : kOverlapColumns) {
            header += ',';
            header += column;
        }
    }
    return header;
}

void write_feature_csv(std::ostream& out, std::span<const FeatureVector> features,
                       bool velocity_enabled, bool overlap_enabled)
{
    if (!velocity_enabled && !overlap_enabled) {
        throw ConfigError("feature cache needs at least one feature group");
    }
    out << feature_csv_header(velocity_enabled, overlap_enabled) << '\n';
    for (const FeatureVector& fv : features) {
        if (fv.velocity_enabled != velocity_enabled || fv.overlap_enabled != overlap_enabled) {
            throw ConfigError("feature vector " + fv.video_id + " was extracted with different feature groups");
        }
        std::string line = fv.video_id;
        line += ',';
        if (fv.label) {
            line += to_string(*fv.label);
        }
        for (double value : fv.enabled_values()) {
            append_number(line, value);
        }
        out << line << '\n';
    }
}

void write_feature_csv(const std::filesystem::path& path, std::span<const FeatureVector> features,
                       bool velocity_enabled, bool overlap_enabled)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    write_feature_csv(out, features, velocity_enabled, overlap_enabled);
}

Dataset FeatureTable::to_dataset() const
{
    Dataset data(dimension());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!labels[i]) {
            throw SchemaError("row " + video_ids[i] + " has no label");
        }
        data.add(rows[i], *labels[i]);
    }
    return data;
}

FeatureTable read_feature_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError("feature CSV is empty");
    }
    const auto header = split_csv(line);
    if (header != split_csv(feature_csv_header(true, true)) &&
        header != split_csv(feature_csv_header(true, false)) &&
        header != split_csv(feature_csv_header(false, true))) {
        throw SchemaError("feature CSV header \"" + line + "\" does not match " +
                          feature_csv_header(true, true) + " or an ablation subset");
    }

    FeatureTable table;
    table.feature_columns.assign(header.begin() + 2, header.end());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != header.size()) {
            throw SchemaError("feature CSV line " + std::to_string(line_no) + " has " +
                              std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(header.size()));
        }
        table.video_ids.push_back(cells[0]);
        if (cells[1].empty()) {
            table.labels.emplace_back();
        } else if (auto label = parse_label(cells[1])) {
            table.labels.push_back(label);
        } else {
            throw SchemaError("feature CSV line " + std::to_string(line_no) + " has unknown label \"" +
                              cells[1] + "\"");
        }
        std::vector<double> row;
        for (std::size_t c = 2; c < cells.size(); ++c) {
            const char* begin = cells[c].c_str();
            char* end = nullptr;
            errno = 0;
            const double value = std::strtod(begin, &end);
            if (end == begin || *end != '\0' || errno == ERANGE) {
                throw SchemaError("feature CSV line " + std::to_string(line_no) + " column " +
                                  header[c] + " is not a number");
            }
            row.push_back(value);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

FeatureTable read_feature_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return read_feature_csv(in);
}

} // namespace difem
