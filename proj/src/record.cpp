#include <nonloc/record.hpp>

#include <nonloc/errors.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace nonloc {

std::string format_sig17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* artifact_version() { return "0.1.0"; }

void content_hasher::update(std::string_view bytes) {
    for (unsigned char c : bytes) {
        state_ ^= c;
        state_ *= 1099511628211ull;
    }
}

std::string content_hasher::hex() const {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(state_));
    return buf;
}

csv_table::csv_table(std::vector<std::string> columns)
    : columns_(std::move(columns)) {}

void csv_table::add_row(std::span<const double> values) {
    if (values.size() != columns_.size())
        throw internal_error("csv: row width does not match the header");
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_sig17(v));
    rows_.push_back(std::move(row));
}

void csv_table::add_text_row(std::span<const std::string> cells) {
    if (cells.size() != columns_.size())
        throw internal_error("csv: row width does not match the header");
    rows_.emplace_back(cells.begin(), cells.end());
}

std::string csv_table::render() const {
    std::string out;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        if (c) out.push_back(',');
        out += columns_[c];
    }
    out.push_back('\n');
    for (const auto& row : rows_) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out.push_back(',');
            out += row[c];
        }
        out.push_back('\n');
    }
    return out;
}

void write_text_file(const std::string& path, std::string_view content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw config_error("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw config_error("failed writing '" + path + "'");
}

} // namespace nonloc
