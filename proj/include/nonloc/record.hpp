#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nonloc {

/// Shortest decimal text with 17 significant digits; round-trips any double.
std::string format_sig17(double v);

const char* artifact_version();

/// FNV-1a, 64 bit, over the bytes fed in. Used for the deterministic content
/// hash of a run's numeric outputs; timestamps and wall times stay outside.
class content_hasher {
public:
    void update(std::string_view bytes);
    std::uint64_t value() const { return state_; }
    std::string hex() const;

private:
    std::uint64_t state_ = 14695981039346656037ull;
};

/// In-memory CSV with the 17-digit number format; rendered once, hashed and
/// written as-is.
class csv_table {
public:
    explicit csv_table(std::vector<std::string> columns);

    void add_row(std::span<const double> values);
    void add_text_row(std::span<const std::string> cells);
    std::string render() const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

void write_text_file(const std::string& path, std::string_view content);

} // namespace nonloc
