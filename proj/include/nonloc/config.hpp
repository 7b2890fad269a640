#pragma once

#include <nonloc/domain.hpp>
#include <nonloc/kernel.hpp>

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace nonloc {

/// One parsed configuration value: number, boolean, quoted string, or a
/// (possibly nested) array of values.
struct config_value {
    enum class kind { number, boolean, text, array };
    kind k = kind::number;
    double num = 0.0;
    bool flag = false;
    std::string str;
    std::vector<config_value> items;

    bool operator==(const config_value& o) const;
};

/// Declarative run configuration: "[section]" headers with "key = value"
/// entries, '#' comments, arrays in brackets. Keys are addressed as
/// "section.key". Parse errors and typed accessors reference the source
/// line of the offending entry.
class run_config {
public:
    static run_config parse_file(const std::string& path);
    static run_config parse_string(std::string_view text,
                                   std::string origin = "<config>");

    /// Applies one "--set section.key=value" assignment.
    void apply_override(std::string_view assignment);

    /// Canonical form: sections and keys sorted, numbers at 17 significant
    /// digits. parse(serialize()) reproduces the same configuration.
    std::string serialize() const;

    bool has(const std::string& key) const;
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    long integer(const std::string& key) const;
    long integer_or(const std::string& key, long fallback) const;
    bool boolean_or(const std::string& key, bool fallback) const;
    std::string text(const std::string& key) const;
    std::string text_or(const std::string& key, std::string fallback) const;
    std::vector<double> number_list(const std::string& key) const;
    std::vector<std::pair<double, double>> pair_list(const std::string& key) const;

    /// Object builders for the standard blocks.
    domain make_domain() const;
    kernel_spec make_kernel() const;
    /// Same kernel with the scale replaced, for sweep members.
    kernel_spec make_kernel_with_epsilon(double eps) const;

    /// Cross-field checks that must reject a config before any compute:
    /// peak resolution h <= eps/4 across the sweep, explicit-scheme step
    /// bound, step-weight sanity, time-grid divisibility.
    void cross_validate() const;

    const std::string& origin() const { return origin_; }

private:
    struct entry {
        config_value value;
        int line = 0;
    };

    [[noreturn]] void fail(const std::string& key, const std::string& what) const;
    const entry* find(const std::string& key) const;
    const entry& require(const std::string& key) const;

    std::string origin_;
    std::map<std::string, entry> entries_;
};

} // namespace nonloc
