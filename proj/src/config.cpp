#include <nonloc/config.hpp>

#include <nonloc/errors.hpp>
#include <nonloc/record.hpp>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nonloc {
namespace {

bool valid_name(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

/// Strips a trailing comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

struct value_parser {
    std::string_view text;
    std::size_t pos = 0;
    const std::string& where;

    [[noreturn]] void fail(const std::string& what) const {
        throw config_error(where + ": " + what);
    }
    void skip_space() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }
    config_value parse() {
        skip_space();
        if (pos >= text.size()) fail("missing value");
        const char c = text[pos];
        config_value v;
        if (c == '"') {
            ++pos;
            v.k = config_value::kind::text;
            while (pos < text.size() && text[pos] != '"') v.str.push_back(text[pos++]);
            if (pos >= text.size()) fail("unterminated string");
            ++pos;
            return v;
        }
        if (c == '[') {
            ++pos;
            v.k = config_value::kind::array;
            skip_space();
            if (pos < text.size() && text[pos] == ']') {
                ++pos;
                return v;
            }
            while (true) {
                v.items.push_back(parse());
                skip_space();
                if (pos >= text.size()) fail("unterminated array");
                if (text[pos] == ',') {
                    ++pos;
                    continue;
                }
                if (text[pos] == ']') {
                    ++pos;
                    return v;
                }
                fail("expected ',' or ']' in array");
            }
        }
        if (text.compare(pos, 4, "true") == 0) {
            pos += 4;
            v.k = config_value::kind::boolean;
            v.flag = true;
            return v;
        }
        if (text.compare(pos, 5, "false") == 0) {
            pos += 5;
            v.k = config_value::kind::boolean;
            v.flag = false;
            return v;
        }
        std::size_t end = pos;
        while (end < text.size() && text[end] != ',' && text[end] != ']' &&
               !std::isspace(static_cast<unsigned char>(text[end])))
            ++end;
        const std::string token(text.substr(pos, end - pos));
        char* stop = nullptr;
        v.num = std::strtod(token.c_str(), &stop);
        if (stop != token.c_str() + token.size() || token.empty())
            fail("cannot parse value '" + token + "'");
        pos = end;
        return v;
    }
};

config_value parse_value_text(std::string_view text, const std::string& where) {
    value_parser p{text, 0, where};
    config_value v = p.parse();
    p.skip_space();
    if (p.pos != text.size()) p.fail("trailing characters after value");
    return v;
}

void serialize_value(std::ostringstream& out, const config_value& v) {
    switch (v.k) {
    case config_value::kind::number:
        out << format_sig17(v.num);
        break;
    case config_value::kind::boolean:
        out << (v.flag ? "true" : "false");
        break;
    case config_value::kind::text:
        out << '"' << v.str << '"';
        break;
    case config_value::kind::array:
        out << '[';
        for (std::size_t i = 0; i < v.items.size(); ++i) {
            if (i) out << ", ";
            serialize_value(out, v.items[i]);
        }
        out << ']';
        break;
    }
}

} // namespace

bool config_value::operator==(const config_value& o) const {
    if (k != o.k) return false;
    switch (k) {
    case kind::number:
        return num == o.num;
    case kind::boolean:
        return flag == o.flag;
    case kind::text:
        return str == o.str;
    case kind::array:
        return items == o.items;
    }
    return false;
}

run_config run_config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

run_config run_config::parse_string(std::string_view text, std::string origin) {
    run_config cfg;
    cfg.origin_ = std::move(origin);
    std::string section;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t nl = text.find('\n', start);
        std::string_view line = text.substr(
            start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::string where = cfg.origin_ + ":" + std::to_string(line_no);

        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error(where + ": malformed section header");
            const std::string_view name = trim(line.substr(1, line.size() - 2));
            if (!valid_name(name))
                throw config_error(where + ": invalid section name");
            section = std::string(name);
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw config_error(where + ": expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        if (!valid_name(key)) throw config_error(where + ": invalid key name");
        if (section.empty())
            throw config_error(where + ": entry outside any [section]");
        const std::string full = section + "." + std::string(key);
        if (cfg.entries_.count(full))
            throw config_error(where + ": duplicate key '" + full + "'");
        entry e;
        e.value = parse_value_text(trim(line.substr(eq + 1)), where);
        e.line = line_no;
        cfg.entries_.emplace(full, std::move(e));
    }
    return cfg;
}

void run_config::apply_override(std::string_view assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw config_error("config: override must look like section.key=value");
    const std::string key(trim(assignment.substr(0, eq)));
    const std::size_t dot = key.find('.');
    if (dot == std::string::npos || !valid_name(key.substr(0, dot)) ||
        !valid_name(key.substr(dot + 1)))
        throw config_error("config: override key must be section.key");
    entry e;
    e.value = parse_value_text(trim(assignment.substr(eq + 1)),
                               "--set " + key);
    e.line = 0;
    entries_[key] = std::move(e);
}

std::string run_config::serialize() const {
    std::ostringstream out;
    std::string section;
    for (const auto& [key, e] : entries_) {
        const std::size_t dot = key.find('.');
        const std::string sec = key.substr(0, dot);
        if (sec != section) {
            if (!section.empty()) out << '\n';
            out << '[' << sec << "]\n";
            section = sec;
        }
        out << key.substr(dot + 1) << " = ";
        serialize_value(out, e.value);
        out << '\n';
    }
    return out.str();
}

void run_config::fail(const std::string& key, const std::string& what) const {
    const entry* e = find(key);
    const std::string where =
        e ? origin_ + ":" + std::to_string(e->line) : origin_;
    throw config_error(where + ": " + what + " ('" + key + "')");
}

const run_config::entry* run_config::find(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

const run_config::entry& run_config::require(const std::string& key) const {
    const entry* e = find(key);
    if (!e)
        throw config_error(origin_ + ": missing required key '" + key + "'");
    return *e;
}

bool run_config::has(const std::string& key) const { return find(key) != nullptr; }

double run_config::number(const std::string& key) const {
    const entry& e = require(key);
    if (e.value.k != config_value::kind::number) fail(key, "expected a number");
    return e.value.num;
}

double run_config::number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

long run_config::integer(const std::string& key) const {
    const double v = number(key);
    const long n = std::lround(v);
    if (v != static_cast<double>(n)) fail(key, "expected an integer");
    return n;
}

long run_config::integer_or(const std::string& key, long fallback) const {
    return has(key) ? integer(key) : fallback;
}

bool run_config::boolean_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const entry& e = require(key);
    if (e.value.k != config_value::kind::boolean) fail(key, "expected true/false");
    return e.value.flag;
}

std::string run_config::text(const std::string& key) const {
    const entry& e = require(key);
    if (e.value.k != config_value::kind::text) fail(key, "expected a string");
    return e.value.str;
}

std::string run_config::text_or(const std::string& key, std::string fallback) const {
    return has(key) ? text(key) : fallback;
}

std::vector<double> run_config::number_list(const std::string& key) const {
    const entry& e = require(key);
    if (e.value.k != config_value::kind::array) fail(key, "expected an array");
    std::vector<double> out;
    for (const config_value& v : e.value.items) {
        if (v.k != config_value::kind::number)
            fail(key, "expected an array of numbers");
        out.push_back(v.num);
    }
    return out;
}

std::vector<std::pair<double, double>> run_config::pair_list(const std::string& key) const {
    const entry& e = require(key);
    if (e.value.k != config_value::kind::array) fail(key, "expected an array");
    std::vector<std::pair<double, double>> out;
    for (const config_value& v : e.value.items) {
        if (v.k != config_value::kind::array || v.items.size() != 2 ||
            v.items[0].k != config_value::kind::number ||
            v.items[1].k != config_value::kind::number)
            fail(key, "expected an array of [a, b] pairs");
        out.emplace_back(v.items[0].num, v.items[1].num);
    }
    return out;
}

domain run_config::make_domain() const {
    std::vector<interval> ivs;
    for (const auto& [a, b] : pair_list("domain.intervals")) ivs.push_back({a, b});
    return domain(std::move(ivs));
}

kernel_spec run_config::make_kernel() const {
    kernel_spec ks;
    const std::string fam = text("kernel.family");
    if (fam == "zero_order")
        ks.family = kernel_family::zero_order;
    else if (fam == "general_j")
        ks.family = kernel_family::general_j;
    else if (fam == "singular_fractional")
        ks.family = kernel_family::singular_fractional;
    else if (fam == "regularized_singular")
        ks.family = kernel_family::regularized_singular;
    else if (fam == "anisotropic")
        ks.family = kernel_family::anisotropic;
    else
        fail("kernel.family", "unknown kernel family '" + fam + "'");
    ks.sigma = number_or("kernel.sigma", 0.5);
    ks.epsilon = number_or("kernel.epsilon",
                           ks.family == kernel_family::singular_fractional ||
                                   ks.family == kernel_family::general_j
                               ? 0.0
                               : 1.0);
    ks.alpha = number_or("kernel.alpha", 1.5);
    if (has("kernel.profile")) {
        for (const auto& [r, v] : pair_list("kernel.profile")) {
            ks.base_density.r.push_back(r);
            ks.base_density.v.push_back(v);
        }
    }
    if (has("kernel.coefficient")) {
        for (const auto& [r, v] : pair_list("kernel.coefficient")) {
            ks.coefficient.r.push_back(r);
            ks.coefficient.v.push_back(v);
        }
    }
    ks.lambda1 = number_or("kernel.lambda1", 1.0);
    ks.lambda2 = number_or("kernel.lambda2", 1.0);
    validate(ks);
    return ks;
}

kernel_spec run_config::make_kernel_with_epsilon(double eps) const {
    kernel_spec ks = make_kernel();
    ks.epsilon = eps;
    validate(ks);
    return ks;
}

void run_config::cross_validate() const {
    const domain dom = make_domain();
    const kernel_spec ks = make_kernel();

    std::vector<double> epsilons;
    if (has("study.epsilons"))
        epsilons = number_list("study.epsilons");
    else if (ks.epsilon > 0.0)
        epsilons.push_back(ks.epsilon);

    const bool peaked = ks.family == kernel_family::zero_order ||
                        ks.family == kernel_family::anisotropic;
    const std::string h_rule = text_or("grid.h_rule", "fixed");
    if (h_rule != "fixed" && h_rule != "quarter_eps")
        fail("grid.h_rule", "h_rule must be 'fixed' or 'quarter_eps'");
    if (peaked && h_rule == "fixed") {
        const double h = number("grid.h_target");
        for (double eps : epsilons)
            if (h > eps / 4.0 + 1e-12)
                fail("grid.h_target",
                     "peak resolution needs h <= epsilon/4; h = " + format_sig17(h) +
                         " violates it for epsilon = " + format_sig17(eps));
    }

    if (has("solver.a") && number("solver.a") > 0.0 && is_integrable(ks)) {
        const double a = number("solver.a");
        kernel_spec probe = ks;
        if (!epsilons.empty()) probe.epsilon = epsilons.front();
        if (a * l1_norm(probe) > 1.0 + 1e-12)
            fail("solver.a", "step weight must satisfy a <= 1/||K||_1");
    }

    if (has("parabolic.dt")) {
        const double dt = number("parabolic.dt");
        const double T = number("parabolic.t_final");
        if (!(dt > 0.0) || !(T > 0.0))
            fail("parabolic.dt", "dt and t_final must be positive");
        const double steps = T / dt;
        if (std::abs(steps - std::round(steps)) > 1e-9 * steps)
            fail("parabolic.dt", "dt must divide t_final");
        const std::string scheme = text_or("parabolic.scheme", "implicit_euler");
        if (scheme != "implicit_euler" && scheme != "explicit_euler")
            fail("parabolic.scheme",
                 "scheme must be 'implicit_euler' or 'explicit_euler'");
        if (scheme == "explicit_euler") {
            if (!is_integrable(ks))
                fail("parabolic.scheme",
                     "explicit stepping needs an integrable kernel");
            kernel_spec probe = ks;
            if (!epsilons.empty()) probe.epsilon = epsilons.front();
            if (dt * l1_norm(probe) > 1.0 + 1e-12)
                fail("parabolic.dt", "explicit stability needs dt * ||K||_1 <= 1");
        }
    }

    (void)dom;
}

} // namespace nonloc
