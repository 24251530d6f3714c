#include "fracinv/config.hpp"

#include "fracinv/errors.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace fracinv {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line)
{
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') {
            quoted = !quoted;
        } else if (line[i] == '#' && !quoted) {
            return line.substr(0, i);
        }
    }
    return line;
}

double parse_number(const std::string& v, const std::string& where)
{
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || trim(end).size() != 0) {
        throw ConfigError(where + ": expected a number, got '" + v + "'");
    }
    return x;
}

std::string parse_string(const std::string& v)
{
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
        return v.substr(1, v.size() - 2);
    }
    return v;
}

std::vector<double> parse_list(const std::string& v, const std::string& where)
{
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
        throw ConfigError(where + ": expected a [list], got '" + v + "'");
    }
    std::vector<double> out;
    std::stringstream ss(v.substr(1, v.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            continue;
        }
        out.push_back(parse_number(item, where));
    }
    return out;
}

std::size_t parse_count(const std::string& v, const std::string& where)
{
    const double x = parse_number(v, where);
    if (!(x >= 0.0) || x != static_cast<double>(static_cast<std::size_t>(x))) {
        throw ConfigError(where + ": expected a nonnegative integer, got '" + v + "'");
    }
    return static_cast<std::size_t>(x);
}

SourceProfile parse_profile(const std::string& v, const std::string& where)
{
    const std::string s = parse_string(v);
    if (s == "one") {
        return SourceProfile::one;
    }
    if (s == "gauss") {
        return SourceProfile::gauss;
    }
    throw ConfigError(where + ": unknown source profile '" + s + "' (one | gauss)");
}

} // namespace

ExperimentConfig parse_experiment_config_text(const std::string& text,
                                              const std::string& origin)
{
    ExperimentConfig cfg;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) {
            continue;
        }
        const std::string where = origin + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(where + ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where + ": expected key = value");
        }
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "problem.s") {
            cfg.s = parse_number(value, where);
        } else if (key == "problem.omega") {
            const auto v = parse_list(value, where);
            if (v.size() != 2) {
                throw ConfigError(where + ": omega must be [a, b]");
            }
            cfg.omega_a = v[0];
            cfg.omega_b = v[1];
        } else if (key == "problem.domain") {
            const auto v = parse_list(value, where);
            if (v.size() != 2) {
                throw ConfigError(where + ": domain must be [x_min, x_max]");
            }
            cfg.x_min = v[0];
            cfg.x_max = v[1];
        } else if (key == "problem.n_omega") {
            cfg.n_omega = parse_count(value, where);
        } else if (key == "problem.eps_cells") {
            cfg.eps_cells = parse_count(value, where);
        } else if (key == "sources.f") {
            cfg.profile_f = parse_profile(value, where);
        } else if (key == "sources.f_tilde") {
            cfg.profile_f_tilde = parse_profile(value, where);
        } else if (key == "sources.margin") {
            cfg.margin = parse_number(value, where);
        } else if (key == "truth.preset") {
            cfg.truth_preset = parse_string(value);
        } else if (key == "truth.q_values") {
            cfg.truth_q = parse_list(value, where);
            cfg.truth_preset = "tabulated";
        } else if (key == "truth.g_values") {
            cfg.truth_g = parse_list(value, where);
            cfg.truth_preset = "tabulated";
        } else if (key == "data.refine") {
            cfg.refine = parse_count(value, where);
        } else if (key == "data.delta") {
            if (!value.empty() && value.front() == '[') {
                cfg.deltas = parse_list(value, where);
            } else {
                cfg.deltas = {parse_number(value, where)};
            }
        } else if (key == "data.seed") {
            cfg.seed = static_cast<std::uint64_t>(parse_count(value, where));
        } else if (key == "solver.alpha") {
            const std::string s = parse_string(value);
            if (s == "delta_sq" || s == "auto") {
                cfg.alpha_auto = true;
            } else {
                cfg.alpha_auto = false;
                cfg.alpha = parse_number(value, where);
            }
        } else if (key == "solver.tau") {
            cfg.tau = parse_number(value, where);
        } else if (key == "solver.max_iter") {
            cfg.max_iter = parse_count(value, where);
        } else {
            throw ConfigError(where + ": unknown configuration key '" + key + "'");
        }
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig parse_experiment_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config_text(ss.str(), path);
}

} // namespace fracinv
