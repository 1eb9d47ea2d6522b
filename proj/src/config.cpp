#include "stokhom/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "stokhom/coeff.hpp"
#include "stokhom/report.hpp"
#include "stokhom/stokes.hpp"

namespace stokhom {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
    std::string s = "invalid configuration:";
    for (const auto& e : issues) s += "\n  - " + e;
    return s;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end && *end == '\0' && !s.empty();
}

bool parse_int(const std::string& s, long& out) {
    char* end = nullptr;
    out = std::strtol(s.c_str(), &end, 10);
    return end && *end == '\0' && !s.empty();
}

// parameter keys accepted per preset, in canonical order
std::vector<std::string> param_keys(const std::string& preset) {
    if (preset == "constant") return {"c"};
    if (preset == "layered") return {"kappa"};
    if (preset == "trig") return {"beta"};
    if (preset == "checkerboard_smooth") return {"kappa", "s"};
    return {};
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

bool parse_eps_token(const std::string& token, double& value) {
    auto slash = token.find('/');
    if (slash != std::string::npos) {
        long num, den;
        if (!parse_int(trim(token.substr(0, slash)), num) || !parse_int(trim(token.substr(slash + 1)), den))
            return false;
        if (den == 0) return false;
        value = double(num) / double(den);
        return true;
    }
    return parse_double(token, value);
}

bool resonance_compatible(const std::string& eps_token, double eps, int n, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    auto slash = eps_token.find('/');
    if (slash != std::string::npos) {
        long num = 0, den = 1;
        parse_int(trim(eps_token.substr(0, slash)), num);
        parse_int(trim(eps_token.substr(slash + 1)), den);
        long prod = num * long(n);
        if (prod % den != 0) return fail("eps*n = " + std::to_string(num) + "*" + std::to_string(n) + "/" +
                                         std::to_string(den) + " is not an integer");
        long mult = prod / den;
        if (mult <= 0 || mult % 16 != 0)
            return fail("eps*n = " + std::to_string(mult) + " is not a positive multiple of 16");
        return true;
    }
    double prod = eps * n;
    double nearest = std::round(prod / 16.0) * 16.0;
    if (nearest <= 0.0 || std::fabs(prod - nearest) > 1e-9 * std::max(1.0, prod))
        return fail("eps*n = " + csv_double(prod) + " is not a positive multiple of 16");
    return true;
}

RunConfig parse_config(const std::string& text) {
    std::vector<std::string> issues;
    std::map<std::string, std::pair<std::string, int>> kv;  // key -> (value, line)

    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back("line " + std::to_string(lineno) + ": expected key = value, got '" + line + "'");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        auto it = kv.find(key);
        if (it != kv.end()) {
            issues.push_back("duplicate key '" + key + "' on lines " + std::to_string(it->second.second) +
                             " and " + std::to_string(lineno));
            continue;
        }
        kv[key] = {val, lineno};
    }

    const std::vector<std::string> known = {"preset", "c",   "kappa",   "beta", "s",         "n_cell",
                                            "cell_tol", "cell_max_iter", "n",    "T",    "M",         "eps",
                                            "forcing",  "amplitude",     "out",  "stride"};
    for (const auto& [key, vl] : kv) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            issues.push_back("unknown key '" + key + "' (line " + std::to_string(vl.second) + ")");
    }

    RunConfig c;
    auto have = [&](const std::string& k) { return kv.count(k) > 0; };
    auto raw = [&](const std::string& k) { return kv.at(k).first; };

    auto get_double = [&](const std::string& k, double& dst) {
        double v;
        if (!parse_double(raw(k), v))
            issues.push_back("key '" + k + "': cannot parse number '" + raw(k) + "'");
        else
            dst = v;
    };
    auto get_int = [&](const std::string& k, auto& dst) {
        long v;
        if (!parse_int(raw(k), v))
            issues.push_back("key '" + k + "': cannot parse integer '" + raw(k) + "'");
        else
            dst = decltype(dst)(v);
    };

    if (!have("preset")) {
        issues.push_back("missing required key 'preset'");
    } else {
        c.preset = raw("preset");
        auto keys = param_keys(c.preset);
        if (keys.empty()) {
            issues.push_back("unknown coefficient preset '" + c.preset + "'");
        } else {
            c.preset_params.clear();
            for (const auto& k : keys) {
                if (!have(k)) {
                    issues.push_back("preset '" + c.preset + "' requires key '" + k + "'");
                } else {
                    double v = 0.0;
                    get_double(k, v);
                    c.preset_params.push_back(v);
                }
            }
            // parameter keys belonging to other presets are unknown-for-this-preset
            for (const auto& k : {"c", "kappa", "beta", "s"}) {
                if (have(k) && std::find(keys.begin(), keys.end(), k) == keys.end())
                    issues.push_back("key '" + std::string(k) + "' does not apply to preset '" + c.preset + "'");
            }
            if (c.preset_params.size() == keys.size()) {
                try {
                    make_preset(c.preset, c.preset_params);
                } catch (const std::invalid_argument& e) {
                    issues.push_back(e.what());
                }
            }
        }
    }

    if (have("n_cell")) get_int("n_cell", c.n_cell);
    if (c.n_cell < 4 || (c.n_cell & (c.n_cell - 1)) != 0)
        issues.push_back("n_cell = " + std::to_string(c.n_cell) + " must be a power of two >= 4");
    if (have("cell_tol")) get_double("cell_tol", c.cell_tol);
    if (c.cell_tol <= 0.0) issues.push_back("cell_tol must be > 0");
    if (have("cell_max_iter")) get_int("cell_max_iter", c.cell_max_iter);
    if (c.cell_max_iter < 0) issues.push_back("cell_max_iter must be >= 0 (0 = default cap)");

    if (!have("n"))
        issues.push_back("missing required key 'n'");
    else
        get_int("n", c.n);
    if (c.n < 8) issues.push_back("n = " + std::to_string(c.n) + " must be >= 8");
    if (have("T")) get_double("T", c.T);
    if (c.T <= 0.0) issues.push_back("T must be > 0");
    if (have("M")) get_int("M", c.M);
    if (c.M < 8) issues.push_back("M must be >= 8");

    if (!have("eps")) {
        issues.push_back("missing required key 'eps'");
    } else {
        std::istringstream es(raw("eps"));
        std::string tok;
        while (std::getline(es, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            double v;
            if (!parse_eps_token(tok, v)) {
                issues.push_back("eps entry '" + tok + "' is not a number or fraction");
                continue;
            }
            if (v <= 0.0 || v >= 1.0) {
                issues.push_back("eps entry '" + tok + "' must lie in (0, 1)");
                continue;
            }
            c.eps_tokens.push_back(tok);
            c.eps.push_back(v);
        }
        if (c.eps.empty()) issues.push_back("eps list is empty");
        for (size_t i = 1; i < c.eps.size(); ++i)
            if (c.eps[i] >= c.eps[i - 1]) {
                issues.push_back("eps list must be strictly decreasing");
                break;
            }
        if (c.n >= 8) {
            for (size_t i = 0; i < c.eps.size(); ++i) {
                std::string why;
                if (!resonance_compatible(c.eps_tokens[i], c.eps[i], c.n, &why))
                    issues.push_back("eps = " + c.eps_tokens[i] + " with n = " + std::to_string(c.n) +
                                     " violates the resonance guard: " + why);
            }
        }
    }

    if (have("forcing")) c.forcing = raw("forcing");
    try {
        Forcing::from_name(c.forcing);
    } catch (const std::invalid_argument& e) {
        issues.push_back(e.what());
    }
    if (have("amplitude")) get_double("amplitude", c.amplitude);
    if (have("out")) c.out_dir = raw("out");
    if (have("stride")) get_int("stride", c.stride);
    if (c.stride < 0) issues.push_back("stride must be >= 0");

    if (!issues.empty()) throw ConfigError(std::move(issues));
    return c;
}

std::string format_config(const RunConfig& c) {
    std::ostringstream os;
    os << "preset = " << c.preset << "\n";
    auto keys = param_keys(c.preset);
    for (size_t i = 0; i < keys.size() && i < c.preset_params.size(); ++i)
        os << keys[i] << " = " << csv_double(c.preset_params[i]) << "\n";
    os << "n_cell = " << c.n_cell << "\n";
    os << "cell_tol = " << csv_double(c.cell_tol) << "\n";
    os << "cell_max_iter = " << c.cell_max_iter << "\n";
    os << "n = " << c.n << "\n";
    os << "T = " << csv_double(c.T) << "\n";
    os << "M = " << c.M << "\n";
    os << "eps = ";
    for (size_t i = 0; i < c.eps_tokens.size(); ++i) os << (i ? "," : "") << c.eps_tokens[i];
    os << "\n";
    os << "forcing = " << c.forcing << "\n";
    os << "amplitude = " << csv_double(c.amplitude) << "\n";
    os << "out = " << c.out_dir << "\n";
    os << "stride = " << c.stride << "\n";
    return os.str();
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace stokhom
