#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace stokhom {

/// Flat key=value run configuration. The eps list keeps its original tokens
/// ("1/4" or "0.25") so the resonance guard can be checked exactly for
/// rational entries and the config round-trips verbatim.
struct RunConfig {
    std::string preset = "layered";
    std::vector<double> preset_params;  // c | kappa | beta | kappa,s per preset
    int n_cell = 64;
    double cell_tol = 1e-10;
    long cell_max_iter = 0;
    int n = 128;
    double T = 0.5;
    int M = 64;
    std::vector<std::string> eps_tokens;
    std::vector<double> eps;
    std::string forcing = "taylor";
    double amplitude = 1.0;
    std::string out_dir = "out";
    int stride = 0;

    bool operator==(const RunConfig&) const = default;
};

/// Carries every violation found, not just the first.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

private:
    std::vector<std::string> issues_;
};

/// Parses UTF-8 key=value text ('#' comments, blank lines allowed) and
/// validates all invariants, reporting every violation together.
RunConfig parse_config(const std::string& text);

/// Canonical key=value form; parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& c);

RunConfig load_config_file(const std::string& path);

/// eps * n must be a positive multiple of 16 (resonance guard; also enforces
/// the n >= 16/eps resolution rule). Exact for "p/q" tokens.
bool resonance_compatible(const std::string& eps_token, double eps, int n, std::string* why = nullptr);

/// Parses "p/q" or a decimal; returns false on malformed input.
bool parse_eps_token(const std::string& token, double& value);

}  // namespace stokhom
