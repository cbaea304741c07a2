#pragma once

#include <map>
#include <optional>
#include <string>

#include "qbm/core.hpp"

namespace qbm {

/// Flat key=value configuration (UTF-8, '#' comments). The same parser backs
/// the CLI and library loaders.
class Config {
public:
    Config() = default;

    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
    std::optional<double> get_optional(const std::string& key) const;

    void set_string(const std::string& key, const std::string& value);
    void set_double(const std::string& key, double value);  // round-trip exact (17 digits)

    std::string serialize() const;  // keys in insertion order
    void save(const std::string& path) const;

    const std::vector<std::string>& keys() const { return order_; }

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
};

/// Builds PhysicalParams from keys mass, gamma, temperature, hbar, kb, alpha, c.
PhysicalParams params_from_config(const Config& cfg);
void params_to_config(const PhysicalParams& p, Config& cfg);

/// Builds the potential from potential.kind (free|harmonic|quartic|tabulated) and
/// its parameters (potential.omega, potential.a, potential.b, potential.file).
Potential potential_from_config(const Config& cfg, const PhysicalParams& params);

/// Formats a double with enough digits to round-trip exactly.
std::string format_double(double v);

}  // namespace qbm
