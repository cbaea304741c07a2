#include "qbm/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qbm/io.hpp"

namespace qbm {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config", "line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ValidationError("config", "line " + std::to_string(lineno) + ": empty key");
        cfg.set_string(key, value);
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("config", "cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

std::string Config::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ValidationError(key, "missing required key");
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string s = get_string(key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw ValidationError(key, "not a number: " + s);
    return v;
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::size_t Config::get_size(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const double v = get_double(key);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
        throw ValidationError(key, "not a non-negative integer");
    return static_cast<std::size_t>(v);
}

std::optional<double> Config::get_optional(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return get_double(key);
}

void Config::set_string(const std::string& key, const std::string& value) {
    if (values_.find(key) == values_.end()) order_.push_back(key);
    values_[key] = value;
}

void Config::set_double(const std::string& key, double value) {
    set_string(key, format_double(value));
}

std::string Config::serialize() const {
    std::string out;
    for (const auto& k : order_) {
        out += k;
        out += "=";
        out += values_.at(k);
        out += "\n";
    }
    return out;
}

void Config::save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw ValidationError("config", "cannot write " + path);
    f << serialize();
}

PhysicalParams params_from_config(const Config& cfg) {
    return make_params(cfg.get_double("mass", 1.0), cfg.get_double("gamma", 0.0),
                       cfg.get_double("temperature", 0.0), cfg.get_double("hbar", 1.0),
                       cfg.get_double("kb", 1.0), cfg.get_optional("alpha"),
                       cfg.get_optional("c"));
}

void params_to_config(const PhysicalParams& p, Config& cfg) {
    cfg.set_double("mass", p.mass);
    cfg.set_double("gamma", p.gamma);
    cfg.set_double("temperature", p.temperature);
    cfg.set_double("hbar", p.hbar);
    cfg.set_double("kb", p.kb);
    cfg.set_double("alpha", p.alpha);
    if (p.lightspeed) cfg.set_double("c", *p.lightspeed);
}

Potential potential_from_config(const Config& cfg, const PhysicalParams& params) {
    const std::string kind = cfg.get_string("potential.kind", "free");
    const std::size_t dims = cfg.get_size("dims", 1);
    if (kind == "free") return Potential::free_particle(dims);
    if (kind == "harmonic")
        return Potential::harmonic(params.mass, cfg.get_double("potential.omega"), dims);
    if (kind == "quartic")
        return Potential::quartic(cfg.get_double("potential.a"), cfg.get_double("potential.b"));
    if (kind == "tabulated") {
        const CsvTable tab = read_csv(cfg.get_string("potential.file"));
        std::vector<double> xs, vs;
        for (const auto& row : tab.rows) {
            if (row.size() < 2) throw ValidationError("potential.file", "expected x,v rows");
            xs.push_back(row[0]);
            vs.push_back(row[1]);
        }
        return Potential::tabulated(std::move(xs), std::move(vs));
    }
    throw ValidationError("potential.kind", "unknown kind: " + kind);
}

}  // namespace qbm
