#include "slopegyre/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "slopegyre/errors.hpp"

namespace slopegyre {

namespace {

std::string strip(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

KeyValueFile KeyValueFile::parse_string(const std::string& text) {
    KeyValueFile kv;
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        const size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = strip(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value: " + line);
        kv.data_[section][strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
    return kv;
}

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

bool KeyValueFile::has(const std::string& section, const std::string& key) const {
    auto s = data_.find(section);
    return s != data_.end() && s->second.count(key) > 0;
}

std::string KeyValueFile::get(const std::string& section, const std::string& key,
                              const std::string& fallback) const {
    auto s = data_.find(section);
    if (s == data_.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

double KeyValueFile::get_num(const std::string& section, const std::string& key,
                             double fallback) const {
    if (!has(section, key)) return fallback;
    try {
        return std::stod(get(section, key, ""));
    } catch (const std::exception&) {
        throw ConfigError("bad number for " + section + "." + key);
    }
}

int KeyValueFile::get_int(const std::string& section, const std::string& key,
                          int fallback) const {
    return int(std::llround(get_num(section, key, double(fallback))));
}

namespace {

ForcingRecipe::Envelope parse_env(const std::string& v) {
    if (v == "gaussian") return ForcingRecipe::Envelope::Gaussian;
    if (v == "exponential") return ForcingRecipe::Envelope::Exponential;
    throw ConfigError("unknown envelope kind: " + v);
}

std::vector<double> parse_list(const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = strip(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

} // namespace

RunConfig config_from_kv(const KeyValueFile& kv) {
    RunConfig c;
    c.regime.epsilon = kv.get_num("regime", "epsilon", c.regime.epsilon);
    c.regime.a = kv.get_num("regime", "a", c.regime.a);
    c.regime.b = kv.get_num("regime", "b", c.regime.b);
    c.regime.d = kv.get_num("regime", "d", c.regime.d);
    c.regime.e = kv.get_num("regime", "e", c.regime.e);
    if (kv.has("regime", "alpha_degrees"))
        c.regime.alpha = kv.get_num("regime", "alpha_degrees", 0.0) * M_PI / 180.0;
    c.regime.M = kv.get_int("regime", "M", c.regime.M);
    c.regime.theta_lo = kv.get_num("regime", "theta_lo", c.regime.theta_lo);
    c.regime.theta_hi = kv.get_num("regime", "theta_hi", c.regime.theta_hi);
    c.regime.relaxed_b_bound = kv.get_int("regime", "relaxed_b_bound", 0) != 0;

    c.forcing.amplitude = kv.get_num("forcing", "amplitude", c.forcing.amplitude);
    c.forcing.amplitude2 = kv.get_num("forcing", "amplitude2", c.forcing.amplitude2);
    c.forcing.env_x = parse_env(kv.get("forcing", "envelope_x", "gaussian"));
    c.forcing.env_y = parse_env(kv.get("forcing", "envelope_y", "gaussian"));
    c.forcing.width_x = kv.get_num("forcing", "width_x", c.forcing.width_x);
    c.forcing.center_x = kv.get_num("forcing", "center_x", c.forcing.center_x);
    c.forcing.mod_kx = kv.get_num("forcing", "mod_kx", c.forcing.mod_kx);
    c.forcing.width_y = kv.get_num("forcing", "width_y", c.forcing.width_y);
    c.forcing.y_wavelength = kv.get_num("forcing", "y_wavelength", c.forcing.y_wavelength);
    c.forcing.y_phase = kv.get_num("forcing", "y_phase", c.forcing.y_phase);
    c.forcing.gamma = kv.get_num("forcing", "gamma", c.forcing.gamma);

    c.ingest.kappa = kv.get_num("forcing", "kappa", c.ingest.kappa);
    c.ingest.tail_budget_N = kv.get_num("forcing", "tail_budget_N", c.ingest.tail_budget_N);
    c.ingest.Q = kv.get_num("forcing", "Q", c.ingest.Q);
    c.ingest.drop_ky0 = kv.get_int("forcing", "drop_ky0", 0) != 0;

    c.grid.Lx = kv.get_num("grid", "Lx", c.grid.Lx);
    c.grid.Ly = kv.get_num("grid", "Ly", c.grid.Ly);
    c.grid.Nx = kv.get_int("grid", "Nx", c.grid.Nx);
    c.grid.Ny = kv.get_int("grid", "Ny", c.grid.Ny);

    c.solve.order = kv.get_int("solve", "order", c.solve.order);
    c.solve.K = kv.get_int("solve", "K", c.solve.K);
    c.solve.smoothness_budget = kv.get_int("solve", "smoothness_budget", c.solve.smoothness_budget);
    c.solve.trim_rel = kv.get_num("solve", "trim_rel", c.solve.trim_rel);
    c.solve.build_ekman = kv.get_int("solve", "build_ekman", 1) != 0;
    if (kv.has("solve", "x3")) c.solve.x3_slices = parse_list(kv.get("solve", "x3", ""));
    c.solve.residual_budget_N = kv.get_num("solve", "residual_budget_N", c.solve.residual_budget_N);

    c.output.directory = kv.get("output", "directory", c.output.directory);
    c.output.write_fields = kv.get_int("output", "write_fields", 0) != 0;
    return c;
}

RunConfig load_config(const std::string& path) {
    return config_from_kv(KeyValueFile::parse_file(path));
}

} // namespace slopegyre
