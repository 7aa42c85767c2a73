#ifndef SLOPEGYRE_CONFIG_HPP
#define SLOPEGYRE_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "slopegyre/forcing.hpp"
#include "slopegyre/regime.hpp"

namespace slopegyre {

// Flat key-value configuration with [section] headers.
class KeyValueFile {
public:
    static KeyValueFile parse_file(const std::string& path);
    static KeyValueFile parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    double get_num(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return data_;
    }

private:
    std::map<std::string, std::map<std::string, std::string>> data_;
};

struct SolveConfig {
    int order = 1;              // for the two-term solve
    int K = 2;                  // cascade depth
    int smoothness_budget = 30;
    double trim_rel = 0.0;
    bool build_ekman = true;
    std::vector<double> x3_slices = {0.5};
    double residual_budget_N = 2.0;
};

struct OutputConfig {
    std::string directory = "out";
    bool write_fields = false;
};

struct RunConfig {
    Parameters regime;
    ForcingRecipe forcing;
    IngestOptions ingest;
    ModeGrid grid;
    SolveConfig solve;
    OutputConfig output;
};

RunConfig load_config(const std::string& path);
RunConfig config_from_kv(const KeyValueFile& kv);

} // namespace slopegyre

#endif
