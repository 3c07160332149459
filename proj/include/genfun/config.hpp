#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "genfun/errors.hpp"
#include "genfun/util.hpp"

namespace genfun {

// Flat key = value configuration in three sections. Serialization is
// canonical: fixed section and key order, shortest round-trip numerals, so
// parse-then-serialize is byte-identical for any input describing the same
// settings.
struct Config {
    // [experiment]
    std::string model = "burgers";
    int N = 16;
    double dt = 1e-3;
    double T = 0.1;
    double rho = 1.0;
    int z_points = 65;
    int measure_every = 10;
    uint64_t seed = 1;
    bool store_fields = false;
    std::string outdir = "out";
    double cfl_fraction = 0.4;
    // [initial]
    std::string initial = "sine";
    double amplitude = 1.0;
    double decay = 0.7;
    double epsilon = 0.01;
    int degrees = 5;
    // [model]
    int nodes = 33;
    int taylor_cap = 10;
    double weight_m = -1.0;
    double vmin = -8.0;
    double vmax = 8.0;
    int v_points = 129;
    bool augmented = false;
};

namespace detail {

inline std::string bool_word(bool b) { return b ? "true" : "false"; }

inline bool parse_bool(const std::string& s, const char* what) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError(std::string("bad boolean for ") + what + ": '" + s + "'");
}

} // namespace detail

inline std::string serialize_config(const Config& c) {
    std::ostringstream out;
    out << "[experiment]\n";
    out << "model = " << c.model << '\n';
    out << "N = " << c.N << '\n';
    out << "dt = " << fmt17(c.dt) << '\n';
    out << "T = " << fmt17(c.T) << '\n';
    out << "rho = " << fmt17(c.rho) << '\n';
    out << "z_points = " << c.z_points << '\n';
    out << "measure_every = " << c.measure_every << '\n';
    out << "seed = " << c.seed << '\n';
    out << "store_fields = " << detail::bool_word(c.store_fields) << '\n';
    out << "outdir = " << c.outdir << '\n';
    out << "cfl_fraction = " << fmt17(c.cfl_fraction) << '\n';
    out << "[initial]\n";
    out << "kind = " << c.initial << '\n';
    out << "amplitude = " << fmt17(c.amplitude) << '\n';
    out << "decay = " << fmt17(c.decay) << '\n';
    out << "epsilon = " << fmt17(c.epsilon) << '\n';
    out << "degrees = " << c.degrees << '\n';
    out << "[model]\n";
    out << "nodes = " << c.nodes << '\n';
    out << "taylor_cap = " << c.taylor_cap << '\n';
    out << "weight_m = " << fmt17(c.weight_m) << '\n';
    out << "vmin = " << fmt17(c.vmin) << '\n';
    out << "vmax = " << fmt17(c.vmax) << '\n';
    out << "v_points = " << c.v_points << '\n';
    out << "augmented = " << detail::bool_word(c.augmented) << '\n';
    return out.str();
}

// Applies one key = value pair. The key may carry a section prefix
// ("experiment.N"); bare keys are unambiguous because key names are unique
// across sections.
inline void apply_config_entry(Config& c, const std::string& rawkey,
                               const std::string& value, const std::string& section) {
    std::string key = rawkey;
    const size_t dot = key.find('.');
    std::string sec = section;
    if (dot != std::string::npos) {
        sec = key.substr(0, dot);
        key = key.substr(dot + 1);
    }
    auto in = [&](const char* s) { return sec.empty() || sec == s; };
    if (key == "model" && in("experiment")) c.model = value;
    else if (key == "N" && in("experiment")) c.N = static_cast<int>(parse_int(value, "N"));
    else if (key == "dt" && in("experiment")) c.dt = parse_double(value, "dt");
    else if (key == "T" && in("experiment")) c.T = parse_double(value, "T");
    else if (key == "rho" && in("experiment")) c.rho = parse_double(value, "rho");
    else if (key == "z_points" && in("experiment"))
        c.z_points = static_cast<int>(parse_int(value, "z_points"));
    else if (key == "measure_every" && in("experiment"))
        c.measure_every = static_cast<int>(parse_int(value, "measure_every"));
    else if (key == "seed" && in("experiment"))
        c.seed = static_cast<uint64_t>(parse_int(value, "seed"));
    else if (key == "store_fields" && in("experiment"))
        c.store_fields = detail::parse_bool(value, "store_fields");
    else if (key == "outdir" && in("experiment")) c.outdir = value;
    else if (key == "cfl_fraction" && in("experiment"))
        c.cfl_fraction = parse_double(value, "cfl_fraction");
    else if (key == "kind" && in("initial")) c.initial = value;
    else if (key == "amplitude" && in("initial")) c.amplitude = parse_double(value, "amplitude");
    else if (key == "decay" && in("initial")) c.decay = parse_double(value, "decay");
    else if (key == "epsilon" && in("initial")) c.epsilon = parse_double(value, "epsilon");
    else if (key == "degrees" && in("initial"))
        c.degrees = static_cast<int>(parse_int(value, "degrees"));
    else if (key == "nodes" && in("model")) c.nodes = static_cast<int>(parse_int(value, "nodes"));
    else if (key == "taylor_cap" && in("model"))
        c.taylor_cap = static_cast<int>(parse_int(value, "taylor_cap"));
    else if (key == "weight_m" && in("model")) c.weight_m = parse_double(value, "weight_m");
    else if (key == "vmin" && in("model")) c.vmin = parse_double(value, "vmin");
    else if (key == "vmax" && in("model")) c.vmax = parse_double(value, "vmax");
    else if (key == "v_points" && in("model"))
        c.v_points = static_cast<int>(parse_int(value, "v_points"));
    else if (key == "augmented" && in("model"))
        c.augmented = detail::parse_bool(value, "augmented");
    else
        throw ConfigError("unknown configuration key '" + rawkey + "'" +
                          (section.empty() ? "" : " in section [" + section + "]"));
}

inline Config parse_config(std::istream& in) {
    Config c;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("malformed section header at line " + std::to_string(lineno));
            section = trim(s.substr(1, s.size() - 2));
            if (section != "experiment" && section != "initial" && section != "model")
                throw ConfigError("unknown section [" + section + "]");
            continue;
        }
        const size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        apply_config_entry(c, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), section);
    }
    return c;
}

inline Config parse_config(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse_config(in);
}

// CLI-style override "key=value" (optionally "section.key=value").
inline void apply_override(Config& c, const std::string& spec) {
    const size_t eq = spec.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like key=value, got '" + spec + "'");
    apply_config_entry(c, trim(spec.substr(0, eq)), trim(spec.substr(eq + 1)), "");
}

inline void validate_config(const Config& c) {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    const bool kinetic = c.model == "vdb" || c.model == "kie";
    if (c.model != "burgers" && c.model != "euler" && c.model != "hydrostatic" && !kinetic)
        fail("unknown model '" + c.model + "'");
    if (c.N < 1) fail("N must be at least 1");
    if (!(c.dt > 0.0)) fail("dt must be positive");
    if (!(c.T >= 0.0)) fail("T must be nonnegative");
    if (!(c.rho > 0.0)) fail("rho must be positive");
    if (c.z_points < 2) fail("z_points must be at least 2");
    if (c.measure_every < 1) fail("measure_every must be at least 1");
    if (!(c.cfl_fraction > 0.0 && c.cfl_fraction <= 1.0))
        fail("cfl_fraction must lie in (0, 1]");
    if (c.nodes < 5) fail("nodes must be at least 5");
    if (c.taylor_cap < 0 || c.taylor_cap > 12) fail("taylor_cap must lie in [0, 12]");
    if (c.v_points < 5) fail("v_points must be at least 5");
    if (!(c.vmax > c.vmin)) fail("velocity interval is empty");
    if (kinetic && c.weight_m >= 0.0 && c.weight_m <= 3.0)
        fail("weight_m must exceed 3 for one spatial dimension");
    const std::map<std::string, std::string> only{{"sine", "burgers"},
                                                  {"taylor_green", "euler"},
                                                  {"shear", "hydrostatic"},
                                                  {"perturbed_maxwellian", "kinetic"}};
    auto it = only.find(c.initial);
    if (it == only.end()) {
        if (c.initial != "random") fail("unknown initial kind '" + c.initial + "'");
    } else if (it->second == "kinetic") {
        if (!kinetic) fail("initial '" + c.initial + "' needs a kinetic model");
    } else if (c.model != it->second) {
        fail("initial '" + c.initial + "' needs model " + it->second);
    }
    // Channel profiles built from slowly decaying random modes overwhelm the
    // transverse Taylor cap; require a minimum decay rate for that pairing.
    if (c.model == "hydrostatic" && c.initial == "random" && c.decay < 0.3)
        fail("random channel data needs decay >= 0.3");
    if (!(c.amplitude >= 0.0)) fail("amplitude must be nonnegative");
    if (!(c.epsilon >= 0.0)) fail("epsilon must be nonnegative");
    if (c.degrees < 1) fail("degrees must be at least 1");
}

} // namespace genfun
