#include "plasmon/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "plasmon/errors.hpp"

namespace plasmon {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
        throw ConfigError(key + ": expected a finite number, got '" + v + "'");
    return out;
}

std::uint64_t parse_count(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
    return out;
}

int parse_int(const std::string& key, const std::string& v) {
    int out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
}

std::string fmt_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
    std::string key;
    Setter set;
    Getter get;
};

template <class Access>
Field real(std::string key, Access access) {
    return {key, [access](RunConfig& c, const std::string& k, const std::string& v) { access(c) = parse_real(k, v); },
            [access](const RunConfig& c) {
                RunConfig copy = c;
                return fmt_real(access(copy));
            }};
}

template <class Access>
Field count(std::string key, Access access) {
    return {key,
            [access](RunConfig& c, const std::string& k, const std::string& v) {
                access(c) = static_cast<std::size_t>(parse_count(k, v));
            },
            [access](const RunConfig& c) {
                RunConfig copy = c;
                return std::to_string(access(copy));
            }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        std::vector<Field> t;
        auto bounds = [&t](const std::string& name, auto member) {
            t.push_back(real("domain." + name + "_min", [member](RunConfig& c) -> double& { return (c.domain.*member).lo; }));
            t.push_back(real("domain." + name + "_max", [member](RunConfig& c) -> double& { return (c.domain.*member).hi; }));
        };
        bounds("p_par", &RunConfig::Domain::p_par);
        bounds("p_perp", &RunConfig::Domain::p_perp);
        bounds("r", &RunConfig::Domain::r);
        bounds("kr", &RunConfig::Domain::kr);
        bounds("q_phi", &RunConfig::Domain::q_phi);
        bounds("kz", &RunConfig::Domain::kz);

        auto grid = [&t](const std::string& name, std::size_t RunConfig::Grid::*member) {
            t.push_back(count("grid." + name, [member](RunConfig& c) -> std::size_t& { return c.grid.*member; }));
        };
        grid("n_p_par", &RunConfig::Grid::n_p_par);
        grid("n_p_perp", &RunConfig::Grid::n_p_perp);
        grid("n_r", &RunConfig::Grid::n_r);
        grid("n_q_phi", &RunConfig::Grid::n_q_phi);
        grid("n_kz", &RunConfig::Grid::n_kz);
        grid("n_tri_kr", &RunConfig::Grid::n_tri_kr);
        grid("n_tri_r", &RunConfig::Grid::n_tri_r);
        grid("n_strata", &RunConfig::Grid::n_strata);

        t.push_back({"physics.profile",
                     [](RunConfig& c, const std::string& k, const std::string& v) {
                         if (v == "parabolic") c.physics.profile = DensityProfile::parabolic;
                         else if (v == "uniform") c.physics.profile = DensityProfile::uniform;
                         else throw ConfigError(k + ": expected parabolic or uniform, got '" + v + "'");
                     },
                     [](const RunConfig& c) {
                         return std::string(c.physics.profile == DensityProfile::parabolic ? "parabolic" : "uniform");
                     }});
        t.push_back(real("physics.omega_pe0", [](RunConfig& c) -> double& { return c.physics.omega_pe0; }));
        t.push_back(real("physics.b0", [](RunConfig& c) -> double& { return c.physics.b0; }));
        t.push_back({"physics.harmonic",
                     [](RunConfig& c, const std::string& k, const std::string& v) { c.physics.harmonic = parse_int(k, v); },
                     [](const RunConfig& c) { return std::to_string(c.physics.harmonic); }});
        t.push_back(real("physics.epsilon", [](RunConfig& c) -> double& { return c.physics.epsilon; }));
        t.push_back({"physics.amplitude",
                     [](RunConfig& c, const std::string& k, const std::string& v) {
                         if (v != "constant" && v != "random")
                             throw ConfigError(k + ": expected constant or random, got '" + v + "'");
                         c.physics.amplitude = v;
                     },
                     [](const RunConfig& c) { return c.physics.amplitude; }});
        t.push_back({"physics.amplitude_seed",
                     [](RunConfig& c, const std::string& k, const std::string& v) {
                         c.physics.amplitude_seed = parse_count(k, v);
                     },
                     [](const RunConfig& c) { return std::to_string(c.physics.amplitude_seed); }});

        t.push_back(real("initial.f_amplitude", [](RunConfig& c) -> double& { return c.initial.f_amplitude; }));
        t.push_back(real("initial.f_center", [](RunConfig& c) -> double& { return c.initial.f_center; }));
        t.push_back(real("initial.n_amplitude", [](RunConfig& c) -> double& { return c.initial.n_amplitude; }));

        t.push_back({"solver.scheme",
                     [](RunConfig& c, const std::string& k, const std::string& v) {
                         try {
                             c.solver.scheme = parse_scheme(v);
                         } catch (const ConfigError& e) {
                             throw ConfigError(k + ": " + e.what());
                         }
                     },
                     [](const RunConfig& c) { return to_string(c.solver.scheme); }});
        t.push_back(real("solver.delta", [](RunConfig& c) -> double& { return c.solver.delta; }));
        t.push_back(real("solver.safety", [](RunConfig& c) -> double& { return c.solver.safety; }));
        t.push_back(real("solver.t_max", [](RunConfig& c) -> double& { return c.solver.t_max; }));
        t.push_back(count("solver.max_steps", [](RunConfig& c) -> std::size_t& { return c.solver.max_steps; }));

        t.push_back({"output.dir",
                     [](RunConfig& c, const std::string& k, const std::string& v) {
                         if (v.empty()) throw ConfigError(k + ": must not be empty");
                         c.output.dir = v;
                     },
                     [](const RunConfig& c) { return c.output.dir; }});
        t.push_back(count("output.diagnostics_every",
                          [](RunConfig& c) -> std::size_t& { return c.output.diagnostics_every; }));
        t.push_back(count("output.snapshot_every", [](RunConfig& c) -> std::size_t& { return c.output.snapshot_every; }));
        return t;
    }();
    return table;
}

const Field* find_field(const std::string& key) {
    for (const auto& f : fields())
        if (f.key == key) return &f;
    return nullptr;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::set<std::string> seen;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.find('.') == std::string::npos && !section.empty()) key = section + "." + key;
        const Field* f = find_field(key);
        if (!f) throw ConfigError(key + ": unknown configuration key");
        if (!seen.insert(key).second) throw ConfigError(key + ": given more than once");
        f->set(c, key, value);
    }
    validate(c);
    return c;
}

void validate(const RunConfig& c) {
    auto ordered = [](const std::string& name, Bounds b) {
        if (!(b.lo < b.hi))
            throw ConfigError("domain." + name + "_max: must exceed domain." + name + "_min");
    };
    ordered("p_par", c.domain.p_par);
    ordered("p_perp", c.domain.p_perp);
    ordered("r", c.domain.r);
    ordered("kr", c.domain.kr);
    ordered("q_phi", c.domain.q_phi);
    ordered("kz", c.domain.kz);
    if (c.domain.p_perp.lo < 0.0) throw ConfigError("domain.p_perp_min: must be non-negative");
    if (c.domain.r.lo < 0.0) throw ConfigError("domain.r_min: must be non-negative");

    const std::pair<const char*, std::size_t> counts[] = {
        {"grid.n_p_par", c.grid.n_p_par}, {"grid.n_p_perp", c.grid.n_p_perp}, {"grid.n_r", c.grid.n_r},
        {"grid.n_q_phi", c.grid.n_q_phi}, {"grid.n_kz", c.grid.n_kz},         {"grid.n_tri_kr", c.grid.n_tri_kr},
        {"grid.n_tri_r", c.grid.n_tri_r}, {"grid.n_strata", c.grid.n_strata}};
    for (const auto& [key, n] : counts)
        if (n < 1) throw ConfigError(std::string(key) + ": must be at least 1");

    if (!(c.physics.omega_pe0 >= 0.0)) throw ConfigError("physics.omega_pe0: must be non-negative");
    if (!(c.physics.epsilon > 0.0)) throw ConfigError("physics.epsilon: must be positive");
    if (!(c.initial.f_amplitude >= 0.0)) throw ConfigError("initial.f_amplitude: must be non-negative");
    if (!(c.initial.n_amplitude >= 0.0)) throw ConfigError("initial.n_amplitude: must be non-negative");
    if (!(c.solver.delta > 0.0 && c.solver.delta < 1.0)) throw ConfigError("solver.delta: must lie in (0, 1)");
    if (!(c.solver.safety > 0.0 && c.solver.safety <= 1.0)) throw ConfigError("solver.safety: must lie in (0, 1]");
    if (!(c.solver.t_max >= 0.0)) throw ConfigError("solver.t_max: must be non-negative");
    if (c.output.diagnostics_every < 1) throw ConfigError("output.diagnostics_every: must be at least 1");
}

std::string to_text(const RunConfig& c) {
    std::ostringstream out;
    std::string section;
    for (const auto& f : fields()) {
        const auto dot = f.key.find('.');
        const std::string sec = f.key.substr(0, dot);
        if (sec != section) {
            if (!section.empty()) out << "\n";
            out << "[" << sec << "]\n";
            section = sec;
        }
        out << f.key.substr(dot + 1) << " = " << f.get(c) << "\n";
    }
    return out.str();
}

std::string config_hash(const RunConfig& c) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : to_text(c)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace plasmon
