#include "plasmon/snapshot.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "plasmon/errors.hpp"

namespace plasmon {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    return in;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) parts.push_back(cur);
    return parts;
}

double to_real(const std::string& s, const std::filesystem::path& path, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw IoError(path.string() + ":" + std::to_string(line) + ": malformed number '" + s + "'");
    return v;
}

}  // namespace

void write_snapshot(const std::filesystem::path& dir, const SystemState& state, const ElectronSpace& electrons,
                    const PlasmonSpace& plasmons, const std::string& config_hash) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    char buf[512];
    {
        auto out = open_out(dir / "f.csv");
        out << "xi,i,j,r_c,p_par_c,p_perp_c,value\n";
        const std::size_t np = electrons.num_p();
        const std::size_t J = electrons.p.n_perp();
        for (std::size_t xi = 0; xi < electrons.num_r(); ++xi)
            for (std::size_t c = 0; c < np; ++c) {
                const std::size_t i = c / J, j = c % J;
                std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.17g,%.17g,%.17g,%.17g\n", xi, i, j, electrons.r.centers[xi],
                              electrons.p.par.centers[i], electrons.p.perp.centers[j], state.f[xi * np + c]);
                out << buf;
            }
        if (!out) throw IoError("write failed for " + (dir / "f.csv").string());
    }
    {
        auto out = open_out(dir / "N.csv");
        out << "id,phz_cell,interval,measure,value\n";
        for (std::size_t q = 0; q < plasmons.bundles.size(); ++q) {
            const auto& b = plasmons.bundles[q];
            std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.17g,%.17g\n", b.id, b.phz_cell, b.interval, b.measure,
                          state.N[q]);
            out << buf;
        }
        if (!out) throw IoError("write failed for " + (dir / "N.csv").string());
    }
    {
        auto out = open_out(dir / "manifest.txt");
        std::snprintf(buf, sizeof buf, "config_hash = %s\nstep = %zu\nt = %.17g\n", config_hash.c_str(), state.step,
                      state.t);
        out << buf;
        if (!out) throw IoError("write failed for " + (dir / "manifest.txt").string());
    }
}

SystemState read_snapshot(const std::filesystem::path& dir, const ElectronSpace& electrons,
                          const PlasmonSpace& plasmons, SnapshotManifest* manifest) {
    SystemState state;
    SnapshotManifest m;
    {
        const auto path = dir / "manifest.txt";
        auto in = open_in(path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto eq = line.find(" = ");
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(0, eq);
            const std::string value = line.substr(eq + 3);
            if (key == "config_hash") m.config_hash = value;
            else if (key == "step") m.step = static_cast<std::size_t>(to_real(value, path, lineno));
            else if (key == "t") m.t = to_real(value, path, lineno);
        }
    }
    state.t = m.t;
    state.step = m.step;

    const auto read_values = [&](const std::filesystem::path& path, std::size_t expected, std::size_t columns) {
        auto in = open_in(path);
        std::string line;
        std::getline(in, line);
        std::vector<double> values;
        values.reserve(expected);
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto parts = split(line);
            if (parts.size() != columns)
                throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(columns) +
                              " columns");
            values.push_back(to_real(parts.back(), path, lineno));
        }
        if (values.size() != expected)
            throw IoError(path.string() + ": expected " + std::to_string(expected) + " rows, found " +
                          std::to_string(values.size()));
        return values;
    };
    state.f = read_values(dir / "f.csv", electrons.size(), 7);
    state.N = read_values(dir / "N.csv", plasmons.bundles.size(), 5);
    if (manifest) *manifest = m;
    return state;
}

}  // namespace plasmon
