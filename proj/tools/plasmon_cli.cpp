// Command-line driver: run, bundles, audit, preset.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "plasmon/audit.hpp"
#include "plasmon/config.hpp"
#include "plasmon/diagnostics.hpp"
#include "plasmon/errors.hpp"
#include "plasmon/scenario.hpp"
#include "plasmon/snapshot.hpp"

namespace fs = std::filesystem;
using namespace plasmon;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

RunConfig load_config(const std::string& path, const std::string& out_dir) {
    std::string text;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read configuration file " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    RunConfig config = parse_config(text);
    if (!out_dir.empty()) config.output.dir = out_dir;
    return config;
}

void log_line(const char* fmt, auto... args) {
    std::fprintf(stderr, fmt, args...);
    std::fputc('\n', stderr);
}

int cmd_bundles(const RunConfig& config) {
    const auto model = make_model(config);
    const auto space = make_plasmon_space(config, model);
    const fs::path dir = config.output.dir;
    fs::create_directories(dir);
    std::ofstream out(dir / "bundles.csv");
    if (!out) throw IoError("cannot open " + (dir / "bundles.csv").string());
    write_bundle_table(out, *space);
    log_line("bundles: %zu retained, %zu excluded, additivity defect %.3e, written to %s", space->bundles.size(),
             space->excluded.size(), measure_additivity_defect(*space), (dir / "bundles.csv").c_str());
    return 0;
}

int cmd_audit(const RunConfig& config) {
    const auto model = make_model(config);
    const auto space = make_plasmon_space(config, model);
    const bool ok = run_audit(*space, std::cout);
    std::cout << (ok ? "audit passed" : "audit FAILED") << std::endl;
    return ok ? 0 : kExitNumerical;
}

int cmd_run(const RunConfig& config, bool audit) {
    const Scenario sc = build_scenario(config);
    const auto stats = sc.op->stats();
    log_line("config %s: %zu electron cells, %zu bundles (%zu excluded at the k_r cut-off)",
             config_hash(config).c_str(), sc.electrons->size(), sc.plasmons->bundles.size(),
             sc.plasmons->excluded.size());
    log_line("interaction: %zu nonzeros (dense bound %.3g), %.1f MiB", stats.nonzeros, stats.predicted_nonzeros,
             static_cast<double>(stats.memory_bytes) / (1024.0 * 1024.0));
    if (audit && !run_audit(*sc.plasmons, std::cerr)) {
        std::fputs("audit failed; not running\n", stderr);
        return kExitNumerical;
    }

    const fs::path dir = config.output.dir;
    fs::create_directories(dir);
    std::ofstream series(dir / "series.csv");
    if (!series) throw IoError("cannot open " + (dir / "series.csv").string());
    write_series_header(series);
    const std::string hash = config_hash(config);

    ConservationRecord initial;
    SystemState last_good = initial_conditions(config, *sc.electrons, *sc.plasmons);
    RunOptions opts;
    opts.scheme = config.solver.scheme;
    opts.delta = config.solver.delta;
    opts.safety = config.solver.safety;
    opts.t_max = config.solver.t_max;
    opts.max_steps = config.solver.max_steps;

    auto observer = [&](const SystemState& s, const StepRecord& rec) {
        last_good = s;
        if (rec.step == 0 && rec.dt == 0.0) initial = totals(sc.weights, s);
        if (s.step % config.output.diagnostics_every == 0) {
            ConservationRecord r = totals(sc.weights, s);
            set_relative_errors(r, initial);
            write_series_row(series, r);
            log_line("step %zu t=%.6e dt=%.3e bound=%s e_mass=%.2e e_mom=%.2e e_energy=%.2e", s.step, s.t, rec.dt,
                     rec.bound.c_str(), r.e_rel_mass, r.e_rel_momentum, r.e_rel_energy);
        }
        if (config.output.snapshot_every > 0 && s.step % config.output.snapshot_every == 0) {
            char name[64];
            std::snprintf(name, sizeof name, "snapshot_%08zu", s.step);
            write_snapshot(dir / name, s, *sc.electrons, *sc.plasmons, hash);
        }
    };

    try {
        const SystemState final_state = run(*sc.op, last_good, opts, observer);
        write_snapshot(dir / "final", final_state, *sc.electrons, *sc.plasmons, hash);
        log_line("finished at step %zu, t=%.6e, last p_par column holds %.2e of the mass", final_state.step,
                 final_state.t, last_column_mass(*sc.electrons, final_state.f) / std::max(initial.mass, 1e-300));
        return 0;
    } catch (const NumericalError& e) {
        write_snapshot(dir / "last_good", last_good, *sc.electrons, *sc.plasmons, hash);
        log_line("step failure: %s (last good state at step %zu written)", e.what(), last_good.step);
        return kExitNumerical;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Electron-plasmon kinetic solver"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    bool audit = false;

    auto* run_cmd = app.add_subcommand("run", "run the coupled solver");
    run_cmd->add_option("--config", config_path, "configuration file (defaults to the reference preset)");
    run_cmd->add_option("--out", out_dir, "output directory (overrides output.dir)");
    run_cmd->add_flag("--audit", audit, "run the oracle self-checks before stepping");

    auto* bundles_cmd = app.add_subcommand("bundles", "build and dump the trajectory bundles");
    bundles_cmd->add_option("--config", config_path, "configuration file");
    bundles_cmd->add_option("--out", out_dir, "output directory");

    auto* audit_cmd = app.add_subcommand("audit", "oracle self-checks of the bundle construction");
    audit_cmd->add_option("--config", config_path, "configuration file");

    app.add_subcommand("preset", "print the reference configuration");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("preset")) {
            std::cout << to_text(RunConfig{});
            return 0;
        }
        const RunConfig config = load_config(config_path, out_dir);
        if (app.got_subcommand(run_cmd)) return cmd_run(config, audit);
        if (app.got_subcommand(bundles_cmd)) return cmd_bundles(config);
        if (app.got_subcommand(audit_cmd)) return cmd_audit(config);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
