#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cli_support.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

struct Flags {
    cli::RunConfig values;
    std::string config_path;
    std::string g_range;
    std::string input;
    std::string witness_out;
    std::string part{"C"};
    bool no_gme{false};
    // copies a set flag into the merged configuration
    std::vector<std::pair<CLI::Option*, std::function<void(cli::RunConfig&)>>> setters;
};

template <typename T>
void bind_option(CLI::App* app, Flags& f, const std::string& name, T cli::RunConfig::*field, const std::string& help) {
    CLI::Option* opt = app->add_option(name, f.values.*field, help)->capture_default_str();
    f.setters.emplace_back(opt, [&f, field](cli::RunConfig& c) { c.*field = f.values.*field; });
}

void add_common_options(CLI::App* app, Flags& f) {
    bind_option(app, f, "--out", &cli::RunConfig::out, "output path (stdout when omitted)");
    app->add_option("--config", f.config_path, "JSON config; flags override its values")->check(CLI::ExistingFile);
}

void add_model_options(CLI::App* app, Flags& f) {
    bind_option(app, f, "--delta", &cli::RunConfig::delta, "qubit splitting Δ");
    bind_option(app, f, "--omega", &cli::RunConfig::omega, "cavity frequency ω");
    bind_option(app, f, "--g", &cli::RunConfig::g, "coupling g");
    bind_option(app, f, "--nmax", &cli::RunConfig::nmax, "Fock cutoff");
    CLI::Option* m = app->add_option("--method", f.values.methods, "exact|rwa|zeroth|grwa (repeatable)")->allow_extra_args(false);
    f.setters.emplace_back(m, [&f](cli::RunConfig& c) { c.methods = f.values.methods; });
    add_common_options(app, f);
}

void add_tol_option(CLI::App* app, Flags& f) {
    bind_option(app, f, "--tol", &cli::RunConfig::tol, "SDP tolerance");
}

cli::RunConfig merged(const Flags& f) {
    cli::RunConfig c;
    if (!f.config_path.empty()) cli::apply_config_file(f.config_path, c);
    for (const auto& [opt, set] : f.setters)
        if (opt->count() > 0) set(c);
    if (!f.g_range.empty()) c.g_range = cli::parse_g_range(f.g_range);
    c.validate();
    return c;
}

dicke3_params model(const cli::RunConfig& c) { return {c.delta, c.omega, c.g}; }

void emit(const cli::RunConfig& c, const cli::CsvTable& table) {
    if (c.out.empty()) cli::write_csv(stdout, table);
    else cli::write_csv(c.out, table);
}

void maybe_plot(const cli::RunConfig& c, cli::PlotKind kind) {
    if (c.plot_script.empty()) return;
    if (c.out.empty()) throw cli::UsageError("--plot-script needs --out");
    cli::write_plot_script(c.plot_script, c.out, kind);
}

int run_spectrum(const Flags& f) {
    const cli::RunConfig c = merged(f);
    std::vector<std::string> names = c.methods;
    if (names.empty()) names = {"exact", "rwa", "zeroth", "grwa"};
    const auto methods = cli::parse_methods(names, true);
    const std::vector<double> grid = c.g_range ? c.g_range->values() : std::vector<double>{c.g};
    const dicke3_params p = model(c);
    const std::size_t nm = methods.size();
    std::vector<double> energies(grid.size() * nm * c.levels);
    std::vector<int> ok(grid.size());
    const dicke3_status st = dicke3_level_sweep(methods.data(), nm, &p, grid.data(), grid.size(), c.levels, c.nmax,
                                                cli::worker_threads(), energies.data(), ok.data());
    if (st != DICKE3_OK && st != DICKE3_ERR_SOLVER) cli::check(st, "spectrum");

    cli::CsvTable t;
    t.header = {"g_over_omega", "level_index"};
    for (auto m : methods) t.header.emplace_back(dicke3_method_name(m));
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        if (!ok[gi]) continue;
        for (int l = 0; l < c.levels; ++l) {
            std::vector<double> row{grid[gi] / c.omega, static_cast<double>(l)};
            for (std::size_t mi = 0; mi < nm; ++mi) row.push_back(energies[(gi * nm + mi) * c.levels + l]);
            t.rows.push_back(std::move(row));
        }
    }
    emit(c, t);
    maybe_plot(c, cli::PlotKind::spectrum);
    if (st == DICKE3_ERR_SOLVER) {
        std::cerr << "failed grid points:\n" << dicke3_last_error() << "\n";
        return exit_failure;
    }
    return exit_ok;
}

int run_dynamics(const Flags& f) {
    const cli::RunConfig c = merged(f);
    std::vector<std::string> names = c.methods;
    if (names.empty()) names = {"exact"};
    const auto methods = cli::parse_methods(names, false);
    const dicke3_params p = model(c);

    dicke3_dynamics_options opt;
    dicke3_dynamics_options_default(&opt);
    opt.tmax_scaled = c.tmax_scaled;
    opt.steps = c.steps;
    opt.gme_stride = c.gme_stride;
    opt.compute_gme = f.no_gme ? 0 : 1;
    opt.sdp_tol = c.tol;
    opt.threads = cli::worker_threads();

    cli::CsvTable t;
    t.header = {"t_scaled"};
    t.rows.assign(static_cast<std::size_t>(c.steps) + 1, {});
    bool failed = false;
    for (auto m : methods) {
        const std::string name = dicke3_method_name(m);
        dicke3_trajectory* traj = nullptr;
        if (dicke3_dynamics_run(m, &p, c.nmax, &opt, &traj) != DICKE3_OK) {
            std::cerr << "method " << name << " failed: " << dicke3_last_error() << "\n";
            failed = true;
            continue;
        }
        for (const char* col : {"concurrence_", "gme_", "gme_computed_", "negativity_AB_C_"}) t.header.push_back(col + name);
        for (int s = 0; s < 4; ++s) t.header.push_back(cli::population_column(s, name));
        for (int i = 0; i < dicke3_trajectory_size(traj); ++i) {
            dicke3_sample smp;
            cli::check(dicke3_trajectory_sample(traj, i, &smp), "trajectory sample");
            auto& row = t.rows[i];
            if (row.empty()) row.push_back(smp.t_scaled);
            const double gme = opt.compute_gme ? smp.gme : std::nan("");
            row.insert(row.end(), {smp.concurrence, gme, static_cast<double>(smp.gme_computed), smp.negativity_ab_c});
            row.insert(row.end(), smp.populations, smp.populations + 4);
        }
        dicke3_trajectory_free(traj);
    }
    if (t.header.size() == 1) return exit_failure;
    emit(c, t);
    maybe_plot(c, cli::PlotKind::dynamics);
    return failed ? exit_failure : exit_ok;
}

std::vector<double> load_state(const Flags& f) {
    int dim = 0;
    std::vector<double> rho = cli::read_density_file(f.input, dim);
    if (dicke3_density_validate(rho.data(), dim) != DICKE3_OK)
        throw cli::ApiError(DICKE3_ERR_INVALID_STATE, f.input + ": " + dicke3_last_error());
    return rho;
}

void report(const cli::RunConfig& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::FILE* out = std::fopen(c.out.c_str(), "w");
    if (!out) throw std::runtime_error("cannot open " + c.out + " for writing");
    std::fputs(text.c_str(), out);
    std::fclose(out);
}

int run_gme(const Flags& f) {
    const cli::RunConfig c = merged(f);
    const auto rho = load_state(f);
    dicke3_gme_result res;
    std::vector<double> witness(128);
    cli::check(dicke3_gme(rho.data(), c.tol, 100, &res, witness.data()), "gme");
    std::ostringstream s;
    s << "gme " << cli::format_number(res.value) << "\n"
      << "status optimal\n"
      << "optimum " << cli::format_number(res.optimum) << "\n"
      << "relative_gap " << cli::format_number(res.relative_gap) << "\n"
      << "iterations " << res.iterations << "\n";
    report(c, s.str());
    if (!f.witness_out.empty()) cli::write_density_file(f.witness_out, witness.data(), 8);
    return exit_ok;
}

int run_concurrence(const Flags& f) {
    const cli::RunConfig c = merged(f);
    const auto rho = load_state(f);
    double v = 0.0;
    cli::check(dicke3_concurrence(rho.data(), &v), "concurrence");
    report(c, "concurrence " + cli::format_number(v) + "\n");
    return exit_ok;
}

unsigned parse_part(const std::string& text) {
    unsigned mask = 0;
    for (char ch : text) {
        switch (ch) {
        case 'A': case 'a': mask |= DICKE3_QUBIT_A; break;
        case 'B': case 'b': mask |= DICKE3_QUBIT_B; break;
        case 'C': case 'c': mask |= DICKE3_QUBIT_C; break;
        default: throw cli::UsageError("--part takes letters from {A, B, C}, got '" + text + "'");
        }
    }
    if (mask == 0 || mask == 7u) throw cli::UsageError("--part must be a nonempty proper subset of ABC");
    return mask;
}

int run_negativity(const Flags& f) {
    const cli::RunConfig c = merged(f);
    const unsigned part = parse_part(f.part);
    const auto rho = load_state(f);
    double v = 0.0;
    cli::check(dicke3_negativity(rho.data(), part, &v), "negativity");
    report(c, "negativity " + cli::format_number(v) + "\n");
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-qubit Dicke model: spectra, entanglement dynamics and single-state measures.\n"
                 "Environment: DICKE3_THREADS caps the worker count."};
    app.require_subcommand(1);
    std::vector<std::unique_ptr<Flags>> all;
    auto flags = [&] { return all.emplace_back(std::make_unique<Flags>()).get(); };

    Flags* fs = flags();
    auto* spectrum = app.add_subcommand("spectrum", "lowest levels over a g grid (CSV)");
    add_model_options(spectrum, *fs);
    bind_option(spectrum, *fs, "--levels", &cli::RunConfig::levels, "levels per grid point");
    spectrum->add_option("--g-range", fs->g_range, "grid start:stop:step (overrides --g)");
    bind_option(spectrum, *fs, "--plot-script", &cli::RunConfig::plot_script, "write a gnuplot script for the CSV");

    Flags* fd = flags();
    auto* dynamics = app.add_subcommand("dynamics", "entanglement dynamics from the W state (CSV)");
    add_model_options(dynamics, *fd);
    add_tol_option(dynamics, *fd);
    bind_option(dynamics, *fd, "--tmax-scaled", &cli::RunConfig::tmax_scaled, "final Δt/2π");
    bind_option(dynamics, *fd, "--steps", &cli::RunConfig::steps, "time intervals (steps + 1 samples)");
    bind_option(dynamics, *fd, "--gme-stride", &cli::RunConfig::gme_stride, "solve GME on every n-th sample");
    dynamics->add_flag("--no-gme", fd->no_gme, "skip the GME column");
    bind_option(dynamics, *fd, "--plot-script", &cli::RunConfig::plot_script, "write a gnuplot script for the CSV");

    Flags* fg = flags();
    auto* gme = app.add_subcommand("gme", "genuine multipartite negativity of a state file");
    add_common_options(gme, *fg);
    add_tol_option(gme, *fg);
    gme->add_option("input", fg->input, "density file ('dim 8' + 64 re,im pairs)")->required();
    gme->add_option("--witness-out", fg->witness_out, "write the optimal witness in the density file format");

    Flags* fc = flags();
    auto* conc = app.add_subcommand("concurrence", "pairwise concurrence of a symmetric state file");
    add_common_options(conc, *fc);
    conc->add_option("input", fc->input, "density file")->required();

    Flags* fn = flags();
    auto* neg = app.add_subcommand("negativity", "negativity of a bipartition of a state file");
    add_common_options(neg, *fn);
    neg->add_option("input", fn->input, "density file")->required();
    neg->add_option("--part", fn->part, "transposed qubits, e.g. C for AB|C")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*spectrum) return run_spectrum(*fs);
        if (*dynamics) return run_dynamics(*fd);
        if (*gme) return run_gme(*fg);
        if (*conc) return run_concurrence(*fc);
        if (*neg) return run_negativity(*fn);
    } catch (const cli::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const cli::ApiError& e) {
        std::cerr << "error: " << e.what() << "\n";
        const bool bad_input = e.status == DICKE3_ERR_INVALID_ARGUMENT || e.status == DICKE3_ERR_INVALID_STATE;
        return bad_input ? exit_usage : exit_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_usage;
}
