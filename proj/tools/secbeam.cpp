// secbeam — command-line harness for robust SWIPT secrecy beamforming.
//
// Verbs:
//   run       seeded single runs or sweeps; writes a manifest-led artifact dir
//   verify    independent oracle suites (tangency, domination, soundness,
//             scalar battery); exit 1 if any check fails
//   dims      subproblem size for a configuration
//   plotdata  figure-ready CSVs from a run artifact directory
//
// Exit codes: 0 ok, 1 check failed, 2 runtime failure (bad input, solver
// breakdown, missing artifacts). Worker count for `run` comes from the
// SECBEAM_WORKERS environment variable (default 1).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "secbeam/algorithms.hpp"
#include "secbeam/config.hpp"
#include "secbeam/experiments.hpp"
#include "secbeam/model.hpp"
#include "secbeam/validation.hpp"

namespace {

int worker_count_from_env() {
    const char* raw = std::getenv("SECBEAM_WORKERS");
    if (raw == nullptr) return 1;
    try {
        const int n = std::stoi(raw);
        if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "secbeam: ignoring invalid SECBEAM_WORKERS='" << raw << "'\n";
    return 1;
}

secbeam::NetworkConfig load_or_default(const std::string& path) {
    if (path.empty()) return secbeam::NetworkConfig{};
    return secbeam::load_config(path);
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
}

int do_dims(const std::string& config_path) {
    const secbeam::NetworkConfig cfg = load_or_default(config_path);
    secbeam::validate_config(cfg);
    const secbeam::alg::ProblemDimensions d = secbeam::alg::problem_dimensions(cfg);
    std::cout << "scalar_variables " << d.variables << '\n'
              << "linear_constraints " << d.linear_constraints << '\n'
              << "quadratic_constraints " << d.quadratic_constraints << '\n';
    return 0;
}

int do_verify(const std::string& config_path, const secbeam::val::VerifySettings& vs,
              const std::string& json_out) {
    const secbeam::NetworkConfig cfg = load_or_default(config_path);
    secbeam::validate_config(cfg);
    const std::vector<secbeam::val::OracleReport> reports =
        secbeam::val::run_verification(cfg, vs);
    std::cout << std::left << std::setw(34) << "check" << std::right << std::setw(10)
              << "samples" << std::setw(16) << "max_violation" << std::setw(12)
              << "tolerance" << "  status\n";
    for (const secbeam::val::OracleReport& r : reports) {
        std::cout << std::left << std::setw(34) << r.name << std::right << std::setw(10)
                  << r.samples << std::setw(16) << std::scientific << std::setprecision(3)
                  << r.max_violation << std::setw(12) << r.tolerance
                  << (r.pass ? "  pass" : "  FAIL") << '\n';
        std::cout.unsetf(std::ios::scientific);
    }
    if (!json_out.empty())
        write_file(json_out, secbeam::val::oracle_reports_to_json(reports).dump(2) + "\n");
    const bool ok = secbeam::val::all_pass(reports);
    std::cout << (ok ? "all checks passed" : "CHECKS FAILED") << '\n';
    return ok ? 0 : 1;
}

int do_run(secbeam::exp::ExperimentSpec spec, const secbeam::alg::RunSettings& settings,
           const std::string& scenario_out, const std::string& verify_json) {
    if (spec.mode == "dims") return do_dims(spec.config_path);
    if (spec.mode == "verify")
        return do_verify(spec.config_path, secbeam::val::VerifySettings{}, verify_json);

    secbeam::NetworkConfig cfg = load_or_default(spec.config_path);
    secbeam::validate_config(cfg);
    if (!scenario_out.empty()) {
        secbeam::NetworkConfig scen_cfg = cfg;
        scen_cfg.seed = spec.seed_base;
        const secbeam::ChannelSet cs = secbeam::generate_channels(scen_cfg);
        write_file(scenario_out, secbeam::scenario_to_json(scen_cfg, cs).dump(2) + "\n");
        std::cout << "scenario -> " << scenario_out << '\n';
    }

    const int workers = worker_count_from_env();
    const secbeam::exp::ExperimentResult result =
        secbeam::exp::run_experiment(spec, cfg, workers, settings);

    std::cout << "mode " << spec.mode << ", axis " << spec.sweep_axis << ", "
              << result.points.size() << " point(s) x " << spec.trials << " trial(s)\n";
    std::cout.precision(10);
    for (std::size_t p = 0; p < result.points.size(); ++p) {
        const secbeam::exp::PointSummary& s = result.points[p];
        std::cout << "  point " << p << " (" << spec.sweep_axis << "=" << s.axis_value
                  << "): ok " << s.ok_count << ", failed " << s.fail_count
                  << ", mean_bits " << s.mean_bits << ", stderr " << s.stderr_bits
                  << ", mean_iters " << s.mean_iterations << '\n';
    }
    std::cout << "artifacts -> " << result.dir.string() << '\n';
    if (result.ok_count == 0) {
        std::cerr << "secbeam: every trial failed; see "
                  << (result.dir / "manifest.json").string() << '\n';
        return 2;
    }
    return 0;
}

int do_plotdata(const std::string& dir) {
    const std::vector<std::string> files = secbeam::exp::emit_plot_data(dir);
    for (const std::string& f : files)
        std::cout << (std::filesystem::path(dir) / f).string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"robust SWIPT secrecy beamforming experiments"};
    app.set_version_flag("--version", secbeam::exp::package_version);
    app.require_subcommand(1);

    secbeam::exp::ExperimentSpec spec;
    secbeam::alg::RunSettings settings;
    std::string sweep_text = "none";
    std::string scenario_out;
    std::string verify_json;

    CLI::App* run = app.add_subcommand("run", "execute seeded trials or a sweep");
    run->add_option("--mode", spec.mode,
                    "secrecy | secrecy-noeve | see | verify | dims")
        ->default_val("secrecy");
    run->add_option("--config", spec.config_path, "flat key=value scenario file");
    run->add_option("--sweep", sweep_text, "axis:v1,v2,... (M | e_min_dbm | eps0 | eps1)");
    run->add_option("--trials", spec.trials, "trials per sweep point")->default_val(20);
    run->add_option("--out", spec.out_dir, "artifact directory")->default_val("artifacts");
    run->add_option("--seed-base", spec.seed_base, "trial j uses seed seed-base + j")
        ->default_val(1);
    run->add_option("--rel-tol", settings.rel_tol, "relative convergence tolerance");
    run->add_option("--max-iters", settings.max_iterations, "iteration cap per trial");
    run->add_option("--solver-tol", settings.solver_tol, "interior-point tolerance");
    run->add_option("--audit-tol", settings.audit_tol, "final feasibility audit tolerance");
    run->add_option("--dump-scenario", scenario_out,
                    "also write the trial-0 scenario (channels, positions) as JSON");

    std::string verify_config;
    secbeam::val::VerifySettings vs;
    CLI::App* verify = app.add_subcommand("verify", "run independent oracle suites");
    verify->add_option("--config", verify_config, "flat key=value scenario file");
    verify->add_option("--seed", vs.seed, "base seed for sampled scenarios");
    verify->add_option("--expansions", vs.expansions, "random expansion points");
    verify->add_option("--domination-expansions", vs.domination_expansions,
                       "expansions that also run domination/soundness sampling");
    verify->add_option("--domination-samples", vs.domination_samples,
                       "samples per bound per expansion");
    verify->add_option("--soundness-points", vs.soundness_points,
                       "accepted points per constraint family");
    verify->add_option("--battery-samples", vs.battery_samples,
                       "samples per scalar inequality");
    verify->add_option("--json", verify_json, "write the report as JSON");

    std::string dims_config;
    CLI::App* dims = app.add_subcommand("dims", "print subproblem size for a config");
    dims->add_option("--config", dims_config, "flat key=value scenario file");

    std::string plot_dir;
    CLI::App* plot = app.add_subcommand("plotdata", "emit figure-ready CSVs");
    plot->add_option("dir", plot_dir, "artifact directory from `run`")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            const auto [axis, values] = secbeam::exp::parse_sweep(sweep_text);
            spec.sweep_axis = axis;
            spec.sweep_values = values;
            return do_run(spec, settings, scenario_out, verify_json);
        }
        if (verify->parsed()) return do_verify(verify_config, vs, verify_json);
        if (dims->parsed()) return do_dims(dims_config);
        if (plot->parsed()) return do_plotdata(plot_dir);
    } catch (const std::exception& e) {
        std::cerr << "secbeam: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
