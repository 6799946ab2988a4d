#pragma once

// Experiment harness: seeded multi-trial runs over a sweep axis, aggregate
// statistics, per-trial traces, and figure-ready CSV extraction.
//
// Artifact layout (all files listed in manifest.json):
//   manifest.json                 mode, axis, seeds, config hash, file list,
//                                 failed trials with reasons
//   aggregate.csv                 one row per axis point (mean/stderr in bits)
//   convergence_p<i>_trial0.csv   full iteration trace of trial 0 per point
//   trace_p<i>_t<j>.json          every trial's run trace
//
// Trials share seeds across axis points (trial j always uses seed_base + j),
// so sweep comparisons are paired. Aggregation runs in trial order after all
// workers join; re-running a spec reproduces aggregate.csv bitwise.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "secbeam/algorithms.hpp"
#include "secbeam/config.hpp"
#include "secbeam/model.hpp"
#include "secbeam/units.hpp"

namespace secbeam::exp {

inline constexpr const char* package_version = "0.1.0";

class ExperimentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Specification
// ---------------------------------------------------------------------------

struct ExperimentSpec {
    std::string mode = "secrecy";     // secrecy | secrecy-noeve | see | verify | dims
    std::string config_path;          // empty: built-in defaults
    std::string sweep_axis = "none";  // none | M | e_min_dbm | eps0 | eps1
    std::vector<double> sweep_values; // one value per sweep point
    int trials = 20;
    std::string out_dir = "artifacts";
    std::uint64_t seed_base = 1;
};

inline bool is_run_mode(const std::string& mode) {
    return mode == "secrecy" || mode == "secrecy-noeve" || mode == "see";
}

inline void validate_spec(const ExperimentSpec& spec) {
    const bool known = is_run_mode(spec.mode) || spec.mode == "verify" || spec.mode == "dims";
    if (!known) throw ExperimentError("unknown mode '" + spec.mode + "'");
    if (spec.trials < 1) throw ExperimentError("trial count must be >= 1");
    const bool axis_known = spec.sweep_axis == "none" || spec.sweep_axis == "M" ||
                            spec.sweep_axis == "e_min_dbm" || spec.sweep_axis == "eps0" ||
                            spec.sweep_axis == "eps1";
    if (!axis_known) throw ExperimentError("unknown sweep axis '" + spec.sweep_axis + "'");
    if (spec.sweep_axis != "none" && spec.sweep_values.empty())
        throw ExperimentError("sweep axis '" + spec.sweep_axis + "' requires a value list");
}

// Parses the compact sweep syntax "axis:v1,v2,..." (or "none") into the
// spec's axis/value pair. Example: "M:4,5,6".
inline std::pair<std::string, std::vector<double>> parse_sweep(const std::string& text) {
    if (text.empty() || text == "none") return {"none", {}};
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos)
        throw ExperimentError("sweep must look like 'axis:v1,v2,...' (got '" + text + "')");
    const std::string axis = text.substr(0, colon);
    std::vector<double> values;
    std::string item;
    std::istringstream rest(text.substr(colon + 1));
    while (std::getline(rest, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            values.push_back(v);
        } catch (const std::exception&) {
            throw ExperimentError("bad sweep value '" + item + "' in '" + text + "'");
        }
    }
    if (values.empty())
        throw ExperimentError("sweep axis '" + axis + "' requires a value list");
    return {axis, values};
}

// Applies one sweep-point value to a scenario configuration.
inline void apply_axis(NetworkConfig& cfg, const std::string& axis, double value) {
    if (axis == "none") return;
    if (axis == "M") {
        const int m = static_cast<int>(value);
        if (m < 1 || static_cast<double>(m) != value)
            throw ExperimentError("antenna sweep values must be positive integers");
        cfg.M = m;
    } else if (axis == "e_min_dbm") {
        cfg.e_min = dbm_to_watt(value);
    } else if (axis == "eps0") {
        cfg.eps0 = value;
    } else if (axis == "eps1") {
        cfg.eps1 = value;
    } else {
        throw ExperimentError("unknown sweep axis '" + axis + "'");
    }
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct TrialOutcome {
    int point = 0;
    int trial = 0;
    bool ok = false;
    std::string error;
    alg::RunTrace trace;  // valid when ok
};

struct PointSummary {
    double axis_value = 0.0;
    int ok_count = 0;
    int fail_count = 0;
    double mean_bits = 0.0;    // mean final objective, bits (per s/Hz or per J/Hz)
    double stderr_bits = 0.0;  // standard error over successful trials
    double mean_iterations = 0.0;
};

struct ExperimentResult {
    std::vector<PointSummary> points;
    std::vector<TrialOutcome> outcomes;  // all trials, point-major order
    nlohmann::json manifest;
    std::filesystem::path dir;
    int ok_count = 0;
    int fail_count = 0;
};

namespace detail {

// FNV-1a over the canonical JSON form of the configuration.
inline std::string config_fingerprint(const NetworkConfig& cfg) {
    const std::string text = config_to_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

inline alg::RunTrace run_mode(const std::string& mode, const ChannelSet& cs,
                              const NetworkConfig& cfg, const alg::RunSettings& settings) {
    if (mode == "secrecy") return alg::run_secrecy(cs, cfg, settings);
    if (mode == "secrecy-noeve") return alg::run_secrecy_noeve(cs, cfg, settings);
    if (mode == "see") return alg::run_see(cs, cfg, settings);
    throw ExperimentError("mode '" + mode + "' is not a run mode");
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ExperimentError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw ExperimentError("failed writing '" + path.string() + "'");
}

} // namespace detail

// ---------------------------------------------------------------------------
// Experiment driver
// ---------------------------------------------------------------------------

inline ExperimentResult run_experiment(const ExperimentSpec& spec, const NetworkConfig& base,
                                       int workers = 1,
                                       const alg::RunSettings& settings = {}) {
    validate_spec(spec);
    if (!is_run_mode(spec.mode))
        throw ExperimentError("mode '" + spec.mode + "' does not produce run artifacts");
    if (workers < 1) throw ExperimentError("worker count must be >= 1");

    const std::vector<double> values =
        spec.sweep_axis == "none" ? std::vector<double>{0.0} : spec.sweep_values;
    const int n_points = static_cast<int>(values.size());
    const int n_jobs = n_points * spec.trials;

    ExperimentResult result;
    result.outcomes.resize(static_cast<std::size_t>(n_jobs));

    auto run_job = [&](int job) {
        const int p = job / spec.trials;
        const int t = job % spec.trials;
        TrialOutcome& out = result.outcomes[static_cast<std::size_t>(job)];
        out.point = p;
        out.trial = t;
        try {
            NetworkConfig cfg = base;
            apply_axis(cfg, spec.sweep_axis, values[static_cast<std::size_t>(p)]);
            cfg.seed = spec.seed_base + static_cast<std::uint64_t>(t);
            validate_config(cfg);
            const ChannelSet cs = generate_channels(cfg);
            out.trace = detail::run_mode(spec.mode, cs, cfg, settings);
            out.ok = true;
        } catch (const std::exception& e) {
            out.ok = false;
            out.error = e.what();
        }
    };

    if (workers == 1 || n_jobs == 1) {
        for (int j = 0; j < n_jobs; ++j) run_job(j);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        const int n_threads = std::min(workers, n_jobs);
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int w = 0; w < n_threads; ++w)
            pool.emplace_back([&] {
                for (int j = next.fetch_add(1); j < n_jobs; j = next.fetch_add(1)) run_job(j);
            });
        for (std::thread& th : pool) th.join();
    }

    // Aggregate in fixed trial order.
    for (int p = 0; p < n_points; ++p) {
        PointSummary s;
        s.axis_value = values[static_cast<std::size_t>(p)];
        double sum = 0.0, sum_sq = 0.0, iters = 0.0;
        for (int t = 0; t < spec.trials; ++t) {
            const TrialOutcome& o =
                result.outcomes[static_cast<std::size_t>(p * spec.trials + t)];
            if (!o.ok) {
                ++s.fail_count;
                continue;
            }
            ++s.ok_count;
            const double bits = nats_to_bits(o.trace.final_objective);
            sum += bits;
            sum_sq += bits * bits;
            iters += o.trace.iterations.empty() ? 0.0 : o.trace.iterations.back().iter;
        }
        if (s.ok_count > 0) {
            s.mean_bits = sum / s.ok_count;
            s.mean_iterations = iters / s.ok_count;
            if (s.ok_count > 1) {
                const double var =
                    std::max(0.0, (sum_sq - sum * sum / s.ok_count) / (s.ok_count - 1));
                s.stderr_bits = std::sqrt(var / s.ok_count);
            }
        }
        result.points.push_back(s);
        result.ok_count += s.ok_count;
        result.fail_count += s.fail_count;
    }

    // ---- artifacts ----
    const std::filesystem::path dir(spec.out_dir);
    std::filesystem::create_directories(dir);
    result.dir = dir;
    std::vector<std::string> files;

    {
        std::ostringstream out;
        out.precision(12);
        out << "axis,axis_value,trials_ok,trials_failed,mean_objective_bits,"
               "stderr_objective_bits,mean_iterations\n";
        for (const PointSummary& s : result.points)
            out << spec.sweep_axis << ',' << s.axis_value << ',' << s.ok_count << ','
                << s.fail_count << ',' << s.mean_bits << ',' << s.stderr_bits << ','
                << s.mean_iterations << '\n';
        detail::write_text_file(dir / "aggregate.csv", out.str());
        files.push_back("aggregate.csv");
    }

    for (int p = 0; p < n_points; ++p) {
        const TrialOutcome& first =
            result.outcomes[static_cast<std::size_t>(p * spec.trials)];
        if (!first.ok) continue;
        const std::string name = "convergence_p" + std::to_string(p) + "_trial0.csv";
        detail::write_text_file(dir / name, alg::run_trace_to_csv(first.trace));
        files.push_back(name);
    }

    for (const TrialOutcome& o : result.outcomes) {
        if (!o.ok) continue;
        const std::string name =
            "trace_p" + std::to_string(o.point) + "_t" + std::to_string(o.trial) + ".json";
        detail::write_text_file(dir / name, alg::run_trace_to_json(o.trace).dump(2) + "\n");
        files.push_back(name);
    }

    nlohmann::json manifest;
    manifest["package_version"] = package_version;
    manifest["mode"] = spec.mode;
    manifest["sweep_axis"] = spec.sweep_axis;
    manifest["sweep_values"] = values;
    manifest["trials"] = spec.trials;
    manifest["seed_base"] = spec.seed_base;
    manifest["config_hash"] = detail::config_fingerprint(base);
    manifest["config"] = config_to_json(base);
    manifest["settings"] = {{"rel_tol", settings.rel_tol},
                            {"consecutive", settings.consecutive},
                            {"max_iterations", settings.max_iterations},
                            {"solver_tol", settings.solver_tol},
                            {"certify_factor", settings.certify_factor},
                            {"audit_tol", settings.audit_tol}};
    nlohmann::json points = nlohmann::json::array();
    for (std::size_t p = 0; p < result.points.size(); ++p)
        points.push_back({{"index", p},
                          {"axis_value", result.points[p].axis_value},
                          {"ok", result.points[p].ok_count},
                          {"failed", result.points[p].fail_count}});
    manifest["points"] = std::move(points);
    nlohmann::json failures = nlohmann::json::array();
    for (const TrialOutcome& o : result.outcomes)
        if (!o.ok)
            failures.push_back({{"point", o.point}, {"trial", o.trial}, {"reason", o.error}});
    manifest["failures"] = std::move(failures);
    manifest["files"] = files;
    detail::write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");

    result.manifest = std::move(manifest);
    return result;
}

// ---------------------------------------------------------------------------
// Figure-ready CSV extraction
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ExperimentError("missing artifact '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ExperimentError("unreadable artifact '" + path.string() + "': " + e.what());
    }
    return j;
}

} // namespace detail

// Extracts figure-ready CSVs from a run_experiment artifact directory:
//   fig_convergence.csv            iter vs objective (bits), trial 0, point 0
//   fig_<metric>_vs_<axis>.csv     sweep curve (mean, stderr) when swept
//   fig_see_decomposition.csv      per-trial numerator/denominator split
// Returns the files written (paths relative to the artifact directory).
inline std::vector<std::string> emit_plot_data(const std::string& artifact_dir) {
    const std::filesystem::path dir(artifact_dir);
    const nlohmann::json manifest = detail::load_json_file(dir / "manifest.json");
    const std::string mode = manifest.at("mode").get<std::string>();
    const std::string axis = manifest.at("sweep_axis").get<std::string>();
    const bool ratio = mode == "see";
    std::vector<std::string> written;

    // Convergence curve from the first surviving point-0 trace.
    {
        const nlohmann::json trace = detail::load_json_file(dir / "trace_p0_t0.json");
        std::ostringstream out;
        out.precision(12);
        out << (ratio ? "iter,see_bits_per_joule\n" : "iter,min_secrecy_rate_bits\n");
        for (const auto& row : trace.at("iterations"))
            out << row.at("iter").get<int>() << ','
                << row.at("true_obj_bits").get<double>() << '\n';
        detail::write_text_file(dir / "fig_convergence.csv", out.str());
        written.push_back("fig_convergence.csv");
    }

    if (axis != "none") {
        const std::string metric = ratio ? "see" : "rate";
        std::ostringstream out;
        out.precision(12);
        out << axis << ','
            << (ratio ? "mean_see_bits_per_joule,stderr_see_bits_per_joule"
                      : "mean_rate_bits,stderr_rate_bits")
            << ",trials_ok\n";
        for (const auto& p : manifest.at("points")) {
            const int idx = p.at("index").get<int>();
            const int ok = p.at("ok").get<int>();
            if (ok == 0) continue;
            // Recompute the mean from the traces so the figure data never
            // drifts from the per-trial artifacts.
            double sum = 0.0, sum_sq = 0.0;
            const int trials = manifest.at("trials").get<int>();
            int found = 0;
            for (int t = 0; t < trials; ++t) {
                const std::filesystem::path tp =
                    dir / ("trace_p" + std::to_string(idx) + "_t" + std::to_string(t) +
                           ".json");
                if (!std::filesystem::exists(tp)) continue;
                const double bits = detail::load_json_file(tp)
                                        .at("final_objective_bits")
                                        .get<double>();
                sum += bits;
                sum_sq += bits * bits;
                ++found;
            }
            if (found == 0) continue;
            const double mean = sum / found;
            const double stderr_v =
                found > 1
                    ? std::sqrt(std::max(0.0, (sum_sq - sum * sum / found) / (found - 1)) /
                                found)
                    : 0.0;
            out << p.at("axis_value").get<double>() << ',' << mean << ',' << stderr_v << ','
                << found << '\n';
        }
        const std::string name = "fig_" + metric + "_vs_" + axis + ".csv";
        detail::write_text_file(dir / name, out.str());
        written.push_back(name);
    }

    if (ratio) {
        std::ostringstream out;
        out.precision(12);
        out << "point,trial,axis_value,see_bits_per_joule,numerator_bits,denominator_watts\n";
        const int trials = manifest.at("trials").get<int>();
        for (const auto& p : manifest.at("points")) {
            const int idx = p.at("index").get<int>();
            for (int t = 0; t < trials; ++t) {
                const std::filesystem::path tp =
                    dir / ("trace_p" + std::to_string(idx) + "_t" + std::to_string(t) +
                           ".json");
                if (!std::filesystem::exists(tp)) continue;
                const nlohmann::json trace = detail::load_json_file(tp);
                out << idx << ',' << t << ',' << p.at("axis_value").get<double>() << ','
                    << trace.at("final_objective_bits").get<double>() << ','
                    << nats_to_bits(trace.at("see_numerator_nats").get<double>()) << ','
                    << trace.at("see_denominator_watts").get<double>() << '\n';
            }
        }
        detail::write_text_file(dir / "fig_see_decomposition.csv", out.str());
        written.push_back("fig_see_decomposition.csv");
    }

    // Keep the manifest's file list complete.
    nlohmann::json updated = manifest;
    for (const std::string& f : written) {
        bool present = false;
        for (const auto& existing : updated.at("files"))
            present = present || existing.get<std::string>() == f;
        if (!present) updated["files"].push_back(f);
    }
    detail::write_text_file(dir / "manifest.json", updated.dump(2) + "\n");
    return written;
}

} // namespace secbeam::exp
