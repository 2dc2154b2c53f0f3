#pragma once

// Report files: report.json, config.cfg, CSV series and gnuplot scripts.
// declared_files() is the exact set emit_report() writes.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "blowup/harness/experiment.hpp"

namespace blowup::harness {

inline std::vector<std::string> declared_files(const Experiment& e, bool with_trajectory)
{
    const auto& a = e.analysis;
    std::vector<std::string> f = {"report.json", "config.cfg", "max_series.csv", "profiles.csv",
                                  "plots/profiles.gp"};
    if (e.run.report.status == TerminalStatus::BlowupDetected)
        f.push_back("plots/rate_fit.gp");
    if (a.deviation) {
        f.push_back("deviation.csv");
        f.push_back("plots/deviation.gp");
    }
    if (a.certificate)
        f.push_back("j_certificate.csv");
    if (!a.kaplan.empty())
        f.push_back("kaplan.csv");
    if (!a.symmetry.empty())
        f.push_back("symmetry.csv");
    if (a.zeroset) {
        f.push_back("omega0_mask.csv");
        f.push_back("plots/omega0.gp");
    }
    if (with_trajectory) {
        f.push_back("trajectory/index.csv");
        f.push_back("trajectory/status.txt");
        for (std::size_t k = 0; k < e.run.trajectory.snapshots.size(); ++k)
            f.push_back("trajectory/" + snapshot_filename(k));
    }
    return f;
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << text;
    if (!out)
        throw Error(ErrorCode::Io, "write failed for " + path.string());
}

inline std::string rate_fit_script(double T_hat, double alpha)
{
    return "# log max u against -log(T_hat - t); the fitted line has slope alpha\n"
           "set datafile separator ','\n"
           "set key autotitle columnhead\n"
           "set logscale xy\n"
           "set xlabel 'T_hat - t'\n"
           "set ylabel 'max u'\n"
           "T = " + csv::format(T_hat) + "\n"
           "alpha = " + csv::format(alpha) + "\n"
           "plot '../max_series.csv' using (T - $1):2 with points title 'max u', \\\n"
           "     [1e-14:1] alpha**alpha * x**(-alpha) with lines title 'ODE profile'\n";
}

} // namespace detail

/// Writes the experiment into `dir` (created if needed). Returns the files written.
inline std::vector<std::string> emit_report(const Experiment& e, const std::filesystem::path& dir, bool with_trajectory)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir / "plots", ec);
    if (ec)
        throw Error(ErrorCode::Io, "cannot create " + (dir / "plots").string() + ": " + ec.message());
    const auto& spec = *e.spec;
    const auto& dom = spec.domain();
    const auto& traj = e.run.trajectory;
    const auto& a = e.analysis;
    const auto xs = dom.coordinates();

    json rep = e.report;
    rep["files"] = declared_files(e, with_trajectory);
    detail::write_text(dir / "report.json", rep.dump(2) + "\n");
    detail::write_text(dir / "config.cfg", e.config.serialize());

    {
        csv::Writer w(dir / "max_series.csv");
        w.header({"t", "max_u", "argmax_x", "dt", "step"});
        for (const auto& s : traj.snapshots)
            w.row({s.t, s.max_u(), dom.coordinate(s.argmax()), s.dt_last, static_cast<double>(s.step_count)});
        w.close();
    }
    {
        csv::Writer w(dir / "profiles.csv");
        w.header({"x", "V", "u0", "u_final", "blowup_set"});
        const auto& last = traj.last().u;
        for (std::size_t i = 0; i < dom.size(); ++i)
            w.row({xs[i], spec.potential_samples()[i], spec.initial_data()[i], last[i],
                   e.run.report.blowup_set_mask[i] ? 1.0 : 0.0});
        w.close();
    }
    detail::write_text(dir / "plots/profiles.gp",
                       "set datafile separator ','\n"
                       "set key autotitle columnhead\n"
                       "set xlabel 'x'\n"
                       "set logscale y\n"
                       "plot '../profiles.csv' using 1:3 with lines title 'u0', \\\n"
                       "     '../profiles.csv' using 1:4 with lines title 'u final', \\\n"
                       "     '../profiles.csv' using 1:2 with lines axes x1y2 title 'V'\n");
    if (e.run.report.status == TerminalStatus::BlowupDetected) {
        const double alpha = spec.constants() ? spec.constants()->alpha : 1.0;
        detail::write_text(dir / "plots/rate_fit.gp", detail::rate_fit_script(e.run.report.T_hat, alpha));
    }
    if (a.deviation) {
        csv::Writer w(dir / "deviation.csv");
        w.header({"t", "max_u", "ratio", "running_max"});
        const auto& d = *a.deviation;
        for (std::size_t k = 0; k < d.ratio.size(); ++k)
            w.row({d.times[k], d.max_u[k], d.ratio[k], d.running_max[k]});
        w.close();
        detail::write_text(dir / "plots/deviation.gp",
                           "set datafile separator ','\n"
                           "set key autotitle columnhead\n"
                           "set logscale xy\n"
                           "set xlabel 'max u'\n"
                           "set ylabel 'sup |u_t - V f(u)| / (u^p + K)'\n"
                           "plot '../deviation.csv' using 2:3 with linespoints title 'ratio', \\\n"
                           "     0.1 with lines dashtype 2 title 'target'\n");
    }
    if (a.certificate) {
        csv::Writer w(dir / "j_certificate.csv");
        w.header({"t", "min_J"});
        for (std::size_t k = 0; k < a.certificate->times.size(); ++k)
            w.row({a.certificate->times[k], a.certificate->min_J[k]});
        w.close();
    }
    if (!a.kaplan.empty()) {
        csv::Writer w(dir / "kaplan.csv");
        w.header({"t", "phi"});
        for (const auto& [t, v] : a.kaplan)
            w.row({t, v});
        w.close();
    }
    if (!a.symmetry.empty()) {
        csv::Writer w(dir / "symmetry.csv");
        w.header({"t", "even_defect_rel", "ux_max_rel", "max_at_origin"});
        for (const auto& r : a.symmetry)
            w.row({r[0], r[1], r[2], r[3]});
        w.close();
    }
    if (a.zeroset) {
        write_mask(a.zeroset->omega0, xs, dir / "omega0_mask.csv");
        detail::write_text(dir / "plots/omega0.gp",
                           "set datafile separator ','\n"
                           "set key autotitle columnhead\n"
                           "set xlabel 'x'\n"
                           "set y2range [0:1.2]\n"
                           "plot '../profiles.csv' using 1:4 with lines title 'u final', \\\n"
                           "     '../omega0_mask.csv' using 1:2 with steps axes x1y2 title 'omega0'\n");
    }
    if (with_trajectory)
        write_trajectory(traj, dom, dir / "trajectory");
    return declared_files(e, with_trajectory);
}

/// Rebuilds the analysis from a report directory's config echo and stored
/// trajectory; returns the recomputed metrics.
inline json reproduce_metrics(const std::filesystem::path& dir, json* stored = nullptr)
{
    std::ifstream in(dir / "report.json");
    if (!in)
        throw Error(ErrorCode::Io, "cannot open " + (dir / "report.json").string());
    json rep = json::parse(in);
    Config cfg;
    for (const auto& [k, v] : rep["provenance"]["config"].items())
        cfg.set(k, v.get<std::string>());
    cfg.set_base_dir(rep["provenance"]["config_dir"].get<std::string>());
    const ProblemSpec spec = build_spec(cfg);
    RunResult run;
    run.trajectory = read_trajectory(dir / "trajectory");
    run.report = build_report(run.trajectory, spec);
    if (stored)
        *stored = rep["metrics"];
    return analyze(cfg, spec, run).metrics;
}

} // namespace blowup::harness
