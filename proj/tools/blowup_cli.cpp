// blowup: run experiments, sweeps and oracle checks from the command line.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "blowup/harness/checks.hpp"
#include "blowup/harness/sweep.hpp"

namespace bh = blowup::harness;

namespace {

int cmd_run(const std::string& path, const std::string& out_override)
{
    bh::Config cfg = bh::Config::load(path);
    if (!out_override.empty())
        cfg.set("output.dir", out_override);
    const auto e = bh::run_and_emit(cfg);
    std::cout << "status  " << e.analysis.metrics["status"].get<std::string>() << "\n";
    if (e.analysis.metrics.contains("T_hat"))
        std::cout << "T_hat   " << e.analysis.metrics["T_hat"].dump() << "\n";
    for (const auto& a : e.assertions)
        std::cout << (a.passed ? "[pass] " : "[FAIL] ") << a.metric << " " << a.op << " " << a.expected
                  << (a.op == "within" ? " +- " + blowup::csv::format(a.tolerance) : "") << "  (observed "
                  << a.observed.dump() << ")\n";
    if (cfg.has("output.dir"))
        std::cout << "report  " << cfg.path("output.dir").string() << "/report.json\n";
    return e.assertions_passed() ? 0 : 1;
}

int cmd_sweep(const std::string& path, const std::string& out_override)
{
    bh::Config cfg = bh::Config::load(path);
    if (!out_override.empty())
        cfg.set("output.dir", out_override);
    const auto res = bh::run_sweep(cfg);
    bool all = true;
    for (const auto& cell : res.cells) {
        std::cout << bh::cell_dir_name(cell.index);
        for (std::size_t a = 0; a < res.axes.size(); ++a)
            std::cout << "  " << res.axes[a].key << "=" << cell.values[a];
        if (!cell.ok)
            std::cout << "  error: " << cell.error;
        else
            for (const auto& col : res.columns)
                std::cout << "  " << col << "=" << bh::metric_text(cell.metrics, col);
        std::cout << (cell.ok && cell.assertions_passed ? "  [pass]" : "  [FAIL]") << "\n";
        all = all && cell.ok && cell.assertions_passed;
    }
    if (cfg.has("output.dir"))
        std::cout << "aggregate  " << (cfg.path("output.dir") / "aggregate.csv").string() << "\n";
    return all ? 0 : 1;
}

int cmd_zeroset(const std::string& csv_path, double x0, const std::string& out)
{
    auto [xs, V] = blowup::csv::read_two_column(csv_path);
    std::size_t node = 0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (std::abs(xs[i] - x0) < std::abs(xs[node] - x0))
            node = i;
    const auto z = blowup::isolating_subdomain(V, node);
    const auto idx = z.omega0.indices();
    bh::json j{{"x0", x0},           {"node", node},
               {"m", z.m},           {"eta", bh::number(z.eta)},
               {"threshold", z.threshold}, {"nodes", idx.size()},
               {"x_lo", xs[idx.front()]},  {"x_hi", xs[idx.back()]}};
    std::cout << j.dump(2) << "\n";
    if (!out.empty())
        blowup::write_mask(z.omega0, xs, out);
    return 0;
}

int cmd_report(const std::string& dir)
{
    bh::json stored;
    const bh::json fresh = bh::reproduce_metrics(dir, &stored);
    std::size_t diffs = 0;
    for (const auto& [k, v] : stored.items()) {
        const bool same = fresh.contains(k) && fresh[k] == v;
        if (!same) {
            ++diffs;
            std::cout << "[DIFF] " << k << ": stored " << v.dump() << ", recomputed "
                      << (fresh.contains(k) ? fresh[k].dump() : "missing") << "\n";
        }
    }
    std::cout << stored.size() << " metrics, " << diffs << " differ\n";
    return diffs == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Reaction-diffusion blowup experiments"};
    app.require_subcommand(1);

    std::string cfg_path, out_dir;
    auto* run = app.add_subcommand("run", "Run one experiment config");
    run->add_option("config", cfg_path, "config file")->required();
    run->add_option("-o,--out", out_dir, "override output.dir");

    auto* sweep = app.add_subcommand("sweep", "Run every cell of a sweep config");
    sweep->add_option("config", cfg_path, "config file")->required();
    sweep->add_option("-o,--out", out_dir, "override output.dir");

    std::string oracle;
    std::vector<std::string> oracle_args;
    auto* check = app.add_subcommand("check", "Evaluate an oracle and print JSON");
    check->add_option("oracle", oracle, "ode | comparison | nondegeneracy-exponent | cutoff | heat-kernel | critical")
        ->required();
    check->add_option("args", oracle_args, "oracle arguments");

    std::string potential_csv, mask_out;
    double x0 = 0.0;
    auto* zs = app.add_subcommand("zeroset", "Isolating subdomain around a zero of a sampled potential");
    zs->add_option("potential", potential_csv, "two-column CSV (x, V)")->required();
    zs->add_option("x0", x0, "zero of V")->required();
    zs->add_option("-o,--out", mask_out, "write the omega0 mask CSV here");

    std::string report_dir;
    auto* rep = app.add_subcommand("report", "Recompute diagnostics from a stored run and compare");
    rep->add_option("dir", report_dir, "report directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run)
            return cmd_run(cfg_path, out_dir);
        if (*sweep)
            return cmd_sweep(cfg_path, out_dir);
        if (*check) {
            std::cout << bh::run_check(oracle, oracle_args).dump(2) << "\n";
            return 0;
        }
        if (*zs)
            return cmd_zeroset(potential_csv, x0, mask_out);
        if (*rep)
            return cmd_report(report_dir);
    } catch (const blowup::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
