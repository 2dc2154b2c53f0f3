#pragma once

// Cartesian-product sweeps over `sweep.<key> = v1, v2, ...` axes. Cells run
// on a small thread pool; each owns output.dir/cell_NNN exclusively.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "blowup/harness/emit.hpp"

namespace blowup::harness {

/// Runs one config and, when output.dir is set, writes its report there.
inline Experiment run_and_emit(const Config& c)
{
    Experiment e = run_experiment(c);
    if (c.has("output.dir"))
        emit_report(e, c.path("output.dir"), c.flag("output.trajectory", true));
    return e;
}

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

struct SweepCell {
    std::size_t index = 0;
    std::vector<std::string> values;  // one per axis
    Config config;
    bool ok = false;
    std::string error;
    json metrics = json::object();
    bool assertions_passed = false;
};

struct SweepResult {
    std::vector<SweepAxis> axes;
    std::vector<SweepCell> cells;
    std::vector<std::string> columns;
};

inline std::vector<SweepAxis> sweep_axes(const Config& c)
{
    std::vector<SweepAxis> axes;
    for (const auto& k : c.keys_with_prefix("sweep.")) {
        SweepAxis ax{k.substr(6), c.list(k)};
        require(!ax.values.empty() && !ax.values.front().empty(), ErrorCode::InvalidArgument,
                "sweep axis '" + ax.key + "' has no values");
        axes.push_back(std::move(ax));
    }
    require(!axes.empty(), ErrorCode::InvalidArgument, "sweep needs at least one sweep.<key> axis");
    return axes;
}

inline std::size_t worker_count(std::size_t cells)
{
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BLOWUP_WORKERS")) {
        const double v = csv::parse_double(env, "BLOWUP_WORKERS");
        require(v >= 1.0, ErrorCode::InvalidArgument, "BLOWUP_WORKERS must be >= 1");
        n = static_cast<std::size_t>(v);
    }
    return std::min(n, cells);
}

/// Aggregate columns: `output.columns` if given, otherwise a default set.
inline std::vector<std::string> sweep_columns(const Config& c)
{
    if (c.has("output.columns"))
        return c.list("output.columns");
    return {"status", "T_hat", "rate.exponent_hat", "blowup_set.excludes_origin"};
}

inline std::string cell_dir_name(std::size_t index)
{
    std::string s = std::to_string(index);
    return "cell_" + std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

inline std::string metric_text(const json& metrics, const std::string& key)
{
    if (!metrics.contains(key))
        return "";
    const json& v = metrics[key];
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_boolean())
        return v.get<bool>() ? "true" : "false";
    if (v.is_null())
        return "nan";
    if (v.is_number_float())
        return csv::format(v.get<double>());
    return v.dump();
}

inline SweepResult run_sweep(const Config& base)
{
    base.check_known(known_keys());
    SweepResult res;
    res.axes = sweep_axes(base);
    res.columns = sweep_columns(base);
    Config stripped = base;
    for (const auto& ax : res.axes)
        stripped.erase("sweep." + ax.key);
    stripped.erase("output.columns");

    std::size_t total = 1;
    for (const auto& ax : res.axes)
        total *= ax.values.size();
    res.cells.resize(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        auto& cell = res.cells[idx];
        cell.index = idx;
        cell.config = stripped;
        // Last axis varies fastest.
        std::size_t rest = idx;
        cell.values.resize(res.axes.size());
        for (std::size_t a = res.axes.size(); a-- > 0;) {
            const auto& ax = res.axes[a];
            cell.values[a] = ax.values[rest % ax.values.size()];
            rest /= ax.values.size();
            cell.config.set(ax.key, cell.values[a]);
        }
        if (base.has("output.dir"))
            cell.config.set("output.dir", (base.path("output.dir") / cell_dir_name(idx)).string());
        cell.config.set("name", base.get("name", "sweep") + "/" + cell_dir_name(idx));
    }

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            auto& cell = res.cells[i];
            try {
                const Experiment e = run_and_emit(cell.config);
                cell.metrics = e.analysis.metrics;
                cell.assertions_passed = e.assertions_passed();
                cell.ok = true;
            } catch (const std::exception& ex) {
                cell.error = ex.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t workers = worker_count(total);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();

    if (base.has("output.dir")) {
        const auto dir = base.path("output.dir");
        std::filesystem::create_directories(dir);
        csv::Writer w(dir / "aggregate.csv");
        std::vector<std::string> header = {"cell"};
        for (const auto& ax : res.axes)
            header.push_back(ax.key);
        for (const auto& col : res.columns)
            header.push_back(col);
        header.push_back("assertions_passed");
        header.push_back("error");
        w.header(header);
        for (const auto& cell : res.cells) {
            std::vector<std::string> row = {std::to_string(cell.index)};
            for (const auto& v : cell.values)
                row.push_back(v);
            for (const auto& col : res.columns)
                row.push_back(cell.ok ? metric_text(cell.metrics, col) : "");
            row.push_back(cell.ok && cell.assertions_passed ? "true" : "false");
            std::string err = cell.error;
            std::replace(err.begin(), err.end(), ',', ';');
            std::replace(err.begin(), err.end(), '\n', ' ');
            row.push_back(err);
            std::string line;
            for (std::size_t k = 0; k < row.size(); ++k)
                line += (k ? "," : "") + row[k];
            w.raw(line);
        }
        w.close();
    }
    return res;
}

} // namespace blowup::harness
