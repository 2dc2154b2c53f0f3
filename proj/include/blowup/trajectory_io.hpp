#pragma once

// On-disk trajectory layout:
//   <dir>/index.csv          id,t,max_u,dt,step
//   <dir>/snap_NNNNNN.csv    x,u  (one per snapshot)
//   <dir>/status.txt         terminal status, then one event per line
// Numbers are written in shortest round-trip form, so a reload is bit-exact.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "blowup/csv.hpp"
#include "blowup/domain.hpp"
#include "blowup/error.hpp"
#include "blowup/solver.hpp"

namespace blowup {

inline std::string snapshot_filename(std::size_t id)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snap_%06zu.csv", id);
    return buf;
}

inline void write_trajectory(const Trajectory& traj, const Domain& domain, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
    const auto xs = domain.coordinates();
    csv::Writer index(dir / "index.csv");
    index.header({"id", "t", "max_u", "dt", "step"});
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const auto& s = traj.snapshots[k];
        index.row({static_cast<double>(k), s.t, s.max_u(), s.dt_last, static_cast<double>(s.step_count)});
        csv::Writer snap(dir / snapshot_filename(k));
        snap.header({"x", "u"});
        for (std::size_t i = 0; i < s.u.size(); ++i)
            snap.row({xs[i], s.u[i]});
        snap.close();
    }
    index.close();
    std::ofstream status(dir / "status.txt");
    status << to_string(traj.status) << '\n';
    for (const auto& e : traj.events)
        status << e << '\n';
    if (!status)
        throw Error(ErrorCode::Io, "write failed for " + (dir / "status.txt").string());
}

inline Trajectory read_trajectory(const std::filesystem::path& dir)
{
    const auto index = csv::read_table(dir / "index.csv");
    Trajectory traj;
    for (const auto& row : index.rows) {
        if (row.size() < 5)
            throw Error(ErrorCode::Parse, (dir / "index.csv").string() + ": expected 5 columns");
        const auto id = static_cast<std::size_t>(row[0]);
        SolutionState s;
        s.t = row[1];
        s.dt_last = row[3];
        s.step_count = static_cast<std::size_t>(row[4]);
        const auto snap = csv::read_table(dir / snapshot_filename(id));
        s.u.reserve(snap.rows.size());
        for (const auto& r : snap.rows) {
            if (r.size() < 2)
                throw Error(ErrorCode::Parse, snapshot_filename(id) + ": expected x,u columns");
            s.u.push_back(r[1]);
        }
        traj.snapshots.push_back(std::move(s));
    }
    std::ifstream status(dir / "status.txt");
    std::string line;
    if (status && std::getline(status, line)) {
        traj.status = terminal_status_from_string(line);
        while (std::getline(status, line))
            traj.events.push_back(line);
    }
    return traj;
}

} // namespace blowup
