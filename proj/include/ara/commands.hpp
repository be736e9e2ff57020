#pragma once

#include <vector>

#include "ara/config.hpp"
#include "ara/emit.hpp"

// Subcommands of the `ara` tool. Each one computes everything first and returns the files it
// would write (data plus a resolved-config sidecar per data file); nothing touches the disk
// until emit::write_all, so a failed run leaves no partial output.
//
// Sweeps: every combination of guess.c x bath.temperature (x protocol tau for trajectories)
// gets its own file, named <output.path>[_c<c>][_T<T>][_tau<tau>|_taueta<tau>] for the axes
// that have more than one value. ctmap and criticaltemps use the lists as their axes instead.
namespace ara::commands {

// Columns t, s, lambda, h, m, zu, zd, xu, xd, yu, yd. Numeric aborts carry the step index.
std::vector<emit::PendingFile> trajectory(const config::RunConfig& config);

// Columns t, s, lambda, m_eq, f_eq at equilibrium.samples evenly spaced times along the path.
std::vector<emit::PendingFile> equilibrium(const config::RunConfig& config);

// <base>_grid (s, lambda, m, f) and <base>_boundary (one flagged edge per row).
std::vector<emit::PendingFile> phasediagram(const config::RunConfig& config);

// Columns c, T, label over guess.c x bath.temperature.
std::vector<emit::PendingFile> ctmap(const config::RunConfig& config);

// tc1 for each guess.c, tc2 and the spinodal temperature of the classical endpoint.
std::vector<emit::PendingFile> criticaltemps(const config::RunConfig& config);

}  // namespace ara::commands
