#pragma once

#include "zsim/dynamics.hpp"

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace zsim {

/// Column order for a formulation:
///   tau, t, x1..x3, u0..u3, <form block>, pi0..pi3, C1, C2, C3, G
/// where the form block is y0..y3 (position), S01 S02 S03 S12 S13 S23
/// (spin tensor) or phi1_re, phi1_im, ..., phi4_im (spinor). In the spinor
/// form u is the derived bilinear.
std::vector<std::string> trajectory_columns(Form form);

std::vector<double> trajectory_row(const Sample& s);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_trajectory_jsonl(std::ostream& os, const Trajectory& traj);

/// Rebuilds a trajectory from write_trajectory_csv output (form taken from the header).
Trajectory read_trajectory_csv(std::istream& is);

/// Shortest round-trip decimal form used by every text artifact.
std::string format_number(double v);

}  // namespace zsim
