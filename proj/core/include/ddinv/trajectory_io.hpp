#pragma once

#include <iosfwd>
#include <string>

#include "ddinv/lti.hpp"

namespace ddinv::io {

// Trajectory CSV: header `k,u_1,...,u_m,y_1,...,y_p`, then one row per time
// step with k = 0, 1, ... and every field present. Values are written with
// round-trip precision.

void write_trajectory(std::ostream& out, const lti::Trajectory& traj);
void save_trajectory(const std::string& path, const lti::Trajectory& traj);

/// Throws ParseError (with 1-based line number) on malformed input, including
/// an empty file.
lti::Trajectory read_trajectory(std::istream& in);
lti::Trajectory load_trajectory(const std::string& path);

}  // namespace ddinv::io
