#pragma once

#include <cstdint>
#include <filesystem>

#include "cnls/trajectory.hpp"

namespace cnls {

std::string to_string(Dealias d);
Dealias dealias_from_string(const std::string& name);

/// Writes snap_NNNNNN.cnls per snapshot plus trajectory.txt, a key=value
/// index holding the solver config, provenance, seed, config hash, guard
/// trip and snapshot count. Creates `dir` if needed.
void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj,
                      std::uint64_t config_hash);
/// Throws std::runtime_error on a missing or inconsistent directory.
Trajectory read_trajectory(const std::filesystem::path& dir);

}  // namespace cnls
