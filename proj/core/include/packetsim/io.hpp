#pragma once

#include <string>
#include <vector>

#include "packetsim/ctrw.hpp"
#include "packetsim/trajectory.hpp"

namespace packetsim {

// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// FNV-1a (64-bit) over raw bytes, as fixed-width hex.
std::uint64_t fnv1a(const std::string& bytes);
std::string file_checksum(const std::string& path);

// CSV with a one-line header; columns must share a length.
void write_series_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns);

// One row per lattice cell: x, p, value.
void write_field_csv(const std::string& path, const PhaseSpaceField& field);

// Line-oriented jump log: walker_id, jump_index, t, x, p, source.
void write_event_log(const std::string& path, const std::vector<Walker>& walkers,
                     const std::string& source);
void write_event_log(const std::string& path, const std::vector<Trajectory>& trajectories,
                     const std::string& source);

// One row per entry, row-major: row, col, re, im.
void write_density_csv(const std::string& path, const DensityMatrix& rho);

}  // namespace packetsim
