#include "packetsim/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace packetsim {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
  if (!out) throw ConfigError("write failed for " + path);
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string file_checksum(const std::string& path) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(read_text_file(path))));
  return buf;
}

void write_series_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size() || columns.empty())
    throw PreconditionError("header and column counts disagree");
  const std::size_t rows = columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw PreconditionError("ragged columns");
  std::ostringstream out;
  for (std::size_t c = 0; c < header.size(); ++c)
    out << (c ? "," : "") << header[c];
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << (c ? "," : "") << format_double(columns[c][r]);
    out << '\n';
  }
  write_text_file(path, out.str());
}

void write_field_csv(const std::string& path, const PhaseSpaceField& field) {
  std::ostringstream out;
  out << "x,p,value\n";
  for (int i = 0; i < field.spec.nx; ++i)
    for (int j = 0; j < field.spec.np; ++j)
      out << format_double(field.spec.x_node(i)) << ','
          << format_double(field.spec.p_node(j)) << ','
          << format_double(field.values(i, j)) << '\n';
  write_text_file(path, out.str());
}

namespace {

void append_events(std::ostringstream& out, std::uint64_t id,
                   const std::vector<JumpEvent>& jumps, const std::string& source) {
  for (std::size_t k = 0; k < jumps.size(); ++k)
    out << id << ',' << k << ',' << format_double(jumps[k].t) << ','
        << format_double(jumps[k].x) << ',' << format_double(jumps[k].p) << ','
        << source << '\n';
}

}  // namespace

void write_event_log(const std::string& path, const std::vector<Walker>& walkers,
                     const std::string& source) {
  std::ostringstream out;
  out << "walker_id,jump_index,t,x,p,source\n";
  for (const Walker& w : walkers) append_events(out, w.index, w.jumps, source);
  write_text_file(path, out.str());
}

void write_event_log(const std::string& path, const std::vector<Trajectory>& trajectories,
                     const std::string& source) {
  std::ostringstream out;
  out << "walker_id,jump_index,t,x,p,source\n";
  for (const Trajectory& tr : trajectories) append_events(out, tr.index, tr.jumps, source);
  write_text_file(path, out.str());
}

void write_density_csv(const std::string& path, const DensityMatrix& rho) {
  std::ostringstream out;
  out << "row,col,re,im\n";
  for (int j = 0; j < rho.m.rows(); ++j)
    for (int l = 0; l < rho.m.cols(); ++l)
      out << j << ',' << l << ',' << format_double(rho.m(j, l).real()) << ','
          << format_double(rho.m(j, l).imag()) << '\n';
  write_text_file(path, out.str());
}

}  // namespace packetsim
