#include "ddinv/trajectory_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include "ddinv/errors.hpp"
#include "ddinv/text_format.hpp"

namespace ddinv::io {
namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  while (true) {
    const auto comma = line.find(',');
    fields.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return fields;
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw InvalidInputError("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view text) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("invalid number '" + std::string(text) + "'", 0);
  }
  return out;
}

void write_trajectory(std::ostream& out, const lti::Trajectory& traj) {
  const Eigen::Index m = traj.inputs.rows();
  const Eigen::Index p = traj.outputs.rows();
  if (traj.outputs.cols() != traj.inputs.cols()) {
    throw InvalidInputError("write_trajectory: input/output lengths differ");
  }
  out << 'k';
  for (Eigen::Index i = 1; i <= m; ++i) out << ",u_" << i;
  for (Eigen::Index i = 1; i <= p; ++i) out << ",y_" << i;
  out << '\n';
  for (Eigen::Index k = 0; k < traj.length(); ++k) {
    out << k;
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << format_double(traj.inputs(i, k));
    for (Eigen::Index i = 0; i < p; ++i) out << ',' << format_double(traj.outputs(i, k));
    out << '\n';
  }
}

void save_trajectory(const std::string& path, const lti::Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write '" + path + "'");
  write_trajectory(out, traj);
  if (!out) throw InvalidInputError("error while writing '" + path + "'");
}

lti::Trajectory read_trajectory(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line).empty()) {
    throw ParseError("empty trajectory file: missing header", 1);
  }
  const auto header = split(strip_cr(line));
  if (header.front() != "k") throw ParseError("header must start with 'k'", 1);

  Eigen::Index m = 0;
  Eigen::Index p = 0;
  for (std::size_t i = 1; i < header.size(); ++i) {
    const std::string_view name = header[i];
    const bool is_input = i == static_cast<std::size_t>(m) + 1 && p == 0 &&
                          name == "u_" + std::to_string(m + 1);
    if (is_input) {
      ++m;
    } else if (name == "y_" + std::to_string(p + 1)) {
      ++p;
    } else {
      throw ParseError("unexpected header column '" + std::string(name) +
                           "' (expected k,u_1..u_m,y_1..y_p)",
                       1);
    }
  }
  if (m == 0 || p == 0) throw ParseError("header needs at least one u and one y column", 1);

  std::vector<double> values;
  std::size_t line_no = 1;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = strip_cr(line);
    if (row.empty()) continue;
    const auto fields = split(row);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    try {
      if (parse_double(fields[0]) != static_cast<double>(rows)) {
        throw ParseError("time index out of sequence", line_no);
      }
      for (std::size_t i = 1; i < fields.size(); ++i) {
        values.push_back(parse_double(fields[i]));
      }
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      throw ParseError(e.what(), line_no);
    }
    ++rows;
  }
  if (rows == 0) throw ParseError("trajectory file has no data rows", line_no);

  const Eigen::Index width = m + p;
  const Eigen::Map<const Eigen::MatrixXd> table(values.data(), width, rows);
  lti::Trajectory traj;
  traj.inputs = table.topRows(m);
  traj.outputs = table.bottomRows(p);
  return traj;
}

lti::Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trajectory file '" + path + "'", 0);
  return read_trajectory(in);
}

}  // namespace ddinv::io
