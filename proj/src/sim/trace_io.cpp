#include "tubeuav/sim/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tubeuav::sim {
namespace {

constexpr int kLong = 5;
constexpr int kLat = 4;

std::string format(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse(const std::string& s, std::size_t row) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("trace csv: bad number '" + s + "' on row " + std::to_string(row));
  }
  return v;
}

}  // namespace

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols = {
      "t_s",         "u_mps",       "alpha_rad",   "theta_rad",   "q_radps",       "h_dev_m",
      "v_mps",       "p_radps",     "r_radps",     "phi_rad",     "z_u",           "z_alpha",
      "z_theta",     "z_q",         "z_h",         "z_v",         "z_p",           "z_r",
      "z_phi",       "psi_deg",     "east_m",      "north_m",     "cmd_throttle",  "cmd_elevator_rad",
      "cmd_aileron_rad", "v_ref_mps", "h_ref_m",   "heading_ref_deg", "roll_ref_deg", "w_u",
      "w_alpha",     "w_theta",     "w_q",         "w_h",         "w_v",           "w_p",
      "w_r",         "w_phi",       "eps_r_m",     "leg",         "err_v_mps",     "err_h_m",
      "events"};
  return cols;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  const auto& cols = trace_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : trace.records) {
    std::string line = format(r.t);
    auto add = [&](double v) {
      line += ',';
      line += format(v);
    };
    for (int i = 0; i < kLong; ++i) add(r.x_long(i));
    for (int i = 0; i < kLat; ++i) add(r.x_lat(i));
    for (int i = 0; i < kLong; ++i) add(r.z_long(i));
    for (int i = 0; i < kLat; ++i) add(r.z_lat(i));
    add(r.psi_deg);
    add(r.east);
    add(r.north);
    add(r.u_long(0));
    add(r.u_long(1));
    add(r.u_lat(0));
    add(r.v_ref);
    add(r.h_ref);
    add(r.heading_ref_deg);
    add(r.roll_ref_deg);
    for (int i = 0; i < kLong; ++i) add(r.w_long(i));
    for (int i = 0; i < kLat; ++i) add(r.w_lat(i));
    add(r.eps_r);
    line += ',' + std::to_string(r.leg);
    add(r.err_v);
    add(r.err_h);
    line += ',' + r.events;
    out << line << '\n';
  }
}

void save_trace_csv(const std::string& path, const SimTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_trace_csv(out, trace);
  if (!out) throw std::runtime_error("write failed: " + path);
}

SimTrace read_trace_csv(std::istream& in) {
  const auto& cols = trace_columns();
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace csv: missing header");
  std::string expected;
  for (std::size_t i = 0; i < cols.size(); ++i) expected += (i ? "," : "") + cols[i];
  if (line != expected) throw std::runtime_error("trace csv: unexpected header");

  SimTrace trace;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    // The events column is last and may itself be empty; it never holds commas.
    for (std::size_t i = 0; i + 1 < cols.size(); ++i) {
      const auto comma = line.find(',', start);
      if (comma == std::string::npos) {
        throw std::runtime_error("trace csv: too few fields on row " + std::to_string(row));
      }
      f.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    f.push_back(line.substr(start));
    if (f.back().find(',') != std::string::npos) {
      throw std::runtime_error("trace csv: too many fields on row " + std::to_string(row));
    }

    std::size_t c = 0;
    auto next = [&] { return parse(f[c++], row); };
    auto vec = [&](int n) {
      Eigen::VectorXd v(n);
      for (int i = 0; i < n; ++i) v(i) = next();
      return v;
    };
    SimRecord r;
    r.t = next();
    r.x_long = vec(kLong);
    r.x_lat = vec(kLat);
    r.z_long = vec(kLong);
    r.z_lat = vec(kLat);
    r.psi_deg = next();
    r.east = next();
    r.north = next();
    r.u_long = vec(2);
    r.u_lat = vec(1);
    r.v_ref = next();
    r.h_ref = next();
    r.heading_ref_deg = next();
    r.roll_ref_deg = next();
    r.w_long = vec(kLong);
    r.w_lat = vec(kLat);
    r.eps_r = next();
    r.leg = static_cast<int>(next());
    r.err_v = next();
    r.err_h = next();
    r.events = f[c];
    if (r.events.find("complete") != std::string::npos) trace.mission_complete = true;
    trace.records.push_back(std::move(r));
  }
  trace.mpc_solve_time.assign(trace.records.size(), 0.0);
  return trace;
}

}  // namespace tubeuav::sim
