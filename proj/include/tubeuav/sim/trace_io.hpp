#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tubeuav/sim/simloop.hpp"

namespace tubeuav::sim {

/// Stable CSV column order, one row per plant tick. Numbers are written in
/// shortest round-trip form; solve times are not exported.
const std::vector<std::string>& trace_columns();

void write_trace_csv(std::ostream& out, const SimTrace& trace);
void save_trace_csv(const std::string& path, const SimTrace& trace);
/// Inverse of write_trace_csv; throws std::runtime_error on malformed input.
SimTrace read_trace_csv(std::istream& in);

}  // namespace tubeuav::sim
