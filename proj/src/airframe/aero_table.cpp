#include "tubeuav/airframe/aero_table.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace tubeuav::airframe {
namespace {

// Plausible magnitudes for a tailless 0.85 m span, 1 kg wing at 13.5 m/s.
// Values are illustrative and chosen for a stable short period and roll
// subsidence; they are not a measured derivative database.
constexpr const char* kBundledTable = R"(# MH850-class flying wing, placeholder derivative table (non-authoritative)
mass = 1.0                 # kg
Jx = 0.020                 # kg m^2
Jy = 0.015
Jz = 0.034
Jxz = 0.0
wing_area = 0.20           # m^2
wing_span = 0.85           # m
mean_chord = 0.235         # m
air_density = 1.213        # kg/m^3 at 100 m
thrust_per_throttle = 6.0  # N per unit throttle deviation

CD0 = 0.030
CD_k = 0.080               # induced drag factor, CD = CD0 + k CL^2
CL_alpha = 3.5
CL_q = 2.0
CL_de = 0.40
Cm_alpha = -0.40
Cm_q = -1.50
Cm_de = -0.35

CY_beta = -0.15
CY_p = 0.0
CY_r = 0.05
CY_da = 0.0
Cl_beta = -0.06
Cl_p = -0.45
Cl_r = 0.10
Cl_da = 0.20
Cn_beta = 0.03
Cn_p = -0.03
Cn_r = -0.08
Cn_da = -0.005
)";

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

const std::vector<std::string>& AeroDerivativeTable::required_names() {
  static const std::vector<std::string> names{
      "mass",     "Jx",       "Jy",         "Jz",         "Jxz",      "wing_area",
      "wing_span", "mean_chord", "air_density", "thrust_per_throttle", "CD0", "CD_k",
      "CL_alpha", "CL_q",     "CL_de",      "Cm_alpha",   "Cm_q",     "Cm_de",
      "CY_beta",  "CY_p",     "CY_r",       "CY_da",      "Cl_beta",  "Cl_p",
      "Cl_r",     "Cl_da",    "Cn_beta",    "Cn_p",       "Cn_r",     "Cn_da"};
  return names;
}

AeroDerivativeTable AeroDerivativeTable::parse(std::istream& in) {
  AeroDerivativeTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw AeroTableError("aero table line " + std::to_string(lineno) + ": expected name = value");
    }
    const std::string name = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    double parsed = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (name.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
      throw AeroTableError("aero table line " + std::to_string(lineno) + ": bad record '" + line +
                           "'");
    }
    if (!table.values_.emplace(name, parsed).second) {
      throw AeroTableError("aero table line " + std::to_string(lineno) + ": duplicate '" + name +
                           "'");
    }
  }
  return table;
}

AeroDerivativeTable AeroDerivativeTable::parse(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

AeroDerivativeTable AeroDerivativeTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AeroTableError("cannot open aero table '" + path + "'");
  return parse(in);
}

AeroDerivativeTable AeroDerivativeTable::bundled_mh850() { return parse(std::string(kBundledTable)); }

double AeroDerivativeTable::at(const std::string& name) const {
  const auto it = values_.find(name);
  if (it == values_.end()) throw AeroTableError("aero table is missing derivative '" + name + "'");
  return it->second;
}

void AeroDerivativeTable::check_complete() const {
  for (const auto& name : required_names()) at(name);
}

std::string AeroDerivativeTable::to_text() const {
  std::ostringstream out;
  char buf[32];
  for (const auto& [name, value] : values_) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    out << name << " = " << std::string_view(buf, res.ptr - buf) << '\n';
  }
  return out.str();
}

}  // namespace tubeuav::airframe
