#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace tubeuav::airframe {

class AeroTableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Named aircraft constants and non-dimensional stability derivatives.
 *
 * Text format: one `name = value` record per line; `#` starts a comment.
 * Angles are in radians, derivatives per radian, rates non-dimensionalized
 * with b/2V (lateral) or c/2V (longitudinal). See data/mh850_placeholder.aero.
 */
class AeroDerivativeTable {
 public:
  static AeroDerivativeTable parse(std::istream& in);
  static AeroDerivativeTable parse(const std::string& text);
  static AeroDerivativeTable load(const std::string& path);
  /// Placeholder table for a ~1 kg flying wing. Not the aircraft's measured data.
  static AeroDerivativeTable bundled_mh850();

  /// Names every model-building routine requires.
  static const std::vector<std::string>& required_names();

  double at(const std::string& name) const;
  bool contains(const std::string& name) const { return values_.count(name) > 0; }
  void set(const std::string& name, double value) { values_[name] = value; }
  /// Throws naming the first missing required entry.
  void check_complete() const;

  const std::map<std::string, double>& values() const { return values_; }
  std::string to_text() const;

 private:
  std::map<std::string, double> values_;
};

}  // namespace tubeuav::airframe
