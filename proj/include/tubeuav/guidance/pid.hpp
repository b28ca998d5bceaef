#pragma once

namespace tubeuav::guidance {

/// Heading-to-roll gains in deg of roll per deg of heading error.
struct PidGains {
  double kp = 1.5;
  double ki = 0.05;
  double kd = 0.3;
  double output_limit = 30.0;    // deg
  double integral_limit = 10.0;  // deg, bound on the integral contribution

  void validate() const;
};

/**
 * Heading PID producing a roll reference. The error is wrapped to
 * (−180, 180]; the derivative acts on the measured heading so waypoint
 * switches do not kick the output; the integral term is clamped and frozen
 * while the output saturates.
 */
class HeadingPid {
 public:
  explicit HeadingPid(PidGains gains = {});

  double update(double heading_ref_deg, double heading_deg, double dt);
  void reset();

  const PidGains& gains() const { return gains_; }
  double integral_term() const { return integral_; }

 private:
  PidGains gains_;
  double integral_ = 0.0;
  double last_heading_ = 0.0;
  bool has_last_ = false;
};

}  // namespace tubeuav::guidance
