#pragma once

// Longitudinal vessel physics: thrust, resistance, momentum balance and the
// Euler (speed) / ballistic (position) integrator.

namespace vfrl {

inline constexpr double kWaterDensity = 1000.0;  // kg/m^3

struct VesselParams {
  double mass = 3.174e6;       // kg
  double length = 110.0;       // m
  double beam = 11.4;          // m
  double draft = 2.8;          // m
  double max_power = 1.0e6;    // W
  double added_mass_fraction = 0.05;
  double prop_efficiency = 0.6;
  double drag_coeff_frontal = 0.1;
  double friction_coeff_hull = 0.0016;
  double shallow_water_coeff = 1.0;
  double thrust_speed_floor = 1.0;  // m/s

  double frontal_area() const { return beam * draft; }
  double wetted_surface() const { return length * (beam + 2.0 * draft); }
  double effective_mass() const { return mass * (1.0 + added_mass_fraction); }

  // Throws ConfigError when a field is out of range.
  void validate() const;
};

struct VesselState {
  double position = 0.0;  // bow position along the river axis, m
  double speed = 0.0;     // ground speed, m/s
  double power = 0.0;     // engine power, W
};

struct RiverConditions {
  double depth_below_keel = 0.0;  // m
  double cross_section = 0.0;     // m^2
  double stream_speed = 0.0;      // m/s, positive along the direction of travel
};

struct ForceBreakdown {
  double thrust = 0.0;
  double drag_hydro = 0.0;
  double drag_hull = 0.0;
  double stream_transfer = 0.0;

  double net() const { return thrust - drag_hydro - drag_hull - stream_transfer; }
};

struct Resistance {
  double drag_hydro = 0.0;
  double drag_hull = 0.0;
};

// eta * P / max(v_rel, floor). Negative power is treated as zero.
double thrust(double power, double v_rel, const VesselParams& params);

// Frontal drag amplified by channel blockage plus hull friction amplified in
// shallow water. Both terms are odd in v_rel.
// Throws DegenerateGeometryError if the blockage ratio reaches 1.
Resistance resistance(double v_rel, const RiverConditions& river, const VesselParams& params);

ForceBreakdown forces(const VesselState& state, const RiverConditions& river,
                      const VesselParams& params);

double net_acceleration(const VesselState& state, const RiverConditions& river,
                        const VesselParams& params);

// Speed by Euler, position by the ballistic (trapezoidal) rule. Power is
// carried over unchanged and speed is not clamped.
VesselState step(const VesselState& state, double accel, double dt);

// Ground speed at which the net acceleration vanishes for the given power.
// Bisection on v_rel in [0, 20] m/s; throws NoRootError if no sign change.
double equilibrium_speed(double power, const RiverConditions& river, const VesselParams& params);

}  // namespace vfrl
