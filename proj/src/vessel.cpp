#include "vfrl/vessel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vfrl/error.hpp"

namespace vfrl {

void VesselParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("vessel.") + name + " must be positive and finite");
    }
  };
  positive(mass, "mass");
  positive(length, "length");
  positive(beam, "beam");
  positive(draft, "draft");
  positive(max_power, "max_power");
  positive(prop_efficiency, "prop_efficiency");
  positive(drag_coeff_frontal, "drag_coeff_frontal");
  positive(friction_coeff_hull, "friction_coeff_hull");
  positive(thrust_speed_floor, "thrust_speed_floor");
  if (!(added_mass_fraction >= 0.0)) throw ConfigError("vessel.added_mass_fraction must be >= 0");
  if (!(shallow_water_coeff >= 0.0)) throw ConfigError("vessel.shallow_water_coeff must be >= 0");
}

double thrust(double power, double v_rel, const VesselParams& params) {
  const double p = std::max(power, 0.0);
  return params.prop_efficiency * p / std::max(v_rel, params.thrust_speed_floor);
}

Resistance resistance(double v_rel, const RiverConditions& river, const VesselParams& params) {
  const double frontal = params.frontal_area();
  const double blockage = frontal / river.cross_section;
  if (!(river.cross_section > 0.0) || blockage >= 1.0) {
    throw DegenerateGeometryError("vessel cross-section " + std::to_string(frontal) +
                                  " m^2 does not fit channel cross-section " +
                                  std::to_string(river.cross_section) + " m^2");
  }
  const double q = 0.5 * kWaterDensity * v_rel * std::abs(v_rel);
  const double amplification = 1.0 / ((1.0 - blockage) * (1.0 - blockage));
  const double depth = std::max(river.depth_below_keel, 0.0);
  const double shallow = 1.0 + params.shallow_water_coeff / (1.0 + depth / params.draft);

  Resistance r;
  r.drag_hydro = q * params.drag_coeff_frontal * frontal * amplification;
  r.drag_hull = q * params.friction_coeff_hull * params.wetted_surface() * shallow;
  return r;
}

ForceBreakdown forces(const VesselState& state, const RiverConditions& river,
                      const VesselParams& params) {
  const double v_rel = state.speed - river.stream_speed;
  const Resistance r = resistance(v_rel, river, params);
  ForceBreakdown f;
  f.thrust = thrust(state.power, v_rel, params);
  f.drag_hydro = r.drag_hydro;
  f.drag_hull = r.drag_hull;
  f.stream_transfer = 0.0;  // stream enters only through v_rel
  return f;
}

double net_acceleration(const VesselState& state, const RiverConditions& river,
                        const VesselParams& params) {
  return forces(state, river, params).net() / params.effective_mass();
}

VesselState step(const VesselState& state, double accel, double dt) {
  VesselState next = state;
  next.speed = state.speed + accel * dt;
  next.position = state.position + 0.5 * (state.speed + next.speed) * dt;
  return next;
}

double equilibrium_speed(double power, const RiverConditions& river, const VesselParams& params) {
  auto accel_at = [&](double v_rel) {
    VesselState s;
    s.speed = v_rel + river.stream_speed;
    s.power = power;
    return net_acceleration(s, river, params);
  };
  double lo = 0.0;
  double hi = 20.0;
  double a_lo = accel_at(lo);
  if (a_lo == 0.0) return river.stream_speed;
  const double a_hi = accel_at(hi);
  if (a_lo * a_hi > 0.0) {
    throw NoRootError("net acceleration does not change sign for v_rel in [0, 20] m/s");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double a_mid = accel_at(mid);
    if (std::abs(a_mid) < 1e-8 && hi - lo < 1e-12) return mid + river.stream_speed;
    if ((a_mid > 0.0) == (a_lo > 0.0)) {
      lo = mid;
      a_lo = a_mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-14) break;
  }
  return 0.5 * (lo + hi) + river.stream_speed;
}

}  // namespace vfrl
