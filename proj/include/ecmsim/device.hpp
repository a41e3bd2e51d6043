#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

// Single-cell conductance model for electrochemical-metallization (ECM)
// synaptic devices.
//
// A cell relaxes exponentially toward its OFF state with a facilitating time
// constant that grows as a power of the cell's conductance:
//
//     tau_fac = tau_prefactor * (g / g_ref)^tau_exponent
//     g(t + dt) = g(t) * exp(-dt / tau_fac)
//
// A programming spike adds a fixed fraction of the remaining headroom on top
// of the relaxed value, and tau_fac is recomputed from the post-spike
// conductance:
//
//     g' = g_relaxed + efficiency * (g_max - g_relaxed)
//
// Low-conductance states therefore forget within micro- to milliseconds
// (short-term regime) while states driven past roughly the conductance where
// tau_fac crosses the wait period persist for minutes (long-term regime).
// Everything is an instantaneous event update on an immutable value type, so
// device evaluation is lazy: state is only reconciled with the clock when an
// event or a read happens.

namespace ecmsim {

// Conductances below this are clamped. Keeps g strictly positive (tau_fac
// stays computable) when exp() underflows after long relaxed stretches.
inline constexpr double kConductanceFloor = 1e-30;  // S

struct DeviceParams {
  double efficiency = 0.025;        // fraction of headroom added per spike (U)
  double g_max = 4e-3;              // conductance ceiling, S (A)
  double tau_prefactor = 2.42e-12;  // s (a)
  double tau_exponent = 4.0;        // dimensionless (b)
  double g_ref = 0.9e-6;            // conductance unit in the tau power law, S
  double v_threshold = 0.2;         // programming threshold, V; metadata only —
                                    // every programming spike is assumed above it
};

inline void validate(const DeviceParams& p) {
  if (!(p.efficiency > 0.0) || !(p.efficiency <= 1.0))
    throw std::invalid_argument("device: efficiency must be in (0, 1]");
  if (!(p.g_max > 0.0)) throw std::invalid_argument("device: g_max must be > 0");
  if (!(p.tau_prefactor > 0.0))
    throw std::invalid_argument("device: tau_prefactor must be > 0");
  if (!(p.tau_exponent > 0.0))
    throw std::invalid_argument("device: tau_exponent must be > 0");
  if (!(p.g_ref > 0.0)) throw std::invalid_argument("device: g_ref must be > 0");
}

inline double tau_fac(double g, const DeviceParams& p) {
  const double r = g / p.g_ref;
  if (p.tau_exponent == 4.0) {  // hot path; pow() is noticeably slower
    const double r2 = r * r;
    return p.tau_prefactor * r2 * r2;
  }
  return p.tau_prefactor * std::pow(r, p.tau_exponent);
}

struct DeviceState {
  double conductance;  // value immediately after the most recent event, S
  double event_time;   // timestamp of that event, s
  double tau;          // facilitating time constant in force, s
};

inline DeviceState initial_state(const DeviceParams& p, double g_init, double t0 = 0.0) {
  if (!(g_init > 0.0) || g_init > p.g_max)
    throw std::invalid_argument("device: g_init must be in (0, g_max]");
  return DeviceState{g_init, t0, tau_fac(g_init, p)};
}

inline void check_time(const DeviceState& s, double t) {
  if (!(t >= s.event_time))
    throw std::invalid_argument("device: time must not run backward (t=" +
                                std::to_string(t) + " < " +
                                std::to_string(s.event_time) + ")");
}

// Conductance at time t >= event_time. Pure; does not advance the state.
inline double relaxed_conductance(const DeviceState& s, double t) {
  check_time(s, t);
  const double g = s.conductance * std::exp(-(t - s.event_time) / s.tau);
  return g < kConductanceFloor ? kConductanceFloor : g;
}

// Programming spike at time t: relax, add efficiency * headroom, refresh tau
// from the post-spike conductance.
inline DeviceState apply_spike(const DeviceState& s, double t, const DeviceParams& p) {
  const double relaxed = relaxed_conductance(s, t);
  const double g = relaxed + p.efficiency * (p.g_max - relaxed);
  return DeviceState{g, t, tau_fac(g, p)};
}

// Advance to time t with no spike. tau is only refreshed by spikes.
inline DeviceState step_no_spike(const DeviceState& s, double t) {
  return DeviceState{relaxed_conductance(s, t), t, s.tau};
}

}  // namespace ecmsim
