#pragma once

#include <vector>

#include "dcat/topology.hpp"

namespace dcat {

/// Shared H-bridge drive state. Every module runs the same 50% square wave
/// with no phase shift, so a single polarity and clamp flag covers the stack.
struct BridgePhase {
    int polarity = +1;   ///< +1 or -1
    bool clamp = false;  ///< true during a zero-voltage clamp interval
};

/// Adjacent tap pair bracketing the reference plus the PWM duty that
/// interpolates between them. low_tap == high_tap only when saturated.
struct TapSelection {
    int low_tap = 0;
    int high_tap = 0;
    double duty = 0.0;
};

enum class PwmState { low, high };

/// Parameters of the clamped resonant gate-drive loop. Timings describe one
/// output period; see gate_waveform_at for the segment composition.
struct GateDriverParams {
    double v_gd = 12.0;       ///< supply magnitude
    double l_mag_gd = 2e-6;   ///< loop inductance
    double c_gs_total = 5e-9; ///< lumped gate capacitance
    double turns_ratio = 0.5; ///< secondary:primary
    double r_loop = 0.0;      ///< loop series resistance
    double t_rise = 0.0;
    double t_high = 0.0;
    double t_fall = 0.0;
    double t_zero = 0.0;
    double t_low = 0.0;

    /// Segment sum: rise + high + fall + zero + fall + low + rise.
    double period() const { return 2.0 * t_rise + t_high + 2.0 * t_fall + t_zero + t_low; }

    /// Plateau magnitude reached by the resonant half-swing: 2*turns_ratio*v_gd.
    double rail() const { return 2.0 * turns_ratio * v_gd; }

    void validate() const;

    /// Timings for a gate frequency: resonant transitions, a zero clamp of
    /// one tenth period, equal high/low plateaus. Throws if the transitions
    /// do not fit the period.
    static GateDriverParams for_frequency(double f_gate, double v_gd, double l_mag_gd,
                                          double c_gs_total, double turns_ratio = 0.5,
                                          double r_loop = 0.0);
};

/// Square-wave polarity at time t: +1 on the first half period.
BridgePhase bridge_phase_at(double t, double f_bridge);

/// Maps a reference voltage onto the ladder. In range: adjacent taps with
/// duty = (v_ref - low)/(high - low). Ties select the boundary tap as low
/// with duty 0. Saturates to (top, top, 1) above and (0, 0, 0) below.
TapSelection select_taps(double v_ref, const std::vector<double>& ladder);

/// Leading-edge modulation: high for t mod T_pwm in [0, duty*T_pwm).
PwmState pwm_gate_at(double t, const TapSelection& sel, double f_pwm);

/// Conduction elements toggled when the selection moves: size of the
/// symmetric difference of the selected tap sets. At most 4.
int tap_transition_toggle_count(const TapSelection& prev, const TapSelection& next);

/// Piecewise-linear reference of the clamped resonant driver, periodic with
/// period(): 0 -> +v_gd over t_rise, hold t_high, fall to 0 over t_fall,
/// clamp t_zero, fall to -v_gd over t_fall, hold t_low, rise to 0 over t_rise.
double gate_waveform_at(double t, const GateDriverParams& p);

/// Half resonant period pi*sqrt(L*C) of the gate loop: the duration of one
/// rail-to-rail transition.
double resonant_transition_time(double l_mag_gd, double c_gs_total);

} // namespace dcat
