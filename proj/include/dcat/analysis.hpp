#pragma once

#include <cstdint>

#include "dcat/topology.hpp"
#include "dcat/waveform.hpp"

namespace dcat {

struct SwitchEventCounts {
    std::int64_t bridge = 0;
    std::int64_t tap = 0;
    std::int64_t pwm = 0;
};

struct GateEnergy {
    double delivered = 0.0;
    double dissipated = 0.0;
};

struct EnergyTotals {
    double source = 0.0;
    double load = 0.0;
    double dissipated = 0.0;
    double stored_delta = 0.0;
    double fault_dumped = 0.0;
};

/// Metrics derived from one simulation run.
struct RunReport {
    double thd = 0.0;
    double rms_tracking_error = 0.0;
    double capacitor_spread_final = 0.0;
    double balance_settling_time = 0.0; ///< equals duration when never settled
    bool balance_settled = false;
    double conduction_loss = 0.0;
    SwitchEventCounts switching_event_counts;
    GateEnergy gate_energy;
    EnergyTotals energy;
    double power_balance_max_residual = 0.0; ///< relative to the dominant power term
    double duration = 0.0;
    double dt = 0.0;
};

/// Total harmonic distortion of a uniformly sampled signal: RMS of harmonics
/// 2..floor(nyquist/f0) over the fundamental amplitude, evaluated over the
/// largest whole number of fundamental periods in the record.
double thd(const std::vector<double>& samples, double sample_dt, double f0);

/// RMS deviation between the one-PWM-period moving average of v_out and the
/// reference, compared at window centers; the first PWM period is excluded.
double tracking_error(const std::vector<double>& v_out, const std::vector<double>& v_ref,
                      double sample_dt, double f_pwm);

/// Trapezoidal integral of the conduction losses in the load path (two
/// devices) and the winding paths recorded in the waveform.
double conduction_loss(const Waveform& waveform, const ConverterConfig& config);

} // namespace dcat
