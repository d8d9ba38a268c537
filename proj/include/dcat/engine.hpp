#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dcat/analysis.hpp"
#include "dcat/circuit.hpp"
#include "dcat/modulation.hpp"
#include "dcat/topology.hpp"
#include "dcat/waveform.hpp"

namespace dcat {

/// Invalid scenario input (file contents, field values, preconditions).
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The integrator produced a non-finite state.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, double t)
        : std::runtime_error(what), time(t) {}
    double time = 0.0;
};

// ===========================================================================
// Reference signals
// ===========================================================================

struct ConstantReference {
    double value = 0.0;
};

struct SineReference {
    double amplitude = 0.0;
    double frequency = 0.0;
    double offset = 0.0;
};

/// peak * sin^2(pi * frequency * t): a rectified-looking hump train with
/// period 1/frequency that starts and ends each period at zero.
struct SquaredSineReference {
    double peak = 0.0;
    double frequency = 0.0;
};

/// Piecewise-linear table; clamped to the end values outside the time range.
struct TableReference {
    std::vector<double> times;
    std::vector<double> values;
};

using Reference =
    std::variant<ConstantReference, SineReference, SquaredSineReference, TableReference>;

double reference_value(const Reference& ref, double t);

/// Fundamental frequency used for harmonic analysis; 0 when the reference has
/// no designated period (constant or table).
double reference_fundamental(const Reference& ref);

void validate_reference(const Reference& ref);

// ===========================================================================
// Scenario
// ===========================================================================

struct FaultEvent {
    double time = 0.0;
    int module = 0;
};

struct Scenario {
    std::string name = "scenario";
    ConverterConfig config;
    Reference reference = ConstantReference{};
    double duration = 0.0;
    double dt = 0.0; ///< 0 selects the default step 1/(200 * f_bridge)
    int record_decimation = 1;
    std::vector<double> initial_v_cap; ///< empty = even split v_dc / active count
    std::vector<FaultEvent> faults;

    double effective_dt() const;
    void validate() const;
};

// ===========================================================================
// Simulation
// ===========================================================================

struct BalanceSample {
    double time = 0.0;
    double spread = 0.0; ///< max - min capacitor voltage across active modules
};

struct SimResult {
    Waveform waveform;
    RunReport report;
    std::vector<BalanceSample> balance_trace; ///< one sample per bridge period
    SimState final_state;
    std::vector<int> final_active_modules;
};

/// Fixed-step integration of the full converter. Bridge, PWM and tap-selector
/// events land on step boundaries; the achieved switching periods are the
/// nearest whole number of steps.
SimResult simulate(const Scenario& scenario);

// ===========================================================================
// Gate driver
// ===========================================================================

struct GateDrivePeriod {
    double delivered = 0.0;
    double dissipated = 0.0;
};

struct GateDriveResult {
    Waveform trajectory;
    std::vector<GateDrivePeriod> periods;
    double achieved_rise_time = 0.0;
    double delivered_total = 0.0;
    double dissipated_total = 0.0;
    double rail = 0.0;
};

/// Integrates the resonant gate loop through the seven-segment supply
/// schedule for the given number of gate periods. Requires dt <= t_rise/20.
GateDriveResult run_gate_driver(const GateDriverParams& p, int periods, double dt);

} // namespace dcat
