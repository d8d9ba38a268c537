#pragma once

#include <array>
#include <string>
#include <vector>

#include "dcat/modulation.hpp"
#include "dcat/topology.hpp"

namespace dcat {

/// Electrical state of the converter network. Vectors hold one entry per
/// active module, ordered by original module index. i_mag is the magnetizing
/// branch current; the network equations keep it equal to the sum of the
/// winding currents.
struct SimState {
    std::vector<double> v_cap;
    std::vector<double> i_wind;
    double i_mag = 0.0;
    double i_load = 0.0;
};

/// Time derivative of SimState plus the power terms evaluated at the same
/// instant, so energy bookkeeping reuses the derivative evaluation.
struct StateDerivative {
    std::vector<double> dv_cap;
    std::vector<double> di_wind;
    double di_mag = 0.0;
    double di_load = 0.0;

    double p_source = 0.0;      ///< battery EMF power v_dc * i_batt
    double p_load = 0.0;        ///< power into the load resistance
    double p_dissipated = 0.0;  ///< device and source-resistance losses
    double p_stored = 0.0;      ///< d/dt of total field energy
    double i_batt = 0.0;

    double residual() const { return p_source - p_load - p_dissipated - p_stored; }
};

// ===========================================================================
// Switched network
// ===========================================================================

/// Precomputed coefficients of the active network. The flat state layout is
/// [v_cap[0..Ma), i_wind[0..Ma), i_mag, i_load]; rebuild after a bypass.
class Network {
public:
    explicit Network(const ConverterConfig& cfg);

    int active_count() const { return count_; }
    int state_size() const { return 2 * count_ + 2; }
    const std::vector<int>& active_modules() const { return active_; }
    const ConverterConfig& config() const { return cfg_; }

    /// dx/dt for the given bridge polarity and conducting tap (0..Ma).
    void eval(const double* x, int polarity, int conducting_tap, double* dxdt) const;

    struct PowerTerms {
        double source = 0.0;
        double load = 0.0;
        double dissipated = 0.0;
        double stored = 0.0;
        double i_batt = 0.0;
        double residual() const { return source - load - dissipated - stored; }
        double dominant() const;
    };

    /// Power accounting at (x, dx/dt); the balance residual is an algebraic
    /// identity of eval() and stays at rounding level.
    PowerTerms power_terms(const double* x, const double* dxdt) const;

    /// Total field energy of the state.
    double stored_energy(const double* x) const;

private:
    ConverterConfig cfg_;
    std::vector<int> active_;
    int count_ = 0;
    double inv_c_ = 0.0;
    double inv_l_leak_ = 0.0;
    double inv_l_mag_ = 0.0;
    double inv_l_load_ = 0.0;
    double inv_r_batt_ = 0.0;
    double r_wind_eff_ = 0.0;   ///< r_winding + 2 * r_on_bridge
    double r_load_path_ = 0.0;  ///< r_load + r_on_tap + r_on_pwm
    double star_denom_ = 0.0;   ///< 1/l_mag + Ma/l_leak
};

/// Convenience wrapper evaluating all SimState derivatives in one call.
/// The engine uses a cached Network instead.
StateDerivative derivatives(const SimState& state, const ConverterConfig& cfg,
                            const BridgePhase& phase, const TapSelection& sel,
                            PwmState pwm_state);

void pack_state(const SimState& state, std::vector<double>& x);
void unpack_state(const std::vector<double>& x, int active_count, SimState& state);

// ===========================================================================
// Conduction path
// ===========================================================================

struct DeviceId {
    enum class Kind { tap, pwm_high, pwm_low };
    Kind kind = Kind::tap;
    int index = 0; ///< tap index; 0 for PWM devices

    bool operator==(const DeviceId&) const = default;
};

std::string to_string(const DeviceId& id);

/// The two conduction elements carrying the load current: one tap element
/// (a series pair counted once) and one PWM switch.
std::array<DeviceId, 2> conduction_path_devices(const TapSelection& sel, PwmState pwm_state);

// ===========================================================================
// Gate-drive loop
// ===========================================================================

/// State of the resonant gate loop. Energies are running accumulators:
/// delivered counts only what the supply sources (recovered energy is not
/// subtracted), dissipated is the r_loop loss.
struct GateDriverState {
    double v_gate = 0.0;
    double i_lmag = 0.0;
    bool clamp_active = false;
    double dissipated_energy = 0.0;
    double delivered_energy = 0.0;
};

struct GateDriverDerivative {
    double dv_gate = 0.0;
    double di_lmag = 0.0;
    double d_dissipated = 0.0;
    double d_delivered = 0.0;
};

/// Series loop of supply EMF (polarity * v_gd * turns_ratio), l_mag_gd,
/// r_loop and c_gs_total. A closed clamp detaches the tank: both state
/// derivatives are zero while it holds the gate at its rail.
GateDriverDerivative gate_driver_derivatives(const GateDriverState& state,
                                             const GateDriverParams& p, int supply_polarity);

} // namespace dcat
