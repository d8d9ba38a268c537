#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcat {

/// Thrown when a configuration or parameter set violates a structural
/// constraint. The message names the offending field.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Electrical and scheduling parameters of the series-stacked converter.
///
/// Defaults describe the 4-module, 400 V reference design with a tightly
/// coupled planar transformer. All values are SI units. Module and tap
/// indices are 0-based throughout.
struct ConverterConfig {
    int module_count = 4;
    double v_dc = 400.0;

    double c_module = 40e-6;     ///< DC-side capacitance per module
    double l_leak = 0.1e-6;      ///< per-winding leakage inductance
    double l_mag = 100e-6;       ///< magnetizing inductance at the star node
    double r_winding = 40e-3;    ///< winding series resistance
    double r_on_bridge = 10e-3;  ///< on-resistance of one bridge switch
    double r_on_tap = 10e-3;     ///< on-resistance of one tap-selector element
    double r_on_pwm = 10e-3;     ///< on-resistance of one PWM switch
    double r_batt = 50e-3;       ///< source (battery) series resistance

    double r_load = 10.0;
    double l_load = 1e-3;

    double f_bridge = 110e3;     ///< H-bridge square-wave frequency
    double f_pwm = 10e3;         ///< PWM carrier frequency
    double f_tap = 10e3;         ///< tap re-selection rate

    std::set<int> bypassed_modules;

    int active_module_count() const {
        return module_count - static_cast<int>(bypassed_modules.size());
    }

    /// Original indices of the modules still in service, ascending.
    std::vector<int> active_modules() const;

    /// Throws ConfigError if any field is out of range.
    void validate() const;
};

struct SwitchInventory {
    int bridge = 0;
    int tap = 0;
    int pwm = 0;
};

/// Evenly spaced tap voltages [0 .. v_dc] exposed by the active series
/// string: active_module_count() + 1 entries.
std::vector<double> nominal_tap_ladder(const ConverterConfig& cfg);

/// Copy of cfg with one more module bypassed: its DC terminals shorted and
/// its winding opened, so the string shrinks by one level. Throws on an
/// unknown or already-bypassed index, or when it would empty the string.
ConverterConfig apply_fault_bypass(const ConverterConfig& cfg, int module);

/// Device counts: 4 switches per active bridge, 2*(module_count - 1) tap
/// selector switches (fixed by the as-built ladder, not by later bypasses)
/// and the 2 PWM switches.
SwitchInventory switch_inventory(const ConverterConfig& cfg);

} // namespace dcat
