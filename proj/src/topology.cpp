#include "dcat/topology.hpp"

#include <cmath>

namespace dcat {

namespace {

void require_positive(double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0)
        throw ConfigError(std::string(name) + " must be finite and > 0");
}

void require_non_negative(double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0)
        throw ConfigError(std::string(name) + " must be finite and >= 0");
}

} // namespace

std::vector<int> ConverterConfig::active_modules() const {
    std::vector<int> out;
    out.reserve(static_cast<size_t>(module_count));
    for (int m = 0; m < module_count; ++m)
        if (!bypassed_modules.count(m)) out.push_back(m);
    return out;
}

void ConverterConfig::validate() const {
    if (module_count < 1) throw ConfigError("module_count must be >= 1");
    require_non_negative(v_dc, "v_dc");
    require_positive(c_module, "c_module");
    require_positive(l_leak, "l_leak");
    require_positive(l_mag, "l_mag");
    require_positive(l_load, "l_load");
    require_non_negative(r_winding, "r_winding");
    require_non_negative(r_on_bridge, "r_on_bridge");
    require_non_negative(r_on_tap, "r_on_tap");
    require_non_negative(r_on_pwm, "r_on_pwm");
    require_non_negative(r_load, "r_load");
    if (!std::isfinite(r_batt) || r_batt <= 0.0)
        throw ConfigError("r_batt must be > 0: an ideal source cannot be expressed "
                          "in the explicit network equations");
    require_positive(f_bridge, "f_bridge");
    require_positive(f_pwm, "f_pwm");
    require_positive(f_tap, "f_tap");
    if (f_tap > f_pwm || f_pwm > f_bridge)
        throw ConfigError("switching rates must satisfy f_tap <= f_pwm <= f_bridge");
    for (int m : bypassed_modules)
        if (m < 0 || m >= module_count)
            throw ConfigError("bypassed_modules contains invalid index " + std::to_string(m));
    if (static_cast<int>(bypassed_modules.size()) >= module_count)
        throw ConfigError("at least one module must remain active");
}

std::vector<double> nominal_tap_ladder(const ConverterConfig& cfg) {
    cfg.validate();
    const int levels = cfg.active_module_count();
    std::vector<double> ladder(static_cast<size_t>(levels) + 1);
    for (int k = 0; k <= levels; ++k)
        ladder[static_cast<size_t>(k)] = cfg.v_dc * static_cast<double>(k) / levels;
    return ladder;
}

ConverterConfig apply_fault_bypass(const ConverterConfig& cfg, int module) {
    cfg.validate();
    if (module < 0 || module >= cfg.module_count)
        throw ConfigError("cannot bypass unknown module " + std::to_string(module));
    if (cfg.bypassed_modules.count(module))
        throw ConfigError("module " + std::to_string(module) + " is already bypassed");
    if (cfg.active_module_count() <= 1)
        throw ConfigError("cannot bypass the last active module");
    ConverterConfig out = cfg;
    out.bypassed_modules.insert(module);
    return out;
}

SwitchInventory switch_inventory(const ConverterConfig& cfg) {
    cfg.validate();
    SwitchInventory inv;
    inv.bridge = 4 * cfg.active_module_count();
    inv.tap = 2 * (cfg.module_count - 1);
    inv.pwm = 2;
    return inv;
}

} // namespace dcat
