#include "dcat/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dcat {

Network::Network(const ConverterConfig& cfg) : cfg_(cfg) {
    cfg.validate();
    active_ = cfg.active_modules();
    count_ = static_cast<int>(active_.size());
    inv_c_ = 1.0 / cfg.c_module;
    inv_l_leak_ = 1.0 / cfg.l_leak;
    inv_l_mag_ = 1.0 / cfg.l_mag;
    inv_l_load_ = 1.0 / cfg.l_load;
    inv_r_batt_ = 1.0 / cfg.r_batt;
    r_wind_eff_ = cfg.r_winding + 2.0 * cfg.r_on_bridge;
    r_load_path_ = cfg.r_load + cfg.r_on_tap + cfg.r_on_pwm;
    star_denom_ = inv_l_mag_ + count_ * inv_l_leak_;
}

void Network::eval(const double* x, int polarity, int conducting_tap, double* dxdt) const {
    const double* v_cap = x;
    const double* i_wind = x + count_;
    const double i_mag = x[2 * count_];
    const double i_load = x[2 * count_ + 1];
    const double s = static_cast<double>(polarity);

    double v_cap_sum = 0.0;
    for (int m = 0; m < count_; ++m)
        v_cap_sum += v_cap[m];
    const double i_batt = (cfg_.v_dc - v_cap_sum) * inv_r_batt_;

    // Star node voltage from the winding branch equations with the
    // magnetizing inductance as the only shunt path.
    double drive_sum = 0.0;
    for (int m = 0; m < count_; ++m)
        drive_sum += s * v_cap[m] - r_wind_eff_ * i_wind[m];
    const double v_star = drive_sum * inv_l_leak_ / star_denom_;

    double* dv_cap = dxdt;
    double* di_wind = dxdt + count_;
    double v_tap = 0.0;
    for (int m = 0; m < count_; ++m) {
        di_wind[m] = (s * v_cap[m] - r_wind_eff_ * i_wind[m] - v_star) * inv_l_leak_;
        const double i_tap_draw = (m < conducting_tap) ? i_load : 0.0;
        dv_cap[m] = (i_batt - s * i_wind[m] - i_tap_draw) * inv_c_;
        if (m < conducting_tap)
            v_tap += v_cap[m];
    }
    dxdt[2 * count_] = v_star * inv_l_mag_;
    dxdt[2 * count_ + 1] = (v_tap - i_load * r_load_path_) * inv_l_load_;
    (void)i_mag;
}

Network::PowerTerms Network::power_terms(const double* x, const double* dxdt) const {
    const double* v_cap = x;
    const double* i_wind = x + count_;
    const double i_mag = x[2 * count_];
    const double i_load = x[2 * count_ + 1];

    double v_cap_sum = 0.0;
    for (int m = 0; m < count_; ++m)
        v_cap_sum += v_cap[m];
    const double i_batt = (cfg_.v_dc - v_cap_sum) * inv_r_batt_;

    PowerTerms p;
    p.i_batt = i_batt;
    p.source = cfg_.v_dc * i_batt;
    p.load = i_load * i_load * cfg_.r_load;
    double winding_loss = 0.0;
    for (int m = 0; m < count_; ++m)
        winding_loss += i_wind[m] * i_wind[m];
    p.dissipated = i_batt * i_batt * cfg_.r_batt + winding_loss * r_wind_eff_ +
                   i_load * i_load * (cfg_.r_on_tap + cfg_.r_on_pwm);
    double stored = 0.0;
    for (int m = 0; m < count_; ++m) {
        stored += cfg_.c_module * v_cap[m] * dxdt[m];
        stored += cfg_.l_leak * i_wind[m] * dxdt[count_ + m];
    }
    stored += cfg_.l_mag * i_mag * dxdt[2 * count_];
    stored += cfg_.l_load * i_load * dxdt[2 * count_ + 1];
    p.stored = stored;
    return p;
}

double Network::PowerTerms::dominant() const {
    return std::max({std::abs(source), std::abs(load), std::abs(dissipated), std::abs(stored), 1.0});
}

double Network::stored_energy(const double* x) const {
    double e = 0.0;
    for (int m = 0; m < count_; ++m) {
        e += 0.5 * cfg_.c_module * x[m] * x[m];
        e += 0.5 * cfg_.l_leak * x[count_ + m] * x[count_ + m];
    }
    e += 0.5 * cfg_.l_mag * x[2 * count_] * x[2 * count_];
    e += 0.5 * cfg_.l_load * x[2 * count_ + 1] * x[2 * count_ + 1];
    return e;
}

void pack_state(const SimState& state, std::vector<double>& x) {
    const int n = static_cast<int>(state.v_cap.size());
    x.resize(2 * n + 2);
    std::copy(state.v_cap.begin(), state.v_cap.end(), x.begin());
    std::copy(state.i_wind.begin(), state.i_wind.end(), x.begin() + n);
    x[2 * n] = state.i_mag;
    x[2 * n + 1] = state.i_load;
}

void unpack_state(const std::vector<double>& x, int active_count, SimState& state) {
    state.v_cap.assign(x.begin(), x.begin() + active_count);
    state.i_wind.assign(x.begin() + active_count, x.begin() + 2 * active_count);
    state.i_mag = x[2 * active_count];
    state.i_load = x[2 * active_count + 1];
}

StateDerivative derivatives(const SimState& state, const ConverterConfig& cfg,
                            const BridgePhase& phase, const TapSelection& sel,
                            PwmState pwm_state) {
    Network net(cfg);
    if (static_cast<int>(state.v_cap.size()) != net.active_count() ||
        state.i_wind.size() != state.v_cap.size())
        throw std::invalid_argument("state size does not match the active module count");

    const int polarity = phase.clamp ? 0 : phase.polarity;
    const int tap = (pwm_state == PwmState::high) ? sel.high_tap : sel.low_tap;

    std::vector<double> x;
    pack_state(state, x);
    std::vector<double> dxdt(x.size());
    net.eval(x.data(), polarity, tap, dxdt.data());

    StateDerivative d;
    const int n = net.active_count();
    d.dv_cap.assign(dxdt.begin(), dxdt.begin() + n);
    d.di_wind.assign(dxdt.begin() + n, dxdt.begin() + 2 * n);
    d.di_mag = dxdt[2 * n];
    d.di_load = dxdt[2 * n + 1];

    const auto p = net.power_terms(x.data(), dxdt.data());
    d.p_source = p.source;
    d.p_load = p.load;
    d.p_dissipated = p.dissipated;
    d.p_stored = p.stored;
    d.i_batt = p.i_batt;
    return d;
}

std::string to_string(const DeviceId& id) {
    switch (id.kind) {
    case DeviceId::Kind::tap:
        return "tap[" + std::to_string(id.index) + "]";
    case DeviceId::Kind::pwm_high:
        return "pwm_high";
    case DeviceId::Kind::pwm_low:
        return "pwm_low";
    }
    return "?";
}

std::array<DeviceId, 2> conduction_path_devices(const TapSelection& sel, PwmState pwm_state) {
    if (pwm_state == PwmState::high)
        return {DeviceId{DeviceId::Kind::tap, sel.high_tap}, DeviceId{DeviceId::Kind::pwm_high, 0}};
    return {DeviceId{DeviceId::Kind::tap, sel.low_tap}, DeviceId{DeviceId::Kind::pwm_low, 0}};
}

GateDriverDerivative gate_driver_derivatives(const GateDriverState& state,
                                             const GateDriverParams& p, int supply_polarity) {
    GateDriverDerivative d;
    if (state.clamp_active)
        return d;
    const double e = supply_polarity * p.v_gd * p.turns_ratio;
    d.di_lmag = (e - p.r_loop * state.i_lmag - state.v_gate) / p.l_mag_gd;
    d.dv_gate = state.i_lmag / p.c_gs_total;
    d.d_dissipated = p.r_loop * state.i_lmag * state.i_lmag;
    d.d_delivered = std::max(e * state.i_lmag, 0.0);
    return d;
}

} // namespace dcat
