#include "dcat/modulation.hpp"

#include <algorithm>
#include <cmath>

namespace dcat {

namespace {

double positive_mod(double t, double period) {
    double u = std::fmod(t, period);
    if (u < 0.0) u += period;
    return u;
}

} // namespace

BridgePhase bridge_phase_at(double t, double f_bridge) {
    if (!(f_bridge > 0.0)) throw std::invalid_argument("bridge_phase_at: f_bridge must be > 0");
    const double period = 1.0 / f_bridge;
    const double u = positive_mod(t, period);
    BridgePhase phase;
    phase.polarity = (u < 0.5 * period) ? +1 : -1;
    phase.clamp = false;
    return phase;
}

TapSelection select_taps(double v_ref, const std::vector<double>& ladder) {
    if (ladder.size() < 2)
        throw std::invalid_argument("select_taps: ladder needs at least two taps");
    for (size_t k = 0; k + 1 < ladder.size(); ++k)
        if (!(ladder[k] < ladder[k + 1]))
            throw std::invalid_argument("select_taps: ladder must be strictly increasing");
    if (!std::isfinite(v_ref))
        throw std::invalid_argument("select_taps: reference must be finite");

    const int top = static_cast<int>(ladder.size()) - 1;
    if (v_ref < ladder.front()) return {0, 0, 0.0};
    if (v_ref >= ladder.back()) return {top, top, 1.0};

    const auto it = std::upper_bound(ladder.begin(), ladder.end(), v_ref);
    const int low = static_cast<int>(it - ladder.begin()) - 1;
    const int high = low + 1;
    const double duty = (v_ref - ladder[static_cast<size_t>(low)]) /
                        (ladder[static_cast<size_t>(high)] - ladder[static_cast<size_t>(low)]);
    return {low, high, duty};
}

PwmState pwm_gate_at(double t, const TapSelection& sel, double f_pwm) {
    if (!(f_pwm > 0.0)) throw std::invalid_argument("pwm_gate_at: f_pwm must be > 0");
    if (!(sel.duty >= 0.0 && sel.duty <= 1.0))
        throw std::invalid_argument("pwm_gate_at: duty must be within [0, 1]");
    const double period = 1.0 / f_pwm;
    const double u = positive_mod(t, period);
    return (u < sel.duty * period) ? PwmState::high : PwmState::low;
}

int tap_transition_toggle_count(const TapSelection& prev, const TapSelection& next) {
    auto in_pair = [](int tap, const TapSelection& s) {
        return tap == s.low_tap || tap == s.high_tap;
    };
    int count = 0;
    // taps conducting before but not after
    if (!in_pair(prev.low_tap, next)) ++count;
    if (prev.high_tap != prev.low_tap && !in_pair(prev.high_tap, next)) ++count;
    // taps conducting after but not before
    if (!in_pair(next.low_tap, prev)) ++count;
    if (next.high_tap != next.low_tap && !in_pair(next.high_tap, prev)) ++count;
    return count;
}

void GateDriverParams::validate() const {
    if (!std::isfinite(v_gd) || v_gd <= 0.0) throw ConfigError("v_gd must be > 0");
    if (!std::isfinite(l_mag_gd) || l_mag_gd <= 0.0) throw ConfigError("l_mag_gd must be > 0");
    if (!std::isfinite(c_gs_total) || c_gs_total <= 0.0) throw ConfigError("c_gs_total must be > 0");
    if (!std::isfinite(turns_ratio) || turns_ratio <= 0.0) throw ConfigError("turns_ratio must be > 0");
    if (!std::isfinite(r_loop) || r_loop < 0.0) throw ConfigError("r_loop must be >= 0");
    auto check_time = [](double v, const char* name) {
        if (!std::isfinite(v) || v < 0.0)
            throw ConfigError(std::string(name) + " must be finite and >= 0");
    };
    check_time(t_rise, "t_rise");
    check_time(t_high, "t_high");
    check_time(t_fall, "t_fall");
    check_time(t_zero, "t_zero");
    check_time(t_low, "t_low");
    if (!(period() > 0.0)) throw ConfigError("gate timings must sum to a positive period");
}

GateDriverParams GateDriverParams::for_frequency(double f_gate, double v_gd, double l_mag_gd,
                                                 double c_gs_total, double turns_ratio,
                                                 double r_loop) {
    if (!(f_gate > 0.0)) throw ConfigError("f_gate must be > 0");
    GateDriverParams p;
    p.v_gd = v_gd;
    p.l_mag_gd = l_mag_gd;
    p.c_gs_total = c_gs_total;
    p.turns_ratio = turns_ratio;
    p.r_loop = r_loop;
    const double period = 1.0 / f_gate;
    const double transition = resonant_transition_time(l_mag_gd, c_gs_total);
    p.t_rise = transition;
    p.t_fall = transition;
    p.t_zero = 0.1 * period;
    const double rest = period - 4.0 * transition - p.t_zero;
    if (rest < 0.0)
        throw ConfigError("gate transitions (4 x " + std::to_string(transition) +
                          " s) plus zero clamp exceed the period " + std::to_string(period) + " s");
    p.t_high = 0.5 * rest;
    p.t_low = 0.5 * rest;
    p.validate();
    return p;
}

double gate_waveform_at(double t, const GateDriverParams& p) {
    p.validate();
    const double v = p.v_gd;
    // {duration, start value, end value}
    const double seg[7][3] = {
        {p.t_rise, 0.0, v},  {p.t_high, v, v},   {p.t_fall, v, 0.0},  {p.t_zero, 0.0, 0.0},
        {p.t_fall, 0.0, -v}, {p.t_low, -v, -v},  {p.t_rise, -v, 0.0},
    };
    double u = positive_mod(t, p.period());
    for (const auto& s : seg) {
        if (s[0] > 0.0 && u < s[0])
            return s[1] + (s[2] - s[1]) * (u / s[0]);
        u -= s[0];
    }
    return 0.0; // u landed on the period boundary: the waveform closes at 0
}

double resonant_transition_time(double l_mag_gd, double c_gs_total) {
    if (!(l_mag_gd > 0.0) || !(c_gs_total > 0.0))
        throw std::invalid_argument("resonant_transition_time: inductance and capacitance must be > 0");
    return std::acos(-1.0) * std::sqrt(l_mag_gd * c_gs_total);
}

} // namespace dcat
