#include "dcat/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace dcat {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(double v, const char* what) {
    if (!std::isfinite(v))
        throw ScenarioError(std::string(what) + " must be finite");
}

} // namespace

// ===========================================================================
// References
// ===========================================================================

double reference_value(const Reference& ref, double t) {
    return std::visit(
        overloaded{
            [](const ConstantReference& r) { return r.value; },
            [t](const SineReference& r) {
                return r.offset + r.amplitude * std::sin(2.0 * std::numbers::pi * r.frequency * t);
            },
            [t](const SquaredSineReference& r) {
                const double s = std::sin(std::numbers::pi * r.frequency * t);
                return r.peak * s * s;
            },
            [t](const TableReference& r) {
                if (t <= r.times.front())
                    return r.values.front();
                if (t >= r.times.back())
                    return r.values.back();
                const auto it = std::upper_bound(r.times.begin(), r.times.end(), t);
                const auto i = static_cast<std::size_t>(it - r.times.begin());
                const double u = (t - r.times[i - 1]) / (r.times[i] - r.times[i - 1]);
                return r.values[i - 1] + u * (r.values[i] - r.values[i - 1]);
            },
        },
        ref);
}

double reference_fundamental(const Reference& ref) {
    return std::visit(overloaded{
                          [](const ConstantReference&) { return 0.0; },
                          [](const SineReference& r) { return r.frequency; },
                          [](const SquaredSineReference& r) { return r.frequency; },
                          [](const TableReference&) { return 0.0; },
                      },
                      ref);
}

void validate_reference(const Reference& ref) {
    std::visit(overloaded{
                   [](const ConstantReference& r) { require_finite(r.value, "reference value"); },
                   [](const SineReference& r) {
                       require_finite(r.amplitude, "reference amplitude");
                       require_finite(r.offset, "reference offset");
                       if (!(r.frequency > 0.0))
                           throw ScenarioError("reference frequency must be > 0");
                   },
                   [](const SquaredSineReference& r) {
                       require_finite(r.peak, "reference peak");
                       if (!(r.frequency > 0.0))
                           throw ScenarioError("reference frequency must be > 0");
                   },
                   [](const TableReference& r) {
                       if (r.times.empty())
                           throw ScenarioError("reference table must not be empty");
                       if (r.times.size() != r.values.size())
                           throw ScenarioError("reference table times and values differ in length");
                       for (std::size_t i = 0; i < r.times.size(); ++i) {
                           require_finite(r.times[i], "reference table time");
                           require_finite(r.values[i], "reference table value");
                           if (i > 0 && !(r.times[i] > r.times[i - 1]))
                               throw ScenarioError("reference table times must be strictly increasing");
                       }
                   },
               },
               ref);
}

// ===========================================================================
// Scenario
// ===========================================================================

double Scenario::effective_dt() const {
    return dt > 0.0 ? dt : 1.0 / (200.0 * config.f_bridge);
}

void Scenario::validate() const {
    config.validate();
    validate_reference(reference);
    if (!(duration > 0.0))
        throw ScenarioError("duration must be > 0");
    if (dt < 0.0 || !std::isfinite(dt))
        throw ScenarioError("dt must be >= 0 and finite");
    const double step = effective_dt();
    if (step > (1.0 + 1e-12) / (50.0 * config.f_bridge))
        throw ScenarioError("dt must be at most 1/(50*f_bridge) to resolve the bridge switching");
    if (duration < step)
        throw ScenarioError("duration must cover at least one integration step");
    if (record_decimation < 1)
        throw ScenarioError("record_decimation must be >= 1");

    const int active = config.active_module_count();
    if (!initial_v_cap.empty()) {
        if (static_cast<int>(initial_v_cap.size()) != active)
            throw ScenarioError("initial_v_cap must list one voltage per active module (expected " +
                                std::to_string(active) + ")");
        for (double v : initial_v_cap)
            require_finite(v, "initial_v_cap entry");
    }

    std::set<int> planned = config.bypassed_modules;
    for (const auto& f : faults) {
        if (!(f.time >= 0.0) || !(f.time <= duration))
            throw ScenarioError("fault time must lie within [0, duration]");
        if (f.module < 0 || f.module >= config.module_count)
            throw ScenarioError("fault module index " + std::to_string(f.module) + " is out of range");
        if (!planned.insert(f.module).second)
            throw ScenarioError("module " + std::to_string(f.module) +
                                " is bypassed more than once across config and faults");
    }
    if (static_cast<int>(planned.size()) >= config.module_count)
        throw ScenarioError("faults would bypass every module; at least one must survive");
}

// ===========================================================================
// Simulation
// ===========================================================================

namespace {

struct PlannedFault {
    long long step = 0;
    int module = 0;
    double time = 0.0;
};

double spread_of(const double* v_cap, int count) {
    double lo = v_cap[0];
    double hi = v_cap[0];
    for (int m = 1; m < count; ++m) {
        lo = std::min(lo, v_cap[m]);
        hi = std::max(hi, v_cap[m]);
    }
    return hi - lo;
}

} // namespace

SimResult simulate(const Scenario& scenario) {
    scenario.validate();

    ConverterConfig cfg = scenario.config;
    const double dt = scenario.effective_dt();
    const long long n_total = std::max<long long>(1, std::llround(scenario.duration / dt));
    const long long n_half = std::max<long long>(1, std::llround(1.0 / (2.0 * cfg.f_bridge * dt)));
    const long long n_pwm = std::max<long long>(1, std::llround(1.0 / (cfg.f_pwm * dt)));
    const long long n_tap = std::max<long long>(1, std::llround(1.0 / (cfg.f_tap * dt)));
    const long long bridge_stride = 2 * n_half;
    const double duration_sim = static_cast<double>(n_total) * dt;

    Network net(cfg);
    std::vector<int> active = net.active_modules();
    const std::vector<int> recorded_modules = active;

    std::vector<double> x(static_cast<std::size_t>(net.state_size()), 0.0);
    if (!scenario.initial_v_cap.empty())
        std::copy(scenario.initial_v_cap.begin(), scenario.initial_v_cap.end(), x.begin());
    else
        std::fill(x.begin(), x.begin() + active.size(), cfg.v_dc / static_cast<double>(active.size()));

    std::vector<double> ladder = nominal_tap_ladder(cfg);
    const double e_stored_initial = net.stored_energy(x.data());

    std::vector<PlannedFault> plan;
    plan.reserve(scenario.faults.size());
    for (const auto& f : scenario.faults) {
        PlannedFault pf;
        pf.step = static_cast<long long>(std::ceil(f.time / dt - 1e-9));
        pf.step = std::clamp<long long>(pf.step, 0, n_total);
        pf.module = f.module;
        pf.time = f.time;
        plan.push_back(pf);
    }
    std::sort(plan.begin(), plan.end(),
              [](const PlannedFault& a, const PlannedFault& b) { return a.step < b.step; });
    std::size_t next_fault = 0;

    TapSelection sel = select_taps(reference_value(scenario.reference, 0.0), ladder);
    long long duty_steps = std::llround(sel.duty * static_cast<double>(n_pwm));
    int prev_polarity = 1;
    PwmState prev_pwm = duty_steps > 0 ? PwmState::high : PwmState::low;

    SwitchEventCounts events;
    EnergyTotals energy;
    double max_residual = 0.0;

    SimResult result;
    Waveform& wf = result.waveform;
    wf.names.push_back("time");
    wf.names.push_back("v_out");
    wf.names.push_back("v_ref");
    for (int m : recorded_modules)
        wf.names.push_back("v_cap" + std::to_string(m));
    wf.names.push_back("i_load");
    for (int m : recorded_modules)
        wf.names.push_back("i_wind" + std::to_string(m));
    wf.names.push_back("tap_low");
    wf.names.push_back("tap_high");
    wf.names.push_back("duty");
    wf.columns.assign(wf.names.size(), {});
    const std::size_t rows = static_cast<std::size_t>(
        (n_total + scenario.record_decimation - 1) / scenario.record_decimation);
    for (auto& col : wf.columns)
        col.reserve(rows);

    const auto position_of = [&active](int module) {
        const auto it = std::find(active.begin(), active.end(), module);
        return it == active.end() ? -1 : static_cast<int>(it - active.begin());
    };

    std::vector<double> k1(x.size()), k2(x.size()), k3(x.size()), k4(x.size()), xt(x.size());

    const auto apply_fault = [&](int module, double t_now) {
        const double e_before = net.stored_energy(x.data());
        const int pos = position_of(module);
        const int n_old = static_cast<int>(active.size());
        cfg = apply_fault_bypass(cfg, module);
        std::vector<double> x_new;
        x_new.reserve(x.size() - 2);
        for (int m = 0; m < n_old; ++m)
            if (m != pos)
                x_new.push_back(x[static_cast<std::size_t>(m)]);
        for (int m = 0; m < n_old; ++m)
            if (m != pos)
                x_new.push_back(x[static_cast<std::size_t>(n_old + m)]);
        x_new.push_back(x[static_cast<std::size_t>(2 * n_old)] -
                        x[static_cast<std::size_t>(n_old + pos)]);
        x_new.push_back(x[static_cast<std::size_t>(2 * n_old + 1)]);
        x = std::move(x_new);
        net = Network(cfg);
        active = net.active_modules();
        ladder = nominal_tap_ladder(cfg);
        energy.fault_dumped += e_before - net.stored_energy(x.data());
        k1.resize(x.size());
        k2.resize(x.size());
        k3.resize(x.size());
        k4.resize(x.size());
        xt.resize(x.size());
        const TapSelection ns = select_taps(reference_value(scenario.reference, t_now), ladder);
        events.tap += tap_transition_toggle_count(sel, ns);
        sel = ns;
        duty_steps = std::llround(sel.duty * static_cast<double>(n_pwm));
    };

    constexpr double rk_w[4] = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};

    for (long long step = 0; step < n_total; ++step) {
        const double t = static_cast<double>(step) * dt;

        while (next_fault < plan.size() && plan[next_fault].step == step) {
            apply_fault(plan[next_fault].module, t);
            ++next_fault;
        }

        if (step % n_tap == 0) {
            const TapSelection ns = select_taps(reference_value(scenario.reference, t), ladder);
            events.tap += tap_transition_toggle_count(sel, ns);
            sel = ns;
            duty_steps = std::llround(sel.duty * static_cast<double>(n_pwm));
        }

        const int polarity = ((step / n_half) % 2 == 0) ? 1 : -1;
        if (polarity != prev_polarity) {
            events.bridge += 4 * static_cast<long long>(active.size());
            prev_polarity = polarity;
        }

        const PwmState pwm = (step % n_pwm) < duty_steps ? PwmState::high : PwmState::low;
        if (pwm != prev_pwm) {
            events.pwm += 2;
            prev_pwm = pwm;
        }
        const int tap = pwm == PwmState::high ? sel.high_tap : sel.low_tap;

        const int n_act = static_cast<int>(active.size());
        if (step % bridge_stride == 0)
            result.balance_trace.push_back({t, spread_of(x.data(), n_act)});

        if (step % scenario.record_decimation == 0) {
            double v_tap = 0.0;
            for (int m = 0; m < tap; ++m)
                v_tap += x[static_cast<std::size_t>(m)];
            const double i_load = x[static_cast<std::size_t>(2 * n_act + 1)];
            std::size_t c = 0;
            wf.columns[c++].push_back(t);
            wf.columns[c++].push_back(v_tap - i_load * (cfg.r_on_tap + cfg.r_on_pwm));
            wf.columns[c++].push_back(reference_value(scenario.reference, t));
            for (int m : recorded_modules) {
                const int pos = position_of(m);
                wf.columns[c++].push_back(pos < 0 ? 0.0 : x[static_cast<std::size_t>(pos)]);
            }
            wf.columns[c++].push_back(i_load);
            for (int m : recorded_modules) {
                const int pos = position_of(m);
                wf.columns[c++].push_back(pos < 0 ? 0.0
                                                  : x[static_cast<std::size_t>(n_act + pos)]);
            }
            wf.columns[c++].push_back(static_cast<double>(sel.low_tap));
            wf.columns[c++].push_back(static_cast<double>(sel.high_tap));
            wf.columns[c++].push_back(sel.duty);
        }

        net.eval(x.data(), polarity, tap, k1.data());
        const auto p1 = net.power_terms(x.data(), k1.data());
        max_residual = std::max(max_residual, std::abs(p1.residual()) / p1.dominant());

        for (std::size_t i = 0; i < x.size(); ++i)
            xt[i] = x[i] + 0.5 * dt * k1[i];
        net.eval(xt.data(), polarity, tap, k2.data());
        const auto p2 = net.power_terms(xt.data(), k2.data());
        for (std::size_t i = 0; i < x.size(); ++i)
            xt[i] = x[i] + 0.5 * dt * k2[i];
        net.eval(xt.data(), polarity, tap, k3.data());
        const auto p3 = net.power_terms(xt.data(), k3.data());
        for (std::size_t i = 0; i < x.size(); ++i)
            xt[i] = x[i] + dt * k3[i];
        net.eval(xt.data(), polarity, tap, k4.data());
        const auto p4 = net.power_terms(xt.data(), k4.data());

        double sum_abs = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            sum_abs += std::abs(x[i]);
        }
        if (!std::isfinite(sum_abs))
            throw DivergenceError("state became non-finite at t = " + std::to_string(t + dt) + " s",
                                  t + dt);

        energy.source +=
            dt * (rk_w[0] * p1.source + rk_w[1] * p2.source + rk_w[2] * p3.source + rk_w[3] * p4.source);
        energy.load +=
            dt * (rk_w[0] * p1.load + rk_w[1] * p2.load + rk_w[2] * p3.load + rk_w[3] * p4.load);
        energy.dissipated += dt * (rk_w[0] * p1.dissipated + rk_w[1] * p2.dissipated +
                                   rk_w[2] * p3.dissipated + rk_w[3] * p4.dissipated);
    }

    while (next_fault < plan.size() && plan[next_fault].step == n_total) {
        apply_fault(plan[next_fault].module, duration_sim);
        ++next_fault;
    }
    if (n_total % bridge_stride == 0)
        result.balance_trace.push_back(
            {duration_sim, spread_of(x.data(), static_cast<int>(active.size()))});

    energy.stored_delta = net.stored_energy(x.data()) - e_stored_initial;

    unpack_state(x, static_cast<int>(active.size()), result.final_state);
    result.final_active_modules = active;

    RunReport& rep = result.report;
    rep.duration = duration_sim;
    rep.dt = dt;
    rep.switching_event_counts = events;
    rep.energy = energy;
    rep.power_balance_max_residual = max_residual;
    rep.capacitor_spread_final =
        spread_of(result.final_state.v_cap.data(), static_cast<int>(active.size()));

    rep.balance_settled = false;
    rep.balance_settling_time = duration_sim;
    const double settle_band = 0.01 * cfg.v_dc;
    for (const auto& s : result.balance_trace) {
        if (s.spread < settle_band) {
            rep.balance_settled = true;
            rep.balance_settling_time = s.time;
            break;
        }
    }

    if (wf.rows() >= 2) {
        const double dt_s = wf.sample_dt();
        const auto& v_out = wf.channel("v_out");
        const auto& v_ref = wf.channel("v_ref");

        const double f0 = reference_fundamental(scenario.reference);
        const double covered = static_cast<double>(wf.rows()) * dt_s;
        if (f0 > 0.0 && covered * f0 >= 1.0 - 1e-9 && 2.0 * f0 * dt_s < 1.0)
            rep.thd = thd(v_out, dt_s, f0);

        const auto window = static_cast<std::size_t>(
            std::max<long long>(1, std::llround(1.0 / (cfg.f_pwm * dt_s))));
        if (wf.rows() > 2 * window)
            rep.rms_tracking_error = tracking_error(v_out, v_ref, dt_s, cfg.f_pwm);

        rep.conduction_loss = conduction_loss(wf, cfg);
    }

    return result;
}

// ===========================================================================
// Gate driver
// ===========================================================================

namespace {

void gd_rk4_step(GateDriverState& st, const GateDriverParams& p, int polarity, double h) {
    const auto f = [&p, polarity](const GateDriverState& s) {
        return gate_driver_derivatives(s, p, polarity);
    };
    const auto advance = [&st](const GateDriverDerivative& d, double scale) {
        GateDriverState s = st;
        s.v_gate += scale * d.dv_gate;
        s.i_lmag += scale * d.di_lmag;
        return s;
    };
    const GateDriverDerivative d1 = f(st);
    const GateDriverDerivative d2 = f(advance(d1, 0.5 * h));
    const GateDriverDerivative d3 = f(advance(d2, 0.5 * h));
    const GateDriverDerivative d4 = f(advance(d3, h));
    st.v_gate += h / 6.0 * (d1.dv_gate + 2.0 * d2.dv_gate + 2.0 * d3.dv_gate + d4.dv_gate);
    st.i_lmag += h / 6.0 * (d1.di_lmag + 2.0 * d2.di_lmag + 2.0 * d3.di_lmag + d4.di_lmag);
    st.dissipated_energy += h / 6.0 * (d1.d_dissipated + 2.0 * d2.d_dissipated +
                                       2.0 * d3.d_dissipated + d4.d_dissipated);
    st.delivered_energy +=
        h / 6.0 * (d1.d_delivered + 2.0 * d2.d_delivered + 2.0 * d3.d_delivered + d4.d_delivered);
}

} // namespace

GateDriveResult run_gate_driver(const GateDriverParams& p, int periods, double dt) {
    p.validate();
    if (periods < 1)
        throw ScenarioError("periods must be >= 1");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ScenarioError("dt must be > 0 and finite");
    if (dt > p.t_rise / 20.0 * (1.0 + 1e-12))
        throw ScenarioError("dt too coarse: the rising transition needs at least 20 steps");

    struct Segment {
        double duration;
        int polarity;
        bool clamp;
    };
    const Segment schedule[7] = {
        {p.t_rise, 1, false}, {p.t_high, 1, true},  {p.t_fall, 1, false}, {p.t_zero, 0, true},
        {p.t_fall, -1, false}, {p.t_low, -1, true}, {p.t_rise, -1, false},
    };

    GateDriveResult result;
    result.rail = p.rail();

    Waveform& wf = result.trajectory;
    wf.names = {"time",  "v_gate",           "i_lmag",          "supply_polarity",
                "clamp", "dissipated_energy", "delivered_energy"};
    wf.columns.assign(wf.names.size(), {});

    GateDriverState st;
    double t = 0.0;
    const auto record = [&wf, &t, &st](int polarity, bool clamp) {
        wf.columns[0].push_back(t);
        wf.columns[1].push_back(st.v_gate);
        wf.columns[2].push_back(st.i_lmag);
        wf.columns[3].push_back(static_cast<double>(polarity));
        wf.columns[4].push_back(clamp ? 1.0 : 0.0);
        wf.columns[5].push_back(st.dissipated_energy);
        wf.columns[6].push_back(st.delivered_energy);
    };
    record(schedule[0].polarity, schedule[0].clamp);

    const double rise_threshold = 0.999 * result.rail;
    bool rise_found = false;
    double first_rise_peak_v = -1.0;
    double first_rise_peak_t = 0.0;

    for (int period = 0; period < periods; ++period) {
        const double delivered0 = st.delivered_energy;
        const double dissipated0 = st.dissipated_energy;
        for (int si = 0; si < 7; ++si) {
            const Segment& seg = schedule[si];
            if (seg.duration <= 0.0)
                continue;
            const auto n = static_cast<long long>(std::ceil(seg.duration / dt - 1e-9));
            const double h = seg.duration / static_cast<double>(n);
            st.clamp_active = seg.clamp;
            for (long long i = 0; i < n; ++i) {
                gd_rk4_step(st, p, seg.polarity, h);
                t += h;
                record(seg.polarity, seg.clamp);
                if (!std::isfinite(st.v_gate) || !std::isfinite(st.i_lmag))
                    throw DivergenceError("gate state became non-finite at t = " +
                                              std::to_string(t) + " s",
                                          t);
                if (period == 0 && si == 0) {
                    if (!rise_found && st.v_gate >= rise_threshold) {
                        rise_found = true;
                        result.achieved_rise_time = t;
                    }
                    if (st.v_gate > first_rise_peak_v) {
                        first_rise_peak_v = st.v_gate;
                        first_rise_peak_t = t;
                    }
                }
            }
        }
        result.periods.push_back(
            {st.delivered_energy - delivered0, st.dissipated_energy - dissipated0});
    }

    if (!rise_found)
        result.achieved_rise_time = first_rise_peak_t;
    result.delivered_total = st.delivered_energy;
    result.dissipated_total = st.dissipated_energy;
    return result;
}

} // namespace dcat
