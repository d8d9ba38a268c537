#include "dcat/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>

namespace dcat {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ScenarioError("scenario field '" + path + "': " + message);
}

std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw ScenarioError("unknown field '" + join_path(path, it.key()) + "'");
    }
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number())
        fail(path, "expected a number");
    return v.get<double>();
}

int as_integer(const json& v, const std::string& path) {
    if (!v.is_number_integer())
        fail(path, "expected an integer");
    return v.get<int>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string())
        fail(path, "expected a string");
    return v.get<std::string>();
}

std::vector<double> as_number_array(const json& v, const std::string& path) {
    if (!v.is_array())
        fail(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

void read_number(const json& j, const std::string& path, const char* key, double& target) {
    if (j.contains(key))
        target = as_number(j.at(key), join_path(path, key));
}

double require_number(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key))
        fail(join_path(path, key), "required field is missing");
    return as_number(j.at(key), join_path(path, key));
}

ConverterConfig parse_config(const json& j, const std::string& path) {
    if (!j.is_object())
        fail(path, "expected an object");
    check_keys(j, path,
               {"module_count", "v_dc", "c_module", "l_leak", "l_mag", "r_winding", "r_on_bridge",
                "r_on_tap", "r_on_pwm", "r_batt", "r_load", "l_load", "f_bridge", "f_pwm", "f_tap",
                "bypassed_modules"});
    ConverterConfig c;
    if (j.contains("module_count"))
        c.module_count = as_integer(j.at("module_count"), join_path(path, "module_count"));
    read_number(j, path, "v_dc", c.v_dc);
    read_number(j, path, "c_module", c.c_module);
    read_number(j, path, "l_leak", c.l_leak);
    read_number(j, path, "l_mag", c.l_mag);
    read_number(j, path, "r_winding", c.r_winding);
    read_number(j, path, "r_on_bridge", c.r_on_bridge);
    read_number(j, path, "r_on_tap", c.r_on_tap);
    read_number(j, path, "r_on_pwm", c.r_on_pwm);
    read_number(j, path, "r_batt", c.r_batt);
    read_number(j, path, "r_load", c.r_load);
    read_number(j, path, "l_load", c.l_load);
    read_number(j, path, "f_bridge", c.f_bridge);
    read_number(j, path, "f_pwm", c.f_pwm);
    read_number(j, path, "f_tap", c.f_tap);
    if (j.contains("bypassed_modules")) {
        const auto& arr = j.at("bypassed_modules");
        const std::string p = join_path(path, "bypassed_modules");
        if (!arr.is_array())
            fail(p, "expected an array of module indices");
        for (std::size_t i = 0; i < arr.size(); ++i)
            c.bypassed_modules.insert(as_integer(arr[i], p + "[" + std::to_string(i) + "]"));
    }
    return c;
}

Reference parse_reference(const json& j, const std::string& path) {
    if (!j.is_object())
        fail(path, "expected an object");
    if (!j.contains("type"))
        fail(join_path(path, "type"), "required field is missing");
    const std::string type = as_string(j.at("type"), join_path(path, "type"));
    if (type == "constant") {
        check_keys(j, path, {"type", "value"});
        return ConstantReference{require_number(j, path, "value")};
    }
    if (type == "sine") {
        check_keys(j, path, {"type", "amplitude", "frequency", "offset"});
        SineReference r;
        r.amplitude = require_number(j, path, "amplitude");
        r.frequency = require_number(j, path, "frequency");
        read_number(j, path, "offset", r.offset);
        return r;
    }
    if (type == "squared_sine") {
        check_keys(j, path, {"type", "peak", "frequency"});
        SquaredSineReference r;
        r.peak = require_number(j, path, "peak");
        r.frequency = require_number(j, path, "frequency");
        return r;
    }
    if (type == "table") {
        check_keys(j, path, {"type", "times", "values"});
        TableReference r;
        if (!j.contains("times") || !j.contains("values"))
            fail(path, "table reference needs 'times' and 'values'");
        r.times = as_number_array(j.at("times"), join_path(path, "times"));
        r.values = as_number_array(j.at("values"), join_path(path, "values"));
        return r;
    }
    fail(join_path(path, "type"),
         "unknown reference type '" + type + "' (expected constant, sine, squared_sine or table)");
}

} // namespace

Scenario scenario_from_json(const json& j) {
    if (!j.is_object())
        throw ScenarioError("scenario: expected a JSON object");
    check_keys(j, "",
               {"name", "config", "reference", "duration", "dt", "record_decimation",
                "initial_v_cap", "faults"});
    Scenario s;
    if (j.contains("name"))
        s.name = as_string(j.at("name"), "name");
    if (j.contains("config"))
        s.config = parse_config(j.at("config"), "config");
    if (j.contains("reference"))
        s.reference = parse_reference(j.at("reference"), "reference");
    s.duration = require_number(j, "", "duration");
    read_number(j, "", "dt", s.dt);
    if (j.contains("record_decimation"))
        s.record_decimation = as_integer(j.at("record_decimation"), "record_decimation");
    if (j.contains("initial_v_cap"))
        s.initial_v_cap = as_number_array(j.at("initial_v_cap"), "initial_v_cap");
    if (j.contains("faults")) {
        const auto& arr = j.at("faults");
        if (!arr.is_array())
            fail("faults", "expected an array of {time, module} objects");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = "faults[" + std::to_string(i) + "]";
            const auto& f = arr[i];
            if (!f.is_object())
                fail(p, "expected an object");
            check_keys(f, p, {"time", "module"});
            FaultEvent ev;
            ev.time = require_number(f, p, "time");
            if (!f.contains("module"))
                fail(join_path(p, "module"), "required field is missing");
            ev.module = as_integer(f.at("module"), join_path(p, "module"));
            s.faults.push_back(ev);
        }
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ScenarioError("cannot open scenario file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError("invalid JSON in '" + path + "': " + e.what());
    }
    Scenario s = scenario_from_json(j);
    if (!j.contains("name"))
        s.name = std::filesystem::path(path).stem().string();
    return s;
}

void apply_sweep_value(Scenario& scenario, const std::string& parameter, double value) {
    static const std::map<std::string, double ConverterConfig::*> numeric_fields = {
        {"v_dc", &ConverterConfig::v_dc},
        {"c_module", &ConverterConfig::c_module},
        {"l_leak", &ConverterConfig::l_leak},
        {"l_mag", &ConverterConfig::l_mag},
        {"r_winding", &ConverterConfig::r_winding},
        {"r_on_bridge", &ConverterConfig::r_on_bridge},
        {"r_on_tap", &ConverterConfig::r_on_tap},
        {"r_on_pwm", &ConverterConfig::r_on_pwm},
        {"r_batt", &ConverterConfig::r_batt},
        {"r_load", &ConverterConfig::r_load},
        {"l_load", &ConverterConfig::l_load},
        {"f_bridge", &ConverterConfig::f_bridge},
        {"f_pwm", &ConverterConfig::f_pwm},
        {"f_tap", &ConverterConfig::f_tap},
    };

    if (const auto it = numeric_fields.find(parameter); it != numeric_fields.end()) {
        scenario.config.*(it->second) = value;
        return;
    }
    const auto as_int = [&parameter](double v) {
        const auto n = static_cast<int>(std::llround(v));
        if (static_cast<double>(n) != v)
            throw ScenarioError("sweep parameter '" + parameter + "' needs integer values");
        return n;
    };
    if (parameter == "module_count") {
        scenario.config.module_count = as_int(value);
        scenario.initial_v_cap.clear();
        return;
    }
    if (parameter == "duration") {
        scenario.duration = value;
        return;
    }
    if (parameter == "dt") {
        scenario.dt = value;
        return;
    }
    if (parameter == "record_decimation") {
        scenario.record_decimation = as_int(value);
        return;
    }
    if (parameter == "initial_unbalance") {
        const int n = scenario.config.active_module_count();
        const double nominal = scenario.config.v_dc / static_cast<double>(n);
        scenario.initial_v_cap.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double sign = (i % 2 == 0) ? 0.5 : -0.5;
            scenario.initial_v_cap[static_cast<std::size_t>(i)] = nominal * (1.0 + sign * value);
        }
        return;
    }
    throw ScenarioError("unknown sweep parameter '" + parameter + "'");
}

// ===========================================================================
// CSV
// ===========================================================================

void write_waveform_csv(const std::string& path, const Waveform& waveform) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ScenarioError("cannot open '" + path + "' for writing");
    for (std::size_t c = 0; c < waveform.names.size(); ++c) {
        if (c > 0)
            out << ',';
        out << waveform.names[c];
    }
    out << '\n';
    char buf[40];
    for (std::size_t r = 0; r < waveform.rows(); ++r) {
        for (std::size_t c = 0; c < waveform.columns.size(); ++c) {
            if (c > 0)
                out << ',';
            std::snprintf(buf, sizeof buf, "%.17g", waveform.columns[c][r]);
            out << buf;
        }
        out << '\n';
    }
    if (!out)
        throw ScenarioError("failed while writing '" + path + "'");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

} // namespace

Waveform read_waveform_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ScenarioError("cannot open waveform file '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw ScenarioError("waveform file '" + path + "' is empty");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    Waveform wf;
    wf.names = split_csv_line(line);
    if (wf.names.empty())
        throw ScenarioError("waveform file '" + path + "' has no header");
    wf.columns.assign(wf.names.size(), {});
    std::size_t row = 1;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != wf.names.size())
            throw ScenarioError("waveform file '" + path + "' row " + std::to_string(row) +
                                " has " + std::to_string(fields.size()) + " fields, expected " +
                                std::to_string(wf.names.size()));
        for (std::size_t c = 0; c < fields.size(); ++c) {
            char* end = nullptr;
            const double v = std::strtod(fields[c].c_str(), &end);
            if (end == fields[c].c_str() || *end != '\0')
                throw ScenarioError("waveform file '" + path + "' row " + std::to_string(row) +
                                    ": '" + fields[c] + "' is not a number");
            wf.columns[c].push_back(v);
        }
        ++row;
    }
    return wf;
}

// ===========================================================================
// Reports
// ===========================================================================

nlohmann::ordered_json report_to_json(const RunReport& report, const std::string& name) {
    nlohmann::ordered_json j;
    j["scenario"] = name;
    j["thd"] = report.thd;
    j["rms_tracking_error"] = report.rms_tracking_error;
    j["capacitor_spread_final"] = report.capacitor_spread_final;
    j["balance_settling_time"] = report.balance_settling_time;
    j["balance_settled"] = report.balance_settled;
    j["conduction_loss"] = report.conduction_loss;
    nlohmann::ordered_json ev;
    ev["bridge"] = report.switching_event_counts.bridge;
    ev["tap"] = report.switching_event_counts.tap;
    ev["pwm"] = report.switching_event_counts.pwm;
    j["switching_event_counts"] = ev;
    nlohmann::ordered_json ge;
    ge["delivered"] = report.gate_energy.delivered;
    ge["dissipated"] = report.gate_energy.dissipated;
    j["gate_energy"] = ge;
    nlohmann::ordered_json en;
    en["source"] = report.energy.source;
    en["load"] = report.energy.load;
    en["dissipated"] = report.energy.dissipated;
    en["stored_delta"] = report.energy.stored_delta;
    en["fault_dumped"] = report.energy.fault_dumped;
    j["energy"] = en;
    j["power_balance_max_residual"] = report.power_balance_max_residual;
    j["duration"] = report.duration;
    j["dt"] = report.dt;
    return j;
}

RunReport report_from_json(const nlohmann::json& j) {
    try {
        RunReport r;
        r.thd = j.at("thd").get<double>();
        r.rms_tracking_error = j.at("rms_tracking_error").get<double>();
        r.capacitor_spread_final = j.at("capacitor_spread_final").get<double>();
        r.balance_settling_time = j.at("balance_settling_time").get<double>();
        r.balance_settled = j.at("balance_settled").get<bool>();
        r.conduction_loss = j.at("conduction_loss").get<double>();
        const auto& ev = j.at("switching_event_counts");
        r.switching_event_counts.bridge = ev.at("bridge").get<std::int64_t>();
        r.switching_event_counts.tap = ev.at("tap").get<std::int64_t>();
        r.switching_event_counts.pwm = ev.at("pwm").get<std::int64_t>();
        const auto& ge = j.at("gate_energy");
        r.gate_energy.delivered = ge.at("delivered").get<double>();
        r.gate_energy.dissipated = ge.at("dissipated").get<double>();
        const auto& en = j.at("energy");
        r.energy.source = en.at("source").get<double>();
        r.energy.load = en.at("load").get<double>();
        r.energy.dissipated = en.at("dissipated").get<double>();
        r.energy.stored_delta = en.at("stored_delta").get<double>();
        r.energy.fault_dumped = en.at("fault_dumped").get<double>();
        r.power_balance_max_residual = j.at("power_balance_max_residual").get<double>();
        r.duration = j.at("duration").get<double>();
        r.dt = j.at("dt").get<double>();
        return r;
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("malformed report JSON: ") + e.what());
    }
}

// ===========================================================================
// Gate-drive runs
// ===========================================================================

GateDriveRun gatedrive_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw ScenarioError("gate-drive parameters: expected a JSON object");
    check_keys(j, "",
               {"v_gd", "l_mag_gd", "c_gs_total", "turns_ratio", "r_loop", "f_gate", "periods",
                "dt"});
    GateDriverParams defaults;
    double v_gd = defaults.v_gd;
    double l_mag_gd = defaults.l_mag_gd;
    double c_gs_total = defaults.c_gs_total;
    double turns_ratio = defaults.turns_ratio;
    double r_loop = defaults.r_loop;
    read_number(j, "", "v_gd", v_gd);
    read_number(j, "", "l_mag_gd", l_mag_gd);
    read_number(j, "", "c_gs_total", c_gs_total);
    read_number(j, "", "turns_ratio", turns_ratio);
    read_number(j, "", "r_loop", r_loop);
    const double f_gate = require_number(j, "", "f_gate");
    GateDriveRun run;
    run.params = GateDriverParams::for_frequency(f_gate, v_gd, l_mag_gd, c_gs_total, turns_ratio,
                                                 r_loop);
    if (j.contains("periods"))
        run.periods = as_integer(j.at("periods"), "periods");
    read_number(j, "", "dt", run.dt);
    return run;
}

GateDriveRun load_gatedrive(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ScenarioError("cannot open gate-drive file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError("invalid JSON in '" + path + "': " + e.what());
    }
    return gatedrive_from_json(j);
}

nlohmann::ordered_json gatedrive_report_to_json(const GateDriveResult& result,
                                                const GateDriverParams& params) {
    nlohmann::ordered_json j;
    j["rail"] = result.rail;
    j["delivered_total"] = result.delivered_total;
    j["dissipated_total"] = result.dissipated_total;
    j["loss_ratio"] =
        result.delivered_total > 0.0 ? result.dissipated_total / result.delivered_total : 0.0;
    j["achieved_rise_time"] = result.achieved_rise_time;
    j["expected_rise_time"] = resonant_transition_time(params.l_mag_gd, params.c_gs_total);
    nlohmann::ordered_json periods = nlohmann::ordered_json::array();
    for (const auto& p : result.periods) {
        nlohmann::ordered_json e;
        e["delivered"] = p.delivered;
        e["dissipated"] = p.dissipated;
        periods.push_back(e);
    }
    j["periods"] = periods;
    return j;
}

} // namespace dcat
