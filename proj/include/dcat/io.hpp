#pragma once

#include <string>

#include "json.hpp"

#include "dcat/engine.hpp"

namespace dcat {

// ===========================================================================
// CSV
// ===========================================================================

/// Writes the waveform as CSV: header row of channel names, one row per
/// sample, values printed with %.17g so a read back is bit-exact.
void write_waveform_csv(const std::string& path, const Waveform& waveform);

Waveform read_waveform_csv(const std::string& path);

// ===========================================================================
// Scenario files
// ===========================================================================

/// Parses a scenario object. Unknown fields are rejected and every diagnostic
/// names the offending field.
Scenario scenario_from_json(const nlohmann::json& j);

/// Loads a scenario file; a missing "name" falls back to the file stem.
Scenario load_scenario(const std::string& path);

/// Applies one swept value to a scenario. Accepts any numeric converter
/// field, module_count (clears initial_v_cap), duration, dt,
/// record_decimation, and initial_unbalance (relative spread applied to the
/// capacitor voltages in an alternating high/low pattern).
void apply_sweep_value(Scenario& scenario, const std::string& parameter, double value);

// ===========================================================================
// Reports
// ===========================================================================

nlohmann::ordered_json report_to_json(const RunReport& report, const std::string& name);
RunReport report_from_json(const nlohmann::json& j);

// ===========================================================================
// Gate-drive runs
// ===========================================================================

struct GateDriveRun {
    GateDriverParams params;
    int periods = 10;
    double dt = 0.0; ///< 0 selects t_rise / 50

    double effective_dt() const { return dt > 0.0 ? dt : params.t_rise / 50.0; }
};

GateDriveRun gatedrive_from_json(const nlohmann::json& j);
GateDriveRun load_gatedrive(const std::string& path);

nlohmann::ordered_json gatedrive_report_to_json(const GateDriveResult& result,
                                                const GateDriverParams& params);

} // namespace dcat
