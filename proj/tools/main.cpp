#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dcat/engine.hpp"
#include "dcat/io.hpp"

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw dcat::ScenarioError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out)
        throw dcat::ScenarioError("failed while writing '" + path.string() + "'");
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int run_simulate(const std::string& scenario_path, const std::string& out_dir, double dt_override) {
    dcat::Scenario scenario = dcat::load_scenario(scenario_path);
    if (dt_override > 0.0)
        scenario.dt = dt_override;
    const dcat::SimResult result = dcat::simulate(scenario);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    dcat::write_waveform_csv((dir / "waveform.csv").string(), result.waveform);
    write_text(dir / "report.json",
               dcat::report_to_json(result.report, scenario.name).dump(2) + "\n");

    std::cout << scenario.name << ": " << result.waveform.rows() << " samples over "
              << result.report.duration << " s; thd=" << result.report.thd
              << " tracking=" << result.report.rms_tracking_error
              << " V spread=" << result.report.capacitor_spread_final << " V\n";
    return 0;
}

int run_sweep(const std::string& template_path, const std::string& parameter,
              const std::vector<double>& values, const std::string& out_dir, double dt_override) {
    if (values.empty())
        throw dcat::ScenarioError("sweep needs at least one value");
    const dcat::Scenario base = dcat::load_scenario(template_path);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    std::string summary = parameter +
                          ",thd,rms_tracking_error,balance_settling_time,balance_settled,"
                          "capacitor_spread_final\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        dcat::Scenario scenario = base;
        dcat::apply_sweep_value(scenario, parameter, values[i]);
        if (dt_override > 0.0)
            scenario.dt = dt_override;
        scenario.name = base.name + "_" + parameter + "_" + format_value(values[i]);
        const dcat::SimResult result = dcat::simulate(scenario);

        char run_name[32];
        std::snprintf(run_name, sizeof run_name, "run_%03zu", i);
        const fs::path run_dir = dir / run_name;
        fs::create_directories(run_dir);
        write_text(run_dir / "report.json",
                   dcat::report_to_json(result.report, scenario.name).dump(2) + "\n");

        const auto& rep = result.report;
        summary += format_value(values[i]) + "," + format_value(rep.thd) + "," +
                   format_value(rep.rms_tracking_error) + "," +
                   format_value(rep.balance_settling_time) + "," +
                   (rep.balance_settled ? "1" : "0") + "," +
                   format_value(rep.capacitor_spread_final) + "\n";
        std::cout << scenario.name << ": thd=" << rep.thd
                  << " tracking=" << rep.rms_tracking_error << " V\n";
    }
    write_text(dir / "summary.csv", summary);
    return 0;
}

int run_gatedrive(const std::string& params_path, const std::string& out_dir, double dt_override,
                  int periods_override) {
    dcat::GateDriveRun run = dcat::load_gatedrive(params_path);
    if (dt_override > 0.0)
        run.dt = dt_override;
    if (periods_override > 0)
        run.periods = periods_override;
    const dcat::GateDriveResult result =
        dcat::run_gate_driver(run.params, run.periods, run.effective_dt());

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    dcat::write_waveform_csv((dir / "trajectory.csv").string(), result.trajectory);
    write_text(dir / "report.json", dcat::gatedrive_report_to_json(result, run.params).dump(2) + "\n");

    const double ratio =
        result.delivered_total > 0.0 ? result.dissipated_total / result.delivered_total : 0.0;
    std::cout << "gate drive: delivered=" << result.delivered_total
              << " J dissipated=" << result.dissipated_total << " J loss_ratio=" << ratio
              << " rise=" << result.achieved_rise_time << " s\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dc-autotransformer multilevel inverter simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = ".";
    double dt_override = 0.0;

    CLI::App* sim = app.add_subcommand("simulate", "run one scenario, write waveform.csv and report.json");
    sim->add_option("scenario", scenario_path, "scenario JSON file")->required();
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--dt", dt_override, "override the integration step in seconds");

    std::string parameter;
    std::vector<double> values;
    CLI::App* sweep = app.add_subcommand("sweep", "run one scenario per value of a parameter");
    sweep->add_option("template", scenario_path, "scenario JSON file used as template")->required();
    sweep->add_option("--param", parameter, "parameter to sweep")->required();
    sweep->add_option("--values", values, "comma-separated values")->delimiter(',')->required();
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--dt", dt_override, "override the integration step in seconds");

    int periods_override = 0;
    CLI::App* gate = app.add_subcommand("gatedrive", "integrate the resonant gate-drive loop");
    gate->add_option("params", scenario_path, "gate-drive JSON file")->required();
    gate->add_option("--out", out_dir, "output directory");
    gate->add_option("--dt", dt_override, "override the integration step in seconds");
    gate->add_option("--periods", periods_override, "override the number of gate periods");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed())
            return run_simulate(scenario_path, out_dir, dt_override);
        if (sweep->parsed())
            return run_sweep(scenario_path, parameter, values, out_dir, dt_override);
        return run_gatedrive(scenario_path, out_dir, dt_override, periods_override);
    } catch (const dcat::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
