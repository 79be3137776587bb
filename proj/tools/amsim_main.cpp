// Scenario CLI for the aerial-manipulator simulation library.
//
// Subcommands: sim, ik, alloc, stiffness-fit, workspace, validate.
// Usage errors exit 2; domain errors exit 1 after printing a single
// machine-parsable line "error code=<Code> message=..." on stderr.

#include <fstream>
#include <iostream>
#include <map>
#include <vector>

#include <CLI11.hpp>

#include "amsim/amsim.hpp"

namespace {

int fail(const amsim::Error& e) {
    std::string msg = e.what();
    const std::string name = amsim::error_code_name(e.code());
    if (msg.rfind(name + ": ", 0) == 0) msg = msg.substr(name.size() + 2);
    std::cerr << "error code=" << name << " message=\"" << msg << "\"\n";
    return 1;
}

int run_sim(const std::string& config_path, const std::string& out_path, int decimate) {
    amsim::ScenarioConfig cfg = amsim::load_scenario(config_path);
    if (decimate > 0) cfg.log_decimate = decimate;
    std::ofstream csv(out_path);
    if (!csv) throw amsim::Error(amsim::ErrorCode::IoError, "cannot write " + out_path);
    amsim::RunSummary sum = amsim::run_scenario(cfg, &csv);
    sum.print(std::cout);
    std::cout << "log=" << out_path << "\n";
    if (sum.aborted) {
        std::cerr << "error code=" << sum.abort_code << " message=\"run aborted\"\n";
        return 1;
    }
    return 0;
}

int run_ik(double x, double y, double z, const std::string& config_path) {
    amsim::DeltaGeometry geom;
    if (!config_path.empty()) geom = amsim::load_scenario(config_path).delta;
    const amsim::JointAngles th = amsim::inverse_kinematics({x, y, z}, geom);
    std::cout << "theta1=" << amsim::format_double(th[0])
              << " theta2=" << amsim::format_double(th[1])
              << " theta3=" << amsim::format_double(th[2]) << "\n";
    return 0;
}

int run_alloc(double fx, double fz, double mx, double my, double mz,
              const std::string& config_path) {
    amsim::PlatformGeometry geom;
    if (!config_path.empty()) geom = amsim::load_scenario(config_path).platform;
    const amsim::ActuatorCommand c = amsim::allocate({fx, fz, mx, my, mz}, geom);
    std::cout << "t12=" << amsim::format_double(c.t12) << " t34=" << amsim::format_double(c.t34)
              << " t5=" << amsim::format_double(c.t5)
              << " alpha0=" << amsim::format_double(c.alpha0)
              << " alpha1=" << amsim::format_double(c.alpha1);
    for (int i = 0; i < 5; ++i)
        std::cout << " omega" << i + 1 << "=" << amsim::format_double(c.omega[static_cast<std::size_t>(i)]);
    std::cout << " saturated=" << (c.saturated ? 1 : 0) << "\n";
    return 0;
}

int run_stiffness_fit(const std::string& csv_path) {
    const auto samples = amsim::read_stiffness_csv(csv_path);
    std::map<double, std::vector<amsim::StiffnessSample>> by_height;
    for (const auto& s : samples) by_height[s.z].push_back(s);
    std::vector<amsim::HeightStiffness> pts;
    for (const auto& [z, group] : by_height)
        pts.push_back({z, amsim::fit_linear_spring(group)});
    const amsim::StiffnessModel model = amsim::fit_polynomial(pts);
    std::cout << "c0=" << amsim::format_double(model.c0)
              << " c1=" << amsim::format_double(model.c1)
              << " c2=" << amsim::format_double(model.c2) << "\n";
    std::cout << "z_lo=" << amsim::format_double(model.z_lo)
              << " z_hi=" << amsim::format_double(model.z_hi) << "\n";
    double rss = 0.0;
    for (const auto& p : pts) {
        const double r = p.k - model.eval_raw(p.z);
        rss += r * r;
        std::cout << "height z=" << amsim::format_double(p.z)
                  << " k=" << amsim::format_double(p.k)
                  << " residual=" << amsim::format_double(r) << "\n";
    }
    std::cout << "rms_residual="
              << amsim::format_double(std::sqrt(rss / static_cast<double>(pts.size()))) << "\n";
    if (!model.positive_over_range())
        std::cout << "warning=stiffness_not_positive_over_range\n";
    return 0;
}

int run_workspace(const std::string& config_path, const std::string& out_path) {
    const amsim::ScenarioConfig cfg = amsim::load_scenario(config_path);
    if (!cfg.workspace)
        throw amsim::Error(amsim::ErrorCode::ConfigInvalid,
                           "config has no workspace block");
    const auto samples = amsim::workspace_sample(cfg.delta, *cfg.workspace);
    std::ofstream out(out_path);
    if (!out) throw amsim::Error(amsim::ErrorCode::IoError, "cannot write " + out_path);
    out << "x,y,z,reachable,theta1,theta2,theta3,error_code\n";
    std::size_t reachable = 0;
    for (const auto& s : samples) {
        out << amsim::format_double(s.p.x) << ',' << amsim::format_double(s.p.y) << ','
            << amsim::format_double(s.p.z) << ',' << (s.reachable ? 1 : 0) << ',';
        if (s.reachable) {
            out << amsim::format_double(s.angles[0]) << ',' << amsim::format_double(s.angles[1])
                << ',' << amsim::format_double(s.angles[2]) << ",\n";
            ++reachable;
        } else {
            out << ",,," << amsim::error_code_name(s.error) << "\n";
        }
    }
    std::cout << "cells=" << samples.size() << " reachable=" << reachable
              << " out=" << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Overactuated tri-tiltrotor + origami delta arm simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path = "log.csv";
    int decimate = 0;
    auto* sim = app.add_subcommand("sim", "run a scenario and write the CSV log");
    sim->add_option("config", config_path, "scenario config (JSON)")->required();
    sim->add_option("--out", out_path, "CSV log path");
    sim->add_option("--decimate", decimate, "log every Nth physics step");

    double x = 0, y = 0, z = 0;
    std::string ik_config;
    auto* ik = app.add_subcommand("ik", "inverse kinematics of one target");
    ik->add_option("--x", x, "target x, frame D (m)")->required();
    ik->add_option("--y", y, "target y (m)")->required();
    ik->add_option("--z", z, "target z (m)")->required();
    ik->add_option("--config", ik_config, "scenario config supplying the delta block");

    double fx = 0, fz = 0, mx = 0, my = 0, mz = 0;
    std::string alloc_config;
    auto* alloc = app.add_subcommand("alloc", "actuator allocation of one wrench");
    alloc->add_option("--fx", fx, "body-frame force x (N)")->required();
    alloc->add_option("--fz", fz, "body-frame force z (N)")->required();
    alloc->add_option("--mx", mx, "moment x (N m)")->required();
    alloc->add_option("--my", my, "moment y (N m)")->required();
    alloc->add_option("--mz", mz, "moment z (N m)")->required();
    alloc->add_option("--config", alloc_config, "scenario config supplying the platform block");

    std::string fit_csv;
    auto* fit = app.add_subcommand("stiffness-fit", "fit the stiffness model from a CSV");
    fit->add_option("csv", fit_csv, "samples with columns z,delta_z,f_z")->required();

    std::string ws_config, ws_out = "workspace.csv";
    auto* ws = app.add_subcommand("workspace", "sample the arm workspace onto a grid");
    ws->add_option("config", ws_config, "scenario config with a workspace block")->required();
    ws->add_option("--out", ws_out, "output CSV path");

    std::string val_config;
    auto* val = app.add_subcommand("validate", "validate a scenario config");
    val->add_option("config", val_config, "scenario config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // usage problems exit 2, --help exits 0
    }

    try {
        if (sim->parsed()) return run_sim(config_path, out_path, decimate);
        if (ik->parsed()) return run_ik(x, y, z, ik_config);
        if (alloc->parsed()) return run_alloc(fx, fz, mx, my, mz, alloc_config);
        if (fit->parsed()) return run_stiffness_fit(fit_csv);
        if (ws->parsed()) return run_workspace(ws_config, ws_out);
        if (val->parsed()) {
            amsim::load_scenario(val_config);
            std::cout << "ok\n";
            return 0;
        }
    } catch (const amsim::Error& e) {
        return fail(e);
    } catch (const std::exception& e) {
        std::cerr << "error code=Internal message=\"" << e.what() << "\"\n";
        return 1;
    }
    return 2;
}
