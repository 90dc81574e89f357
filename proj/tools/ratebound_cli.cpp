#include <CLI11.hpp>
#include <iostream>

#include "ratebound/acceptance.hpp"
#include "ratebound/scenario.hpp"

using namespace ratebound;

namespace {

int cmd_synthesize(const std::string& config, const std::string& out, bool dump_canonical) {
    const ScenarioResult result = run_scenario_file(config, out, dump_canonical);
    std::cout << result.summary;
    if (!out.empty()) {
        std::cout << "artifacts written to " << out << ":";
        for (const std::string& name : result.artifacts) std::cout << " " << name;
        std::cout << "\n";
    }
    return result.pass ? 0 : 1;
}

int cmd_simulate(const std::string& config, const std::string& feedback_path,
                 const std::string& out, double horizon, double rtol, double atol,
                 std::uint64_t seed, int jet_order, const std::string& disturbance,
                 double delta) {
    const Json cfg = read_json_file(config);
    const Scenario scenario = scenario_from_json(cfg);

    Mat A;
    Mat B;
    if (scenario.is_multi()) {
        std::tie(A, B) = scenario.reduced->assemble();
    } else {
        A = scenario.A;
        B = Mat(scenario.A.rows(), 1);
        B.col(0) = scenario.b;
    }
    const int n = static_cast<int>(A.rows());

    FeedbackDescriptor fd = make_zero_feedback(n);
    if (!feedback_path.empty()) {
        fd = feedback_from_json(read_json_file(feedback_path));
    } else {
        // synthesize in place when no descriptor file is given
        const ScenarioResult synth = run_scenario(scenario, "", false);
        fd = synth.feedback;
    }

    DisturbanceSignal dist = DisturbanceSignal::zero(n);
    if (disturbance == "constant") {
        dist = DisturbanceSignal::constant(Vec::Ones(n), delta);
    } else if (disturbance == "sinusoid") {
        dist = DisturbanceSignal::sinusoid(Vec::Ones(n), delta, 0.25);
    } else if (disturbance == "piecewise-random") {
        dist = DisturbanceSignal::piecewise_random(n, delta, seed, horizon);
    } else if (disturbance != "zero") {
        throw ConfigError("unknown disturbance kind " + disturbance);
    }

    IntegratorOptions opts;
    opts.rtol = rtol;
    opts.atol = atol;
    const auto battery = make_battery(n, 1, 1.0, 10.0, seed);
    Trajectory traj = simulate_closed_loop(A, B, fd, dist, battery[0], horizon, 2001, opts);
    if (dist.kind() == DisturbanceSignal::Kind::Zero && jet_order > 0) {
        attach_control_jets(traj, A, B, fd, jet_order);
    }
    const SupMetrics metrics = sup_metrics(traj, traj.jet_order >= 0 ? traj.jet_order : 0);
    std::cout << "simulated " << traj.end_time() << "s, " << traj.stats.accepted
              << " accepted steps, final ||x|| = " << traj.states.back().norm() << "\n";
    for (size_t j = 0; j < metrics.sup_control.size(); ++j) {
        std::cout << "sup ||U^(" << j << ")|| = " << metrics.sup_control[j] << "\n";
    }
    if (!out.empty()) {
        std::filesystem::create_directories(out);
        write_text_file(std::filesystem::path(out) / "trajectory.csv", trajectory_to_csv(traj));
        std::cout << "trajectory.csv written to " << out << "\n";
    }
    return 0;
}

int cmd_counterexample(double omega, double k1, double k2, const std::string& out) {
    const Eigen::Vector2d k(k1, k2);
    const GrowthReport report =
        counterexample_growth({1.0, 2.0, 4.0, 8.0, 16.0}, k, omega, SaturationKind::Tanh);
    std::cout << "l, simulated du/dt(0), closed form\n";
    for (size_t i = 0; i < report.l_values.size(); ++i) {
        std::cout << report.l_values[i] << ", " << report.simulated[i] << ", "
                  << report.closed_form[i] << "\n";
    }
    std::cout << "slope " << report.slope << " (expected " << report.expected_slope
              << "), max rel err " << report.max_rel_err << "\n";
    if (!out.empty()) {
        std::filesystem::create_directories(out);
        write_json_file(std::filesystem::path(out) / "counterexample.json",
                        growth_report_to_json(report));
    }
    return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ratebound: globally stabilizing feedback laws with amplitude- and "
                 "rate-bounded control"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    std::string feedback_path;
    std::string disturbance = "zero";
    bool dump_canonical = false;
    bool list_only = false;
    double horizon = 100.0;
    double rtol = 1e-8;
    double atol = 1e-10;
    double delta = 0.1;
    double omega = 2.0;
    double k1 = 1.0;
    double k2 = 2.0;
    std::uint64_t seed = 1;
    int jet_order = 2;

    CLI::App* synthesize = app.add_subcommand(
        "synthesize", "run the synthesis + certification pipeline from a scenario config");
    synthesize->add_option("--config", config, "scenario JSON file")->required();
    synthesize->add_option("--out", out, "output directory for artifacts");
    synthesize->add_flag("--dump-canonical", dump_canonical,
                         "write the canonical (J, bhat, T, theta) bundle");

    CLI::App* verify = app.add_subcommand(
        "verify", "alias of synthesize: re-runs the full certification pipeline");
    verify->add_option("--config", config, "scenario JSON file")->required();
    verify->add_option("--out", out, "output directory for artifacts");

    CLI::App* simulate = app.add_subcommand("simulate", "integrate one closed-loop trajectory");
    simulate->add_option("--config", config, "scenario JSON file")->required();
    simulate->add_option("--feedback", feedback_path, "feedback descriptor JSON");
    simulate->add_option("--out", out, "output directory");
    simulate->add_option("--horizon", horizon, "integration horizon");
    simulate->add_option("--rtol", rtol, "relative tolerance");
    simulate->add_option("--atol", atol, "absolute tolerance");
    simulate->add_option("--seed", seed, "battery / disturbance seed");
    simulate->add_option("--jet-order", jet_order, "control-derivative order to attach");
    simulate->add_option("--disturbance", disturbance,
                         "zero | constant | sinusoid | piecewise-random");
    simulate->add_option("--delta", delta, "disturbance amplitude");

    CLI::App* counterexample = app.add_subcommand(
        "counterexample", "saturated linear feedback rate growth on the oscillator");
    counterexample->add_option("--omega", omega, "oscillator frequency");
    counterexample->add_option("--k1", k1, "feedback gain k1");
    counterexample->add_option("--k2", k2, "feedback gain k2");
    counterexample->add_option("--out", out, "output directory");

    CLI::App* reproduce = app.add_subcommand("reproduce-all", "run every acceptance criterion");
    reproduce->add_flag("--list", list_only, "list criteria without running");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synthesize->parsed()) return cmd_synthesize(config, out, dump_canonical);
        if (verify->parsed()) return cmd_synthesize(config, out, false);
        if (simulate->parsed()) {
            return cmd_simulate(config, feedback_path, out, horizon, rtol, atol, seed, jet_order,
                                disturbance, delta);
        }
        if (counterexample->parsed()) return cmd_counterexample(omega, k1, k2, out);
        if (reproduce->parsed()) {
            if (list_only) {
                for (const std::string& name : acceptance_list()) std::cout << name << "\n";
                return 0;
            }
            const AcceptanceOutcome outcome = run_acceptance(std::cout);
            return outcome.failures == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
