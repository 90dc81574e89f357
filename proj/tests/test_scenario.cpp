#include <doctest.h>

#include <filesystem>

#include "ratebound/scenario.hpp"

using namespace ratebound;

namespace {

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("matrix and vector json round trips") {
    Mat m(2, 3);
    m << 1.0, -2.5, 3.0, 0.0, 1e-17, 4.0;
    const Mat back = matrix_from_json(matrix_to_json(m));
    CHECK((m - back).norm() == 0.0);

    Vec v(3);
    v << -1.0, 0.25, 1e100;
    CHECK((v - vector_from_json(vector_to_json(v))).norm() == 0.0);

    CHECK_THROWS_AS(matrix_from_json(Json::array()), ConfigError);
}

TEST_CASE("feedback descriptor json round trips") {
    const Mat A = preset_mixed_4d();
    const Vec b = last_basis_vector(4);
    const CanonicalForm cf = build_canonical_form(A, b, {0.5});
    const GainSchedule gains({0.5, 0.5});

    SUBCASE("original single") {
        const FeedbackDescriptor fd = make_original_feedback(gains, cf);
        const FeedbackDescriptor back = feedback_from_json(feedback_to_json(fd));
        Vec x(4);
        x << 1.0, -2.0, 0.5, 3.0;
        CHECK(nu_eval(x, back) == nu_eval(x, fd));
    }

    SUBCASE("multi input with saturated and zero members rejected") {
        const FeedbackDescriptor sat =
            make_saturated_feedback(Eigen::Vector2d(1.0, 2.0), SaturationKind::Atan);
        const FeedbackDescriptor back = feedback_from_json(feedback_to_json(sat));
        Vec x(2);
        x << 0.3, -0.7;
        CHECK(nu_eval(x, back) == nu_eval(x, sat));
    }

    SUBCASE("multi input") {
        SpectralProfile profile;
        profile.z = 1;
        const FeedbackDescriptor sub =
            make_canonical_feedback(GainSchedule({0.5}), BlockLayout::from_profile(profile));
        const FeedbackDescriptor fd = make_multi_feedback({sub, sub}, {1, 1}, 3);
        const FeedbackDescriptor back = feedback_from_json(feedback_to_json(fd));
        Vec x(2);
        x << 2.0, -1.0;
        CHECK((feedback_eval(x, back) - feedback_eval(x, fd)).norm() == 0.0);
        CHECK(back.exponent == 3);
    }
}

TEST_CASE("reduced form json round trip") {
    const ReducedForm rf = preset_two_block();
    const ReducedForm back = reduced_form_from_json(reduced_form_to_json(rf));
    CHECK(back.q == rf.q);
    const auto [a1, b1] = rf.assemble();
    const auto [a2, b2] = back.assemble();
    CHECK((a1 - a2).norm() == 0.0);
    CHECK((b1 - b2).norm() == 0.0);
    CHECK(validate_reduced_form(back, 1e-9).valid());
}

TEST_CASE("trajectory csv has the advertised columns") {
    const Mat A = preset_integrator_chain(2);
    Mat B(2, 1);
    B.col(0) = last_basis_vector(2);
    const CanonicalForm cf = build_canonical_form(A, B.col(0), {0.5});
    const FeedbackDescriptor fd = make_original_feedback(GainSchedule({0.5, 0.5}), cf);
    Vec x0(2);
    x0 << 1.0, 1.0;
    Trajectory traj = simulate_closed_loop(A, B, fd, DisturbanceSignal::zero(2), x0, 5.0, 11);
    attach_control_jets(traj, A, B, fd, 2);
    const std::string csv = trajectory_to_csv(traj);
    CHECK(csv.substr(0, csv.find('\n')) == "t,x0,x1,u0,u0_d1,u0_d2");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);  // header + 11 samples
}

TEST_CASE("scenario config parsing") {
    Json config;
    config["schema"] = "ratebound-scenario-v1";
    config["system"] = {{"preset", "integrator-chain"}, {"n", 3}};
    config["bounds"] = {{"p", 2}, {"R", {1.0, 1.0, 1.0}}};
    config["seed"] = 42;
    config["verify_battery"] = {{"count", 10}, {"max_norm", 20.0}};
    const Scenario s = scenario_from_json(config);
    CHECK(s.A.rows() == 3);
    CHECK(s.bounds.p == 2);
    CHECK(s.seed == 42);
    CHECK(s.verify_battery.count == 10);

    Json bad = config;
    bad["schema"] = "something-else";
    CHECK_THROWS_AS(scenario_from_json(bad), ConfigError);

    Json inadmissible = config;
    inadmissible["system"] = {{"A", {{1.0}}}, {"b", {1.0}}};
    const Scenario s2 = scenario_from_json(inadmissible);
    CHECK_THROWS_AS(run_scenario(s2, "", false), PositiveRealPartEigenvalue);
}

TEST_CASE("scenario run writes re-parseable artifacts and certifies") {
    TempDir dir("ratebound-test-scenario");
    Scenario s = make_preset_scenario("integrator-chain", Json{{"n", 3}});
    s.bounds = BoundSpec(2, {1.0, 1.0, 1.0});
    s.seed = 5;
    s.verify_battery = BatterySpec{10, 0.5, 20.0};
    s.tuning_battery = BatterySpec{8, 0.5, 8.0};
    s.run_siss = false;  // covered separately; keeps this test quick

    const ScenarioResult result = run_scenario(s, dir.path, true);
    CHECK(result.pass);
    CHECK(!result.summary.empty());

    // every artifact is re-parseable by the toolkit's own readers
    const Json report = read_json_file(dir.path / "report.json");
    CHECK(report.at("pass").get<bool>());
    CHECK(report.at("tuning").at("certified").get<bool>());
    const Json canonical = read_json_file(dir.path / "canonical.json");
    const Mat J = matrix_from_json(canonical.at("J"));
    CHECK(J.rows() == 3);
    const FeedbackDescriptor fd = feedback_from_json(read_json_file(dir.path / "feedback.json"));
    CHECK(fd.state_dim() == 3);
    const std::string csv = read_text_file(dir.path / "trajectory_0.csv");
    CHECK(csv.rfind("t,x0,x1,x2,u0", 0) == 0);
}

TEST_CASE("scenario runs are reproducible bit for bit") {
    Scenario s = make_preset_scenario("oscillator", Json{{"omega", 1.0}});
    s.bounds = BoundSpec(1, {0.8, 0.8});
    s.seed = 11;
    s.verify_battery = BatterySpec{8, 0.5, 15.0};
    s.tuning_battery = BatterySpec{6, 0.5, 6.0};
    s.run_siss = true;
    s.siss_delta = 0.05;
    s.siss_horizon = 120.0;

    TempDir d1("ratebound-repro-1");
    TempDir d2("ratebound-repro-2");
    const ScenarioResult r1 = run_scenario(s, d1.path, true);
    const ScenarioResult r2 = run_scenario(s, d2.path, true);
    CHECK(r1.pass == r2.pass);
    for (const std::string& name : r1.artifacts) {
        CHECK(read_text_file(d1.path / name) == read_text_file(d2.path / name));
    }
}

TEST_CASE("hurwitz-only system synthesizes the zero feedback") {
    Scenario s;
    s.name = "stable";
    Mat A(2, 2);
    A << -1.0, 0.3, 0.0, -0.5;
    s.A = A;
    s.b = last_basis_vector(2);
    s.bounds = BoundSpec(1, {0.1, 0.1});
    s.verify_battery = BatterySpec{6, 0.5, 10.0};
    s.run_siss = false;
    const ScenarioResult result = run_scenario(s, "", false);
    CHECK(result.pass);
    CHECK(result.feedback.kind == FeedbackKind::Zero);
    CHECK(result.report.at("verification").at("sup")[0].get<double>() == 0.0);
}

TEST_CASE("two-block preset is valid and certifies at moderate norms") {
    Scenario s;
    s.reduced = preset_two_block();
    s.bounds = BoundSpec(1, {1.0, 1.0});
    s.seed = 3;
    s.verify_battery = BatterySpec{8, 0.5, 10.0};
    s.tuning_battery = BatterySpec{6, 0.5, 6.0};
    const ScenarioResult result = run_scenario(s, "", false);
    CHECK(result.pass);
    CHECK(result.report.at("exponent").get<int>() == 2);  // p + 1
    CHECK(result.feedback.kind == FeedbackKind::MultiInput);

    // exponent offset 0 selects the power p variant
    Scenario s2 = s;
    s2.multi_exponent_offset = 0;
    const ScenarioResult r2 = run_scenario(s2, "", false);
    CHECK(r2.report.at("exponent").get<int>() == 1);
}
