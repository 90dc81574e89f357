#include <doctest.h>

#include <cmath>
#include <random>

#include "ratebound/canonical.hpp"
#include "ratebound/simulate.hpp"

using namespace ratebound;

namespace {

FeedbackDescriptor scalar_feedback(double a) {
    SpectralProfile p;
    p.z = 1;
    return make_canonical_feedback(GainSchedule({a}), BlockLayout::from_profile(p));
}

FeedbackDescriptor chain_feedback(int n, const std::vector<double>& a, Mat* A_out, Vec* b_out) {
    Mat A = Mat::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
    Vec b = Vec::Zero(n);
    b[n - 1] = 1.0;
    std::vector<double> tail(a.begin() + 1, a.end());
    const CanonicalForm cf = build_canonical_form(A, b, tail);
    *A_out = A;
    *b_out = b;
    return make_original_feedback(GainSchedule(a), cf);
}

}  // namespace

TEST_CASE("scalar saturated integrator is attractive") {
    const Mat A = Mat::Zero(1, 1);
    const Mat B = Mat::Identity(1, 1);
    Vec y0(1);
    y0 << 3.0;
    const Trajectory traj = simulate_closed_loop(A, B, scalar_feedback(1.0),
                                                 DisturbanceSignal::zero(1), y0, 30.0, 601);
    CHECK(std::abs(traj.states.back()[0]) <= 1e-3);
    CHECK(traj.stats.accepted > 0);
}

TEST_CASE("zero initial condition stays at the origin") {
    const Mat A = Mat::Zero(1, 1);
    const Mat B = Mat::Identity(1, 1);
    const Trajectory traj = simulate_closed_loop(A, B, scalar_feedback(0.5),
                                                 DisturbanceSignal::zero(1), Vec::Zero(1), 10.0, 101);
    for (const Vec& x : traj.states) CHECK(x.norm() == 0.0);
    for (const Vec& u : traj.controls) CHECK(u.norm() == 0.0);
}

TEST_CASE("pure rotation returns after one period") {
    const Mat A = rotation_generator();
    Mat B = Mat::Zero(2, 1);
    Vec x0(2);
    x0 << 1.0, 0.0;
    IntegratorOptions opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-12;
    const Trajectory traj = simulate_closed_loop(A, B, make_zero_feedback(2),
                                                 DisturbanceSignal::zero(2), x0,
                                                 2.0 * M_PI, 201, opts);
    CHECK((traj.states.back() - x0).norm() <= 1e-6);
}

TEST_CASE("undamped oscillator conserves the norm") {
    const Mat A = rotation_generator();
    Mat B = Mat::Zero(2, 1);
    Vec x0(2);
    x0 << 0.7, -0.3;
    IntegratorOptions opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-12;
    const Trajectory traj = simulate_closed_loop(A, B, make_zero_feedback(2),
                                                 DisturbanceSignal::zero(2), x0, 100.0, 2001, opts);
    const double r0 = x0.norm();
    for (const Vec& x : traj.states) CHECK(std::abs(x.norm() - r0) <= 1e-8);
}

TEST_CASE("tolerance halving converges") {
    Mat A;
    Vec b;
    const FeedbackDescriptor fd = chain_feedback(2, {0.5, 0.5}, &A, &b);
    Vec x0(2);
    x0 << 4.0, -2.0;

    Vec prev;
    for (double scale : {1.0, 0.5}) {
        IntegratorOptions opts;
        opts.rtol = 1e-8 * scale;
        opts.atol = 1e-10 * scale;
        const Trajectory traj =
            simulate_closed_loop(A, b, fd, DisturbanceSignal::zero(2), x0, 40.0, 401, opts);
        if (prev.size() > 0) {
            CHECK((traj.states.back() - prev).norm() <= 10.0 * 1e-8);
        }
        prev = traj.states.back();
    }
}

TEST_CASE("dense output agrees with direct feedback evaluation") {
    Mat A;
    Vec b;
    const FeedbackDescriptor fd = chain_feedback(2, {0.5, 0.5}, &A, &b);
    Vec x0(2);
    x0 << 1.0, 2.0;
    const Trajectory traj =
        simulate_closed_loop(A, b, fd, DisturbanceSignal::zero(2), x0, 10.0, 1001);
    for (size_t i = 0; i < traj.states.size(); ++i) {
        CHECK(std::abs(traj.controls[i][0] - nu_eval(traj.states[i], fd)) == 0.0);
    }
    // off-step samples are consistent with a tighter re-integration
    IntegratorOptions tight;
    tight.rtol = 1e-12;
    tight.atol = 1e-14;
    Rhs rhs = [&](double, const Vec& x, Vec& dx) {
        dx = from_std(closed_loop_field_generic(A, b, fd, to_std(x)));
    };
    for (size_t i = 100; i < traj.states.size(); i += 250) {
        const Vec ref = integrate_to(rhs, x0, 0.0, traj.times[i], tight);
        CHECK((traj.states[i] - ref).norm() <= 1e-6);
    }
}

TEST_CASE("divergence guard trips") {
    Mat A(1, 1);
    A << 1.0;  // unstable open loop
    const Mat B = Mat::Zero(1, 1);
    Vec x0(1);
    x0 << 1.0;
    IntegratorOptions opts;
    opts.divergence_norm = 1e6;
    CHECK_THROWS_AS(simulate_closed_loop(A, B, make_zero_feedback(1), DisturbanceSignal::zero(1),
                                         x0, 100.0, 101, opts),
                    Divergence);
}

TEST_CASE("settle stop truncates the run") {
    const Mat A = Mat::Zero(1, 1);
    const Mat B = Mat::Identity(1, 1);
    Vec y0(1);
    y0 << 2.0;
    SettleStop settle;
    settle.threshold = 1e-6;
    settle.window = 5.0;
    const Trajectory traj = simulate_closed_loop(A, B, scalar_feedback(1.0),
                                                 DisturbanceSignal::zero(1), y0, 500.0, 5001,
                                                 IntegratorOptions{}, settle);
    CHECK(traj.stopped_early);
    CHECK(traj.end_time() < 100.0);
    CHECK(std::abs(traj.states.back()[0]) < 1e-6);
}

TEST_CASE("disturbance signals respect their bound and onset") {
    std::mt19937_64 rng(123);
    Vec dir(2);
    dir << 1.0, 1.0;
    const double delta = 0.25;
    const auto families = {
        DisturbanceSignal::constant(dir, delta, 5.0, 2.0 * delta),
        DisturbanceSignal::sinusoid(dir, delta, 0.7, 5.0, 2.0 * delta),
        DisturbanceSignal::piecewise_random(2, delta, 99, 40.0, 0.1, 5.0, 2.0 * delta),
    };
    for (const auto& dist : families) {
        for (double t = 5.0; t <= 40.0; t += 0.037) {
            CHECK(dist.eval(t).norm() <= delta + 1e-12);
        }
        bool used_pre_onset = false;
        for (double t = 0.0; t < 5.0; t += 0.037) {
            CHECK(dist.eval(t).norm() <= 2.0 * delta + 1e-12);
            if (dist.eval(t).norm() > delta) used_pre_onset = true;
        }
        CHECK(used_pre_onset);  // "eventually bounded" is exercised for real
    }
}

TEST_CASE("piecewise disturbance is reproducible from the seed") {
    const auto d1 = DisturbanceSignal::piecewise_random(3, 0.4, 2024, 10.0);
    const auto d2 = DisturbanceSignal::piecewise_random(3, 0.4, 2024, 10.0);
    const auto d3 = DisturbanceSignal::piecewise_random(3, 0.4, 2025, 10.0);
    bool any_diff = false;
    for (double t = 0.0; t < 10.0; t += 0.05) {
        CHECK((d1.eval(t) - d2.eval(t)).norm() == 0.0);
        if ((d1.eval(t) - d3.eval(t)).norm() > 0.0) any_diff = true;
    }
    CHECK(any_diff);
}

TEST_CASE("sup metrics on trajectories") {
    SUBCASE("zero trajectory has zero sups") {
        const Mat A = Mat::Zero(1, 1);
        const Mat B = Mat::Identity(1, 1);
        Trajectory traj = simulate_closed_loop(A, B, scalar_feedback(0.5),
                                               DisturbanceSignal::zero(1), Vec::Zero(1), 10.0, 101);
        attach_control_jets(traj, A, B, scalar_feedback(0.5), 2);
        const SupMetrics metrics = sup_metrics(traj, 2);
        for (double s : metrics.sup_control) CHECK(s == 0.0);
        CHECK(metrics.trailing_state_norm == 0.0);
    }

    SUBCASE("scalar sup is below the static bound") {
        const Mat A = Mat::Zero(1, 1);
        const Mat B = Mat::Identity(1, 1);
        const FeedbackDescriptor fd = scalar_feedback(0.5);
        Vec y0(1);
        y0 << 50.0;
        Trajectory traj = simulate_closed_loop(A, B, fd, DisturbanceSignal::zero(1), y0, 300.0, 3001);
        attach_control_jets(traj, A, B, fd, 2);
        const SupMetrics metrics = sup_metrics(traj, 2);
        CHECK(metrics.sup_control[0] <= 0.5);
        CHECK(metrics.sup_control[0] > 0.49);  // attained near the start
    }

    SUBCASE("derivative sups shrink when all gains shrink") {
        for (int n : {2, 3}) {
            std::vector<double> a_full(static_cast<size_t>(n), 0.8);
            std::vector<double> a_half(static_cast<size_t>(n), 0.4);
            double sups_full[3], sups_half[3];
            for (int which = 0; which < 2; ++which) {
                Mat A;
                Vec b;
                const FeedbackDescriptor fd =
                    chain_feedback(n, which == 0 ? a_full : a_half, &A, &b);
                Vec x0 = Vec::Zero(n);
                x0[0] = 3.0;
                x0[n - 1] = -2.0;
                Trajectory traj =
                    simulate_closed_loop(A, b, fd, DisturbanceSignal::zero(n), x0, 120.0, 2401);
                attach_control_jets(traj, A, b, fd, 2);
                const SupMetrics m = sup_metrics(traj, 2);
                for (int j = 0; j <= 2; ++j) {
                    (which == 0 ? sups_full : sups_half)[j] = m.sup_control[static_cast<size_t>(j)];
                }
            }
            for (int j = 0; j <= 2; ++j) CHECK(sups_half[j] <= sups_full[j] + 1e-9);
        }
    }

    SUBCASE("fd fallback approximates jet sups") {
        Mat A;
        Vec b;
        const FeedbackDescriptor fd = chain_feedback(2, {0.5, 0.5}, &A, &b);
        Vec x0(2);
        x0 << 2.0, 1.0;
        Trajectory traj =
            simulate_closed_loop(A, b, fd, DisturbanceSignal::zero(2), x0, 40.0, 4001);
        const SupMetrics fd_metrics = sup_metrics(traj, 1);
        attach_control_jets(traj, A, b, fd, 1);
        const SupMetrics jet_metrics = sup_metrics(traj, 1);
        CHECK(fd_metrics.sup_control[1] ==
              doctest::Approx(jet_metrics.sup_control[1]).epsilon(1e-3));
    }
}
