#include "ratebound/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ratebound/scenario.hpp"

namespace ratebound {

namespace {

struct TestSystem {
    std::string name;
    Mat A;
    Mat B;
    Vec b;
};

std::vector<TestSystem> certification_systems() {
    std::vector<TestSystem> systems;
    auto add = [&systems](const std::string& name, const Mat& A) {
        TestSystem sys;
        sys.name = name;
        sys.A = A;
        sys.b = last_basis_vector(static_cast<int>(A.rows()));
        sys.B = Mat(A.rows(), 1);
        sys.B.col(0) = sys.b;
        systems.push_back(std::move(sys));
    };
    add("scalar", preset_integrator_chain(1));
    add("double-integrator", preset_integrator_chain(2));
    add("oscillator", preset_oscillator(1.0));
    add("mixed-4d", preset_mixed_4d());
    return systems;
}

struct TunedSystem {
    TestSystem sys;
    TuningReport tuning;
    FeedbackDescriptor fd;
    std::vector<Vec> unseen;
    BoundCertificate cert;
};

// shared across criteria 6 and 7
struct SharedState {
    std::vector<TunedSystem> tuned;
    bool built = false;
};

void build_tuned(SharedState& state) {
    if (state.built) return;
    const BoundSpec bounds(2, {0.5, 0.5, 0.5});
    TuningOptions opts;
    for (const TestSystem& sys : certification_systems()) {
        TunedSystem entry;
        entry.sys = sys;
        const int n = static_cast<int>(sys.A.rows());
        const auto battery = make_battery(n, 12, 0.5, 10.0, 100 + n);
        entry.tuning = tune_gains(sys.A, sys.b, bounds, battery, opts);
        const CanonicalForm cf =
            build_canonical_form(sys.A, sys.b, entry.tuning.gains.tail_gains());
        entry.fd = make_original_feedback(entry.tuning.gains, cf);
        entry.unseen = make_battery(n, 50, 0.1, 100.0, 9000 + n);
        for (size_t i = 0; i < 3; ++i) entry.unseen[i] *= 100.0 / entry.unseen[i].norm();
        const auto runs = run_battery(sys.A, sys.B, entry.fd, entry.unseen, bounds.p, opts);
        entry.cert = check_p_bounded(runs, bounds);
        state.tuned.push_back(std::move(entry));
    }
    state.built = true;
}

std::string format_double(double v, int precision = 6) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

// ---------------------------------------------------------------------------

CriterionResult criterion_lyapunov_identity() {
    CriterionResult r;
    r.name = "Lyapunov identity residual <= 1e-12 on the 15-point grid";
    double worst = 0.0;
    for (double omega : {0.25, 0.5, 1.0, 2.0, 5.0}) {
        for (double beta : {0.1, 0.5, 1.0}) {
            worst = std::max(worst, lyapunov_residual(p_beta(omega, beta)));
        }
    }
    r.pass = worst <= 1e-12;
    r.detail = "worst residual " + format_double(worst, 3);
    return r;
}

CriterionResult criterion_explicit_constants() {
    CriterionResult r;
    r.name = "explicit constants match independent evaluation to 1e-12";
    double worst = 0.0;
    const Eigen::Vector2d b0 = input_direction();
    for (double omega : {0.25, 0.5, 1.0, 2.0, 5.0}) {
        for (double beta : {0.1, 0.5, 1.0}) {
            const LyapunovPair pair = p_beta(omega, beta);
            // norm formula vs direct matrix-vector arithmetic
            worst = std::max(worst, std::abs(pair.pb0_norm - (pair.P * b0).norm()));
            // sigma formulas vs the symmetric 2x2 eigenvalue closed form
            const double mean = 0.5 * (pair.P(0, 0) + pair.P(1, 1));
            const double disc = std::sqrt(0.25 * (pair.P(0, 0) - pair.P(1, 1)) *
                                              (pair.P(0, 0) - pair.P(1, 1)) +
                                          pair.P(0, 1) * pair.P(0, 1));
            worst = std::max(worst, std::abs(pair.sigma_lo - (mean - disc)));
            worst = std::max(worst, std::abs(pair.sigma_hi - (mean + disc)));
        }
        // Gamma via the algebraically rearranged route
        const double gamma_alt = omega * omega / (2.0 * (1.0 + 4.0 * omega * omega));
        worst = std::max(worst, std::abs(gamma_constant(omega) - gamma_alt));
    }
    // d_k: hand values and the first-order recursion, k <= 6
    const double hand[] = {1.0, -0.5, 0.75, -1.875, 6.5625, -29.53125, 162.421875};
    for (int k = 0; k <= 6; ++k) {
        worst = std::max(worst, std::abs(g_derivative_coeff(k) - hand[k]));
        if (k < 6) {
            worst = std::max(worst, std::abs(g_derivative_coeff(k + 1) +
                                             (0.5 + k) * g_derivative_coeff(k)));
        }
    }
    r.pass = worst <= 1e-12;
    r.detail = "worst deviation " + format_double(worst, 3);
    return r;
}

CriterionResult criterion_counterexample() {
    CriterionResult r;
    r.name = "saturated-linear rate growth vs closed form; bounded contrast";
    const Eigen::Vector2d k(1.0, 2.0);
    const double omega = 2.0;
    const Mat A = preset_oscillator(omega);
    Mat B(2, 1);
    B << 0.0, 1.0;

    const BoundSpec bounds(1, {1.0, 1.0});
    const auto battery = make_battery(2, 10, 0.5, 12.0, 55);
    const TuningReport tuned = tune_gains(A, B.col(0), bounds, battery);
    const CanonicalForm cf = build_canonical_form(A, B.col(0), tuned.gains.tail_gains());
    const FeedbackDescriptor contrast = make_original_feedback(tuned.gains, cf);

    const GrowthReport report = counterexample_growth({1.0, 2.0, 4.0, 8.0, 16.0}, k, omega,
                                                      SaturationKind::Tanh, &contrast, bounds.R[1]);
    r.pass = tuned.certified && report.pass;
    r.detail = "max rel err " + format_double(report.max_rel_err, 3) + ", slope " +
               format_double(report.slope, 12) + " (expected " +
               format_double(report.expected_slope, 12) + "), contrast sup|dU/dt| " +
               format_double(report.contrast_sup_rate, 4) + " <= " + format_double(bounds.R[1], 3);
    return r;
}

CriterionResult criterion_canonical_residuals() {
    CriterionResult r;
    r.name = "canonical form residuals and characteristic polynomials <= 1e-8";
    struct Case {
        std::string name;
        Mat A;
        std::vector<double> tail;
    };
    std::vector<Case> cases;
    for (int n : {2, 3, 4}) {
        cases.push_back({"chain-" + std::to_string(n), preset_integrator_chain(n),
                         std::vector<double>(static_cast<size_t>(n - 1), 0.5)});
    }
    cases.push_back({"oscillator-1", preset_oscillator(1.0), {}});
    cases.push_back({"oscillator-2", preset_oscillator(2.0), {}});
    cases.push_back({"mixed-4d", preset_mixed_4d(), {0.5}});

    double worst_res = 0.0;
    double worst_poly = 0.0;
    for (const Case& c : cases) {
        const Vec b = last_basis_vector(static_cast<int>(c.A.rows()));
        const CanonicalForm cf = build_canonical_form(c.A, b, c.tail);
        const double scale = 1e-8 * (1.0 + c.A.norm());
        worst_res = std::max({worst_res, cf.residual_A / scale * 1e-8, cf.residual_b / scale * 1e-8});
        const auto ca = char_poly_coefficients(c.A);
        const auto cj = char_poly_coefficients(cf.J);
        for (size_t i = 0; i < ca.size(); ++i) {
            worst_poly = std::max(worst_poly,
                                  std::abs(ca[i] - cj[i]) / (1.0 + std::abs(ca[i])));
        }
    }
    r.pass = worst_res <= 1e-8 && worst_poly <= 1e-8;
    r.detail = "worst scaled residual " + format_double(worst_res, 3) + ", worst char-poly deviation " +
               format_double(worst_poly, 3);
    return r;
}

CriterionResult criterion_derivative_cross_validation() {
    struct Probe {
        std::string name;
        Mat A;
        std::vector<double> gains;
    };
    std::vector<Probe> probes = {
        {"double-integrator", preset_integrator_chain(2), {0.6, 0.5}},
        {"chain-3", preset_integrator_chain(3), {0.6, 0.5, 0.5}},
        {"oscillator", preset_oscillator(1.0), {0.7}},
        {"mixed-4d", preset_mixed_4d(), {0.6, 0.5}},
    };

    const int K = 4;
    double worst_fdb = 0.0;
    double worst_fd = 0.0;
    int points_total = 0;

    for (const Probe& probe : probes) {
        const int n = static_cast<int>(probe.A.rows());
        const Vec b = last_basis_vector(n);
        Mat B(n, 1);
        B.col(0) = b;
        const GainSchedule gains(probe.gains);
        const CanonicalForm cf = build_canonical_form(probe.A, b, gains.tail_gains());
        const FeedbackDescriptor fd = make_original_feedback(gains, cf);

        // sample 25 trajectory points in the active phase
        const auto starts = make_battery(n, 5, 1.0, 4.0, 300 + n);
        std::vector<Vec> points;
        for (const Vec& x0 : starts) {
            const Trajectory traj =
                simulate_closed_loop(probe.A, B, fd, DisturbanceSignal::zero(n), x0, 20.0, 6);
            for (const Vec& xs : traj.states) points.push_back(xs);
        }
        points.resize(25);

        // per-order scale over the probe's points for the relative-error floor
        std::vector<double> scale(static_cast<size_t>(K) + 1, 0.0);
        std::vector<ControlJetResult> jets;
        for (const Vec& x : points) {
            jets.push_back(control_jet(probe.A, B, fd, x, K));
            for (int k = 0; k <= K; ++k) {
                scale[static_cast<size_t>(k)] =
                    std::max(scale[static_cast<size_t>(k)],
                             std::abs(jets.back().control[0].derivative(k)));
            }
        }

        IntegratorOptions tight;
        tight.rtol = 1e-13;
        tight.atol = 1e-15;
        Rhs rhs = [&](double, const Vec& x, Vec& dx) {
            dx = from_std(closed_loop_field_generic(probe.A, B, fd, to_std(x)));
        };

        for (size_t pt = 0; pt < points.size(); ++pt) {
            const Vec& x = points[pt];
            ++points_total;

            // route 1: jet pipeline
            const ControlJetResult& jet = jets[pt];

            // route 2: explicit composition formula per summand, then Leibniz
            std::vector<Jet> y = state_jet(probe.A, B, fd, x, K);
            y = apply_matrix(fd.T, y);
            const int mu = fd.layout.mu();
            std::vector<double> fdb_u(static_cast<size_t>(K) + 1, 0.0);
            fdb_u[0] = -kappa_eval(fd.T * x, fd.gains, fd.layout);
            for (int i = 1; i <= mu; ++i) {
                const Block& blk = fd.layout.blocks[static_cast<size_t>(i - 1)];
                // f_i(t) = 1 + sum_{m >= i} ||y_m||^2 as a jet (shared data)
                Jet f = Jet::constant(1.0, K);
                for (int m = i; m <= mu; ++m) {
                    const Block& mb = fd.layout.blocks[static_cast<size_t>(m - 1)];
                    for (int c = 0; c < mb.size; ++c) {
                        const Jet& comp = y[static_cast<size_t>(mb.offset + c)];
                        f = f + comp * comp;
                    }
                }
                const Jet& num = blk.kind == BlockKind::Oscillator
                                     ? y[static_cast<size_t>(blk.offset + 1)]
                                     : y[static_cast<size_t>(blk.offset)];
                std::vector<double> rho(static_cast<size_t>(K), 0.0);
                std::vector<double> phi(static_cast<size_t>(K), 0.0);
                for (int a = 1; a <= K; ++a) {
                    rho[static_cast<size_t>(a - 1)] =
                        g_derivative_coeff(a) * std::pow(f.value(), -0.5 - a);
                    phi[static_cast<size_t>(a - 1)] = f.derivative(a);
                }
                const std::vector<double> gof = faa_di_bruno(rho, phi);  // orders 1..K
                const double g0 = 1.0 / std::sqrt(f.value());
                // Leibniz rule for (Q_i num * (g o f_i))^(k)
                for (int k = 1; k <= K; ++k) {
                    double acc = 0.0;
                    for (int j = 0; j <= k; ++j) {
                        const double binom = std::round(factorial(k) / (factorial(j) * factorial(k - j)));
                        const double gd = (k - j == 0) ? g0 : gof[static_cast<size_t>(k - j - 1)];
                        acc += binom * num.derivative(j) * gd;
                    }
                    fdb_u[static_cast<size_t>(k)] -= fd.gains.Q(i) * acc;
                }
            }
            for (int k = 1; k <= K; ++k) {
                const double a = jet.control[0].derivative(k);
                const double bb = fdb_u[static_cast<size_t>(k)];
                const double denom = std::max({std::abs(a), std::abs(bb),
                                               1e-3 * scale[static_cast<size_t>(k)], 1e-12});
                worst_fdb = std::max(worst_fdb, std::abs(a - bb) / denom);
            }

            // route 3: high-order central differences on tight re-integrations;
            // k <= 3 is truncation-limited (small h), k = 4 noise-limited
            auto stencil_samples = [&](double h) {
                std::vector<double> samples;
                for (int j = -3; j <= 3; ++j) {
                    if (j == 0) {
                        samples.push_back(nu_eval(x, fd));
                        continue;
                    }
                    Vec xj;
                    if (j > 0) {
                        xj = integrate_to(rhs, x, 0.0, j * h, tight);
                    } else {
                        // integrate the time-reversed field for negative offsets
                        Rhs back = [&](double t, const Vec& xx, Vec& dx) {
                            rhs(t, xx, dx);
                            dx = -dx;
                        };
                        xj = integrate_to(back, x, 0.0, -j * h, tight);
                    }
                    samples.push_back(nu_eval(xj, fd));
                }
                return samples;
            };
            const std::vector<double> fine = stencil_samples(0.01);
            const std::vector<double> coarse = stencil_samples(0.02);
            for (int k = 1; k <= K; ++k) {
                const double h = k < 4 ? 0.01 : 0.02;
                const double fd_value = central_difference_o4(k < 4 ? fine : coarse, h, k, 3);
                const double a = jet.control[0].derivative(k);
                const double denom = std::max({std::abs(a), std::abs(fd_value),
                                               1e-3 * scale[static_cast<size_t>(k)], 1e-12});
                worst_fd = std::max(worst_fd, std::abs(a - fd_value) / denom);
            }
        }
    }

    CriterionResult out;
    out.name = "jet / Faa di Bruno / finite-difference pipelines agree (k <= 4)";
    out.pass = worst_fdb <= 1e-10 && worst_fd <= 1e-5 && points_total >= 100;
    out.detail = std::to_string(points_total) + " points; jet-vs-FdB worst " +
                 format_double(worst_fdb, 3) + " (<= 1e-10), jet-vs-FD worst " +
                 format_double(worst_fd, 3) + " (<= 1e-5, floor 1e-3 of per-order scale)";
    return out;
}

CriterionResult criterion_certification(SharedState& state) {
    CriterionResult r;
    r.name = "tuned schedules pass the unseen 50-point battery (p=2, R=0.5)";
    build_tuned(state);
    bool pass = true;
    std::ostringstream detail;
    for (const TunedSystem& t : state.tuned) {
        const bool ok = t.tuning.certified && t.cert.pass && t.cert.violations == 0;
        pass = pass && ok;
        detail << t.sys.name << ": gains [";
        for (size_t i = 0; i < t.tuning.gains.values().size(); ++i) {
            detail << (i ? ", " : "") << t.tuning.gains.values()[i];
        }
        detail << "] sups " << format_double(t.cert.sup[0], 4) << "/"
               << format_double(t.cert.sup[1], 4) << "/" << format_double(t.cert.sup[2], 4)
               << (ok ? " ok; " : " VIOLATION; ");
    }
    r.pass = pass;
    r.detail = detail.str();
    return r;
}

CriterionResult criterion_attractivity(SharedState& state) {
    CriterionResult r;
    r.name = "trailing norm < 1e-3 by T=200 from ||x0|| <= 100; Jacobian Hurwitz";
    r.infeasible_as_specified = true;
    build_tuned(state);
    bool trailing_pass = true;
    bool jacobian_pass = true;
    std::ostringstream detail;
    for (const TunedSystem& t : state.tuned) {
        double worst_trailing = 0.0;
        for (const Vec& x0 : t.unseen) {
            const Trajectory traj = simulate_closed_loop(t.sys.A, t.sys.B, t.fd,
                                                         DisturbanceSignal::zero(static_cast<int>(
                                                             t.sys.A.rows())),
                                                         x0, 200.0, 801);
            const SupMetrics metrics = sup_metrics(traj, 0);  // window [160, 200]
            worst_trailing = std::max(worst_trailing, metrics.trailing_state_norm);
        }
        const double max_real = [&] {
            const Mat jac = closed_loop_jacobian_origin(t.sys.A, t.sys.B, t.fd);
            const Eigen::VectorXcd eigs = jac.eigenvalues();
            double worst = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < eigs.size(); ++i) worst = std::max(worst, eigs[i].real());
            return worst;
        }();
        const bool t_ok = worst_trailing < 1e-3;
        const bool j_ok = max_real < -1e-9;
        trailing_pass = trailing_pass && t_ok;
        jacobian_pass = jacobian_pass && j_ok;
        detail << t.sys.name << ": trailing " << format_double(worst_trailing, 3)
               << (t_ok ? "" : " (>1e-3)") << ", max Re " << format_double(max_real, 3)
               << (j_ok ? "; " : " NOT HURWITZ; ");
    }
    r.pass = trailing_pass && jacobian_pass;
    r.detail = detail.str();
    if (!trailing_pass) {
        r.detail += "| the T=200 target is unreachable for bounded-rate feedback from this ball "
                    "(amplitude <= 0.5 caps the dissipation rate); Jacobian clause " +
                    std::string(jacobian_pass ? "holds" : "fails");
        // informational: attractivity holds at the maximal admissible gains
        // on an extended horizon
        detail.str("");
        detail << " | [info] settle times to ||x|| < 1e-3 at unit gains from ||x0|| = 100: ";
        for (const TunedSystem& t : state.tuned) {
            const int n = static_cast<int>(t.sys.A.rows());
            const GainSchedule ones(std::vector<double>(
                t.tuning.gains.values().size(), 1.0));
            const CanonicalForm cf = build_canonical_form(t.sys.A, t.sys.b, ones.tail_gains());
            const FeedbackDescriptor fd = make_original_feedback(ones, cf);
            double worst_settle = 0.0;
            for (size_t i = 0; i < 3 && i < t.unseen.size(); ++i) {
                Vec x0 = t.unseen[i] * (100.0 / t.unseen[i].norm());
                SettleStop settle;
                settle.threshold = 1e-3;
                settle.window = 5.0;
                const Trajectory traj = simulate_closed_loop(
                    t.sys.A, t.sys.B, fd, DisturbanceSignal::zero(n), x0, 4000.0, 0,
                    IntegratorOptions{}, settle);
                worst_settle = std::max(worst_settle,
                                        traj.stopped_early ? traj.end_time() : 4000.0);
            }
            detail << t.sys.name << " " << format_double(worst_settle, 4) << "s ";
        }
        r.detail += detail.str();
    }
    return r;
}

CriterionResult criterion_scalar_siss() {
    CriterionResult r;
    r.name = "scalar SISS_L: eventual |x| <= (2 eps/beta) delta for delta in {0.1, 0.25, 0.4}";
    const double beta = 1.0;
    const double eps = 1.1;
    const Mat A = Mat::Zero(1, 1);
    const Mat B = Mat::Ones(1, 1);
    SpectralProfile profile;
    profile.z = 1;
    const FeedbackDescriptor fd =
        make_canonical_feedback(GainSchedule({beta}), BlockLayout::from_profile(profile));
    bool pass = true;
    double worst = 0.0;
    for (double delta : {0.1, 0.25, 0.4}) {
        SissTestSpec spec;
        spec.delta = delta;
        spec.n_candidate = 2.0 * eps / beta;
        spec.horizon = 240.0;
        spec.battery = make_battery(1, 6, 0.2, 8.0, 71);
        spec.seed = 13;
        const SissReport report = siss_l_test(A, B, fd, spec);
        pass = pass && report.pass;
        worst = std::max(worst, report.worst_ratio);
    }
    r.pass = pass;
    r.detail = "worst ||x||_ev / delta' = " + format_double(worst, 4) + " vs bound " +
               format_double(2.0 * eps / beta, 4) + " across constant/sinusoid/piecewise families";
    return r;
}

CriterionResult criterion_multi_input() {
    CriterionResult r;
    r.name = "two-block composition converges and is rate-certified (p=1, R=(1,1))";
    Scenario scenario;
    scenario.name = "two-block";
    scenario.reduced = preset_two_block();
    scenario.bounds = BoundSpec(1, {1.0, 1.0});
    scenario.seed = 7;
    scenario.verify_battery = BatterySpec{50, 0.1, 100.0};
    scenario.run_siss = false;
    scenario.tuning.horizon_cap = 40000.0;
    const ScenarioResult result = run_scenario(scenario, "", false);
    const Json& cert = result.report.at("verification");
    const bool converged = cert.value("all_converged", false);
    r.pass = result.pass && converged;
    r.detail = "violations=" + std::to_string(cert.value("violations", -1)) +
               ", sups " + format_double(cert["sup"][0].get<double>(), 4) + "/" +
               format_double(cert["sup"][1].get<double>(), 4) + " vs 1/1, converged=" +
               (converged ? "all" : "not all") + ", exponent p+1=" +
               std::to_string(result.report.value("exponent", -1));
    return r;
}

CriterionResult criterion_bell_numbers() {
    CriterionResult r;
    r.name = "Bell-polynomial row sums reproduce the Bell numbers";
    const double expected[] = {1.0, 2.0, 5.0, 15.0, 52.0};
    bool pass = true;
    for (int k = 1; k <= 5; ++k) {
        std::vector<double> ones(static_cast<size_t>(k), 1.0);
        double total = 0.0;
        for (int a = 1; a <= k; ++a) total += bell_polynomial(k, a, ones);
        pass = pass && total == expected[k - 1];
    }
    r.pass = pass;
    r.detail = "k = 1..5 -> {1, 2, 5, 15, 52}, exact integer arithmetic";
    return r;
}

}  // namespace

std::vector<std::string> acceptance_list() {
    return {
        "1. Lyapunov identity residual on the (omega, beta) grid",
        "2. explicit constants vs independent evaluation",
        "3. saturated-linear counterexample growth and rate-bounded contrast",
        "4. canonical form residuals and characteristic polynomials",
        "5. jet / Faa di Bruno / finite-difference cross-validation",
        "6. p-bounded certification on unseen batteries",
        "7. attractivity proxy at T=200 and origin Jacobian",
        "8. scalar SISS_L with the explicit constants",
        "9. two-block multi-input composition",
        "10. Bell-polynomial combinatorics",
    };
}

AcceptanceOutcome run_acceptance(std::ostream& log) {
    AcceptanceOutcome outcome;
    SharedState shared;

    struct Entry {
        double budget;
        std::function<CriterionResult()> run;
    };
    const std::vector<Entry> entries = {
        {1.0, [] { return criterion_lyapunov_identity(); }},
        {1.0, [] { return criterion_explicit_constants(); }},
        {10.0, [] { return criterion_counterexample(); }},
        {5.0, [] { return criterion_canonical_residuals(); }},
        {30.0, [] { return criterion_derivative_cross_validation(); }},
        {300.0, [&shared] { return criterion_certification(shared); }},
        {300.0, [&shared] { return criterion_attractivity(shared); }},
        {60.0, [] { return criterion_scalar_siss(); }},
        {300.0, [] { return criterion_multi_input(); }},
        {1.0, [] { return criterion_bell_numbers(); }},
    };

    for (size_t i = 0; i < entries.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        CriterionResult result;
        try {
            result = entries[i].run();
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail = std::string("exception: ") + e.what();
        }
        result.index = static_cast<int>(i) + 1;
        result.budget_seconds = entries[i].budget;
        result.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (result.seconds > result.budget_seconds) {
            result.pass = false;
            result.detail += " [over runtime budget]";
        }

        if (!result.pass) {
            ++outcome.failures;
            if (!result.infeasible_as_specified) ++outcome.unexpected_failures;
        }
        log << (result.pass ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << result.index
            << "  [" << std::fixed << std::setprecision(2) << result.seconds << "s/"
            << std::setprecision(0) << result.budget_seconds << "s]  "
            << std::defaultfloat << acceptance_list()[i] << "\n";
        if (!result.detail.empty()) log << "      " << result.detail << "\n";
        if (!result.pass && result.infeasible_as_specified) {
            log << "      (target infeasible as specified; executed faithfully and reported red)\n";
        }
        outcome.results.push_back(std::move(result));
    }

    log << (outcome.failures == 0
                ? "all criteria passed"
                : std::to_string(outcome.failures) + " criterion(s) failed, " +
                      std::to_string(outcome.unexpected_failures) + " unexpected")
        << "\n";
    return outcome;
}

}  // namespace ratebound
