#include <doctest.h>

#include <cmath>
#include <random>

#include "ratebound/control_jet.hpp"
#include "ratebound/jet.hpp"
#include "ratebound/simulate.hpp"

using namespace ratebound;

TEST_CASE("g derivative coefficients") {
    CHECK(g_derivative_coeff(0) == 1.0);
    CHECK(g_derivative_coeff(1) == doctest::Approx(-0.5));
    CHECK(g_derivative_coeff(2) == doctest::Approx(0.75));
    CHECK(g_derivative_coeff(3) == doctest::Approx(-1.875));
    // recursion d_{k+1} = -(1/2 + k) d_k, exact
    for (int k = 0; k <= 10; ++k) {
        CHECK(g_derivative_coeff(k + 1) == -(0.5 + k) * g_derivative_coeff(k));
    }
}

TEST_CASE("bell polynomial examples") {
    const double x1 = 2.0, x2 = -3.0, x3 = 0.5;
    {
        const double v[] = {x1};
        CHECK(bell_polynomial(3, 3, v) == doctest::Approx(x1 * x1 * x1));
    }
    {
        const double v[] = {x1, x2};
        CHECK(bell_polynomial(3, 2, v) == doctest::Approx(3.0 * x1 * x2));
    }
    {
        const double v[] = {x1, x2, x3};
        CHECK(bell_polynomial(4, 2, v) == doctest::Approx(4.0 * x1 * x3 + 3.0 * x2 * x2));
    }
    CHECK_THROWS_AS(bell_polynomial(0, 1, std::vector<double>{1.0}), InvalidOrder);
    CHECK_THROWS_AS(partition_set(13, 2), OrderTooHigh);
}

TEST_CASE("bell numbers from partition enumeration") {
    // sum over a of B_{k,a}(1,...,1) gives the Bell numbers
    const std::vector<double> expected = {1.0, 2.0, 5.0, 15.0, 52.0};
    for (int k = 1; k <= 5; ++k) {
        std::vector<double> ones(static_cast<size_t>(k), 1.0);
        double total = 0.0;
        for (int a = 1; a <= k; ++a) total += bell_polynomial(k, a, ones);
        CHECK(total == doctest::Approx(expected[static_cast<size_t>(k - 1)]));
    }
}

TEST_CASE("partition sets are exhaustive and duplicate-free") {
    for (int k = 1; k <= 8; ++k) {
        for (int a = 1; a <= k; ++a) {
            const PartitionSet& set = partition_set(k, a);
            for (size_t i = 0; i < set.tuples.size(); ++i) {
                int sum = 0, weight = 0;
                for (size_t l = 0; l < set.tuples[i].delta.size(); ++l) {
                    sum += set.tuples[i].delta[l];
                    weight += static_cast<int>(l + 1) * set.tuples[i].delta[l];
                }
                CHECK(sum == a);
                CHECK(weight == k);
                CHECK(set.tuples[i].coeff > 0);
                for (size_t j = i + 1; j < set.tuples.size(); ++j) {
                    CHECK(set.tuples[i].delta != set.tuples[j].delta);
                }
            }
        }
    }
}

TEST_CASE("faa di bruno basic identities") {
    // rho = identity passes phi derivatives through
    const std::vector<double> phi = {1.5, -2.0, 0.25, 3.0};
    std::vector<double> rho_id = {1.0, 0.0, 0.0, 0.0};
    const std::vector<double> out = faa_di_bruno(rho_id, phi);
    for (size_t i = 0; i < phi.size(); ++i) CHECK(out[i] == doctest::Approx(phi[i]));

    // rho(s) = s^2, phi(t) = t at t=t0: [rho o phi]'' = 2
    const std::vector<double> phi_lin = {1.0, 0.0};
    const double t0 = 0.7;
    const std::vector<double> rho_sq = {2.0 * t0, 2.0};
    const std::vector<double> out2 = faa_di_bruno(rho_sq, phi_lin);
    CHECK(out2[0] == doctest::Approx(2.0 * t0));
    CHECK(out2[1] == doctest::Approx(2.0));
}

TEST_CASE("faa di bruno matches jet composition for g") {
    // random jets for f with f(0) > 1, compose g(s) = s^{-1/2} both ways
    std::mt19937_64 rng(77);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int K = 6;
        Jet f(K);
        f.coeff(0) = 1.5 + std::abs(gauss(rng));
        for (int k = 1; k <= K; ++k) f.coeff(k) = gauss(rng);

        const Jet composed = rsqrt(f);

        std::vector<double> rho(K), phi(K);
        for (int a = 1; a <= K; ++a) {
            rho[static_cast<size_t>(a - 1)] =
                g_derivative_coeff(a) * std::pow(f.coeff(0), -0.5 - a);
            phi[static_cast<size_t>(a - 1)] = f.derivative(a);
        }
        const std::vector<double> fdb = faa_di_bruno(rho, phi);
        for (int k = 1; k <= K; ++k) {
            const double jet_value = composed.derivative(k);
            const double scale = std::max({1.0, std::abs(jet_value)});
            CHECK(std::abs(jet_value - fdb[static_cast<size_t>(k - 1)]) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("jet arithmetic identities") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int K = 7;
        Jet v(K);
        v.coeff(0) = 0.5 + std::abs(gauss(rng));
        for (int k = 1; k <= K; ++k) v.coeff(k) = gauss(rng);

        // recip_sqrt(v)^2 * v == 1 exactly at represented orders
        const Jet r = rsqrt(v);
        const Jet unit = r * r * v;
        CHECK(unit.coeff(0) == doctest::Approx(1.0).epsilon(1e-12));
        for (int k = 1; k <= K; ++k) CHECK(std::abs(unit.coeff(k)) <= 1e-12);

        // division against multiplication
        Jet w(K);
        w.coeff(0) = 1.0 + std::abs(gauss(rng));
        for (int k = 1; k <= K; ++k) w.coeff(k) = gauss(rng);
        const Jet q = v / w;
        const Jet back = q * w;
        for (int k = 0; k <= K; ++k) CHECK(back.coeff(k) == doctest::Approx(v.coeff(k)).epsilon(1e-12));
    }
}

TEST_CASE("jet tanh and atan against scalar derivatives") {
    // u(t) = c0 + c1 t: tanh(u)' = c1 (1 - tanh^2), second derivative by chain rule
    const double c0 = 0.3, c1 = -1.2;
    Jet u(3);
    u.coeff(0) = c0;
    u.coeff(1) = c1;
    const Jet th = sat_tanh(u);
    const double t0 = std::tanh(c0);
    CHECK(th.derivative(0) == doctest::Approx(t0));
    CHECK(th.derivative(1) == doctest::Approx(c1 * (1.0 - t0 * t0)).epsilon(1e-13));
    CHECK(th.derivative(2) ==
          doctest::Approx(-2.0 * t0 * (1.0 - t0 * t0) * c1 * c1).epsilon(1e-12));

    const Jet at = sat_atan(u);
    CHECK(at.derivative(0) == doctest::Approx(std::atan(c0)));
    CHECK(at.derivative(1) == doctest::Approx(c1 / (1.0 + c0 * c0)).epsilon(1e-13));
    CHECK(at.derivative(2) ==
          doctest::Approx(-2.0 * c0 * c1 * c1 / ((1.0 + c0 * c0) * (1.0 + c0 * c0))).epsilon(1e-12));
}

TEST_CASE("control jet of the scalar saturated integrator") {
    // ydot = -a y / sqrt(1 + y^2), a = 1
    Mat A = Mat::Zero(1, 1);
    Mat B = Mat::Identity(1, 1);
    SpectralProfile p;
    p.z = 1;
    const FeedbackDescriptor fd =
        make_canonical_feedback(GainSchedule({1.0}), BlockLayout::from_profile(p));

    SUBCASE("equilibrium jets vanish") {
        const ControlJetResult r = control_jet(A, B, fd, Vec::Zero(1), 5);
        for (int k = 0; k <= 5; ++k) CHECK(r.control[0].derivative(k) == 0.0);
    }

    SUBCASE("hand chain rule at y = 1") {
        Vec y0(1);
        y0 << 1.0;
        const ControlJetResult r = control_jet(A, B, fd, y0, 3);
        CHECK(r.control[0].derivative(0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));
        // U' = -ydot (1+y^2)^{-3/2} with ydot = -1/sqrt(2)
        CHECK(r.control[0].derivative(1) == doctest::Approx(0.25).epsilon(1e-13));
    }
}

TEST_CASE("finite difference stencils") {
    SUBCASE("first derivative exact on quadratics") {
        std::vector<double> v;
        const double h = 0.37;
        for (int i = -3; i <= 3; ++i) {
            const double t = i * h;
            v.push_back(3.0 * t * t - 2.0 * t + 1.0);
        }
        CHECK(central_difference(v, h, 1, 3) == doctest::Approx(-2.0).epsilon(1e-12));
    }
    SUBCASE("second derivative of sin") {
        std::vector<double> v;
        const double h = 1e-3;
        const double t0 = 0.9;
        for (int i = -3; i <= 3; ++i) v.push_back(std::sin(t0 + i * h));
        CHECK(std::abs(central_difference(v, h, 2, 3) - (-std::sin(t0))) <= 1e-6);
    }
    SUBCASE("constant signal has zero derivatives") {
        std::vector<double> v(9, 4.2);
        for (int k = 1; k <= 4; ++k) {
            CHECK(std::abs(central_difference(v, 0.1, k, 4)) <= 1e-9);
        }
    }
    SUBCASE("order-4 stencils are exact up to degree k+3") {
        const double h = 0.21;
        for (int k = 1; k <= 4; ++k) {
            for (int deg = 0; deg <= k + 3; ++deg) {
                std::vector<double> v;
                for (int i = -3; i <= 3; ++i) v.push_back(std::pow(i * h, deg));
                double expected = 0.0;
                if (deg == k) expected = factorial(k);
                CHECK(std::abs(central_difference_o4(v, h, k, 3) - expected) <= 1e-8);
            }
        }
    }
    SUBCASE("vector form and sample guards") {
        std::vector<double> v = {0.0, 1.0, 4.0, 9.0, 16.0};
        const auto d = finite_difference_derivatives(v, 1.0, 1);
        CHECK(std::isnan(d[0]));
        CHECK(d[2] == doctest::Approx(4.0));
        CHECK_THROWS_AS(finite_difference_derivatives(std::vector<double>{1.0, 2.0}, 1.0, 1),
                        TooFewSamples);
    }
}

TEST_CASE("taylor prediction converges at order K+1") {
    // oscillator with the bounded feedback; predict U(t+h) from the jet at t
    const Mat A = rotation_generator();
    Mat B(2, 1);
    B << 0.0, 1.0;
    SpectralProfile p;
    p.s = 1;
    p.omegas = {1.0};
    const FeedbackDescriptor fd =
        make_canonical_feedback(GainSchedule({0.8}), BlockLayout::from_profile(p));

    Vec x0(2);
    x0 << 1.3, -0.4;
    // independent reference: tightly integrated x(t+h), control re-evaluated
    IntegratorOptions tight;
    tight.rtol = 1e-13;
    tight.atol = 1e-15;
    Rhs rhs = [&](double, const Vec& x, Vec& dx) {
        dx = from_std(closed_loop_field_generic(A, B, fd, to_std(x)));
    };
    for (int K : {2, 3, 4}) {
        const ControlJetResult at0 = control_jet(A, B, fd, x0, K);
        std::vector<double> hs = {0.4, 0.2, 0.1, 0.05, 0.025};
        std::vector<double> errs;
        for (double h : hs) {
            const Vec xh = integrate_to(rhs, x0, 0.0, h, tight);
            const double exact = nu_eval(xh, fd);
            errs.push_back(std::abs(at0.control[0].evaluate(h) - exact));
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int n = static_cast<int>(hs.size());
        for (int i = 0; i < n; ++i) {
            const double lx = std::log(hs[static_cast<size_t>(i)]);
            const double ly = std::log(std::max(errs[static_cast<size_t>(i)], 1e-17));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        CHECK(slope == doctest::Approx(K + 1.0).epsilon(0.2 / (K + 1.0)));
    }
}
