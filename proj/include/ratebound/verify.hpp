#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ratebound/canonical.hpp"
#include "ratebound/control_jet.hpp"
#include "ratebound/simulate.hpp"

namespace ratebound {

/// Seeded initial-condition battery: uniform directions, log-uniform norms.
std::vector<Vec> make_battery(int n, int count, double min_norm, double max_norm,
                              std::uint64_t seed);

struct BoundCertificate {
    bool pass = false;       // sup ||U^(j)|| <= R_j for every j on every trajectory
    bool bounds_ok = false;
    bool all_converged = false;
    // the finite-horizon sups stand in for sup over t >= 0 only when every
    // run satisfied the trailing decay criterion
    bool certified_global = false;
    std::vector<double> sup;        // worst sup ||U^(j)|| over all trajectories
    std::vector<double> sup_time;   // where it was attained
    std::vector<int> sup_traj;      // which trajectory
    std::vector<double> bounds;     // the R_j
    double worst_trailing = 0.0;
    double convergence_threshold = 0.0;
    int trajectory_count = 0;
    int violations = 0;

    std::string summary() const;
};

/// Pass iff sup ||U^(j)|| <= R_j for every j on every trajectory.
/// Trajectories must carry jets to order p (or a uniform grid for the
/// finite-difference fallback).
BoundCertificate check_p_bounded(const std::vector<Trajectory>& trajectories, const BoundSpec& bounds,
                                 double convergence_threshold = 1e-6);

struct TuningOptions {
    double horizon_cap = 6000.0;
    double settle_threshold = 1e-7;
    double settle_window = 20.0;
    double convergence_threshold = 1e-6;
    double max_step = 0.5;
    double rtol = 1e-8;
    double atol = 1e-10;
    double gain_floor = 9.094947017729282e-13;  // 2^-40
    int max_repair_rounds = 8;
    double stage_budget_scale = 1.0;
};

struct StageRecord {
    int stage = 0;  // block index i, tuned from mu down to 1
    double gain = 0.0;
    int halvings = 0;
    double term_derivative_sup = 0.0;  // sup over j in [1,p] of |U_i^(j)|
    double static_bound = 0.0;
    bool converged = false;
};

struct TuningReport {
    GainSchedule gains;
    BoundSpec bounds;
    std::vector<StageRecord> stages;
    int repair_rounds = 0;
    bool certified = false;
    BoundCertificate battery_certificate;
    double per_stage_budget = 0.0;
    int battery_size = 0;
};

/// Top-down halving tuner for an all-critical controllable single-input pair:
/// stage i fixes a_i (i = mu..1), halving from 1 until every battery run
/// converges, the static amplitude bound fits, and the stage term's
/// derivative sups fit the per-stage budget R_min/(mu (p+1)). The final
/// schedule is certified by an independent check_p_bounded pass.
TuningReport tune_gains(const Mat& A, const Vec& b, const BoundSpec& bounds,
                        const std::vector<Vec>& battery, const TuningOptions& opts = {});

/// Convenience: simulate the battery with jets attached, then certify.
std::vector<Trajectory> run_battery(const Mat& A, const Mat& B, const FeedbackDescriptor& fd,
                                    const std::vector<Vec>& battery, int jet_order,
                                    const TuningOptions& opts);

struct SissTestSpec {
    double delta = 0.1;
    double n_candidate = 1.0;  // pass requires ||x||_ev <= n_candidate * delta'
    std::vector<DisturbanceSignal::Kind> families = {
        DisturbanceSignal::Kind::Constant,
        DisturbanceSignal::Kind::Sinusoid,
        DisturbanceSignal::Kind::PiecewiseRandom,
    };
    double horizon = 300.0;
    double window_frac = 0.2;
    std::vector<Vec> battery;
    std::uint64_t seed = 1;
    double onset_frac = 0.05;          // disturbance onset at onset_frac * horizon
    double pre_onset_scale = 2.0;      // amplitude before onset
    double sinusoid_frequency = 0.25;
};

struct SissOutcome {
    DisturbanceSignal::Kind family;
    double delta_prime = 0.0;
    double worst_trailing = 0.0;
    double ratio = 0.0;  // worst_trailing / delta_prime
    bool pass = false;
};

struct SissReport {
    bool pass = false;
    double worst_ratio = 0.0;
    std::vector<SissOutcome> rows;
};

/// Empirical SISS_L test per its definition: for each family and each
/// delta' in {delta, delta/2, delta/4}, every battery solution must be
/// eventually bounded by N delta' (trailing window proxy).
SissReport siss_l_test(const Mat& A, const Mat& B, const FeedbackDescriptor& fd,
                       const SissTestSpec& spec);

/// Worst observed trailing ratio scaled by 1.5: the empirical gain estimate,
/// meant to be re-validated on a disjoint battery.
double estimate_siss_gain(const Mat& A, const Mat& B, const FeedbackDescriptor& fd,
                          const SissTestSpec& spec);

struct LyapunovSuiteRow {
    double omega = 0.0;
    double beta = 0.0;
    double residual = 0.0;
    double min_v = 0.0;         // over nonzero samples
    double max_vdot = 0.0;      // over samples with ||x|| in [0.1, 100]
    double worst_fd_mismatch = 0.0;
    bool pass = false;
};

struct LyapunovSuiteReport {
    bool pass = false;
    double worst_residual = 0.0;
    double worst_vdot = 0.0;
    std::vector<LyapunovSuiteRow> rows;
};

/// Residual of the explicit Lyapunov solution plus positivity of V and
/// negativity of Vdot along the damped oscillator field on sampled states.
LyapunovSuiteReport oscillator_lyapunov_suite(const std::vector<double>& omegas,
                                              const std::vector<double>& betas,
                                              int samples_per_pair = 1000, std::uint64_t seed = 1);

/// V(x) = x^T P x + ((sigma_hi + sigma_lo)/3) ((1+||x||^2)^{3/2} - 1).
double oscillator_lyapunov_value(const LyapunovPair& pair, const Eigen::Vector2d& x);
double oscillator_lyapunov_derivative(const LyapunovPair& pair, const Eigen::Vector2d& x);

struct GrowthReport {
    std::vector<double> l_values;
    std::vector<double> simulated;    // du/dt at t=0 from the jet pipeline
    std::vector<double> closed_form;  // counterexample_initial_derivative
    double max_rel_err = 0.0;
    double slope = 0.0;           // through-origin least squares of |du/dt(0)| vs l
    double expected_slope = 0.0;  // sigma'(0) omega |k1^2/k2 + k2|
    double contrast_sup_rate = 0.0;
    double contrast_bound = 0.0;
    bool contrast_ran = false;
    bool pass = false;
};

/// Derivative growth of the saturated linear law on the 2D oscillator along
/// the initial-condition ray (l, -k1 l/k2); optionally contrasts with a
/// rate-certified feedback on the same sweep.
GrowthReport counterexample_growth(const std::vector<double>& l_values, const Eigen::Vector2d& k,
                                   double omega, SaturationKind sigma,
                                   const FeedbackDescriptor* contrast = nullptr,
                                   double contrast_rate_bound = 0.0);

}  // namespace ratebound
