#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "ratebound/feedback.hpp"
#include "ratebound/jet.hpp"

namespace ratebound {

struct IntegratorOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double initial_step = 0.0;  // 0 selects the startup heuristic
    double max_step = std::numeric_limits<double>::infinity();
    double divergence_norm = 1e9;
    long max_steps = 100000000;
};

struct IntegratorStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
};

using Rhs = std::function<void(double t, const Vec& x, Vec& dx)>;

/// Dense interpolant of one accepted step (4th-order continuous extension).
class DenseStep {
  public:
    double t0 = 0.0;
    double t1 = 0.0;
    Vec eval(double t) const;

    Vec rcont1, rcont2, rcont3, rcont4, rcont5;
};

using StepObserver = std::function<bool(const DenseStep&)>;  // return false to stop

/// Adaptive embedded 4(5) integration with dense output; the observer sees
/// every accepted step and may stop the run.
Vec integrate_dense(const Rhs& rhs, Vec x0, double t0, double t1, const IntegratorOptions& opts,
                    IntegratorStats* stats, const StepObserver& observer);

Vec integrate_to(const Rhs& rhs, Vec x0, double t0, double t1, const IntegratorOptions& opts = {},
                 IntegratorStats* stats = nullptr);

/// Additive state disturbance e(t), eventually bounded by delta: for
/// t >= onset, ||e(t)|| <= delta; before onset the amplitude may be larger.
class DisturbanceSignal {
  public:
    enum class Kind { Zero, Constant, Sinusoid, PiecewiseRandom };

    static DisturbanceSignal zero(int dim);
    static DisturbanceSignal constant(const Vec& direction, double delta, double onset = 0.0,
                                      double pre_onset_amplitude = 0.0);
    static DisturbanceSignal sinusoid(const Vec& direction, double delta, double frequency,
                                      double onset = 0.0, double pre_onset_amplitude = 0.0);
    /// Piecewise-constant on intervals of fixed length, values uniform in the
    /// unit ball scaled by the amplitude; reproducible from the seed.
    static DisturbanceSignal piecewise_random(int dim, double delta, std::uint64_t seed,
                                              double horizon_hint, double interval = 0.1,
                                              double onset = 0.0, double pre_onset_amplitude = 0.0);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    double delta() const { return delta_; }
    double onset() const { return onset_; }
    std::uint64_t seed() const { return seed_; }

    Vec eval(double t) const;
    /// Evaluation with the piecewise index and amplitude frozen at a segment
    /// representative, so the integrand stays smooth between breakpoints.
    Vec eval_segment(double t, double t_representative) const;
    /// Discontinuity locations in (0, horizon); integration restarts there.
    std::vector<double> breakpoints(double horizon) const;

  private:
    Kind kind_ = Kind::Zero;
    int dim_ = 0;
    double delta_ = 0.0;
    double onset_ = 0.0;
    double pre_amp_ = 0.0;
    double frequency_ = 0.0;
    double interval_ = 0.1;
    std::uint64_t seed_ = 0;
    Vec direction_;
    std::vector<Vec> table_;  // unit-ball samples for the piecewise kind

    double amplitude(double t) const { return t < onset_ ? pre_amp_ : delta_; }
};

/// Early-exit rule: stop once max ||x|| over the last `window` seconds of
/// samples drops below `threshold`.
struct SettleStop {
    double threshold = -1.0;  // disabled when <= 0
    double window = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Vec> controls;
    std::vector<std::vector<Jet>> control_jets;  // per sample; empty until attached
    int jet_order = -1;

    DisturbanceSignal disturbance = DisturbanceSignal::zero(0);
    IntegratorStats stats;
    double rtol = 0.0;
    double atol = 0.0;
    double horizon = 0.0;
    bool stopped_early = false;
    double settle_window_hint = 0.0;  // > 0 when the run was settle-stopped

    int state_dim() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
    int input_dim() const { return controls.empty() ? 0 : static_cast<int>(controls.front().size()); }
    double end_time() const { return times.empty() ? 0.0 : times.back(); }
};

/// samples >= 2 records a uniform grid; samples == 0 records every accepted
/// integrator step (density then follows the dynamics and max_step).
Trajectory simulate_closed_loop(const Mat& A, const Mat& B, const FeedbackDescriptor& fd,
                                const DisturbanceSignal& dist, const Vec& x0, double horizon,
                                int samples = 2001, const IntegratorOptions& opts = {},
                                const SettleStop& settle = {});

/// Per-sample control jets of the undisturbed autonomous loop.
void attach_control_jets(Trajectory& traj, const Mat& A, const Mat& B, const FeedbackDescriptor& fd,
                         int order);

struct SupMetrics {
    std::vector<double> sup_control;   // sup_t ||U^(j)(t)||, j = 0..p
    std::vector<double> sup_times;     // argmax location per j
    double trailing_state_norm = 0.0;  // max ||x|| on the trailing window
    double trailing_window = 0.0;
    double final_state_norm = 0.0;

    bool converged(double threshold) const { return trailing_state_norm < threshold; }
};

/// Sups of ||U^(j)|| over the sample grid from jets; when jets are absent, a
/// uniform grid enables a central-difference fallback (j >= 1).
SupMetrics sup_metrics(const Trajectory& traj, int p, double window_frac = 0.2);

}  // namespace ratebound
