#include "ratebound/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "ratebound/control_jet.hpp"

namespace ratebound {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output weights
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

double initial_step_heuristic(const Rhs& rhs, double t0, const Vec& y0, const Vec& f0, double t1,
                              const IntegratorOptions& opts, IntegratorStats* stats) {
    const int n = static_cast<int>(y0.size());
    double dnf = 0.0, dny = 0.0;
    for (int i = 0; i < n; ++i) {
        const double sk = opts.atol + opts.rtol * std::abs(y0[i]);
        dnf += (f0[i] / sk) * (f0[i] / sk);
        dny += (y0[i] / sk) * (y0[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    h = std::min({h, opts.max_step, std::abs(t1 - t0)});

    Vec y1 = y0 + h * f0;
    Vec f1(n);
    rhs(t0 + h, y1, f1);
    if (stats) ++stats->rhs_evals;
    double der2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double sk = opts.atol + opts.rtol * std::abs(y0[i]);
        der2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(der2, std::sqrt(dnf));
    const double h1 = (der12 <= 1e-15) ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h, h1, opts.max_step, std::abs(t1 - t0)});
}

}  // namespace

Vec DenseStep::eval(double t) const {
    const double theta = (t - t0) / (t1 - t0);
    const double theta1 = 1.0 - theta;
    return rcont1 +
           theta * (rcont2 + theta1 * (rcont3 + theta * (rcont4 + theta1 * rcont5)));
}

Vec integrate_dense(const Rhs& rhs, Vec y, double t0, double t1, const IntegratorOptions& opts,
                    IntegratorStats* stats, const StepObserver& observer) {
    if (t1 <= t0) throw NonPositiveParameter("integrate: t1 must exceed t0");
    if (opts.rtol <= 0.0 || opts.atol <= 0.0) throw NonPositiveParameter("integrate: tolerances must be > 0");
    const int n = static_cast<int>(y.size());

    constexpr double safe = 0.9, fac1 = 0.2, fac2 = 10.0, beta = 0.04;
    constexpr double expo1 = 0.2 - beta * 0.75;
    double facold = 1e-4;

    double t = t0;
    Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ynew(n), ystage(n);
    rhs(t, y, k1);
    if (stats) ++stats->rhs_evals;

    double h = opts.initial_step > 0.0 ? opts.initial_step
                                       : initial_step_heuristic(rhs, t, y, k1, t1, opts, stats);
    bool rejected_last = false;
    long steps = 0;

    while (t < t1) {
        // remaining span below time resolution: the interval is done
        if (t1 - t <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t1))) {
            break;
        }
        if (++steps > opts.max_steps) throw Error("integrate: step budget exceeded");
        if (h < 1e-14 * std::max(1.0, std::abs(t))) throw StepSizeUnderflow("integrate: step size underflow");
        if (t + h > t1) h = t1 - t;

        ystage = y + h * (a21 * k1);
        rhs(t + c2 * h, ystage, k2);
        ystage = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, ystage, k3);
        ystage = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, ystage, k4);
        ystage = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, ystage, k5);
        ystage = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, ystage, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + h, ynew, k7);  // FSAL
        if (stats) stats->rhs_evals += 6;

        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            const double sk = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                   e7 * k7[i]);
            err += (ei / sk) * (ei / sk);
        }
        err = std::sqrt(err / n);

        const double fac11 = std::pow(err, expo1);
        if (err <= 1.0) {
            facold = std::max(err, 1e-4);
            if (stats) ++stats->accepted;

            DenseStep dense;
            dense.t0 = t;
            dense.t1 = t + h;
            const Vec ydiff = ynew - y;
            const Vec bspl = h * k1 - ydiff;
            dense.rcont1 = y;
            dense.rcont2 = ydiff;
            dense.rcont3 = bspl;
            dense.rcont4 = ydiff - h * k7 - bspl;
            dense.rcont5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

            t += h;
            y.swap(ynew);
            k1.swap(k7);

            if (y.norm() > opts.divergence_norm) throw Divergence("integrate: state norm exceeded guard");
            if (observer && !observer(dense)) return y;

            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(1.0 / fac2, std::min(1.0 / fac1, fac / safe));
            double hnew = h / fac;
            if (rejected_last) hnew = std::min(hnew, h);
            rejected_last = false;
            h = std::min(hnew, opts.max_step);
        } else {
            if (stats) ++stats->rejected;
            h = h / std::min(1.0 / fac1, fac11 / safe);
            rejected_last = true;
        }
    }
    return y;
}

Vec integrate_to(const Rhs& rhs, Vec x0, double t0, double t1, const IntegratorOptions& opts,
                 IntegratorStats* stats) {
    return integrate_dense(rhs, std::move(x0), t0, t1, opts, stats, {});
}

DisturbanceSignal DisturbanceSignal::zero(int dim) {
    DisturbanceSignal d;
    d.kind_ = Kind::Zero;
    d.dim_ = dim;
    return d;
}

DisturbanceSignal DisturbanceSignal::constant(const Vec& direction, double delta, double onset,
                                              double pre_onset_amplitude) {
    if (direction.norm() <= 0.0) throw NonPositiveParameter("disturbance: direction must be nonzero");
    DisturbanceSignal d;
    d.kind_ = Kind::Constant;
    d.dim_ = static_cast<int>(direction.size());
    d.direction_ = direction / direction.norm();
    d.delta_ = delta;
    d.onset_ = onset;
    d.pre_amp_ = onset > 0.0 ? pre_onset_amplitude : delta;
    return d;
}

DisturbanceSignal DisturbanceSignal::sinusoid(const Vec& direction, double delta, double frequency,
                                              double onset, double pre_onset_amplitude) {
    DisturbanceSignal d = constant(direction, delta, onset, pre_onset_amplitude);
    d.kind_ = Kind::Sinusoid;
    d.frequency_ = frequency;
    return d;
}

DisturbanceSignal DisturbanceSignal::piecewise_random(int dim, double delta, std::uint64_t seed,
                                                      double horizon_hint, double interval,
                                                      double onset, double pre_onset_amplitude) {
    if (dim < 1) throw DimensionMismatch("disturbance: dim >= 1 required");
    if (interval <= 0.0) throw NonPositiveParameter("disturbance: interval must be > 0");
    DisturbanceSignal d;
    d.kind_ = Kind::PiecewiseRandom;
    d.dim_ = dim;
    d.delta_ = delta;
    d.onset_ = onset;
    d.pre_amp_ = onset > 0.0 ? pre_onset_amplitude : delta;
    d.interval_ = interval;
    d.seed_ = seed;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int count = static_cast<int>(std::ceil(horizon_hint / interval)) + 2;
    d.table_.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        Vec v(dim);
        for (int j = 0; j < dim; ++j) v[j] = gauss(rng);
        const double norm = v.norm();
        const double radius = std::pow(unif(rng), 1.0 / dim);  // uniform in the unit ball
        d.table_.push_back(norm > 0.0 ? Vec(radius / norm * v) : Vec(Vec::Zero(dim)));
    }
    return d;
}

Vec DisturbanceSignal::eval(double t) const { return eval_segment(t, t); }

Vec DisturbanceSignal::eval_segment(double t, double t_representative) const {
    const double amp = amplitude(t_representative);
    switch (kind_) {
        case Kind::Zero:
            return Vec::Zero(dim_);
        case Kind::Constant:
            return amp * direction_;
        case Kind::Sinusoid:
            return amp * std::sin(2.0 * M_PI * frequency_ * t) * direction_;
        case Kind::PiecewiseRandom: {
            size_t idx = static_cast<size_t>(std::max(0.0, t_representative / interval_));
            if (idx >= table_.size()) idx = table_.size() - 1;
            return amp * table_[idx];
        }
    }
    return Vec::Zero(dim_);
}

std::vector<double> DisturbanceSignal::breakpoints(double horizon) const {
    std::vector<double> points;
    if (onset_ > 0.0 && onset_ < horizon) points.push_back(onset_);
    if (kind_ == Kind::PiecewiseRandom) {
        for (int k = 1; k * interval_ < horizon; ++k) points.push_back(k * interval_);
    }
    std::sort(points.begin(), points.end());
    // merge points closer than the integrator's time resolution
    const double min_gap = 1e-9 * std::max(1.0, horizon);
    std::vector<double> merged;
    for (double t : points) {
        if (merged.empty() || t - merged.back() > min_gap) merged.push_back(t);
    }
    return merged;
}

Trajectory simulate_closed_loop(const Mat& A, const Mat& B, const FeedbackDescriptor& fd,
                                const DisturbanceSignal& dist, const Vec& x0, double horizon,
                                int samples, const IntegratorOptions& opts, const SettleStop& settle) {
    if (horizon <= 0.0) throw NonPositiveParameter("simulate: horizon must be > 0");
    const bool per_step = samples == 0;
    if (!per_step && samples < 2) throw NonPositiveParameter("simulate: need at least 2 samples");
    const int n = static_cast<int>(A.rows());
    if (x0.size() != n || fd.state_dim() != n) throw DimensionMismatch("simulate: dimension mismatch");
    if (dist.kind() != DisturbanceSignal::Kind::Zero && dist.dim() != n) {
        throw DimensionMismatch("simulate: disturbance dimension mismatch");
    }

    const bool disturbed = dist.kind() != DisturbanceSignal::Kind::Zero;
    double segment_mid = 0.0;
    Rhs rhs = [&](double t, const Vec& x, Vec& dx) {
        dx = from_std(closed_loop_field_generic(A, B, fd, to_std(x)));
        if (disturbed) dx += dist.eval_segment(t, segment_mid);
    };

    Trajectory traj;
    traj.disturbance = dist;
    traj.rtol = opts.rtol;
    traj.atol = opts.atol;
    traj.horizon = horizon;

    const double dt = per_step ? 0.0 : horizon / (samples - 1);
    traj.times.push_back(0.0);
    traj.states.push_back(x0);

    int next_sample = 1;
    bool stop_requested = false;
    // trailing window of (time, norm) pairs for the settle rule
    std::deque<std::pair<double, double>> window;
    window.emplace_back(0.0, x0.norm());

    auto consider_settle = [&](double t, double norm_value) {
        if (settle.threshold <= 0.0) return false;
        window.emplace_back(t, norm_value);
        while (!window.empty() && window.front().first < t - settle.window) window.pop_front();
        if (t < settle.window) return false;
        double worst = 0.0;
        for (const auto& [wt, wn] : window) worst = std::max(worst, wn);
        return worst < settle.threshold;
    };

    StepObserver observer = [&](const DenseStep& step) {
        if (per_step) {
            const Vec xs = step.eval(step.t1);
            traj.times.push_back(step.t1);
            traj.states.push_back(xs);
            if (consider_settle(step.t1, xs.norm())) {
                stop_requested = true;
                return false;
            }
            return true;
        }
        while (next_sample < samples) {
            const double ts = next_sample * dt;
            if (ts > step.t1 + 1e-14) break;
            const Vec xs = step.eval(std::min(ts, step.t1));
            traj.times.push_back(ts);
            traj.states.push_back(xs);
            ++next_sample;
            if (consider_settle(ts, xs.norm())) {
                stop_requested = true;
                return false;
            }
        }
        return true;
    };

    std::vector<double> segments = dist.breakpoints(horizon);
    segments.push_back(horizon);
    Vec x = x0;
    double t_start = 0.0;
    const double min_segment = 1e-9 * std::max(1.0, horizon);
    for (double t_end : segments) {
        if (t_end <= t_start + min_segment) continue;
        segment_mid = 0.5 * (t_start + t_end);
        x = integrate_dense(rhs, x, t_start, t_end, opts, &traj.stats, observer);
        t_start = t_end;
        if (stop_requested) break;
    }
    traj.stopped_early = stop_requested;
    if (stop_requested) traj.settle_window_hint = settle.window;

    traj.controls.reserve(traj.states.size());
    for (const Vec& xs : traj.states) traj.controls.push_back(feedback_eval(xs, fd));
    return traj;
}

void attach_control_jets(Trajectory& traj, const Mat& A, const Mat& B, const FeedbackDescriptor& fd,
                         int order) {
    if (traj.disturbance.kind() != DisturbanceSignal::Kind::Zero) {
        throw Error("attach_control_jets: jets require the undisturbed autonomous loop");
    }
    traj.control_jets.clear();
    traj.control_jets.reserve(traj.states.size());
    for (const Vec& x : traj.states) {
        traj.control_jets.push_back(control_jet(A, B, fd, x, order).control);
    }
    traj.jet_order = order;
}

SupMetrics sup_metrics(const Trajectory& traj, int p, double window_frac) {
    if (traj.times.empty()) throw DimensionMismatch("sup_metrics: empty trajectory");
    SupMetrics metrics;
    metrics.sup_control.assign(static_cast<size_t>(p) + 1, 0.0);
    metrics.sup_times.assign(static_cast<size_t>(p) + 1, 0.0);

    const bool have_jets = !traj.control_jets.empty() && traj.jet_order >= p;
    const int m = traj.input_dim();

    if (have_jets) {
        for (size_t i = 0; i < traj.control_jets.size(); ++i) {
            for (int j = 0; j <= p; ++j) {
                double acc = 0.0;
                for (const Jet& jet : traj.control_jets[i]) {
                    const double d = jet.derivative(j);
                    acc += d * d;
                }
                const double norm = std::sqrt(acc);
                if (norm > metrics.sup_control[static_cast<size_t>(j)]) {
                    metrics.sup_control[static_cast<size_t>(j)] = norm;
                    metrics.sup_times[static_cast<size_t>(j)] = traj.times[i];
                }
            }
        }
    } else {
        if (p >= 1 && traj.times.size() >= 2) {
            // finite-difference fallback needs the uniform sample grid
            const double dt = traj.times[1] - traj.times[0];
            for (size_t i = 2; i + 1 < traj.times.size(); ++i) {
                const double spacing = traj.times[i] - traj.times[i - 1];
                if (std::abs(spacing - dt) > 1e-9 * std::max(1.0, dt)) {
                    throw MissingJets("sup_metrics: jets absent and grid non-uniform");
                }
            }
            if (static_cast<int>(traj.times.size()) < p + 5) {
                throw MissingJets("sup_metrics: too few samples for the FD fallback");
            }
            std::vector<std::vector<double>> channel(static_cast<size_t>(m));
            for (int c = 0; c < m; ++c) {
                channel[static_cast<size_t>(c)].reserve(traj.controls.size());
                for (const Vec& u : traj.controls) channel[static_cast<size_t>(c)].push_back(u[c]);
            }
            for (int j = 1; j <= p; ++j) {
                std::vector<std::vector<double>> der(static_cast<size_t>(m));
                for (int c = 0; c < m; ++c) {
                    der[static_cast<size_t>(c)] =
                        finite_difference_derivatives(channel[static_cast<size_t>(c)], dt, j);
                }
                for (size_t i = 0; i < traj.times.size(); ++i) {
                    double acc = 0.0;
                    bool valid = true;
                    for (int c = 0; c < m; ++c) {
                        const double d = der[static_cast<size_t>(c)][i];
                        if (std::isnan(d)) {
                            valid = false;
                            break;
                        }
                        acc += d * d;
                    }
                    if (!valid) continue;
                    const double norm = std::sqrt(acc);
                    if (norm > metrics.sup_control[static_cast<size_t>(j)]) {
                        metrics.sup_control[static_cast<size_t>(j)] = norm;
                        metrics.sup_times[static_cast<size_t>(j)] = traj.times[i];
                    }
                }
            }
        } else if (p >= 1) {
            throw MissingJets("sup_metrics: jets required for derivative sups");
        }
        for (size_t i = 0; i < traj.controls.size(); ++i) {
            const double norm = traj.controls[i].norm();
            if (norm > metrics.sup_control[0]) {
                metrics.sup_control[0] = norm;
                metrics.sup_times[0] = traj.times[i];
            }
        }
    }

    const double t_end = traj.end_time();
    metrics.trailing_window = window_frac * t_end;
    if (traj.settle_window_hint > 0.0) {
        metrics.trailing_window = std::min(metrics.trailing_window, traj.settle_window_hint);
    }
    const double t_cut = t_end - metrics.trailing_window;
    for (size_t i = 0; i < traj.times.size(); ++i) {
        if (traj.times[i] >= t_cut) {
            metrics.trailing_state_norm = std::max(metrics.trailing_state_norm, traj.states[i].norm());
        }
    }
    metrics.final_state_norm = traj.states.back().norm();
    return metrics;
}

}  // namespace ratebound
