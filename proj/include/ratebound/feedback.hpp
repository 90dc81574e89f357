#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "ratebound/canonical.hpp"

namespace ratebound {

/// Gains a_1..a_mu in (0,1] and the products Q_{i,mu} = prod_{l=i}^{mu} a_l.
class GainSchedule {
  public:
    GainSchedule() = default;
    explicit GainSchedule(std::vector<double> a);

    int mu() const { return static_cast<int>(a_.size()); }
    double a(int i) const { return a_.at(static_cast<size_t>(i - 1)); }
    const std::vector<double>& values() const { return a_; }

    /// Q_{i,mu}; Q(mu+1) = 1 by convention (empty product).
    double Q(int i) const;

    /// a_2..a_mu, the gains the theta table depends on.
    std::vector<double> tail_gains() const;

    /// a_mu + sum_{i<mu} a_i Q_{i+1,mu}: a priori bound on |kappa| over all states.
    double static_bound() const;

  private:
    std::vector<double> a_;
};

struct BoundSpec {
    int p = 0;
    std::vector<double> R;  // R_0..R_p, all > 0

    BoundSpec() = default;
    BoundSpec(int p_in, std::vector<double> r);
    double r_min() const;
};

enum class SaturationKind { Tanh, Atan };

enum class FeedbackKind { Zero, CanonicalSingle, OriginalSingle, MultiInput, SaturatedLinear };

/// Evaluable description of a feedback law. Immutable after construction.
struct FeedbackDescriptor {
    FeedbackKind kind = FeedbackKind::Zero;

    // single-input kinds
    GainSchedule gains;
    BlockLayout layout;
    Mat T;  // OriginalSingle: y = T x

    // multi-input
    std::vector<FeedbackDescriptor> subs;
    std::vector<int> block_dims;
    int exponent = 1;   // denominator power, p+1 by default
    int lead_skip = 0;  // leading coordinates (Hurwitz head) the law ignores

    // saturated-linear
    Eigen::Vector2d sat_k = Eigen::Vector2d::Zero();
    SaturationKind sigma = SaturationKind::Tanh;

    int zero_dim = 0;  // Zero kind state dimension

    int state_dim() const;
    int input_dim() const;
};

FeedbackDescriptor make_zero_feedback(int n);
FeedbackDescriptor make_canonical_feedback(GainSchedule gains, BlockLayout layout);
FeedbackDescriptor make_original_feedback(GainSchedule gains, BlockLayout layout, Mat T);
FeedbackDescriptor make_original_feedback(GainSchedule gains, const CanonicalForm& cf);
FeedbackDescriptor make_multi_feedback(std::vector<FeedbackDescriptor> subs, std::vector<int> dims,
                                       int exponent, int lead_skip = 0);
FeedbackDescriptor make_saturated_feedback(const Eigen::Vector2d& k, SaturationKind sigma);

// scalar helpers shared by the generic evaluation code
inline double rsqrt(double x) { return 1.0 / std::sqrt(x); }
inline std::complex<double> rsqrt(const std::complex<double>& x) { return 1.0 / std::sqrt(x); }
inline double reciprocal(double x) { return 1.0 / x; }
inline std::complex<double> reciprocal(const std::complex<double>& x) { return 1.0 / x; }
inline double sat_tanh(double x) { return std::tanh(x); }
inline std::complex<double> sat_tanh(const std::complex<double>& x) { return std::tanh(x); }
inline double sat_atan(double x) { return std::atan(x); }
inline std::complex<double> sat_atan(const std::complex<double>& x) { return std::atan(x); }
inline double zero_like(double) { return 0.0; }
inline std::complex<double> zero_like(const std::complex<double>&) { return {0.0, 0.0}; }

template <class S>
S powi_generic(const S& x, int n) {
    S result = x;
    for (int i = 1; i < n; ++i) result = result * x;
    return result;
}

/// Signed summands U_i of kappa(y) = -sum_i U_i, one per block:
/// U_i = Q_{i,mu} * num_i / sqrt(1 + sum_{m>=i} ||y_m||^2).
template <class S>
std::vector<S> kappa_terms_generic(const std::vector<S>& y, const GainSchedule& gains,
                                   const BlockLayout& layout) {
    const int mu = layout.mu();
    if (gains.mu() != mu) throw DimensionMismatch("kappa: gains/layout mu mismatch");
    if (static_cast<int>(y.size()) != layout.dim) throw DimensionMismatch("kappa: state dimension mismatch");

    std::vector<S> terms;
    if (mu == 0) return terms;
    const S zero = zero_like(y[0]);

    std::vector<S> tail(static_cast<size_t>(mu), zero);
    for (int i = mu; i >= 1; --i) {
        const Block& blk = layout.blocks[static_cast<size_t>(i - 1)];
        S sq = zero;
        for (int c = 0; c < blk.size; ++c) {
            const S& v = y[static_cast<size_t>(blk.offset + c)];
            sq = sq + v * v;
        }
        tail[static_cast<size_t>(i - 1)] = (i == mu) ? sq : sq + tail[static_cast<size_t>(i)];
    }

    terms.reserve(static_cast<size_t>(mu));
    for (int i = 1; i <= mu; ++i) {
        const Block& blk = layout.blocks[static_cast<size_t>(i - 1)];
        const S& num = (blk.kind == BlockKind::Oscillator) ? y[static_cast<size_t>(blk.offset + 1)]
                                                           : y[static_cast<size_t>(blk.offset)];
        const S denom_arg = tail[static_cast<size_t>(i - 1)] + 1.0;
        terms.push_back(gains.Q(i) * num * rsqrt(denom_arg));
    }
    return terms;
}

template <class S>
S kappa_eval_generic(const std::vector<S>& y, const GainSchedule& gains, const BlockLayout& layout) {
    if (y.empty()) throw DimensionMismatch("kappa: empty state");
    S value = zero_like(y[0]);
    for (const S& term : kappa_terms_generic(y, gains, layout)) value = value - term;
    return value;
}

template <class S>
std::vector<S> apply_matrix(const Mat& M, const std::vector<S>& x) {
    if (static_cast<int>(x.size()) != M.cols()) throw DimensionMismatch("apply_matrix: size mismatch");
    std::vector<S> out;
    if (M.rows() == 0) return out;
    if (x.empty()) throw DimensionMismatch("apply_matrix: empty state");
    out.reserve(static_cast<size_t>(M.rows()));
    const S zero = zero_like(x[0]);
    for (int i = 0; i < M.rows(); ++i) {
        S acc = zero;
        for (int j = 0; j < M.cols(); ++j) {
            const double mij = M(i, j);
            if (mij != 0.0) acc = acc + mij * x[static_cast<size_t>(j)];
        }
        out.push_back(acc);
    }
    return out;
}

template <class S>
std::vector<S> feedback_eval_generic(const std::vector<S>& x, const FeedbackDescriptor& fd) {
    if (static_cast<int>(x.size()) != fd.state_dim() || x.empty()) {
        throw DimensionMismatch("feedback_eval: state dimension mismatch");
    }
    switch (fd.kind) {
        case FeedbackKind::Zero:
            return {zero_like(x[0])};
        case FeedbackKind::CanonicalSingle:
            return {kappa_eval_generic(x, fd.gains, fd.layout)};
        case FeedbackKind::OriginalSingle: {
            if (fd.layout.mu() == 0) {
                // Hurwitz-only degenerate case: zero control
                return {zero_like(x[0])};
            }
            return {kappa_eval_generic(apply_matrix(fd.T, x), fd.gains, fd.layout)};
        }
        case FeedbackKind::SaturatedLinear: {
            if (fd.sat_k[1] == 0.0) throw ZeroK2("saturated feedback requires k2 != 0");
            const S arg = fd.sat_k[0] * x[0] + fd.sat_k[1] * x[1];
            return {(fd.sigma == SaturationKind::Tanh) ? -sat_tanh(arg) : -sat_atan(arg)};
        }
        case FeedbackKind::MultiInput: {
            const int q = static_cast<int>(fd.subs.size());
            const S zero = zero_like(x[0]);
            // suffix sums of squared block norms
            std::vector<S> suffix(static_cast<size_t>(q) + 1, zero);
            int offset = fd.lead_skip;
            std::vector<int> offsets(static_cast<size_t>(q));
            for (int i = 0; i < q; ++i) {
                offsets[static_cast<size_t>(i)] = offset;
                offset += fd.block_dims[static_cast<size_t>(i)];
            }
            for (int i = q - 1; i >= 0; --i) {
                S sq = zero;
                for (int c = 0; c < fd.block_dims[static_cast<size_t>(i)]; ++c) {
                    const S& v = x[static_cast<size_t>(offsets[static_cast<size_t>(i)] + c)];
                    sq = sq + v * v;
                }
                suffix[static_cast<size_t>(i)] = sq + suffix[static_cast<size_t>(i) + 1];
            }
            std::vector<S> u;
            u.reserve(static_cast<size_t>(q));
            for (int i = 0; i < q; ++i) {
                std::vector<S> xi(x.begin() + offsets[static_cast<size_t>(i)],
                                  x.begin() + offsets[static_cast<size_t>(i)] +
                                      fd.block_dims[static_cast<size_t>(i)]);
                S ki = feedback_eval_generic(xi, fd.subs[static_cast<size_t>(i)])[0];
                if (i + 1 < q) {
                    const S denom = suffix[static_cast<size_t>(i) + 1] + 1.0;
                    ki = ki * powi_generic(reciprocal(denom), fd.exponent);
                }
                u.push_back(ki);
            }
            return u;
        }
    }
    throw Error("feedback_eval: unknown kind");
}

template <class S>
std::vector<S> closed_loop_field_generic(const Mat& A, const Mat& B, const FeedbackDescriptor& fd,
                                         const std::vector<S>& x) {
    std::vector<S> dx = apply_matrix(A, x);
    const std::vector<S> u = feedback_eval_generic(x, fd);
    if (static_cast<int>(u.size()) != B.cols()) throw DimensionMismatch("closed_loop_field: B/u mismatch");
    for (int i = 0; i < B.rows(); ++i) {
        for (int j = 0; j < B.cols(); ++j) {
            const double bij = B(i, j);
            if (bij != 0.0) dx[static_cast<size_t>(i)] = dx[static_cast<size_t>(i)] + bij * u[static_cast<size_t>(j)];
        }
    }
    return dx;
}

// double-precision front ends
double kappa_eval(const Vec& y, const GainSchedule& gains, const BlockLayout& layout);
double nu_eval(const Vec& x, const FeedbackDescriptor& fd);
Vec feedback_eval(const Vec& x, const FeedbackDescriptor& fd);
Vec multi_input_eval(const std::vector<Vec>& block_states, const std::vector<FeedbackDescriptor>& fds,
                     int exponent);
double saturated_linear_eval(const Vec& x, const Eigen::Vector2d& k, SaturationKind sigma);
double static_bound(const GainSchedule& gains);

/// Exact du/dt at t = 0 for u = -sigma(k^T x) on xdot = omega A0 x + b0 u
/// started at (l, -k1 l / k2): sigma'(0) * omega * l * (k1^2/k2 + k2).
double counterexample_initial_derivative(double l, const Eigen::Vector2d& k, double omega,
                                         double sigma_prime_0);

/// Gradient rows of the feedback at the origin (m x n); exact, used for the
/// closed-loop Jacobian A + B * grad.
Mat feedback_gradient_origin(const FeedbackDescriptor& fd);
Mat closed_loop_jacobian_origin(const Mat& A, const Mat& B, const FeedbackDescriptor& fd);

std::vector<double> to_std(const Vec& v);
Vec from_std(const std::vector<double>& v);

}  // namespace ratebound
