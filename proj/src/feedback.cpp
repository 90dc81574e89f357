#include "ratebound/feedback.hpp"

namespace ratebound {

GainSchedule::GainSchedule(std::vector<double> a) : a_(std::move(a)) {
    for (double ai : a_) {
        if (!(ai > 0.0) || ai > 1.0) throw NonPositiveGain("gains must lie in (0, 1]");
    }
}

double GainSchedule::Q(int i) const {
    if (i < 1 || i > mu() + 1) throw DimensionMismatch("Q(i): index out of range");
    double q = 1.0;
    for (int l = i; l <= mu(); ++l) q *= a(l);
    return q;
}

std::vector<double> GainSchedule::tail_gains() const {
    if (a_.size() <= 1) return {};
    return std::vector<double>(a_.begin() + 1, a_.end());
}

double GainSchedule::static_bound() const {
    if (mu() == 0) return 0.0;
    double bound = a(mu());
    for (int i = 1; i < mu(); ++i) bound += a(i) * Q(i + 1);
    return bound;
}

BoundSpec::BoundSpec(int p_in, std::vector<double> r) : p(p_in), R(std::move(r)) {
    if (p < 0) throw NonPositiveParameter("BoundSpec: p must be >= 0");
    if (static_cast<int>(R.size()) != p + 1) throw DimensionMismatch("BoundSpec: need p+1 bounds");
    for (double rj : R) {
        if (!(rj > 0.0)) throw NonPositiveParameter("BoundSpec: bounds must be > 0");
    }
}

double BoundSpec::r_min() const {
    double m = R.at(0);
    for (double rj : R) m = std::min(m, rj);
    return m;
}

int FeedbackDescriptor::state_dim() const {
    switch (kind) {
        case FeedbackKind::Zero:
            return zero_dim;
        case FeedbackKind::CanonicalSingle:
            return layout.dim;
        case FeedbackKind::OriginalSingle:
            return static_cast<int>(T.cols());
        case FeedbackKind::SaturatedLinear:
            return 2;
        case FeedbackKind::MultiInput: {
            int n = lead_skip;
            for (int d : block_dims) n += d;
            return n;
        }
    }
    return 0;
}

int FeedbackDescriptor::input_dim() const {
    return kind == FeedbackKind::MultiInput ? static_cast<int>(subs.size()) : 1;
}

FeedbackDescriptor make_zero_feedback(int n) {
    if (n < 1) throw DimensionMismatch("make_zero_feedback: n >= 1 required");
    FeedbackDescriptor fd;
    fd.kind = FeedbackKind::Zero;
    fd.zero_dim = n;
    return fd;
}

FeedbackDescriptor make_canonical_feedback(GainSchedule gains, BlockLayout layout) {
    if (gains.mu() != layout.mu() || layout.mu() < 1) {
        throw DimensionMismatch("make_canonical_feedback: gains/layout mismatch");
    }
    FeedbackDescriptor fd;
    fd.kind = FeedbackKind::CanonicalSingle;
    fd.gains = std::move(gains);
    fd.layout = std::move(layout);
    return fd;
}

FeedbackDescriptor make_original_feedback(GainSchedule gains, BlockLayout layout, Mat T) {
    if (gains.mu() != layout.mu()) throw DimensionMismatch("make_original_feedback: gains/layout mismatch");
    if (T.rows() != layout.dim) throw DimensionMismatch("make_original_feedback: T rows != layout dim");
    FeedbackDescriptor fd;
    fd.kind = FeedbackKind::OriginalSingle;
    fd.gains = std::move(gains);
    fd.layout = std::move(layout);
    fd.T = std::move(T);
    return fd;
}

FeedbackDescriptor make_original_feedback(GainSchedule gains, const CanonicalForm& cf) {
    return make_original_feedback(std::move(gains), cf.layout, cf.T);
}

FeedbackDescriptor make_multi_feedback(std::vector<FeedbackDescriptor> subs, std::vector<int> dims,
                                       int exponent, int lead_skip) {
    if (subs.empty() || subs.size() != dims.size()) {
        throw DimensionMismatch("make_multi_feedback: need one sub-feedback per block");
    }
    for (size_t i = 0; i < subs.size(); ++i) {
        if (subs[i].input_dim() != 1) throw DimensionMismatch("make_multi_feedback: blocks are single-input");
        if (subs[i].state_dim() != dims[i]) throw DimensionMismatch("make_multi_feedback: block dim mismatch");
    }
    if (exponent < 1) throw NonPositiveParameter("make_multi_feedback: exponent >= 1 required");
    FeedbackDescriptor fd;
    fd.kind = FeedbackKind::MultiInput;
    fd.subs = std::move(subs);
    fd.block_dims = std::move(dims);
    fd.exponent = exponent;
    fd.lead_skip = lead_skip;
    return fd;
}

FeedbackDescriptor make_saturated_feedback(const Eigen::Vector2d& k, SaturationKind sigma) {
    if (k[1] == 0.0) throw ZeroK2("make_saturated_feedback: k2 must be nonzero");
    FeedbackDescriptor fd;
    fd.kind = FeedbackKind::SaturatedLinear;
    fd.sat_k = k;
    fd.sigma = sigma;
    return fd;
}

std::vector<double> to_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec from_std(const std::vector<double>& v) {
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

double kappa_eval(const Vec& y, const GainSchedule& gains, const BlockLayout& layout) {
    return kappa_eval_generic(to_std(y), gains, layout);
}

Vec feedback_eval(const Vec& x, const FeedbackDescriptor& fd) {
    return from_std(feedback_eval_generic(to_std(x), fd));
}

double nu_eval(const Vec& x, const FeedbackDescriptor& fd) {
    if (fd.input_dim() != 1) throw DimensionMismatch("nu_eval: single-input law expected");
    return feedback_eval_generic(to_std(x), fd)[0];
}

Vec multi_input_eval(const std::vector<Vec>& block_states, const std::vector<FeedbackDescriptor>& fds,
                     int exponent) {
    std::vector<int> dims;
    std::vector<double> x;
    for (const Vec& b : block_states) {
        dims.push_back(static_cast<int>(b.size()));
        for (int i = 0; i < b.size(); ++i) x.push_back(b[i]);
    }
    const FeedbackDescriptor fd = make_multi_feedback(fds, dims, exponent);
    return from_std(feedback_eval_generic(x, fd));
}

double saturated_linear_eval(const Vec& x, const Eigen::Vector2d& k, SaturationKind sigma) {
    if (x.size() != 2) throw DimensionMismatch("saturated_linear_eval: 2-vector expected");
    return feedback_eval_generic(to_std(x), make_saturated_feedback(k, sigma))[0];
}

double static_bound(const GainSchedule& gains) { return gains.static_bound(); }

double counterexample_initial_derivative(double l, const Eigen::Vector2d& k, double omega,
                                         double sigma_prime_0) {
    if (k[1] == 0.0) throw ZeroK2("counterexample_initial_derivative: k2 must be nonzero");
    // u = -sigma(k^T x), x(0) = (l, -k1 l/k2) so k^T x(0) = 0 and
    // du/dt(0) = -sigma'(0) k^T (omega A0 x(0)) = sigma'(0) omega l (k1^2/k2 + k2).
    return sigma_prime_0 * omega * l * (k[0] * k[0] / k[1] + k[1]);
}

Mat feedback_gradient_origin(const FeedbackDescriptor& fd) {
    const int n = fd.state_dim();
    const int m = fd.input_dim();
    Mat grad = Mat::Zero(m, n);
    switch (fd.kind) {
        case FeedbackKind::Zero:
            break;
        case FeedbackKind::CanonicalSingle: {
            // denominators are 1 + quadratic at the origin, so only the
            // numerators contribute
            for (int i = 1; i <= fd.layout.mu(); ++i) {
                const Block& blk = fd.layout.blocks[static_cast<size_t>(i - 1)];
                const int col = blk.kind == BlockKind::Oscillator ? blk.offset + 1 : blk.offset;
                grad(0, col) = -fd.gains.Q(i);
            }
            break;
        }
        case FeedbackKind::OriginalSingle: {
            if (fd.layout.mu() == 0) break;
            FeedbackDescriptor canon;
            canon.kind = FeedbackKind::CanonicalSingle;
            canon.gains = fd.gains;
            canon.layout = fd.layout;
            grad = feedback_gradient_origin(canon) * fd.T;
            break;
        }
        case FeedbackKind::SaturatedLinear:
            grad(0, 0) = -fd.sat_k[0];
            grad(0, 1) = -fd.sat_k[1];
            break;
        case FeedbackKind::MultiInput: {
            int offset = fd.lead_skip;
            for (size_t i = 0; i < fd.subs.size(); ++i) {
                const Mat sub = feedback_gradient_origin(fd.subs[i]);
                grad.block(static_cast<int>(i), offset, 1, fd.block_dims[i]) = sub;
                offset += fd.block_dims[i];
            }
            break;
        }
    }
    return grad;
}

Mat closed_loop_jacobian_origin(const Mat& A, const Mat& B, const FeedbackDescriptor& fd) {
    return A + B * feedback_gradient_origin(fd);
}

}  // namespace ratebound
