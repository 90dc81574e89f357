#include "ratebound/control_jet.hpp"

#include <cmath>

namespace ratebound {

namespace {

constexpr int kMaxJetOrder = 16;

void check_order(int order) {
    if (order < 0) throw InvalidOrder("jet order must be >= 0");
    if (order > kMaxJetOrder) throw OrderTooHigh("jet order above supported range");
}

}  // namespace

double ControlJetResult::control_derivative_norm(int k) const {
    double acc = 0.0;
    for (const Jet& j : control) {
        const double d = j.derivative(k);
        acc += d * d;
    }
    return std::sqrt(acc);
}

std::vector<Jet> state_jet(const Mat& A, const Mat& B, const FeedbackDescriptor& fd, const Vec& x0,
                           int order) {
    check_order(order);
    if (x0.size() != A.rows() || fd.state_dim() != A.rows()) {
        throw DimensionMismatch("state_jet: dimension mismatch");
    }
    std::vector<Jet> x;
    x.reserve(static_cast<size_t>(x0.size()));
    for (int i = 0; i < x0.size(); ++i) x.push_back(Jet::constant(x0[i], order));

    // x_{[j+1]} = field(x)_{[j]} / (j+1); coefficient j of the field only
    // depends on state coefficients <= j, so filling in place is exact.
    for (int j = 0; j < order; ++j) {
        const std::vector<Jet> f = closed_loop_field_generic(A, B, fd, x);
        for (size_t i = 0; i < x.size(); ++i) {
            x[i].coeff(j + 1) = f[i].coeff(j) / (j + 1);
        }
    }
    return x;
}

ControlJetResult control_jet(const Mat& A, const Mat& B, const FeedbackDescriptor& fd, const Vec& x0,
                             int order) {
    ControlJetResult result;
    result.state = state_jet(A, B, fd, x0, order);
    result.control = feedback_eval_generic(A.rows() > 0 ? result.state : std::vector<Jet>{}, fd);
    return result;
}

std::vector<Jet> control_term_jets(const Mat& A, const Mat& B, const FeedbackDescriptor& fd,
                                   const Vec& x0, int order) {
    if (fd.kind != FeedbackKind::CanonicalSingle && fd.kind != FeedbackKind::OriginalSingle) {
        throw DimensionMismatch("control_term_jets: single-input law expected");
    }
    std::vector<Jet> x = state_jet(A, B, fd, x0, order);
    if (fd.kind == FeedbackKind::OriginalSingle) {
        if (fd.layout.mu() == 0) return {};
        x = apply_matrix(fd.T, x);
    }
    return kappa_terms_generic(x, fd.gains, fd.layout);
}

}  // namespace ratebound
