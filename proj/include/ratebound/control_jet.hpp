#pragma once

#include "ratebound/feedback.hpp"
#include "ratebound/jet.hpp"

namespace ratebound {

/// State and control jets of the autonomous closed loop
/// xdot = A x + B u, u = fd(x), expanded at one state.
struct ControlJetResult {
    std::vector<Jet> state;    // n jets of order K
    std::vector<Jet> control;  // m jets of order K

    /// ||U^(k)(t)|| across control channels.
    double control_derivative_norm(int k) const;
};

ControlJetResult control_jet(const Mat& A, const Mat& B, const FeedbackDescriptor& fd, const Vec& x0,
                             int order);

/// Jets of the individual summands U_i of a single-input law (the state is
/// mapped to canonical coordinates first for OriginalSingle kinds); the
/// control jet equals minus their sum.
std::vector<Jet> control_term_jets(const Mat& A, const Mat& B, const FeedbackDescriptor& fd,
                                   const Vec& x0, int order);

/// State jets only (closed-loop Taylor expansion of x(t) at x0).
std::vector<Jet> state_jet(const Mat& A, const Mat& B, const FeedbackDescriptor& fd, const Vec& x0,
                           int order);

}  // namespace ratebound
