#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ratebound/errors.hpp"

namespace ratebound {

/// Truncated Taylor expansion of a scalar signal at a time point.
/// Coefficient k stores f^(k)/k!, so products never touch raw factorials and
/// stay overflow-free at high orders. All operations are exact truncations
/// of the corresponding power-series operation.
class Jet {
  public:
    Jet() = default;
    explicit Jet(int order) : c_(static_cast<size_t>(order) + 1, 0.0) {
        if (order < 0) throw InvalidOrder("jet order must be >= 0");
    }
    static Jet constant(double value, int order) {
        Jet j(order);
        j.c_[0] = value;
        return j;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    double coeff(int k) const { return c_.at(static_cast<size_t>(k)); }
    double& coeff(int k) { return c_.at(static_cast<size_t>(k)); }
    double value() const { return c_[0]; }
    double derivative(int k) const;  // k! * coeff(k)

    /// Taylor partial sum at offset h.
    double evaluate(double h) const;

    Jet operator-() const;
    friend Jet operator+(const Jet& a, const Jet& b);
    friend Jet operator-(const Jet& a, const Jet& b);
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator+(const Jet& a, double s);
    friend Jet operator+(double s, const Jet& a);
    friend Jet operator-(const Jet& a, double s);
    friend Jet operator-(double s, const Jet& a);
    friend Jet operator*(const Jet& a, double s);
    friend Jet operator*(double s, const Jet& a);
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, double s);

  private:
    std::vector<double> c_;
};

Jet pow(const Jet& v, double alpha);  // requires v(0) > 0
Jet rsqrt(const Jet& v);
Jet sqrt(const Jet& v);
Jet reciprocal(const Jet& v);
Jet sat_tanh(const Jet& u);
Jet sat_atan(const Jet& u);
inline Jet zero_like(const Jet& j) { return Jet(j.order()); }

double factorial(int k);

/// d_k with g(s) = s^{-1/2}, g^(k)(s) = d_k s^{-1/2-k}:
/// d_k = (-1)^k prod_{l=0}^{k-1} (1/2 + l), d_0 = 1.
double g_derivative_coeff(int k);

/// One composition partition: exponent tuple delta and its integer weight
/// c_delta = k! / (prod delta_l! * prod (l!)^delta_l).
struct PartitionTuple {
    std::vector<int> delta;
    std::int64_t coeff;
};

/// All (k-a+1)-tuples of non-negative integers with sum(delta) = a and
/// sum(l * delta_l) = k; exhaustive and duplicate-free.
struct PartitionSet {
    int k = 0;
    int a = 0;
    std::vector<PartitionTuple> tuples;
};

inline constexpr int kMaxPartitionOrder = 12;

/// Memoized; built on first use, immutable afterwards.
const PartitionSet& partition_set(int k, int a);

/// B_{k,a}(phi', ..., phi^(k-a+1)); phi_derivs[l-1] holds phi^(l).
double bell_polynomial(int k, int a, std::span<const double> phi_derivs);

/// Composite derivatives [rho o phi]^(k) for k = 1..K given
/// rho_derivs[a-1] = rho^(a)(phi(t)) and phi_derivs[l-1] = phi^(l)(t).
std::vector<double> faa_di_bruno(std::span<const double> rho_derivs,
                                 std::span<const double> phi_derivs);

/// Central difference of order h^2 for the k-th derivative (k <= 4) at
/// index `center` of a uniformly spaced series.
double central_difference(std::span<const double> values, double h, int k, int center);

/// O(h^4) central stencils (k <= 4), used by the cross-validation suites.
double central_difference_o4(std::span<const double> values, double h, int k, int center);

/// O(h^2) estimates at every interior point where the stencil fits;
/// non-computable edge entries are NaN. Requires at least k+3 samples.
std::vector<double> finite_difference_derivatives(std::span<const double> values, double h, int k);

}  // namespace ratebound
