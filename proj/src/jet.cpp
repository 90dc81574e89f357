#include "ratebound/jet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ratebound {

namespace {

void check_same_order(const Jet& a, const Jet& b) {
    if (a.order() != b.order()) throw InvalidOrder("jet order mismatch");
}

}  // namespace

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

double Jet::derivative(int k) const { return factorial(k) * coeff(k); }

double Jet::evaluate(double h) const {
    double acc = 0.0;
    for (int k = order(); k >= 0; --k) acc = coeff(k) + h * acc;
    return acc;
}

Jet Jet::operator-() const {
    Jet out(order());
    for (int k = 0; k <= order(); ++k) out.coeff(k) = -coeff(k);
    return out;
}

Jet operator+(const Jet& a, const Jet& b) {
    check_same_order(a, b);
    Jet out(a.order());
    for (int k = 0; k <= a.order(); ++k) out.coeff(k) = a.coeff(k) + b.coeff(k);
    return out;
}

Jet operator-(const Jet& a, const Jet& b) {
    check_same_order(a, b);
    Jet out(a.order());
    for (int k = 0; k <= a.order(); ++k) out.coeff(k) = a.coeff(k) - b.coeff(k);
    return out;
}

Jet operator*(const Jet& a, const Jet& b) {
    check_same_order(a, b);
    Jet out(a.order());
    for (int k = 0; k <= a.order(); ++k) {
        double acc = 0.0;
        for (int i = 0; i <= k; ++i) acc += a.coeff(i) * b.coeff(k - i);
        out.coeff(k) = acc;
    }
    return out;
}

Jet operator+(const Jet& a, double s) {
    Jet out = a;
    out.coeff(0) += s;
    return out;
}
Jet operator+(double s, const Jet& a) { return a + s; }
Jet operator-(const Jet& a, double s) { return a + (-s); }
Jet operator-(double s, const Jet& a) { return (-a) + s; }

Jet operator*(const Jet& a, double s) {
    Jet out(a.order());
    for (int k = 0; k <= a.order(); ++k) out.coeff(k) = a.coeff(k) * s;
    return out;
}
Jet operator*(double s, const Jet& a) { return a * s; }

Jet operator/(const Jet& a, const Jet& b) {
    check_same_order(a, b);
    if (b.coeff(0) == 0.0) throw Error("jet division by zero constant term");
    Jet out(a.order());
    for (int k = 0; k <= a.order(); ++k) {
        double acc = a.coeff(k);
        for (int i = 0; i < k; ++i) acc -= out.coeff(i) * b.coeff(k - i);
        out.coeff(k) = acc / b.coeff(0);
    }
    return out;
}

Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }

Jet reciprocal(const Jet& v) { return Jet::constant(1.0, v.order()) / v; }

Jet pow(const Jet& v, double alpha) {
    if (v.coeff(0) <= 0.0) throw Error("jet pow requires positive constant term");
    const int K = v.order();
    Jet w(K);
    w.coeff(0) = std::pow(v.coeff(0), alpha);
    // v w' = alpha w v' in coefficients:
    // w_k = (1/(k v_0)) sum_{j=1}^{k} ((alpha+1) j - k) v_j w_{k-j}
    for (int k = 1; k <= K; ++k) {
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) {
            acc += ((alpha + 1.0) * j - k) * v.coeff(j) * w.coeff(k - j);
        }
        w.coeff(k) = acc / (k * v.coeff(0));
    }
    return w;
}

Jet rsqrt(const Jet& v) { return pow(v, -0.5); }
Jet sqrt(const Jet& v) { return pow(v, 0.5); }

Jet sat_tanh(const Jet& u) {
    const int K = u.order();
    Jet w(K);
    Jet v(K);  // v = 1 - w^2, filled alongside w
    w.coeff(0) = std::tanh(u.coeff(0));
    v.coeff(0) = 1.0 - w.coeff(0) * w.coeff(0);
    for (int m = 1; m <= K; ++m) {
        // w' = (1 - w^2) u'  ->  m w_m = sum_{j=1}^{m} j u_j v_{m-j}
        double acc = 0.0;
        for (int j = 1; j <= m; ++j) acc += j * u.coeff(j) * v.coeff(m - j);
        w.coeff(m) = acc / m;
        double sq = 0.0;
        for (int i = 0; i <= m; ++i) sq += w.coeff(i) * w.coeff(m - i);
        v.coeff(m) = -sq;
    }
    return w;
}

Jet sat_atan(const Jet& u) {
    const int K = u.order();
    const Jet denom = 1.0 + u * u;
    Jet w(K);
    w.coeff(0) = std::atan(u.coeff(0));
    // w' = u' / (1 + u^2), integrated coefficientwise
    Jet uprime(K);
    for (int k = 0; k < K; ++k) uprime.coeff(k) = (k + 1) * u.coeff(k + 1);
    const Jet q = uprime / denom;
    for (int k = 0; k < K; ++k) w.coeff(k + 1) = q.coeff(k) / (k + 1);
    return w;
}

double g_derivative_coeff(int k) {
    if (k < 0) throw InvalidOrder("g_derivative_coeff: k >= 0 required");
    double d = 1.0;
    for (int l = 0; l < k; ++l) d *= (0.5 + l);
    return (k % 2 == 0) ? d : -d;
}

namespace {

std::int64_t int_factorial(int k) {
    std::int64_t f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

std::int64_t int_pow(std::int64_t base, int e) {
    std::int64_t p = 1;
    for (int i = 0; i < e; ++i) p *= base;
    return p;
}

PartitionSet build_partition_set(int k, int a) {
    PartitionSet set;
    set.k = k;
    set.a = a;
    const int len = k - a + 1;
    std::vector<int> delta(static_cast<size_t>(len), 0);
    // lexicographic backtracking over delta_1..delta_len with
    // sum delta = a and sum l*delta_l = k
    auto recurse = [&](auto&& self, int pos, int sum_left, int weight_left) -> void {
        if (pos == len) {
            if (sum_left == 0 && weight_left == 0) {
                std::int64_t denom = 1;
                for (int l = 1; l <= len; ++l) {
                    const int d = delta[static_cast<size_t>(l - 1)];
                    denom *= int_factorial(d) * int_pow(int_factorial(l), d);
                }
                set.tuples.push_back({delta, int_factorial(k) / denom});
            }
            return;
        }
        const int l = pos + 1;
        const int max_d = std::min(sum_left, weight_left / l);
        for (int d = 0; d <= max_d; ++d) {
            delta[static_cast<size_t>(pos)] = d;
            self(self, pos + 1, sum_left - d, weight_left - l * d);
        }
        delta[static_cast<size_t>(pos)] = 0;
    };
    recurse(recurse, 0, a, k);
    return set;
}

struct PartitionTable {
    // index (k, a), 1 <= a <= k <= kMaxPartitionOrder
    std::vector<PartitionSet> sets;
    PartitionTable() {
        sets.reserve(static_cast<size_t>(kMaxPartitionOrder * (kMaxPartitionOrder + 1) / 2));
        for (int k = 1; k <= kMaxPartitionOrder; ++k) {
            for (int a = 1; a <= k; ++a) sets.push_back(build_partition_set(k, a));
        }
    }
    const PartitionSet& get(int k, int a) const {
        return sets[static_cast<size_t>((k - 1) * k / 2 + (a - 1))];
    }
};

}  // namespace

const PartitionSet& partition_set(int k, int a) {
    if (k < 1 || a < 1 || a > k) throw InvalidOrder("partition_set: need 1 <= a <= k");
    if (k > kMaxPartitionOrder) throw OrderTooHigh("partition_set: order exceeds exact-arithmetic range");
    static const PartitionTable table;
    return table.get(k, a);
}

double bell_polynomial(int k, int a, std::span<const double> phi_derivs) {
    const PartitionSet& set = partition_set(k, a);
    if (static_cast<int>(phi_derivs.size()) < k - a + 1) {
        throw InvalidOrder("bell_polynomial: need k-a+1 derivative values");
    }
    double acc = 0.0;
    for (const PartitionTuple& tuple : set.tuples) {
        double prod = static_cast<double>(tuple.coeff);
        for (size_t l = 0; l < tuple.delta.size(); ++l) {
            for (int e = 0; e < tuple.delta[l]; ++e) prod *= phi_derivs[l];
        }
        acc += prod;
    }
    return acc;
}

std::vector<double> faa_di_bruno(std::span<const double> rho_derivs,
                                 std::span<const double> phi_derivs) {
    const int K = static_cast<int>(phi_derivs.size());
    if (static_cast<int>(rho_derivs.size()) < K) {
        throw InvalidOrder("faa_di_bruno: need K values of rho^(a)");
    }
    std::vector<double> out(static_cast<size_t>(K), 0.0);
    for (int k = 1; k <= K; ++k) {
        double acc = 0.0;
        for (int a = 1; a <= k; ++a) {
            acc += rho_derivs[static_cast<size_t>(a - 1)] * bell_polynomial(k, a, phi_derivs);
        }
        out[static_cast<size_t>(k - 1)] = acc;
    }
    return out;
}

namespace {

double apply_stencil(std::span<const double> v, int center, int radius, const double* w, double hk) {
    if (center - radius < 0 || center + radius >= static_cast<int>(v.size())) {
        throw TooFewSamples("finite difference stencil does not fit");
    }
    double acc = 0.0;
    for (int j = -radius; j <= radius; ++j) {
        acc += w[j + radius] * v[static_cast<size_t>(center + j)];
    }
    return acc / hk;
}

}  // namespace

double central_difference(std::span<const double> values, double h, int k, int center) {
    switch (k) {
        case 0:
            return values[static_cast<size_t>(center)];
        case 1: {
            const double w[3] = {-0.5, 0.0, 0.5};
            return apply_stencil(values, center, 1, w, h);
        }
        case 2: {
            const double w[3] = {1.0, -2.0, 1.0};
            return apply_stencil(values, center, 1, w, h * h);
        }
        case 3: {
            const double w[5] = {-0.5, 1.0, 0.0, -1.0, 0.5};
            return apply_stencil(values, center, 2, w, h * h * h);
        }
        case 4: {
            const double w[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
            return apply_stencil(values, center, 2, w, h * h * h * h);
        }
        default:
            throw InvalidOrder("central_difference: k <= 4 supported");
    }
}

double central_difference_o4(std::span<const double> values, double h, int k, int center) {
    switch (k) {
        case 0:
            return values[static_cast<size_t>(center)];
        case 1: {
            const double w[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
            return apply_stencil(values, center, 2, w, h);
        }
        case 2: {
            const double w[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
            return apply_stencil(values, center, 2, w, h * h);
        }
        case 3: {
            const double w[7] = {1.0 / 8, -1.0, 13.0 / 8, 0.0, -13.0 / 8, 1.0, -1.0 / 8};
            return apply_stencil(values, center, 3, w, h * h * h);
        }
        case 4: {
            const double w[7] = {-1.0 / 6, 2.0, -13.0 / 2, 28.0 / 3, -13.0 / 2, 2.0, -1.0 / 6};
            return apply_stencil(values, center, 3, w, h * h * h * h);
        }
        default:
            throw InvalidOrder("central_difference_o4: k <= 4 supported");
    }
}

std::vector<double> finite_difference_derivatives(std::span<const double> values, double h, int k) {
    if (k < 0 || k > 4) throw InvalidOrder("finite_difference_derivatives: k <= 4 supported");
    if (static_cast<int>(values.size()) < k + 3) {
        throw TooFewSamples("finite_difference_derivatives: need at least k+3 samples");
    }
    const int radius = (k <= 2) ? 1 : 2;
    std::vector<double> out(values.size(), std::numeric_limits<double>::quiet_NaN());
    for (int i = radius; i + radius < static_cast<int>(values.size()); ++i) {
        out[static_cast<size_t>(i)] = central_difference(values, h, k, i);
    }
    return out;
}

}  // namespace ratebound
