#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ratebound/errors.hpp"

namespace ratebound {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Rotation generator [[0,1],[-1,0]] and input direction (0,1).
Eigen::Matrix2d rotation_generator();
Eigen::Vector2d input_direction();

struct LinearSystem {
    Mat A;
    Mat B;

    LinearSystem(Mat a, Mat b);
    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }
};

/// Classification of the critical spectrum of a square matrix.
/// s counts conjugate pairs of nonzero purely imaginary eigenvalues (with
/// multiplicity), z the multiplicity of the zero eigenvalue; omegas holds the
/// s positive frequencies, sorted descending, repetitions kept.
struct SpectralProfile {
    int s = 0;
    int z = 0;
    std::vector<double> omegas;
    int hurwitz_count = 0;
    double tol = 0.0;

    int mu() const { return s + z; }
};

/// Scale-aware default classification tolerance, 1e-9 * ||A||_F.
double default_spectral_tol(const Mat& A);

/// Throws PositiveRealPartEigenvalue when some Re(lambda) > tol.
SpectralProfile spectral_profile(const Mat& A, double tol);
SpectralProfile spectral_profile(const Mat& A);

Mat controllability_matrix(const Mat& A, const Mat& B);

/// Numerical Kalman rank test: smallest singular value of [B, AB, ...]
/// above tol times the largest.
bool is_controllable(const Mat& A, const Mat& B, double tol = 1e-10);

/// Condition number (sigma_max / sigma_min) of the controllability matrix.
double controllability_condition(const Mat& A, const Mat& B);

/// Closed-form Lyapunov data for the damped oscillator
/// A_beta = omega*A0 - beta*b0 b0^T, P A_beta + A_beta^T P = -I.
struct LyapunovPair {
    double omega = 0.0;
    double beta = 0.0;
    Eigen::Matrix2d P;
    double pb0_norm = 0.0;
    double sigma_lo = 0.0;
    double sigma_hi = 0.0;
};

LyapunovPair p_beta(double omega, double beta);
Eigen::Matrix2d a_beta_matrix(double omega, double beta);
double lyapunov_residual(const LyapunovPair& pair);

/// Gamma(omega) = 1 / (8 (1/(4 omega^2) + 1)).
double gamma_constant(double omega);

/// Monic characteristic polynomial coefficients via Faddeev-LeVerrier,
/// returned from lambda^n down to the constant term (c[0] = 1).
std::vector<double> char_poly_coefficients(const Mat& A);

}  // namespace ratebound
