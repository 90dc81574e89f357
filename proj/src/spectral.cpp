#include "ratebound/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace ratebound {

Eigen::Matrix2d rotation_generator() {
    Eigen::Matrix2d a;
    a << 0.0, 1.0, -1.0, 0.0;
    return a;
}

Eigen::Vector2d input_direction() { return Eigen::Vector2d(0.0, 1.0); }

LinearSystem::LinearSystem(Mat a, Mat b) : A(std::move(a)), B(std::move(b)) {
    if (A.rows() != A.cols() || A.rows() < 1) throw DimensionMismatch("A must be square, n >= 1");
    if (B.rows() != A.rows() || B.cols() < 1) throw DimensionMismatch("B must be n x m, m >= 1");
}

double default_spectral_tol(const Mat& A) { return 1e-9 * A.norm(); }

SpectralProfile spectral_profile(const Mat& A, double tol) {
    if (A.rows() != A.cols()) throw DimensionMismatch("spectral_profile: A must be square");
    if (tol < 0.0) throw NonPositiveParameter("spectral_profile: tol must be >= 0");

    Eigen::EigenSolver<Mat> solver(A, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw Error("spectral_profile: eigen solver failed");

    SpectralProfile profile;
    profile.tol = tol;
    const auto& eigs = solver.eigenvalues();
    for (int i = 0; i < eigs.size(); ++i) {
        const double re = eigs[i].real();
        const double im = eigs[i].imag();
        if (re > tol) {
            throw PositiveRealPartEigenvalue("eigenvalue with Re = " + std::to_string(re));
        }
        if (re >= -tol) {
            if (std::abs(im) <= tol) {
                ++profile.z;
            } else if (im > 0.0) {
                // conjugate partner (im < 0) is skipped, pairs counted once
                ++profile.s;
                profile.omegas.push_back(im);
            }
        } else {
            ++profile.hurwitz_count;
        }
    }
    std::sort(profile.omegas.begin(), profile.omegas.end(), std::greater<double>());
    return profile;
}

SpectralProfile spectral_profile(const Mat& A) { return spectral_profile(A, default_spectral_tol(A)); }

Mat controllability_matrix(const Mat& A, const Mat& B) {
    if (A.rows() != A.cols() || A.rows() != B.rows()) {
        throw DimensionMismatch("controllability_matrix: inconsistent dimensions");
    }
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(B.cols());
    Mat ctrl(n, n * m);
    Mat block = B;
    for (int k = 0; k < n; ++k) {
        ctrl.middleCols(k * m, m) = block;
        if (k + 1 < n) block = A * block;
    }
    return ctrl;
}

bool is_controllable(const Mat& A, const Mat& B, double tol) {
    const Mat ctrl = controllability_matrix(A, B);
    Eigen::JacobiSVD<Mat> svd(ctrl);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] <= 0.0) return false;
    const int n = static_cast<int>(A.rows());
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv[i] > tol * sv[0]) ++rank;
    }
    return rank == n;
}

double controllability_condition(const Mat& A, const Mat& B) {
    Eigen::JacobiSVD<Mat> svd(controllability_matrix(A, B));
    const auto& sv = svd.singularValues();
    const double smin = sv[sv.size() - 1];
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return sv[0] / smin;
}

LyapunovPair p_beta(double omega, double beta) {
    if (omega <= 0.0) throw NonPositiveParameter("p_beta: omega must be > 0");
    if (beta <= 0.0 || beta > 1.0) throw NonPositiveParameter("p_beta: beta must be in (0,1]");

    LyapunovPair pair;
    pair.omega = omega;
    pair.beta = beta;
    pair.P << beta / (2.0 * omega * omega) + 1.0 / beta, 1.0 / (2.0 * omega),
        1.0 / (2.0 * omega), 1.0 / beta;
    pair.pb0_norm = std::sqrt(1.0 / (4.0 * omega * omega) + 1.0 / (beta * beta));
    const double spread = beta / (2.0 * omega) * pair.pb0_norm;
    pair.sigma_lo = beta * pair.pb0_norm * pair.pb0_norm - spread;
    pair.sigma_hi = beta * pair.pb0_norm * pair.pb0_norm + spread;
    return pair;
}

Eigen::Matrix2d a_beta_matrix(double omega, double beta) {
    const Eigen::Vector2d b0 = input_direction();
    return omega * rotation_generator() - beta * (b0 * b0.transpose());
}

double lyapunov_residual(const LyapunovPair& pair) {
    const Eigen::Matrix2d ab = a_beta_matrix(pair.omega, pair.beta);
    const Eigen::Matrix2d res = pair.P * ab + ab.transpose() * pair.P + Eigen::Matrix2d::Identity();
    return res.norm();
}

double gamma_constant(double omega) {
    if (omega <= 0.0) throw NonPositiveParameter("gamma_constant: omega must be > 0");
    return 1.0 / (8.0 * (1.0 / (4.0 * omega * omega) + 1.0));
}

std::vector<double> char_poly_coefficients(const Mat& A) {
    if (A.rows() != A.cols()) throw DimensionMismatch("char_poly_coefficients: A must be square");
    const int n = static_cast<int>(A.rows());
    std::vector<double> coeffs(n + 1, 0.0);
    coeffs[0] = 1.0;
    Mat M = Mat::Identity(n, n);
    for (int k = 1; k <= n; ++k) {
        const Mat AM = A * M;
        coeffs[k] = -AM.trace() / static_cast<double>(k);
        M = AM + coeffs[k] * Mat::Identity(n, n);
    }
    return coeffs;
}

}  // namespace ratebound
