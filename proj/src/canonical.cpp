#include "ratebound/canonical.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace ratebound {

ThetaTable::ThetaTable(std::vector<double> tail_gains) {
    mu_ = static_cast<int>(tail_gains.size()) + 1;
    inv_gains_.reserve(tail_gains.size());
    for (double a : tail_gains) {
        if (a <= 0.0) throw NonPositiveGain("build_theta: gains must be > 0");
        inv_gains_.push_back(1.0 / a);
    }
}

double ThetaTable::operator()(int i, int k) const {
    if (i < 1 || k <= i || k > mu_ + 1) throw DimensionMismatch("theta(i,k): index out of range");
    if (k == i + 1) return 1.0;
    double value = 1.0;
    // product over h = i .. k-2 of 1/a_{h+1}; inv_gains_[j] holds 1/a_{j+2}
    for (int h = i; h <= k - 2; ++h) value *= inv_gains_[static_cast<size_t>(h - 1)];
    return value;
}

ThetaTable build_theta(const std::vector<double>& tail_gains) { return ThetaTable(tail_gains); }

BlockLayout BlockLayout::from_profile(const SpectralProfile& profile) {
    BlockLayout layout;
    layout.s = profile.s;
    int offset = 0;
    for (int i = 0; i < profile.s; ++i) {
        layout.blocks.push_back({BlockKind::Oscillator, profile.omegas[static_cast<size_t>(i)], offset, 2});
        offset += 2;
    }
    for (int i = 0; i < profile.z; ++i) {
        layout.blocks.push_back({BlockKind::Integrator, 0.0, offset, 1});
        offset += 1;
    }
    layout.dim = offset;
    return layout;
}

std::pair<Mat, Vec> build_target_pair(const SpectralProfile& profile, const ThetaTable& theta) {
    if (theta.mu() != profile.mu()) throw DimensionMismatch("build_target_pair: theta.mu != profile.mu");
    const BlockLayout layout = BlockLayout::from_profile(profile);
    const int n = layout.dim;
    const int mu = layout.mu();
    const int s = layout.s;

    Mat J = Mat::Zero(n, n);
    Vec bhat = Vec::Zero(n);
    for (int i = 1; i <= mu; ++i) {
        const Block& blk = layout.blocks[static_cast<size_t>(i - 1)];
        if (blk.kind == BlockKind::Oscillator) {
            J.block<2, 2>(blk.offset, blk.offset) = blk.omega * rotation_generator();
            const int row = blk.offset + 1;  // the b0 row of the block
            for (int k = i + 1; k <= s; ++k) {
                const Block& tgt = layout.blocks[static_cast<size_t>(k - 1)];
                J(row, tgt.offset + 1) = theta(i, k);  // b0 b0^T coupling
            }
            for (int k = s + 1; k <= mu; ++k) {
                const Block& tgt = layout.blocks[static_cast<size_t>(k - 1)];
                J(row, tgt.offset) = theta(i, k);
            }
            bhat(row) = theta(i, mu + 1);
        } else {
            const int row = blk.offset;
            for (int k = i + 1; k <= mu; ++k) {
                const Block& tgt = layout.blocks[static_cast<size_t>(k - 1)];
                J(row, tgt.offset) = theta(i, k);
            }
            bhat(row) = theta(i, mu + 1);
        }
    }
    return {J, bhat};
}

Mat similarity_transform(const Mat& A, const Vec& b, const Mat& J, const Vec& bhat, double cond_limit) {
    if (A.rows() != J.rows()) throw DimensionMismatch("similarity_transform: size mismatch");
    if (!is_controllable(A, b)) throw NotControllable("similarity_transform: (A,b) not controllable");
    if (!is_controllable(J, bhat)) throw NotControllable("similarity_transform: target pair not controllable");

    const Mat c_source = controllability_matrix(A, b);
    const Mat c_target = controllability_matrix(J, bhat);
    Eigen::JacobiSVD<Mat> svd(c_source);
    const auto& sv = svd.singularValues();
    if (sv[sv.size() - 1] <= 0.0 || sv[0] / sv[sv.size() - 1] > cond_limit) {
        throw IllConditioned("similarity_transform: controllability matrix condition number too large");
    }
    // T solves T * C_source = C_target
    return c_source.transpose().fullPivLu().solve(c_target.transpose()).transpose();
}

CanonicalForm build_canonical_form(const Mat& A, const Vec& b, const std::vector<double>& tail_gains,
                                   double tol) {
    const SpectralProfile profile = spectral_profile(A, tol);
    if (profile.hurwitz_count != 0) {
        throw Error("build_canonical_form: A must have only critical eigenvalues; decompose first");
    }
    const int expected_tail = profile.mu() >= 1 ? profile.mu() - 1 : 0;
    if (static_cast<int>(tail_gains.size()) != expected_tail) {
        throw DimensionMismatch("build_canonical_form: need a_2..a_mu, got wrong count");
    }

    CanonicalForm cf;
    cf.theta = build_theta(tail_gains);
    cf.layout = BlockLayout::from_profile(profile);
    std::tie(cf.J, cf.bhat) = build_target_pair(profile, cf.theta);
    cf.T = similarity_transform(A, b, cf.J, cf.bhat);
    cf.residual_A = (cf.T * A - cf.J * cf.T).norm();
    cf.residual_b = (cf.T * b - cf.bhat).norm();
    return cf;
}

CanonicalForm build_canonical_form(const Mat& A, const Vec& b, const std::vector<double>& tail_gains) {
    return build_canonical_form(A, b, tail_gains, default_spectral_tol(A));
}

StabilizableDecomposition decompose_stabilizable(const Mat& A, const Vec& b, double tol) {
    const int n = static_cast<int>(A.rows());
    const SpectralProfile profile = spectral_profile(A, tol);  // throws on Re > tol
    const int n_crit = 2 * profile.s + profile.z;
    const int n_hur = profile.hurwitz_count;
    if (n_crit + n_hur != n) throw Error("decompose_stabilizable: spectrum classification inconsistent");

    StabilizableDecomposition dec;
    dec.n_hurwitz = n_hur;
    if (n_hur == 0) {
        dec.hurwitz_A = Mat(0, 0);
        dec.critical_A = A;
        dec.critical_b = b;
        dec.S = Mat::Identity(n, n);
        dec.S_inv = dec.S;
    } else if (n_crit == 0) {
        dec.hurwitz_A = A;
        dec.critical_A = Mat(0, 0);
        dec.critical_b = Vec(0);
        dec.S = Mat::Identity(n, n);
        dec.S_inv = dec.S;
    } else {
        // q_c(A) = A^z * prod_i (A^2 + omega_i^2 I) annihilates the critical
        // subspace and is invertible on the stable one, so its range is the
        // stable subspace and its kernel the critical one.
        Mat M = Mat::Identity(n, n);
        for (int i = 0; i < profile.z; ++i) M = A * M;
        for (double w : profile.omegas) M = (A * A + w * w * Mat::Identity(n, n)) * M;

        Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Mat w_stable = svd.matrixU().leftCols(n_hur);
        const Mat w_critical = svd.matrixV().rightCols(n_crit);
        Mat S(n, n);
        S.leftCols(n_hur) = w_stable;
        S.rightCols(n_crit) = w_critical;
        Eigen::FullPivLU<Mat> lu(S);
        if (!lu.isInvertible()) throw Error("decompose_stabilizable: subspace basis not invertible");
        const Mat S_inv = lu.inverse();
        const Mat A_block = S_inv * A * S;
        const Vec b_block = S_inv * b;
        dec.S = S;
        dec.S_inv = S_inv;
        dec.hurwitz_A = A_block.topLeftCorner(n_hur, n_hur);
        dec.critical_A = A_block.bottomRightCorner(n_crit, n_crit);
        dec.critical_b = b_block.tail(n_crit);
    }
    if (dec.critical_A.rows() > 0 && !is_controllable(dec.critical_A, dec.critical_b)) {
        throw NotStabilizable("decompose_stabilizable: critical pair not controllable");
    }
    return dec;
}

int ReducedForm::block_offset(int i) const {
    int offset = n0();
    for (int j = 1; j < i; ++j) offset += block_dim(j);
    return offset;
}

int ReducedForm::state_dim() const {
    int n = n0();
    for (const auto& blk : blocks) n += static_cast<int>(blk.A.rows());
    return n;
}

std::pair<Mat, Mat> ReducedForm::assemble() const {
    const int n = state_dim();
    Mat A = Mat::Zero(n, n);
    Mat B = Mat::Zero(n, q);
    if (n0() > 0) {
        A.topLeftCorner(n0(), n0()) = A00;
        for (int j = 1; j <= q; ++j) {
            const size_t idx = static_cast<size_t>(j - 1);
            if (idx < head_A.size() && head_A[idx].size() > 0) {
                A.block(0, block_offset(j), n0(), block_dim(j)) = head_A[idx];
            }
            if (idx < head_b.size() && head_b[idx].size() > 0) {
                B.block(0, j - 1, n0(), 1) = head_b[idx];
            }
        }
    }
    for (int i = 1; i <= q; ++i) {
        const int off = block_offset(i);
        const int ni = block_dim(i);
        A.block(off, off, ni, ni) = blocks[static_cast<size_t>(i - 1)].A;
        B.block(off, i - 1, ni, 1) = blocks[static_cast<size_t>(i - 1)].b;
        for (int j = i + 1; j <= q; ++j) {
            auto ita = coupling_A.find({i, j});
            if (ita != coupling_A.end() && ita->second.size() > 0) {
                A.block(off, block_offset(j), ni, block_dim(j)) = ita->second;
            }
            auto itb = coupling_b.find({i, j});
            if (itb != coupling_b.end() && itb->second.size() > 0) {
                B.block(off, j - 1, ni, 1) = itb->second;
            }
        }
    }
    return {A, B};
}

ValidationReport validate_reduced_form(const ReducedForm& rf, double tol) {
    ValidationReport report;
    auto complain = [&report](const std::string& msg) { report.violations.push_back(msg); };

    if (rf.q != static_cast<int>(rf.blocks.size())) {
        complain("q does not match the number of diagonal blocks");
        return report;
    }
    if (rf.q < 1) complain("at least one input block required");

    if (rf.n0() > 0) {
        if (rf.A00.rows() != rf.A00.cols()) {
            complain("A00 not square");
        } else {
            const Eigen::VectorXcd eigs = rf.A00.eigenvalues();
            for (int i = 0; i < eigs.size(); ++i) {
                if (eigs[i].real() >= -tol) {
                    complain("A00 is not Hurwitz (Re lambda = " + std::to_string(eigs[i].real()) + ")");
                    break;
                }
            }
        }
    }

    for (int i = 1; i <= rf.q; ++i) {
        const auto& blk = rf.blocks[static_cast<size_t>(i - 1)];
        const std::string tag = "block " + std::to_string(i);
        if (blk.A.rows() != blk.A.cols() || blk.A.rows() < 1) {
            complain(tag + ": A_ii not square or empty");
            continue;
        }
        if (blk.b.size() != blk.A.rows()) {
            complain(tag + ": b_ii dimension mismatch");
            continue;
        }
        try {
            const SpectralProfile profile = spectral_profile(blk.A, std::max(tol, default_spectral_tol(blk.A)));
            if (profile.hurwitz_count != 0) complain(tag + ": non-critical eigenvalue (stable part present)");
        } catch (const PositiveRealPartEigenvalue&) {
            complain(tag + ": non-critical eigenvalue (positive real part)");
        }
        if (!is_controllable(blk.A, blk.b)) complain(tag + ": (A_ii, b_ii) not controllable");
    }

    for (const auto& [key, mat] : rf.coupling_A) {
        const auto [i, j] = key;
        if (i >= j || i < 1 || j > rf.q) {
            complain("coupling A_" + std::to_string(i) + std::to_string(j) + " not upper-triangular");
        } else if (mat.size() > 0 &&
                   (mat.rows() != rf.block_dim(i) || mat.cols() != rf.block_dim(j))) {
            complain("coupling A_" + std::to_string(i) + std::to_string(j) + " dimension mismatch");
        }
    }
    for (const auto& [key, vec] : rf.coupling_b) {
        const auto [i, j] = key;
        if (i >= j || i < 1 || j > rf.q) {
            complain("coupling b_" + std::to_string(i) + std::to_string(j) + " not upper-triangular");
        } else if (vec.size() > 0 && vec.size() != rf.block_dim(i)) {
            complain("coupling b_" + std::to_string(i) + std::to_string(j) + " dimension mismatch");
        }
    }
    return report;
}

}  // namespace ratebound
