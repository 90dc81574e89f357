#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ratebound/spectral.hpp"

namespace ratebound {

/// Coupling coefficients theta_{i,k} for 1 <= i < k <= mu+1:
/// theta_{i,i+1} = 1 and theta_{i,k} = prod_{h=i}^{k-2} 1/a_{h+1} otherwise.
class ThetaTable {
  public:
    ThetaTable() = default;
    explicit ThetaTable(std::vector<double> tail_gains);  // a_2..a_mu

    int mu() const { return mu_; }
    double operator()(int i, int k) const;

  private:
    int mu_ = 0;
    std::vector<double> inv_gains_;  // 1/a_2 .. 1/a_mu
};

ThetaTable build_theta(const std::vector<double>& tail_gains);

enum class BlockKind { Oscillator, Integrator };

struct Block {
    BlockKind kind;
    double omega;  // meaningful for oscillators
    int offset;
    int size;
};

struct BlockLayout {
    std::vector<Block> blocks;
    int dim = 0;
    int s = 0;

    int mu() const { return static_cast<int>(blocks.size()); }
    static BlockLayout from_profile(const SpectralProfile& profile);
};

/// Target pair (J, bhat): triangular cascade of oscillators then integrators,
/// couplings and input column taken from the theta table.
std::pair<Mat, Vec> build_target_pair(const SpectralProfile& profile, const ThetaTable& theta);

/// T = C_(J,bhat) * C_(A,b)^{-1}; requires both pairs controllable with equal
/// characteristic polynomials. Throws IllConditioned when cond(C_(A,b)) > cond_limit.
Mat similarity_transform(const Mat& A, const Vec& b, const Mat& J, const Vec& bhat,
                         double cond_limit = 1e12);

struct CanonicalForm {
    Mat J;
    Vec bhat;
    Mat T;
    ThetaTable theta;
    BlockLayout layout;
    double residual_A = 0.0;  // ||T A - J T||_F
    double residual_b = 0.0;  // ||T b - bhat||
};

/// Profile -> theta -> (J, bhat) -> T for an all-critical controllable pair.
CanonicalForm build_canonical_form(const Mat& A, const Vec& b, const std::vector<double>& tail_gains,
                                   double tol);
CanonicalForm build_canonical_form(const Mat& A, const Vec& b, const std::vector<double>& tail_gains);

/// Splits a stabilizable pair into a Hurwitz part and a controllable
/// all-critical pair. Coordinates: x = S z with S^{-1} A S = diag(A1, A2)
/// and S^{-1} b = (b1; b2).
struct StabilizableDecomposition {
    Mat hurwitz_A;   // possibly 0x0
    Mat critical_A;  // possibly 0x0 when A is Hurwitz
    Vec critical_b;
    Mat S;
    Mat S_inv;
    int n_hurwitz = 0;
};

StabilizableDecomposition decompose_stabilizable(const Mat& A, const Vec& b, double tol);

struct ReducedBlock {
    Mat A;
    Vec b;
};

/// Block upper-triangular multi-input form: optional Hurwitz head, q critical
/// controllable single-input diagonal blocks, upper couplings A_ij / b_ij.
struct ReducedForm {
    int q = 0;
    Mat A00;                      // n0 x n0, n0 == 0 when absent
    std::vector<Mat> head_A;      // A_{0j}, j = 1..q (empty matrices mean zero)
    std::vector<Vec> head_b;      // b_{0j}
    std::vector<ReducedBlock> blocks;
    std::map<std::pair<int, int>, Mat> coupling_A;  // (i,j), 1 <= i < j <= q
    std::map<std::pair<int, int>, Vec> coupling_b;

    int n0() const { return static_cast<int>(A00.rows()); }
    int block_dim(int i) const { return static_cast<int>(blocks[static_cast<size_t>(i - 1)].A.rows()); }
    int block_offset(int i) const;  // offset of x_i in the assembled state, 1-based
    int state_dim() const;

    /// Full (A, B) with B an n x q input matrix.
    std::pair<Mat, Mat> assemble() const;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool valid() const { return violations.empty(); }
};

ValidationReport validate_reduced_form(const ReducedForm& rf, double tol);

}  // namespace ratebound
