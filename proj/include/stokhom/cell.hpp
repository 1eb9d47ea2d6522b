#pragma once

#include <array>
#include <memory>
#include <string>

#include "stokhom/array2d.hpp"
#include "stokhom/coeff.hpp"
#include "stokhom/fftplan.hpp"

namespace stokhom {

/// One corrector chi_ik: a divergence-free, zero-mean Y-periodic velocity
/// field on the n x n cell lattice, plus the recovered cell pressure
/// (the Lagrange multiplier of the incompressibility constraint, zero mean).
struct CorrectorField {
    int i = 0;
    int k = 0;
    Array2D u1, u2;
    Array2D pressure;
};

struct CellSolveConfig {
    int n_cell = 64;
    double tol = 1e-10;   // relative residual, measured against the projected RHS
    long max_iter = 0;    // 0 -> 10 * n_cell^2
};

struct CellSolveInfo {
    long iterations = 0;
    double residual = 0.0;  // final relative residual (independent recomputation)
    bool converged = false;
};

struct CorrectorSet {
    int n = 0;
    std::array<std::array<CorrectorField, 2>, 2> chi;   // chi[i-1][k-1]
    std::array<std::array<CellSolveInfo, 2>, 2> info;

    const CorrectorField& at(int i, int k) const { return chi[i - 1][k - 1]; }
    CorrectorField& at(int i, int k) { return chi[i - 1][k - 1]; }
    const CellSolveInfo& info_at(int i, int k) const { return info[i - 1][k - 1]; }
};

/// Spectral machinery for the periodic cell: FFT plans, sampled coefficients,
/// matrix-free operator application and the Leray projection. The variable
/// coefficient operator is applied FFT -> pointwise multiply -> FFT, and is
/// symmetric positive semi-definite w.r.t. the lattice inner product.
///
/// Derivative convention: the Nyquist wavenumber is mapped to zero, which
/// keeps spectral differentiation a real skew-adjoint operator.
class CellWorkspace {
public:
    CellWorkspace(const CoefficientField& a, int n);

    int n() const { return n_; }
    const Array2D& a11() const { return a11_; }
    const Array2D& a12() const { return a12_; }
    const Array2D& a22() const { return a22_; }

    /// out = -sum_m D_m ( sum_j a_mj D_j u ), applied per velocity component.
    void apply_operator(const Array2D& u1, const Array2D& u2, Array2D& out1, Array2D& out2) const;

    /// Orthogonal projection onto discretely divergence-free zero-mean fields;
    /// diagonal in Fourier space. Idempotent and self-adjoint.
    void leray(Array2D& v1, Array2D& v2) const;

    /// RHS of the cell problem for the index pair (i,k):
    /// component k receives minus the spectral divergence of column i of a.
    void rhs(int i, int k, Array2D& b1, Array2D& b2) const;

    /// Spectral inverse of the mean-coefficient constant operator (CG preconditioner);
    /// zero on modes annihilated by differentiation.
    void precondition(const Array2D& r1, const Array2D& r2, Array2D& z1, Array2D& z2) const;

    /// Cell pressure from the unprojected residual r = b - A chi, solving grad pi = r.
    Array2D recover_pressure(const Array2D& r1, const Array2D& r2) const;

    void spectral_gradient(const Array2D& f, Array2D& gx, Array2D& gy) const;
    double spectral_divergence_max(const Array2D& v1, const Array2D& v2) const;

private:
    int n_;
    Array2D a11_, a12_, a22_;
    double abar_;
    std::shared_ptr<Fft2D> fft_;
};

/// Solves the discrete cell problem for the pair (i,k) by Leray-projected
/// preconditioned conjugate gradients. Throws on ellipticity failure of a or
/// non-convergence within the iteration cap.
CorrectorField solve_cell_problem(const CoefficientField& a, const CellSolveConfig& cfg, int i, int k,
                                  CellSolveInfo* info = nullptr);

CorrectorSet solve_all_correctors(const CoefficientField& a, const CellSolveConfig& cfg);

/// Independent recomputation of the relative residual ||P (b - A chi)|| / ||P b||
/// (absolute RMS residual when the projected RHS vanishes).
double cell_residual(const CoefficientField& a, const CorrectorField& chi);

/// Dense direct solve of the saddle-point system [A, B^T; B, 0] with the same
/// spectral differentiation stencils as the matrix-free path, plus mean-zero
/// gauge constraints. Feasible for n_small <= 16; used as a validation oracle.
CorrectorField dense_cell_oracle(const CoefficientField& a, int n_small, int i, int k);

/// Standalone spectral gradient on an n x n periodic lattice (zero-Nyquist
/// convention); used by the tensor and two-scale modules.
void spectral_gradient(const Array2D& f, Array2D& gx, Array2D& gy);

}  // namespace stokhom
