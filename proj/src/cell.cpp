#include "stokhom/cell.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace stokhom {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
using cplx = std::complex<double>;
}  // namespace

CellWorkspace::CellWorkspace(const CoefficientField& a, int n)
    : n_(n), a11_(n, n), a12_(n, n), a22_(n, n), fft_(std::make_shared<Fft2D>(n)) {
    CellSampling s(n);
    double tr = 0.0;
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            SymMat2 m = sample_at(a, s.node(p), s.node(q));
            a11_(p, q) = m.a11;
            a12_(p, q) = m.a12;
            a22_(p, q) = m.a22;
            tr += 0.5 * (m.a11 + m.a22);
        }
    }
    abar_ = tr / double(size_t(n) * n);
}

void CellWorkspace::spectral_gradient(const Array2D& f, Array2D& gx, Array2D& gy) const {
    std::vector<cplx> spec, sx, sy;
    fft_->forward(f, spec);
    int nk = fft_->nk();
    sx.resize(spec.size());
    sy.resize(spec.size());
    for (int i = 0; i < n_; ++i) {
        double k1 = kTwoPi * fft_->wavenumber(i);
        for (int j = 0; j < nk; ++j) {
            double k2 = kTwoPi * fft_->wavenumber(j);
            cplx v = spec[size_t(i) * nk + j];
            sx[size_t(i) * nk + j] = cplx(0.0, k1) * v;
            sy[size_t(i) * nk + j] = cplx(0.0, k2) * v;
        }
    }
    fft_->inverse(sx, gx);
    fft_->inverse(sy, gy);
}

void CellWorkspace::apply_operator(const Array2D& u1, const Array2D& u2, Array2D& out1, Array2D& out2) const {
    Array2D g1(n_, n_), g2(n_, n_), s1(n_, n_), s2(n_, n_);
    std::vector<cplx> f1, f2, acc;
    int nk = fft_->nk();
    const Array2D* in[2] = {&u1, &u2};
    Array2D* out[2] = {&out1, &out2};
    for (int r = 0; r < 2; ++r) {
        spectral_gradient(*in[r], g1, g2);
        for (size_t p = 0; p < g1.size(); ++p) {
            double gx = g1.a[p], gy = g2.a[p];
            s1.a[p] = a11_.a[p] * gx + a12_.a[p] * gy;
            s2.a[p] = a12_.a[p] * gx + a22_.a[p] * gy;
        }
        fft_->forward(s1, f1);
        fft_->forward(s2, f2);
        acc.resize(f1.size());
        for (int i = 0; i < n_; ++i) {
            double k1 = kTwoPi * fft_->wavenumber(i);
            for (int j = 0; j < nk; ++j) {
                double k2 = kTwoPi * fft_->wavenumber(j);
                size_t idx = size_t(i) * nk + j;
                acc[idx] = -(cplx(0.0, k1) * f1[idx] + cplx(0.0, k2) * f2[idx]);
            }
        }
        fft_->inverse(acc, *out[r]);
    }
}

void CellWorkspace::leray(Array2D& v1, Array2D& v2) const {
    std::vector<cplx> f1, f2;
    fft_->forward(v1, f1);
    fft_->forward(v2, f2);
    int nk = fft_->nk();
    for (int i = 0; i < n_; ++i) {
        double k1 = fft_->wavenumber(i);
        for (int j = 0; j < nk; ++j) {
            double k2 = fft_->wavenumber(j);
            size_t idx = size_t(i) * nk + j;
            double kk = k1 * k1 + k2 * k2;
            if (i == 0 && j == 0) {
                f1[idx] = f2[idx] = 0.0;  // zero mean
            } else if (kk > 0.0) {
                cplx kdot = (k1 * f1[idx] + k2 * f2[idx]) / kk;
                f1[idx] -= k1 * kdot;
                f2[idx] -= k2 * kdot;
            }
            // modes with zero derivative wavenumber are untouched: they are
            // divergence-free under the same convention
        }
    }
    fft_->inverse(f1, v1);
    fft_->inverse(f2, v2);
}

void CellWorkspace::rhs(int i, int k, Array2D& b1, Array2D& b2) const {
    if (i < 1 || i > 2 || k < 1 || k > 2) throw std::invalid_argument("cell rhs: index pair out of range");
    const Array2D& col1 = (i == 1) ? a11_ : a12_;
    const Array2D& col2 = (i == 1) ? a12_ : a22_;
    Array2D d1x(n_, n_), d1y(n_, n_), d2x(n_, n_), d2y(n_, n_);
    spectral_gradient(col1, d1x, d1y);
    spectral_gradient(col2, d2x, d2y);
    b1 = Array2D(n_, n_);
    b2 = Array2D(n_, n_);
    Array2D& bk = (k == 1) ? b1 : b2;
    for (size_t p = 0; p < bk.size(); ++p) bk.a[p] = -(d1x.a[p] + d2y.a[p]);
}

void CellWorkspace::precondition(const Array2D& r1, const Array2D& r2, Array2D& z1, Array2D& z2) const {
    std::vector<cplx> f1, f2;
    fft_->forward(r1, f1);
    fft_->forward(r2, f2);
    int nk = fft_->nk();
    for (int i = 0; i < n_; ++i) {
        double k1 = kTwoPi * fft_->wavenumber(i);
        for (int j = 0; j < nk; ++j) {
            double k2 = kTwoPi * fft_->wavenumber(j);
            size_t idx = size_t(i) * nk + j;
            double lam = abar_ * (k1 * k1 + k2 * k2);
            double inv = (lam > 0.0) ? 1.0 / lam : 0.0;
            f1[idx] *= inv;
            f2[idx] *= inv;
        }
    }
    fft_->inverse(f1, z1);
    fft_->inverse(f2, z2);
}

Array2D CellWorkspace::recover_pressure(const Array2D& r1, const Array2D& r2) const {
    // grad pi = r  =>  pi_hat = -i (k . r_hat) / (2 pi |k|^2)
    std::vector<cplx> f1, f2, fp;
    fft_->forward(r1, f1);
    fft_->forward(r2, f2);
    fp.resize(f1.size());
    int nk = fft_->nk();
    for (int i = 0; i < n_; ++i) {
        double k1 = fft_->wavenumber(i);
        for (int j = 0; j < nk; ++j) {
            double k2 = fft_->wavenumber(j);
            size_t idx = size_t(i) * nk + j;
            double kk = k1 * k1 + k2 * k2;
            if (kk > 0.0) {
                cplx kdot = k1 * f1[idx] + k2 * f2[idx];
                fp[idx] = cplx(0.0, -1.0) * kdot / (kTwoPi * kk);
            } else {
                fp[idx] = 0.0;
            }
        }
    }
    Array2D pi;
    fft_->inverse(fp, pi);
    return pi;
}

double CellWorkspace::spectral_divergence_max(const Array2D& v1, const Array2D& v2) const {
    Array2D g1x(n_, n_), g1y(n_, n_), g2x(n_, n_), g2y(n_, n_);
    spectral_gradient(v1, g1x, g1y);
    spectral_gradient(v2, g2x, g2y);
    double m = 0.0;
    for (size_t p = 0; p < g1x.size(); ++p) m = std::max(m, std::fabs(g1x.a[p] + g2y.a[p]));
    return m;
}

namespace {

double rms(const Array2D& x, const Array2D& y) {
    return std::sqrt((dot(x, x) + dot(y, y)) / double(x.size() + y.size()));
}

// Projected preconditioned CG on range(P). Returns iterations used.
long projected_pcg(const CellWorkspace& ws, const Array2D& b1, const Array2D& b2, double tol, long max_iter,
                   Array2D& x1, Array2D& x2, double* final_rel) {
    int n = ws.n();
    Array2D r1 = b1, r2 = b2;
    ws.leray(r1, r2);
    double bnorm = rms(r1, r2);
    x1 = Array2D(n, n);
    x2 = Array2D(n, n);
    if (bnorm == 0.0) {
        if (final_rel) *final_rel = 0.0;
        return 0;
    }
    Array2D z1(n, n), z2(n, n), p1(n, n), p2(n, n), q1(n, n), q2(n, n);
    long total = 0;
    double rel = 1.0;
    for (int sweep = 0; sweep < 8 && total < max_iter; ++sweep) {
        // (re)start from the current iterate with a freshly computed residual
        ws.apply_operator(x1, x2, q1, q2);
        r1 = b1;
        r2 = b2;
        axpy(-1.0, q1, r1);
        axpy(-1.0, q2, r2);
        ws.leray(r1, r2);
        rel = rms(r1, r2) / bnorm;
        if (rel <= tol) break;
        ws.precondition(r1, r2, z1, z2);
        ws.leray(z1, z2);
        p1 = z1;
        p2 = z2;
        double rz = dot(r1, z1) + dot(r2, z2);
        while (total < max_iter) {
            ws.apply_operator(p1, p2, q1, q2);
            ws.leray(q1, q2);
            double pq = dot(p1, q1) + dot(p2, q2);
            if (pq <= 0.0) break;  // numerical breakdown; restart
            double alpha = rz / pq;
            axpy(alpha, p1, x1);
            axpy(alpha, p2, x2);
            axpy(-alpha, q1, r1);
            axpy(-alpha, q2, r2);
            ++total;
            rel = rms(r1, r2) / bnorm;
            if (rel <= 0.5 * tol) break;  // verify against the true residual on restart
            ws.precondition(r1, r2, z1, z2);
            ws.leray(z1, z2);
            double rz_new = dot(r1, z1) + dot(r2, z2);
            double beta = rz_new / rz;
            rz = rz_new;
            for (size_t m = 0; m < p1.size(); ++m) {
                p1.a[m] = z1.a[m] + beta * p1.a[m];
                p2.a[m] = z2.a[m] + beta * p2.a[m];
            }
        }
    }
    // final true residual
    ws.apply_operator(x1, x2, q1, q2);
    r1 = b1;
    r2 = b2;
    axpy(-1.0, q1, r1);
    axpy(-1.0, q2, r2);
    ws.leray(r1, r2);
    rel = rms(r1, r2) / bnorm;
    if (final_rel) *final_rel = rel;
    return total;
}

}  // namespace

CorrectorField solve_cell_problem(const CoefficientField& a, const CellSolveConfig& cfg, int i, int k,
                                  CellSolveInfo* info) {
    if (cfg.tol <= 0.0) throw std::invalid_argument("cell solve: tol must be > 0");
    CellSampling sampling(cfg.n_cell);  // validates n_cell
    auto ell = ellipticity_estimate(a, sampling);
    if (!ell.ok) {
        std::ostringstream os;
        os << "cell solve: coefficient field rejected, ellipticity estimate " << ell.alpha << " <= 0";
        throw std::invalid_argument(os.str());
    }
    CellWorkspace ws(a, cfg.n_cell);
    Array2D b1, b2;
    ws.rhs(i, k, b1, b2);

    CorrectorField chi;
    chi.i = i;
    chi.k = k;

    // Degenerate RHS (e.g. constant coefficients): the projected RHS is pure
    // FFT roundoff, and uniqueness forces chi = 0.
    Array2D pb1 = b1, pb2 = b2;
    ws.leray(pb1, pb2);
    double ascale = std::max({ws.a11().max_abs(), ws.a12().max_abs(), ws.a22().max_abs()});
    if (rms(pb1, pb2) <= 1e-13 * std::max(1.0, ascale)) {
        chi.u1 = Array2D(cfg.n_cell, cfg.n_cell);
        chi.u2 = Array2D(cfg.n_cell, cfg.n_cell);
        chi.pressure = ws.recover_pressure(b1, b2);
        if (info) *info = {0, 0.0, true};
        return chi;
    }

    long cap = cfg.max_iter > 0 ? cfg.max_iter : 10L * cfg.n_cell * cfg.n_cell;
    double rel = 0.0;
    long iters = projected_pcg(ws, b1, b2, cfg.tol, cap, chi.u1, chi.u2, &rel);
    if (rel > cfg.tol) {
        std::ostringstream os;
        os << "cell solve (" << i << "," << k << ") did not converge: relative residual " << rel << " > tol "
           << cfg.tol << " after " << iters << " iterations (cap " << cap << ")";
        throw std::runtime_error(os.str());
    }
    // exact projection and mean removal of the returned field
    ws.leray(chi.u1, chi.u2);

    // pressure from the unprojected residual
    Array2D q1(cfg.n_cell, cfg.n_cell), q2(cfg.n_cell, cfg.n_cell);
    ws.apply_operator(chi.u1, chi.u2, q1, q2);
    Array2D r1 = b1, r2 = b2;
    axpy(-1.0, q1, r1);
    axpy(-1.0, q2, r2);
    chi.pressure = ws.recover_pressure(r1, r2);

    if (info) {
        info->iterations = iters;
        info->residual = rel;
        info->converged = true;
    }
    return chi;
}

CorrectorSet solve_all_correctors(const CoefficientField& a, const CellSolveConfig& cfg) {
    CorrectorSet set;
    set.n = cfg.n_cell;
    for (int i = 1; i <= 2; ++i) {
        for (int k = 1; k <= 2; ++k) {
            CellSolveInfo info;
            set.at(i, k) = solve_cell_problem(a, cfg, i, k, &info);
            set.info[i - 1][k - 1] = info;
        }
    }
    return set;
}

double cell_residual(const CoefficientField& a, const CorrectorField& chi) {
    int n = chi.u1.nx;
    CellWorkspace ws(a, n);
    Array2D b1, b2;
    ws.rhs(chi.i, chi.k, b1, b2);
    Array2D pb1 = b1, pb2 = b2;
    ws.leray(pb1, pb2);
    double bnorm = rms(pb1, pb2);

    Array2D q1(n, n), q2(n, n);
    ws.apply_operator(chi.u1, chi.u2, q1, q2);
    Array2D r1 = b1, r2 = b2;
    axpy(-1.0, q1, r1);
    axpy(-1.0, q2, r2);
    ws.leray(r1, r2);
    double rnorm = rms(r1, r2);
    if (bnorm < 1e-300) return rnorm;  // degenerate RHS: absolute RMS residual
    return rnorm / bnorm;
}

namespace {

// Dense real spectral differentiation matrix (zero-Nyquist convention),
// assembled from the DFT definition rather than the FFT code path.
Eigen::MatrixXd dense_diff_matrix(int n) {
    using MatC = Eigen::MatrixXcd;
    MatC F(n, n), Dk(n, n);
    Dk.setZero();
    for (int m = 0; m < n; ++m) {
        for (int p = 0; p < n; ++p) {
            double ang = -kTwoPi * double(m) * double(p) / double(n);
            F(m, p) = cplx(std::cos(ang), std::sin(ang));
        }
        int k = (m <= n / 2) ? m : m - n;
        if (2 * m == n) k = 0;
        Dk(m, m) = cplx(0.0, kTwoPi * k);
    }
    MatC D = F.inverse() * Dk * F;
    return D.real();
}

}  // namespace

CorrectorField dense_cell_oracle(const CoefficientField& a, int n_small, int i, int k) {
    if (n_small > 16) throw std::invalid_argument("dense_cell_oracle: lattice must be <= 16");
    CellSampling s(n_small);
    auto ell = ellipticity_estimate(a, s);
    if (!ell.ok) throw std::invalid_argument("dense_cell_oracle: coefficient field rejected");

    int n = n_small;
    int N = n * n;
    Eigen::MatrixXd D1 = dense_diff_matrix(n);

    // Flattened index (p,q) -> p*n + q; x derivative couples p, y derivative couples q.
    Eigen::MatrixXd Dx = Eigen::MatrixXd::Zero(N, N), Dy = Eigen::MatrixXd::Zero(N, N);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int r = 0; r < n; ++r) {
                Dx(p * n + q, r * n + q) = D1(p, r);
                Dy(p * n + q, p * n + r) = D1(q, r);
            }

    Eigen::VectorXd A11(N), A12(N), A22(N);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            SymMat2 m = sample_at(a, s.node(p), s.node(q));
            A11(p * n + q) = m.a11;
            A12(p * n + q) = m.a12;
            A22(p * n + q) = m.a22;
        }

    Eigen::MatrixXd Ablk = Dx.transpose() * A11.asDiagonal() * Dx + Dx.transpose() * A12.asDiagonal() * Dy +
                           Dy.transpose() * A12.asDiagonal() * Dx + Dy.transpose() * A22.asDiagonal() * Dy;

    // gauge vectors: lattice mean and the three zero-derivative (Nyquist) modes
    Eigen::MatrixXd E(N, 4);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            int idx = p * n + q;
            E(idx, 0) = 1.0;
            E(idx, 1) = (p % 2 == 0) ? 1.0 : -1.0;
            E(idx, 2) = (q % 2 == 0) ? 1.0 : -1.0;
            E(idx, 3) = ((p + q) % 2 == 0) ? 1.0 : -1.0;
        }

    // unknowns: [u1 u2 (2N); pi (N); lambda (8); mu (4)]
    int NU = 2 * N, NP = N, NL = 8, NM = 4;
    int tot = NU + NP + NL + NM;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(tot, tot);
    M.block(0, 0, N, N) = Ablk;
    M.block(N, N, N, N) = Ablk;
    // divergence constraint B = [Dx, Dy]
    M.block(NU, 0, N, N) = Dx;
    M.block(NU, N, N, N) = Dy;
    M.block(0, NU, N, N) = Dx.transpose();
    M.block(N, NU, N, N) = Dy.transpose();
    // velocity gauges C (4 per component)
    for (int c = 0; c < 2; ++c) {
        M.block(NU + NP + 4 * c, c * N, 4, N) = E.transpose();
        M.block(c * N, NU + NP + 4 * c, N, 4) = E;
    }
    // pressure gauges
    M.block(NU, NU + NP + NL, N, 4) = E;
    M.block(NU + NP + NL, NU, 4, N) = E.transpose();

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(tot);
    const Eigen::VectorXd& c1 = (i == 1) ? A11 : A12;
    const Eigen::VectorXd& c2 = (i == 1) ? A12 : A22;
    Eigen::VectorXd bk = -(Dx * c1 + Dy * c2);
    rhs.segment((k - 1) * N, N) = bk;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) throw std::runtime_error("dense_cell_oracle: singular saddle-point system");
    Eigen::VectorXd sol = lu.solve(rhs);

    CorrectorField out;
    out.i = i;
    out.k = k;
    out.u1 = Array2D(n, n);
    out.u2 = Array2D(n, n);
    out.pressure = Array2D(n, n);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            out.u1(p, q) = sol(p * n + q);
            out.u2(p, q) = sol(N + p * n + q);
            out.pressure(p, q) = sol(NU + p * n + q);
        }
    return out;
}

void spectral_gradient(const Array2D& f, Array2D& gx, Array2D& gy) {
    if (f.nx != f.ny) throw std::invalid_argument("spectral_gradient: lattice must be square");
    int n = f.nx;
    Fft2D fft(n);
    std::vector<cplx> spec, sx, sy;
    fft.forward(f, spec);
    int nk = fft.nk();
    sx.resize(spec.size());
    sy.resize(spec.size());
    for (int i = 0; i < n; ++i) {
        double k1 = kTwoPi * fft.wavenumber(i);
        for (int j = 0; j < nk; ++j) {
            double k2 = kTwoPi * fft.wavenumber(j);
            cplx v = spec[size_t(i) * nk + j];
            sx[size_t(i) * nk + j] = cplx(0.0, k1) * v;
            sy[size_t(i) * nk + j] = cplx(0.0, k2) * v;
        }
    }
    fft.inverse(sx, gx);
    fft.inverse(sy, gy);
}

}  // namespace stokhom
