#include "stokhom/mac.hpp"

#include <cmath>
#include <stdexcept>

namespace stokhom {

MacGrid::MacGrid(int n_) : n(n_), h(1.0 / n_) {
    if (n_ < 8) throw std::invalid_argument("MacGrid: n must be >= 8");
}

void mac_divergence(const MacGrid& g, const MacField& vel, Array2D& div) {
    int n = g.n;
    double ih = 1.0 / g.h;
    div = Array2D(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            div(i, j) = (vel.u(i + 1, j) - vel.u(i, j)) * ih + (vel.v(i, j + 1) - vel.v(i, j)) * ih;
}

void mac_gradient(const MacGrid& g, const Array2D& p, MacField& grad) {
    int n = g.n;
    double ih = 1.0 / g.h;
    grad = MacField(n);
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < n; ++j) grad.u(i, j) = (p(i, j) - p(i - 1, j)) * ih;
    for (int i = 0; i < n; ++i)
        for (int j = 1; j < n; ++j) grad.v(i, j) = (p(i, j) - p(i, j - 1)) * ih;
}

namespace {

// ---------------------------------------------------------------------------
// Gradient factor maps between staggered components and quadrature lattices.
// Centers lattice: n x n; corners lattice: (n+1) x (n+1).
// Tangential walls are handled by mirror ghosts (odd reflection), normal
// walls by the pinned zeros stored in the arrays.
// ---------------------------------------------------------------------------

// mirror-fold a u index; returns the sign, or 0 if the node is pinned
inline double fold_u(int n, int& i, int& j) {
    double s = 1.0;
    if (i < 0) {
        i = -i;
        s = -s;
    } else if (i > n) {
        i = 2 * n - i;
        s = -s;
    }
    if (j < 0) {
        j = -1 - j;
        s = -s;
    } else if (j >= n) {
        j = 2 * n - 1 - j;
        s = -s;
    }
    if (i == 0 || i == n) return 0.0;
    return s;
}

inline double fold_v(int n, int& i, int& j) {
    double s = 1.0;
    if (i < 0) {
        i = -1 - i;
        s = -s;
    } else if (i >= n) {
        i = 2 * n - 1 - i;
        s = -s;
    }
    if (j < 0) {
        j = -j;
        s = -s;
    } else if (j > n) {
        j = 2 * n - j;
        s = -s;
    }
    if (j == 0 || j == n) return 0.0;
    return s;
}

inline double read_u(const Array2D& u, int n, int i, int j) {
    double s = fold_u(n, i, j);
    return s == 0.0 ? 0.0 : s * u(i, j);
}

inline double read_v(const Array2D& v, int n, int i, int j) {
    double s = fold_v(n, i, j);
    return s == 0.0 ? 0.0 : s * v(i, j);
}

inline void add_u(Array2D& u, int n, int i, int j, double val) {
    double s = fold_u(n, i, j);
    if (s != 0.0) u(i, j) += s * val;
}

inline void add_v(Array2D& v, int n, int i, int j, double val) {
    double s = fold_v(n, i, j);
    if (s != 0.0) v(i, j) += s * val;
}

// --- natural maps -----------------------------------------------------------

// d u / dx at centers
void gather_u_dx_C(const MacGrid& g, const Array2D& u, Array2D& out) {
    int n = g.n;
    double ih = 1.0 / g.h;
    out = Array2D(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = (u(i + 1, j) - u(i, j)) * ih;
}
void scatter_u_dx_C(const MacGrid& g, const Array2D& S, Array2D& u) {
    int n = g.n;
    double ih = 1.0 / g.h;
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < n; ++j) u(i, j) += (S(i - 1, j) - S(i, j)) * ih;
}

// d u / dy at corners, mirror ghosts at the y walls
void gather_u_dy_K(const MacGrid& g, const Array2D& u, Array2D& out) {
    int n = g.n;
    double ih = 1.0 / g.h;
    out = Array2D(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) {
        out(i, 0) = 2.0 * u(i, 0) * ih;
        for (int j = 1; j < n; ++j) out(i, j) = (u(i, j) - u(i, j - 1)) * ih;
        out(i, n) = -2.0 * u(i, n - 1) * ih;
    }
}
void scatter_u_dy_K(const MacGrid& g, const Array2D& S, Array2D& u) {
    int n = g.n;
    double ih = 1.0 / g.h;
    for (int i = 1; i < n; ++i) {
        u(i, 0) += (2.0 * S(i, 0) - S(i, 1)) * ih;
        for (int j = 1; j < n - 1; ++j) u(i, j) += (S(i, j) - S(i, j + 1)) * ih;
        u(i, n - 1) += (S(i, n - 1) - 2.0 * S(i, n)) * ih;
    }
}

// d v / dy at centers
void gather_v_dy_C(const MacGrid& g, const Array2D& v, Array2D& out) {
    int n = g.n;
    double ih = 1.0 / g.h;
    out = Array2D(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = (v(i, j + 1) - v(i, j)) * ih;
}
void scatter_v_dy_C(const MacGrid& g, const Array2D& S, Array2D& v) {
    int n = g.n;
    double ih = 1.0 / g.h;
    for (int i = 0; i < n; ++i)
        for (int j = 1; j < n; ++j) v(i, j) += (S(i, j - 1) - S(i, j)) * ih;
}

// d v / dx at corners, mirror ghosts at the x walls
void gather_v_dx_K(const MacGrid& g, const Array2D& v, Array2D& out) {
    int n = g.n;
    double ih = 1.0 / g.h;
    out = Array2D(n + 1, n + 1);
    for (int j = 0; j <= n; ++j) out(0, j) = 2.0 * v(0, j) * ih;
    for (int i = 1; i < n; ++i)
        for (int j = 0; j <= n; ++j) out(i, j) = (v(i, j) - v(i - 1, j)) * ih;
    for (int j = 0; j <= n; ++j) out(n, j) = -2.0 * v(n - 1, j) * ih;
}
void scatter_v_dx_K(const MacGrid& g, const Array2D& S, Array2D& v) {
    int n = g.n;
    double ih = 1.0 / g.h;
    for (int j = 1; j < n; ++j) {
        v(0, j) += (2.0 * S(0, j) - S(1, j)) * ih;
        v(n - 1, j) += (S(n - 1, j) - 2.0 * S(n, j)) * ih;
    }
    for (int i = 1; i < n - 1; ++i)
        for (int j = 1; j < n; ++j) v(i, j) += (S(i, j) - S(i + 1, j)) * ih;
}

// --- wide (averaged) maps ----------------------------------------------------

// d u / dy at centers
void gather_u_dy_C(const MacGrid& g, const Array2D& u, Array2D& out) {
    int n = g.n;
    double c = 0.25 / g.h;
    out = Array2D(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out(i, j) = (read_u(u, n, i, j + 1) + read_u(u, n, i + 1, j + 1) - read_u(u, n, i, j - 1) -
                         read_u(u, n, i + 1, j - 1)) *
                        c;
}
void scatter_u_dy_C(const MacGrid& g, const Array2D& S, Array2D& u) {
    int n = g.n;
    double c = 0.25 / g.h;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = S(i, j) * c;
            add_u(u, n, i, j + 1, s);
            add_u(u, n, i + 1, j + 1, s);
            add_u(u, n, i, j - 1, -s);
            add_u(u, n, i + 1, j - 1, -s);
        }
}

// d u / dx at corners
void gather_u_dx_K(const MacGrid& g, const Array2D& u, Array2D& out) {
    int n = g.n;
    double c = 0.25 / g.h;
    out = Array2D(n + 1, n + 1);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            out(i, j) = (read_u(u, n, i + 1, j) + read_u(u, n, i + 1, j - 1) - read_u(u, n, i - 1, j) -
                         read_u(u, n, i - 1, j - 1)) *
                        c;
}
void scatter_u_dx_K(const MacGrid& g, const Array2D& S, Array2D& u) {
    int n = g.n;
    double c = 0.25 / g.h;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            double s = S(i, j) * c;
            add_u(u, n, i + 1, j, s);
            add_u(u, n, i + 1, j - 1, s);
            add_u(u, n, i - 1, j, -s);
            add_u(u, n, i - 1, j - 1, -s);
        }
}

// d v / dx at centers
void gather_v_dx_C(const MacGrid& g, const Array2D& v, Array2D& out) {
    int n = g.n;
    double c = 0.25 / g.h;
    out = Array2D(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out(i, j) = (read_v(v, n, i + 1, j) + read_v(v, n, i + 1, j + 1) - read_v(v, n, i - 1, j) -
                         read_v(v, n, i - 1, j + 1)) *
                        c;
}
void scatter_v_dx_C(const MacGrid& g, const Array2D& S, Array2D& v) {
    int n = g.n;
    double c = 0.25 / g.h;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = S(i, j) * c;
            add_v(v, n, i + 1, j, s);
            add_v(v, n, i + 1, j + 1, s);
            add_v(v, n, i - 1, j, -s);
            add_v(v, n, i - 1, j + 1, -s);
        }
}

// d v / dy at corners
void gather_v_dy_K(const MacGrid& g, const Array2D& v, Array2D& out) {
    int n = g.n;
    double c = 0.25 / g.h;
    out = Array2D(n + 1, n + 1);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            out(i, j) = (read_v(v, n, i, j + 1) + read_v(v, n, i - 1, j + 1) - read_v(v, n, i, j - 1) -
                         read_v(v, n, i - 1, j - 1)) *
                        c;
}
void scatter_v_dy_K(const MacGrid& g, const Array2D& S, Array2D& v) {
    int n = g.n;
    double c = 0.25 / g.h;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            double s = S(i, j) * c;
            add_v(v, n, i, j + 1, s);
            add_v(v, n, i - 1, j + 1, s);
            add_v(v, n, i, j - 1, -s);
            add_v(v, n, i - 1, j - 1, -s);
        }
}

// dispatch tables: pair index = 2*(comp-1) + (dir-1); lattice 0 = C, 1 = K
using GatherFn = void (*)(const MacGrid&, const Array2D&, Array2D&);
using ScatterFn = void (*)(const MacGrid&, const Array2D&, Array2D&);

// [lattice][pair]
const GatherFn kGather[2][4] = {
    {gather_u_dx_C, gather_u_dy_C, gather_v_dx_C, gather_v_dy_C},
    {gather_u_dx_K, gather_u_dy_K, gather_v_dx_K, gather_v_dy_K},
};
const ScatterFn kScatter[2][4] = {
    {scatter_u_dx_C, scatter_u_dy_C, scatter_v_dx_C, scatter_v_dy_C},
    {scatter_u_dx_K, scatter_u_dy_K, scatter_v_dx_K, scatter_v_dy_K},
};

}  // namespace

void velocity_gradients_at_centers(const MacGrid& g, const MacField& z, Array2D out[2][2]) {
    gather_u_dx_C(g, z.u, out[0][0]);
    gather_u_dy_C(g, z.u, out[0][1]);
    gather_v_dx_C(g, z.v, out[1][0]);
    gather_v_dy_C(g, z.v, out[1][1]);
}

void VelocityOperator::apply(const MacField& z, MacField& out) const {
    int n = grid_.n;
    out = MacField(n);
    if (scratch_.empty()) scratch_.resize(8);

    for (int L = 0; L < 2; ++L) {
        bool need_trial[4] = {false, false, false, false};
        bool need_test[4] = {false, false, false, false};
        for (const Term& t : terms_) {
            if (t.lattice != L) continue;
            need_trial[t.trial] = true;
            need_test[t.test] = true;
        }
        Array2D* G[4] = {nullptr, nullptr, nullptr, nullptr};
        for (int p = 0; p < 4; ++p) {
            if (!need_trial[p]) continue;
            G[p] = &scratch_[size_t(L) * 4 + p];
            const Array2D& comp = (p < 2) ? z.u : z.v;
            kGather[L][p](grid_, comp, *G[p]);
        }
        int dim = (L == 0) ? n : n + 1;
        Array2D S[4];
        bool have_S[4] = {false, false, false, false};
        for (const Term& t : terms_) {
            if (t.lattice != L) continue;
            if (!have_S[t.test]) {
                S[t.test] = Array2D(dim, dim);
                have_S[t.test] = true;
            }
            const Array2D& g = *G[t.trial];
            Array2D& s = S[t.test];
            if (t.field) {
                const Array2D& f = *t.field;
                for (size_t m = 0; m < s.size(); ++m) s.a[m] += t.w * f.a[m] * g.a[m];
            } else {
                for (size_t m = 0; m < s.size(); ++m) s.a[m] += t.w * g.a[m];
            }
        }
        // trapezoid quadrature weights on the corner lattice (1/2 on wall
        // lines); centers are interior points with unit weight
        if (L == 1) {
            for (int p = 0; p < 4; ++p) {
                if (!have_S[p]) continue;
                Array2D& s = S[p];
                for (int j = 0; j <= n; ++j) {
                    s(0, j) *= 0.5;
                    s(n, j) *= 0.5;
                }
                for (int i = 1; i < n; ++i) {
                    s(i, 0) *= 0.5;
                    s(i, n) *= 0.5;
                }
            }
        }
        for (int p = 0; p < 4; ++p) {
            if (!have_S[p]) continue;
            Array2D& comp = (p < 2) ? out.u : out.v;
            kScatter[L][p](grid_, S[p], comp);
        }
    }
    out.zero_pinned();
}

double VelocityOperator::form(const MacField& z, const MacField& w) const {
    MacField az;
    apply(z, az);
    return dot(az, w) * grid_.h * grid_.h;
}

namespace {

// weight of the term ((i,k),(j,h)) on lattice L under the half/half split rule
double lattice_weight(int L, int nat_test, int nat_trial) {
    if (nat_test == L && nat_trial == L) return 1.0;
    if (nat_test == L || nat_trial == L) return 0.5;
    return 0.0;
}

}  // namespace

FineOperator::FineOperator(const MacGrid& grid, const CoefficientField& a, double eps)
    : VelocityOperator(grid) {
    int n = grid.n;
    amin_ = 1e300;
    amax_ = 0.0;
    for (int L = 0; L < 2; ++L) {
        Array2D* dst = (L == 0) ? aC_ : aK_;
        int dim = (L == 0) ? n : n + 1;
        for (int c = 0; c < 3; ++c) dst[c] = Array2D(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                double x = (L == 0) ? grid.xp(i) : grid.xu(i);
                double y = (L == 0) ? grid.yp(j) : grid.yv(j);
                SymMat2 m = epsilon_sample(a, eps, x, y);
                dst[0](i, j) = m.a11;
                dst[1](i, j) = m.a12;
                dst[2](i, j) = m.a22;
                amin_ = std::min(amin_, m.min_eigenvalue());
                amax_ = std::max(amax_, m.max_eigenvalue());
            }
    }
    bool diagonal = aC_[1].max_abs() == 0.0 && aK_[1].max_abs() == 0.0;

    // terms: for each component c and coefficient pair (i,j), weight a_ij at
    // the lattice(s) given by the split rule
    for (int c = 1; c <= 2; ++c) {
        for (int i = 1; i <= 2; ++i) {
            for (int j = 1; j <= 2; ++j) {
                if (diagonal && i != j) continue;
                int cidx = (i == 1 && j == 1) ? 0 : (i == 2 && j == 2) ? 2 : 1;
                int nat_test = natural_lattice(i, c);
                int nat_trial = natural_lattice(j, c);
                for (int L = 0; L < 2; ++L) {
                    double w = lattice_weight(L, nat_test, nat_trial);
                    if (w == 0.0) continue;
                    const Array2D* f = (L == 0) ? &aC_[cidx] : &aK_[cidx];
                    terms_.push_back({L, pair_index(i, c), pair_index(j, c), w, f});
                }
            }
        }
    }
}

PrecondHint FineOperator::precond_hint() const {
    // column means of the sampled coefficients: exact profiles when the
    // coefficients depend on x only (layered microstructure)
    int n = grid_.n;
    PrecondHint hnt;
    auto col_mean = [](const Array2D& a, int i) {
        double s = 0.0;
        for (int j = 0; j < a.ny; ++j) s += a(i, j);
        return s / a.ny;
    };
    hnt.u_flux_x.resize(n);
    hnt.v_lam_x.resize(n);
    for (int i = 0; i < n; ++i) {
        hnt.u_flux_x[i] = col_mean(aC_[0], i);
        hnt.v_lam_x[i] = col_mean(aC_[2], i);
    }
    hnt.u_lam_x.resize(n + 1);
    hnt.v_flux_x.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        hnt.u_lam_x[i] = col_mean(aK_[2], i);
        hnt.v_flux_x[i] = col_mean(aK_[0], i);
    }
    hnt.cbar = std::sqrt(std::max(amin_, 1e-300) * std::max(amax_, 1e-300));
    return hnt;
}

HomogOperator::HomogOperator(const MacGrid& grid, const EffectiveTensor& q) : VelocityOperator(grid) {
    // symmetrize (major symmetry is an invariant of q; this removes fp dust)
    double maxabs = 0.0;
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
            for (int k = 1; k <= 2; ++k)
                for (int h = 1; h <= 2; ++h) {
                    double s = 0.5 * (q.at(i, j, k, h) + q.at(j, i, h, k));
                    qsym_[pair_index(i, k)][pair_index(j, h)] = s;
                    maxabs = std::max(maxabs, std::fabs(s));
                }
    double drop = 1e-12 * maxabs;
    for (int i = 1; i <= 2; ++i)
        for (int k = 1; k <= 2; ++k)
            for (int j = 1; j <= 2; ++j)
                for (int h = 1; h <= 2; ++h) {
                    double w = qsym_[pair_index(i, k)][pair_index(j, h)];
                    if (std::fabs(w) <= drop) continue;
                    int nat_test = natural_lattice(i, k);
                    int nat_trial = natural_lattice(j, h);
                    for (int L = 0; L < 2; ++L) {
                        double lw = lattice_weight(L, nat_test, nat_trial);
                        if (lw == 0.0) continue;
                        terms_.push_back({L, pair_index(i, k), pair_index(j, h), lw * w, nullptr});
                    }
                }
}

PrecondHint HomogOperator::precond_hint() const {
    int n = grid_.n;
    PrecondHint hnt;
    double cxu = qsym_[pair_index(1, 1)][pair_index(1, 1)];
    double cyu = qsym_[pair_index(2, 1)][pair_index(2, 1)];
    double cxv = qsym_[pair_index(1, 2)][pair_index(1, 2)];
    double cyv = qsym_[pair_index(2, 2)][pair_index(2, 2)];
    hnt.u_flux_x.assign(n, cxu);
    hnt.u_lam_x.assign(n + 1, cyu);
    hnt.v_flux_x.assign(n + 1, cxv);
    hnt.v_lam_x.assign(n, cyv);
    hnt.cbar = 0.25 * (cxu + cyu + cxv + cyv);
    return hnt;
}

SampledCoeffOperator::SampledCoeffOperator(const MacGrid& grid, CoeffFn fn) : VelocityOperator(grid) {
    int n = grid.n;
    for (int L = 0; L < 2; ++L) {
        Array2D* dst = (L == 0) ? aC_ : aK_;
        int dim = (L == 0) ? n : n + 1;
        for (int c = 0; c < 3; ++c) dst[c] = Array2D(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                double x = (L == 0) ? grid.xp(i) : grid.xu(i);
                double y = (L == 0) ? grid.yp(j) : grid.yv(j);
                SymMat2 m = fn(x, y);
                dst[0](i, j) = m.a11;
                dst[1](i, j) = m.a12;
                dst[2](i, j) = m.a22;
            }
    }
    for (int c = 1; c <= 2; ++c)
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 2; ++j) {
                int cidx = (i == 1 && j == 1) ? 0 : (i == 2 && j == 2) ? 2 : 1;
                int nat_test = natural_lattice(i, c);
                int nat_trial = natural_lattice(j, c);
                for (int L = 0; L < 2; ++L) {
                    double w = lattice_weight(L, nat_test, nat_trial);
                    if (w == 0.0) continue;
                    const Array2D* f = (L == 0) ? &aC_[cidx] : &aK_[cidx];
                    terms_.push_back({L, pair_index(i, c), pair_index(j, c), w, f});
                }
            }
}

PrecondHint SampledCoeffOperator::precond_hint() const {
    int n = grid_.n;
    auto col_mean = [](const Array2D& a, int i) {
        double s = 0.0;
        for (int j = 0; j < a.ny; ++j) s += a(i, j);
        return s / a.ny;
    };
    PrecondHint hnt;
    hnt.u_flux_x.resize(n);
    hnt.v_lam_x.resize(n);
    for (int i = 0; i < n; ++i) {
        hnt.u_flux_x[i] = col_mean(aC_[0], i);
        hnt.v_lam_x[i] = col_mean(aC_[2], i);
    }
    hnt.u_lam_x.resize(n + 1);
    hnt.v_flux_x.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        hnt.u_lam_x[i] = col_mean(aK_[2], i);
        hnt.v_flux_x[i] = col_mean(aK_[0], i);
    }
    double s = 0.0;
    for (double v : hnt.u_flux_x) s += v;
    hnt.cbar = s / n;
    return hnt;
}

}  // namespace stokhom
