#pragma once

#include <memory>
#include <vector>

#include "stokhom/array2d.hpp"
#include "stokhom/coeff.hpp"
#include "stokhom/tensor.hpp"

namespace stokhom {

/// Staggered MAC grid on the unit square: u on vertical face centers,
/// v on horizontal face centers, p on cell centers. Velocity components
/// normal to a wall sit on the wall and are pinned to zero; tangential
/// components use mirror ghosts.
struct MacGrid {
    int n = 0;
    double h = 0.0;
    explicit MacGrid(int n_);

    // node coordinates
    double xu(int i) const { return i * h; }
    double yu(int j) const { return (j + 0.5) * h; }
    double xv(int i) const { return (i + 0.5) * h; }
    double yv(int j) const { return j * h; }
    double xp(int i) const { return (i + 0.5) * h; }
    double yp(int j) const { return (j + 0.5) * h; }
};

/// Staggered velocity field. u is (n+1) x n with u(0,.) = u(n,.) = 0 pinned;
/// v is n x (n+1) with v(.,0) = v(.,n) = 0 pinned.
struct MacField {
    int n = 0;
    Array2D u, v;

    MacField() = default;
    explicit MacField(int n_) : n(n_), u(n_ + 1, n_), v(n_, n_ + 1) {}

    void fill(double val) {
        u.fill(val);
        v.fill(val);
        zero_pinned();
    }
    void zero_pinned() {
        for (int j = 0; j < n; ++j) u(0, j) = u(n, j) = 0.0;
        for (int i = 0; i < n; ++i) v(i, 0) = v(i, n) = 0.0;
    }
    double max_abs() const { return std::max(u.max_abs(), v.max_abs()); }
};

inline double dot(const MacField& a, const MacField& b) { return dot(a.u, b.u) + dot(a.v, b.v); }
inline void axpy(double alpha, const MacField& x, MacField& y) {
    axpy(alpha, x.u, y.u);
    axpy(alpha, x.v, y.v);
}

/// Discrete divergence to cell centers; the pair (divergence, gradient)
/// below satisfies D = -G^T exactly on interior degrees of freedom.
void mac_divergence(const MacGrid& g, const MacField& vel, Array2D& div);
void mac_gradient(const MacGrid& g, const Array2D& p, MacField& grad);

/// All four gradient factors d z^k / dx_j at cell centers (natural staggered
/// stencils where available, averaged wide stencils otherwise): out[k-1][j-1].
void velocity_gradients_at_centers(const MacGrid& g, const MacField& z, Array2D out[2][2]);

/// Separable coefficient profiles for the velocity-solve preconditioner:
/// the preconditioner inverts sigma I - d_x(a(x) d_x) - a(x) d_yy exactly
/// (sine transform in y, tridiagonal solves in x), so it is the exact
/// inverse whenever the operator's coefficients depend on x only.
struct PrecondHint {
    std::vector<double> u_flux_x;  // u: x-flux coefficient at centers-x, size n
    std::vector<double> u_lam_x;   // u: y-part multiplier at u-node-x, size n+1
    std::vector<double> v_flux_x;  // v: x-flux coefficient at corners-x, size n+1
    std::vector<double> v_lam_x;   // v: y-part multiplier at v-node-x, size n
    double cbar = 1.0;             // representative scalar for the pressure preconditioner
};

/// Symmetric positive semi-definite discretization of a second-order velocity
/// operator in quadrature form: the bilinear form
///     sum_L sum_points W_L[(i,k),(j,h)] (D_j z^h) (D_i w^k) h^2
/// is evaluated over cell centers and cell corners, using the natural
/// staggered difference where available and the averaged wide difference
/// otherwise. Mixed natural/wide terms are split half-and-half between the
/// two lattices, which keeps the operator exactly symmetric for tensors with
/// major symmetry (and for symmetric coefficient matrices).
class VelocityOperator {
public:
    virtual ~VelocityOperator() = default;
    explicit VelocityOperator(const MacGrid& grid) : grid_(grid) {}

    const MacGrid& grid() const { return grid_; }

    /// out = A z on interior DOFs (pinned entries zeroed). Scratch is reused;
    /// concurrent apply() on the same instance is not supported.
    void apply(const MacField& z, MacField& out) const;

    /// a_h(z, w) = <A z, w> h^2
    double form(const MacField& z, const MacField& w) const;

    virtual PrecondHint precond_hint() const = 0;

protected:
    // (dir, comp) pair index: 2*(comp-1) + (dir-1)
    static int pair_index(int dir, int comp) { return 2 * (comp - 1) + (dir - 1); }
    // natural lattice of a gradient factor: 0 = centers when dir == comp, 1 = corners
    static int natural_lattice(int dir, int comp) { return (dir == comp) ? 0 : 1; }

    struct Term {
        int lattice;            // 0 centers, 1 corners
        int test, trial;        // pair indices
        double w;               // constant weight (includes the 1/2 split)
        const Array2D* field;   // optional pointwise factor on this lattice
    };
    std::vector<Term> terms_;

    MacGrid grid_;

private:
    mutable std::vector<Array2D> scratch_;
};

/// P^eps restricted to a component pair-diagonal action: for each velocity
/// component w, -sum_ij D_i(a_ij(x/eps) D_j w), coefficients sampled
/// pointwise at the quadrature lattices.
class FineOperator : public VelocityOperator {
public:
    FineOperator(const MacGrid& grid, const CoefficientField& a, double eps);

    PrecondHint precond_hint() const override;

private:
    Array2D aC_[3], aK_[3];  // a11, a12, a22 at centers and corners
    double amin_ = 1.0, amax_ = 1.0;
};

/// Constant-coefficient homogenized operator (Q z)^k = -q_ijkh d2 z^h / dx_i dx_j,
/// including cross-component coupling and mixed derivatives. For
/// q_ijkh = delta_ij delta_kh this reduces exactly to the same stencil as
/// FineOperator with constant(1).
class HomogOperator : public VelocityOperator {
public:
    HomogOperator(const MacGrid& grid, const EffectiveTensor& q);

    PrecondHint precond_hint() const override;

private:
    double qsym_[4][4];
};

/// Synthetic variable-coefficient operator over explicit sampled coefficient
/// arrays (used in tests to exercise the non-diagonal code paths).
class SampledCoeffOperator : public VelocityOperator {
public:
    /// coefficient evaluator invoked at quadrature points (x, y)
    using CoeffFn = SymMat2 (*)(double x, double y);
    SampledCoeffOperator(const MacGrid& grid, CoeffFn fn);
    PrecondHint precond_hint() const override;

private:
    Array2D aC_[3], aK_[3];
};

}  // namespace stokhom
