#pragma once

#include <utility>
#include <vector>

#include "stokhom/cell.hpp"
#include "stokhom/stokes.hpp"

namespace stokhom {

/// Separable two-scale test function psi(x,t,y,tau) = phi(x,t) w(y) chi(tau):
/// phi is a C-infinity bump compactly supported in Q, w a trigonometric
/// Y-periodic factor, chi a trigonometric Z-periodic factor. Y and Z means of
/// the periodic factors are closed forms.
struct TestFunction {
    enum class YFactor { One, Cos1, Cos2, CosCos, Cos1Sq };
    enum class TauFactor { One, Cos };

    YFactor w = YFactor::One;
    TauFactor chi = TauFactor::One;
    double T = 1.0;  // time-bump scale (the trajectory horizon)

    double eval_phi(double x1, double x2, double t) const;
    double eval_w(double y1, double y2) const;
    double eval_chi(double tau) const;
    double y_mean() const;
    double tau_mean() const;
};

struct PairingValue {
    double u = 0.0;
    double v = 0.0;
    double norm() const;
};

/// Lattice quadrature of u_eps(x,t) psi(x, t, x/eps, t/eps) over Q,
/// per velocity component.
PairingValue two_scale_pairing(const Trajectory& traj, const TestFunction& psi, double eps);

/// Two-scale limit integral for a y- and tau-independent velocity u0:
/// quadrature of u0 phi times the closed-form Y x Z mean of w chi.
PairingValue limit_pairing(const Trajectory& traj_homog, const TestFunction& psi);

/// Space-time L2 norm of the velocity difference. Trajectories must share the
/// time grid; if the homogenized grid is coarser (n_fine a multiple of
/// n_homog), its states are interpolated bilinearly to the fine nodes.
double l2q_error(const Trajectory& traj_fine, const Trajectory& traj_homog);

/// ||grad u_eps - grad u0||_{L2(Q)} with all gradient factors evaluated at
/// cell centers.
double plain_gradient_error(const Trajectory& traj_fine, const Trajectory& traj_homog);

/// Corrector-improved gradient error
///   E_eps = ||grad u_eps - grad u0 - (grad_y u1)(x, t, x/eps)||_{L2(Q)},
/// with (grad_y u1)^k_j = -sum_{i,m} du0^m/dx_i dchi_im^k/dy_j sampled at
/// y = x/eps (corrector gradients interpolated bicubically from the cell lattice).
double corrector_error(const Trajectory& traj_fine, const Trajectory& traj_homog, const CorrectorSet& chi,
                       double eps);

/// (integral of p_eps phi, integral of p0 phi) over Q.
std::pair<double, double> pressure_pairing(const Trajectory& traj_fine, const Trajectory& traj_homog,
                                           const TestFunction& phi);

/// Least-squares slope of log err against log eps. Requires >= 3 strictly
/// positive pairs.
double fit_rate(const std::vector<double>& eps, const std::vector<double>& err);

/// Periodic bicubic (Catmull-Rom) interpolation on the unit cell lattice.
class PeriodicInterp {
public:
    explicit PeriodicInterp(const Array2D& f);
    /// y in cell coordinates (any reals; periodic wrap applied)
    double operator()(double y1, double y2) const;

private:
    Array2D f_;
};

/// Bilinear interpolation of a staggered field onto a finer staggered grid
/// (n_fine must be a multiple of the source grid size).
MacField interpolate_mac(const MacGrid& coarse, const MacField& f, const MacGrid& fine);

}  // namespace stokhom
