#pragma once

#include <string>
#include <vector>

namespace stokhom {

/// Symmetric 2x2 matrix value of a coefficient field at a point.
struct SymMat2 {
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;

    double min_eigenvalue() const;
    double max_eigenvalue() const;
};

enum class CoeffPreset { Constant, Layered, Trig, CheckerboardSmooth };

const char* preset_name(CoeffPreset p);

/// Y-periodic symmetric coefficient field a_ij(y) on the unit cell
/// Y = (-1/2, 1/2)^2, given by an analytic preset:
///
///   constant(c):             a = c I
///   layered(kappa):          a = alpha(y1) I,  alpha = 1 + (kappa-1) (1 + sin 2 pi y1) / 2
///   trig(beta):              a = (1 + beta cos 2 pi y1 cos 2 pi y2) I,  |beta| < 1
///   checkerboard_smooth(kappa, s):
///       a = alpha(y) I, alpha = 1 + (kappa-1) (1 + tanh(sin 2 pi y1 sin 2 pi y2 / s) / tanh(1/s)) / 2
///
/// All presets are exactly periodic and uniformly elliptic for valid parameters.
struct CoefficientField {
    CoeffPreset preset = CoeffPreset::Constant;
    double p0 = 1.0;      // c | kappa | beta | kappa
    double p1 = 0.0;      // unused except checkerboard transition width s
    double scale = 1.0;   // overall multiplier c in c*a (not a config key)
};

/// c * a for c > 0; preserves symmetry and ellipticity.
CoefficientField scaled(const CoefficientField& f, double c);

/// Uniform lattice on the periodic cell: nodes y_p = -1/2 + p/n, p = 0..n-1
/// (half-open so each physical point is represented once).
struct CellSampling {
    int n = 0;
    explicit CellSampling(int n_);
    double node(int p) const { return -0.5 + double(p) / n; }
};

/// Builds a preset field; throws std::invalid_argument on unknown names or
/// parameters that break ellipticity (e.g. trig with |beta| >= 1).
CoefficientField make_preset(const std::string& name, const std::vector<double>& params);

/// Point evaluation with periodic wrap; y arbitrary in R^2.
SymMat2 sample_at(const CoefficientField& f, double y1, double y2);

/// a(x / eps). Throws std::invalid_argument for eps <= 0.
SymMat2 epsilon_sample(const CoefficientField& f, double eps, double x1, double x2);

/// Minimum over the lattice of the smallest eigenvalue of a(y_p).
/// ok == false flags a rejected field (alpha <= 0).
struct EllipticityEstimate {
    double alpha = 0.0;
    bool ok = false;
};
EllipticityEstimate ellipticity_estimate(const CoefficientField& f, const CellSampling& s);

}  // namespace stokhom
