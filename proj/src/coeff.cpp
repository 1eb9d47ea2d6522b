#include "stokhom/coeff.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace stokhom {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

// wrap into [-1/2, 1/2)
double wrap(double y) {
    double w = y - std::floor(y + 0.5);
    if (w >= 0.5) w -= 1.0;  // guard against floor rounding at the seam
    return w;
}
}  // namespace

double SymMat2::min_eigenvalue() const {
    double tr2 = 0.5 * (a11 + a22);
    double disc = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12);
    return tr2 - disc;
}

double SymMat2::max_eigenvalue() const {
    double tr2 = 0.5 * (a11 + a22);
    double disc = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12);
    return tr2 + disc;
}

const char* preset_name(CoeffPreset p) {
    switch (p) {
        case CoeffPreset::Constant: return "constant";
        case CoeffPreset::Layered: return "layered";
        case CoeffPreset::Trig: return "trig";
        case CoeffPreset::CheckerboardSmooth: return "checkerboard_smooth";
    }
    return "?";
}

CellSampling::CellSampling(int n_) : n(n_) {
    if (n < 4) throw std::invalid_argument("CellSampling: n_cell must be >= 4");
    if ((n & (n - 1)) != 0) throw std::invalid_argument("CellSampling: n_cell must be a power of two");
}

CoefficientField make_preset(const std::string& name, const std::vector<double>& params) {
    auto need = [&](size_t k) {
        if (params.size() != k)
            throw std::invalid_argument("preset '" + name + "' takes " + std::to_string(k) +
                                        " parameter(s), got " + std::to_string(params.size()));
    };
    CoefficientField f;
    if (name == "constant") {
        need(1);
        if (params[0] <= 0.0) throw std::invalid_argument("constant(c): c must be > 0");
        f.preset = CoeffPreset::Constant;
        f.p0 = params[0];
    } else if (name == "layered") {
        need(1);
        if (params[0] <= 0.0) throw std::invalid_argument("layered(kappa): kappa must be > 0");
        f.preset = CoeffPreset::Layered;
        f.p0 = params[0];
    } else if (name == "trig") {
        need(1);
        if (std::fabs(params[0]) >= 1.0)
            throw std::invalid_argument("trig(beta): need |beta| < 1 for ellipticity");
        f.preset = CoeffPreset::Trig;
        f.p0 = params[0];
    } else if (name == "checkerboard_smooth") {
        need(2);
        if (params[0] <= 0.0) throw std::invalid_argument("checkerboard_smooth(kappa, s): kappa must be > 0");
        if (params[1] <= 0.0) throw std::invalid_argument("checkerboard_smooth(kappa, s): width s must be > 0");
        f.preset = CoeffPreset::CheckerboardSmooth;
        f.p0 = params[0];
        f.p1 = params[1];
    } else {
        throw std::invalid_argument("unknown coefficient preset '" + name + "'");
    }
    return f;
}

CoefficientField scaled(const CoefficientField& f, double c) {
    if (c <= 0.0) throw std::invalid_argument("scaled: multiplier must be > 0");
    CoefficientField g = f;
    g.scale *= c;
    return g;
}

SymMat2 sample_at(const CoefficientField& f, double y1, double y2) {
    y1 = wrap(y1);
    y2 = wrap(y2);
    SymMat2 m;
    switch (f.preset) {
        case CoeffPreset::Constant: {
            m.a11 = m.a22 = f.p0;
            break;
        }
        case CoeffPreset::Layered: {
            double alpha = 1.0 + (f.p0 - 1.0) * 0.5 * (1.0 + std::sin(kTwoPi * y1));
            m.a11 = m.a22 = alpha;
            break;
        }
        case CoeffPreset::Trig: {
            double alpha = 1.0 + f.p0 * std::cos(kTwoPi * y1) * std::cos(kTwoPi * y2);
            m.a11 = m.a22 = alpha;
            break;
        }
        case CoeffPreset::CheckerboardSmooth: {
            double m01 = std::tanh(std::sin(kTwoPi * y1) * std::sin(kTwoPi * y2) / f.p1) / std::tanh(1.0 / f.p1);
            double alpha = 1.0 + (f.p0 - 1.0) * 0.5 * (1.0 + m01);
            m.a11 = m.a22 = alpha;
            break;
        }
    }
    m.a11 *= f.scale;
    m.a12 *= f.scale;
    m.a22 *= f.scale;
    return m;
}

SymMat2 epsilon_sample(const CoefficientField& f, double eps, double x1, double x2) {
    if (eps <= 0.0) throw std::invalid_argument("epsilon_sample: eps must be > 0");
    return sample_at(f, x1 / eps, x2 / eps);
}

EllipticityEstimate ellipticity_estimate(const CoefficientField& f, const CellSampling& s) {
    double alpha = std::numeric_limits<double>::infinity();
    for (int p = 0; p < s.n; ++p) {
        for (int q = 0; q < s.n; ++q) {
            alpha = std::min(alpha, sample_at(f, s.node(p), s.node(q)).min_eigenvalue());
        }
    }
    return {alpha, alpha > 0.0};
}

}  // namespace stokhom
