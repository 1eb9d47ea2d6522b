#include "stokhom/tensor.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "stokhom/report.hpp"

namespace stokhom {

namespace {

// Spectral gradients of both components of one corrector:
// g[r][l] = d(chi^r)/dy_l.
struct CorrectorGradients {
    Array2D g[2][2];
};

CorrectorGradients gradients_of(const CorrectorField& chi) {
    CorrectorGradients cg;
    spectral_gradient(chi.u1, cg.g[0][0], cg.g[0][1]);
    spectral_gradient(chi.u2, cg.g[1][0], cg.g[1][1]);
    return cg;
}

double lattice_mean_product(const Array2D& a, const Array2D& b) {
    double s = 0.0;
    for (size_t p = 0; p < a.size(); ++p) s += a.a[p] * b.a[p];
    return s / double(a.size());
}

}  // namespace

EffectiveTensor EffectiveTensor::isotropic(double c) {
    EffectiveTensor t;
    for (int i = 1; i <= 2; ++i)
        for (int k = 1; k <= 2; ++k) t.at(i, i, k, k) = c;
    t.provenance = "isotropic";
    return t;
}

EffectiveTensor effective_tensor_direct(const CoefficientField& a, const CorrectorSet& chi) {
    int n = chi.n;
    if (n <= 0 || chi.at(1, 1).u1.nx != n) throw std::invalid_argument("effective_tensor_direct: lattice mismatch");
    CellWorkspace ws(a, n);
    const Array2D* amat[2][2] = {{&ws.a11(), &ws.a12()}, {&ws.a12(), &ws.a22()}};

    double amean[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) amean[i][j] = amat[i][j]->mean();

    EffectiveTensor t;
    t.provenance = "direct";
    for (int j = 1; j <= 2; ++j) {
        for (int h = 1; h <= 2; ++h) {
            CorrectorGradients cg = gradients_of(chi.at(j, h));
            for (int i = 1; i <= 2; ++i) {
                for (int k = 1; k <= 2; ++k) {
                    double corr = 0.0;
                    for (int l = 1; l <= 2; ++l)
                        corr += lattice_mean_product(*amat[i - 1][l - 1], cg.g[k - 1][l - 1]);
                    double kron = (k == h) ? amean[i - 1][j - 1] : 0.0;
                    t.at(i, j, k, h) = kron - corr;
                }
            }
        }
    }
    return t;
}

EffectiveTensor effective_tensor_energy(const CoefficientField& a, const CorrectorSet& chi) {
    int n = chi.n;
    if (n <= 0 || chi.at(1, 1).u1.nx != n) throw std::invalid_argument("effective_tensor_energy: lattice mismatch");
    CellWorkspace ws(a, n);
    const Array2D* amat[2][2] = {{&ws.a11(), &ws.a12()}, {&ws.a12(), &ws.a22()}};

    // grad(chi_ik - pi_ik)[r][l] = grad(chi_ik)[r][l] - delta_{l,i} delta_{r,k}
    CorrectorGradients G[2][2];
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
            G[i][k] = gradients_of(chi.at(i + 1, k + 1));
            for (size_t p = 0; p < G[i][k].g[k][i].size(); ++p) G[i][k].g[k][i].a[p] -= 1.0;
        }

    EffectiveTensor t;
    t.provenance = "energy";
    size_t npts = size_t(n) * n;
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j)
                for (int h = 0; h < 2; ++h) {
                    double s = 0.0;
                    for (int m = 0; m < 2; ++m)
                        for (int l = 0; l < 2; ++l) {
                            const Array2D& aml = *amat[m][l];
                            for (int r = 0; r < 2; ++r) {
                                const Array2D& gu = G[i][k].g[r][l];
                                const Array2D& gv = G[j][h].g[r][m];
                                for (size_t p = 0; p < npts; ++p) s += aml.a[p] * gu.a[p] * gv.a[p];
                            }
                        }
                    t.q[i][j][k][h] = s / double(npts);
                }
    return t;
}

double tensor_ellipticity(EffectiveTensor& q) {
    TensorSymmetryReport rep = tensor_symmetry_report(q);
    if (rep.max_major_violation > 1e-10) {
        std::ostringstream os;
        os << "tensor_ellipticity: major symmetry violated by " << rep.max_major_violation;
        throw std::invalid_argument(os.str());
    }
    // pair index (i,k) -> 2*(i-1) + (k-1)
    Eigen::Matrix4d M;
    for (int i = 1; i <= 2; ++i)
        for (int k = 1; k <= 2; ++k)
            for (int j = 1; j <= 2; ++j)
                for (int h = 1; h <= 2; ++h) {
                    int row = 2 * (i - 1) + (k - 1);
                    int col = 2 * (j - 1) + (h - 1);
                    M(row, col) = q.at(i, j, k, h);
                }
    Eigen::Matrix4d S = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(S);
    double alpha0 = es.eigenvalues().minCoeff();
    if (!(alpha0 > 0.0)) {
        std::ostringstream os;
        os << "tensor_ellipticity: non-positive alpha0 = " << alpha0 << " (solver or assembly bug)";
        throw std::runtime_error(os.str());
    }
    q.alpha0 = alpha0;
    return alpha0;
}

TensorSymmetryReport tensor_symmetry_report(const EffectiveTensor& q) {
    TensorSymmetryReport rep;
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
            for (int k = 1; k <= 2; ++k)
                for (int h = 1; h <= 2; ++h) {
                    // major symmetry swaps the pairs (i,k) <-> (j,h)
                    rep.max_major_violation =
                        std::max(rep.max_major_violation, std::fabs(q.at(i, j, k, h) - q.at(j, i, h, k)));
                    rep.max_minor_violation =
                        std::max(rep.max_minor_violation, std::fabs(q.at(i, j, k, h) - q.at(j, i, k, h)));
                }
    return rep;
}

double tensor_consistency_gap(const EffectiveTensor& qa, const EffectiveTensor& qb) {
    double gap = 0.0;
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
            for (int k = 1; k <= 2; ++k)
                for (int h = 1; h <= 2; ++h)
                    gap = std::max(gap, std::fabs(qa.at(i, j, k, h) - qb.at(i, j, k, h)));
    return gap;
}

void write_tensor_csv(std::ostream& os, const EffectiveTensor& q) {
    os << "i,j,k,h,q\n";
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
            for (int k = 1; k <= 2; ++k)
                for (int h = 1; h <= 2; ++h)
                    os << i << "," << j << "," << k << "," << h << "," << csv_double(q.at(i, j, k, h)) << "\n";
}

EffectiveTensor read_tensor_csv(std::istream& is) {
    EffectiveTensor q;
    q.provenance = "loaded";
    std::string line;
    if (!std::getline(is, line) || line != "i,j,k,h,q")
        throw std::runtime_error("tensor csv: missing or malformed header");
    bool seen[2][2][2][2] = {};
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        int i, j, k, h;
        char c;
        double v;
        if (!(ls >> i >> c >> j >> c >> k >> c >> h >> c >> v))
            throw std::runtime_error("tensor csv: malformed row '" + line + "'");
        if (i < 1 || i > 2 || j < 1 || j > 2 || k < 1 || k > 2 || h < 1 || h > 2)
            throw std::runtime_error("tensor csv: index out of range in '" + line + "'");
        q.at(i, j, k, h) = v;
        seen[i - 1][j - 1][k - 1][h - 1] = true;
    }
    for (auto& bi : seen)
        for (auto& bj : bi)
            for (auto& bk : bj)
                for (bool bh : bk)
                    if (!bh) throw std::runtime_error("tensor csv: incomplete block (16 entries required)");
    return q;
}

}  // namespace stokhom
