#pragma once

#include <iosfwd>
#include <string>

#include "stokhom/cell.hpp"
#include "stokhom/coeff.hpp"

namespace stokhom {

/// Rank-4 homogenized tensor q_ijkh for N = 2, with ellipticity and
/// cross-formula consistency metadata.
struct EffectiveTensor {
    double q[2][2][2][2] = {};
    double alpha0 = 0.0;          // smallest eigenvalue of the (i,k)x(j,h) matrix
    std::string provenance;       // "direct" | "energy"
    double consistency_gap = 0.0; // max entrywise |direct - energy| when both computed

    double& at(int i, int j, int k, int h) { return q[i - 1][j - 1][k - 1][h - 1]; }
    double at(int i, int j, int k, int h) const { return q[i - 1][j - 1][k - 1][h - 1]; }

    /// q_ijkh = c delta_ij delta_kh
    static EffectiveTensor isotropic(double c);
    static EffectiveTensor identity() { return isotropic(1.0); }
};

/// q_ijkh = delta_kh <a_ij> - sum_l <a_il d(chi_jh^k)/dy_l>, lattice quadrature.
EffectiveTensor effective_tensor_direct(const CoefficientField& a, const CorrectorSet& chi);

/// Energy form q_ijkh = a_hat(chi_ik - pi_ik, chi_jh - pi_jh); only the
/// constant gradient of pi enters, so pi is never materialized as a field.
EffectiveTensor effective_tensor_energy(const CoefficientField& a, const CorrectorSet& chi);

/// Smallest eigenvalue of M[(i,k),(j,h)] = q_ijkh over all real 2x2 matrices.
/// Requires major symmetry within 1e-10 and throws if the result is <= 0.
double tensor_ellipticity(EffectiveTensor& q);

struct TensorSymmetryReport {
    double max_major_violation = 0.0;  // max |q_ijkh - q_jhik|
    double max_minor_violation = 0.0;  // max |q_ijkh - q_jikh| (reported, not asserted)
};
TensorSymmetryReport tensor_symmetry_report(const EffectiveTensor& q);

double tensor_consistency_gap(const EffectiveTensor& qa, const EffectiveTensor& qb);

/// 16-entry CSV block with header "i,j,k,h,q".
void write_tensor_csv(std::ostream& os, const EffectiveTensor& q);
EffectiveTensor read_tensor_csv(std::istream& is);

}  // namespace stokhom
