#pragma once

#include <fftw3.h>

#include <complex>
#include <vector>

#include "stokhom/array2d.hpp"

namespace stokhom {

/// 2D real <-> half-complex FFT on an n x n lattice (row-major, x slow, y fast).
/// Plans are created with FFTW_ESTIMATE so results are run-to-run deterministic.
/// Each instance owns its buffers; distinct instances may be used from
/// different threads concurrently (plan creation itself is serialized).
class Fft2D {
public:
    explicit Fft2D(int n);
    ~Fft2D();
    Fft2D(const Fft2D&) = delete;
    Fft2D& operator=(const Fft2D&) = delete;

    int n() const { return n_; }
    int nk() const { return n_ / 2 + 1; }  // stored y-frequencies of the r2c layout

    /// forward: real (i,j) -> spec_[i*nk + jk], unnormalized
    void forward(const Array2D& in, std::vector<std::complex<double>>& out) const;
    /// inverse of forward, normalized by 1/n^2
    void inverse(const std::vector<std::complex<double>>& in, Array2D& out) const;

    /// Signed integer wavenumber for index i in 0..n-1 under the zero-Nyquist
    /// derivative convention: k in [-n/2+1, n/2-1], Nyquist bin -> 0.
    int wavenumber(int idx) const {
        int k = (idx <= n_ / 2) ? idx : idx - n_;
        if (2 * idx == n_) k = 0;
        return k;
    }

private:
    int n_;
    double* real_buf_;
    fftw_complex* cplx_buf_;
    fftw_plan fwd_;
    fftw_plan inv_;
};

/// Batched 1D real-to-real transforms (DST/DCT family) used by the fast
/// diagonalization preconditioners. `howmany` transforms of length `len`,
/// laid out with the given stride/dist over a contiguous buffer.
class BatchR2R {
public:
    BatchR2R(int len, int howmany, int stride, int dist, fftw_r2r_kind kind);
    ~BatchR2R();
    BatchR2R(const BatchR2R&) = delete;
    BatchR2R& operator=(const BatchR2R&) = delete;

    /// In-place transform on caller data matching the plan layout.
    void execute(double* data) const;

private:
    fftw_plan plan_;
    double* buf_;
    size_t bufsize_;
};

}  // namespace stokhom
