#include "stokhom/fftplan.hpp"

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace stokhom {

namespace {
// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

Fft2D::Fft2D(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("Fft2D: n must be >= 2");
    std::lock_guard<std::mutex> lock(plan_mutex());
    real_buf_ = fftw_alloc_real(size_t(n) * n);
    cplx_buf_ = fftw_alloc_complex(size_t(n) * (n / 2 + 1));
    fwd_ = fftw_plan_dft_r2c_2d(n, n, real_buf_, cplx_buf_, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_2d(n, n, cplx_buf_, real_buf_, FFTW_ESTIMATE);
    if (!fwd_ || !inv_) throw std::runtime_error("Fft2D: plan creation failed");
}

Fft2D::~Fft2D() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(real_buf_);
    fftw_free(cplx_buf_);
}

void Fft2D::forward(const Array2D& in, std::vector<std::complex<double>>& out) const {
    size_t nr = size_t(n_) * n_;
    size_t nc = size_t(n_) * nk();
    out.resize(nc);
    std::memcpy(real_buf_, in.data(), nr * sizeof(double));
    fftw_execute(fwd_);
    std::memcpy(out.data(), cplx_buf_, nc * sizeof(fftw_complex));
}

void Fft2D::inverse(const std::vector<std::complex<double>>& in, Array2D& out) const {
    size_t nr = size_t(n_) * n_;
    size_t nc = size_t(n_) * nk();
    out.nx = out.ny = n_;
    out.a.resize(nr);
    std::memcpy(cplx_buf_, in.data(), nc * sizeof(fftw_complex));
    fftw_execute(inv_);
    double scale = 1.0 / double(nr);
    for (size_t i = 0; i < nr; ++i) out.a[i] = real_buf_[i] * scale;
}

BatchR2R::BatchR2R(int len, int howmany, int stride, int dist, fftw_r2r_kind kind) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    bufsize_ = size_t(dist) * howmany + size_t(stride) * len;  // generous upper bound
    buf_ = fftw_alloc_real(bufsize_);
    int n[1] = {len};
    plan_ = fftw_plan_many_r2r(1, n, howmany, buf_, nullptr, stride, dist, buf_, nullptr, stride, dist,
                               &kind, FFTW_ESTIMATE);
    if (!plan_) throw std::runtime_error("BatchR2R: plan creation failed");
}

BatchR2R::~BatchR2R() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(buf_);
}

void BatchR2R::execute(double* data) const { fftw_execute_r2r(plan_, data, data); }

}  // namespace stokhom
