#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace stokhom {

/// Dense 2D array of doubles, row-major in the second index:
/// element (i, j) sits at a[i*ny + j]. By convention i is the x index
/// and j the y index everywhere in this codebase.
struct Array2D {
    int nx = 0;
    int ny = 0;
    std::vector<double> a;

    Array2D() = default;
    Array2D(int nx_, int ny_, double fill = 0.0) : nx(nx_), ny(ny_), a(size_t(nx_) * ny_, fill) {}

    double& operator()(int i, int j) {
        assert(i >= 0 && i < nx && j >= 0 && j < ny);
        return a[size_t(i) * ny + j];
    }
    double operator()(int i, int j) const {
        assert(i >= 0 && i < nx && j >= 0 && j < ny);
        return a[size_t(i) * ny + j];
    }

    size_t size() const { return a.size(); }
    void fill(double v) { std::fill(a.begin(), a.end(), v); }
    double* data() { return a.data(); }
    const double* data() const { return a.data(); }

    double max_abs() const {
        double m = 0.0;
        for (double v : a) m = std::max(m, std::fabs(v));
        return m;
    }
    double mean() const {
        if (a.empty()) return 0.0;
        double s = 0.0;
        for (double v : a) s += v;
        return s / double(a.size());
    }
    void subtract_mean() {
        double m = mean();
        for (double& v : a) v -= m;
    }
};

inline double dot(const Array2D& x, const Array2D& y) {
    assert(x.size() == y.size());
    double s = 0.0;
    for (size_t k = 0; k < x.a.size(); ++k) s += x.a[k] * y.a[k];
    return s;
}

inline void axpy(double alpha, const Array2D& x, Array2D& y) {
    assert(x.size() == y.size());
    for (size_t k = 0; k < x.a.size(); ++k) y.a[k] += alpha * x.a[k];
}

inline double norm2(const Array2D& x) { return std::sqrt(dot(x, x)); }

}  // namespace stokhom
