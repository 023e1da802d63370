#include "mfg/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace mfg::spectral {

namespace {

std::mutex& plannerMutex() {
    static std::mutex m;
    return m;
}

/// One pair of r2c/c2r plans with private buffers; used per thread.
struct Plan {
    explicit Plan(std::size_t n) : n(n) {
        real = static_cast<double*>(fftw_malloc(sizeof(double) * n));
        cplx = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
        std::lock_guard lock(plannerMutex());
        const int ni = static_cast<int>(n);
        r2c = fftw_plan_dft_r2c_1d(ni, real, cplx, FFTW_ESTIMATE);
        c2r = fftw_plan_dft_c2r_1d(ni, cplx, real, FFTW_ESTIMATE);
    }
    ~Plan() {
        std::lock_guard lock(plannerMutex());
        fftw_destroy_plan(r2c);
        fftw_destroy_plan(c2r);
        fftw_free(real);
        fftw_free(cplx);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;

    std::size_t n;
    double* real;
    fftw_complex* cplx;
    fftw_plan r2c;
    fftw_plan c2r;
};

Plan& planFor(std::size_t n) {
    thread_local std::map<std::size_t, std::unique_ptr<Plan>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Plan>(n);
    return *slot;
}

}  // namespace

void derivative(std::span<const double> f, double length, int order, std::span<double> out) {
    const std::size_t n = f.size();
    if (order == 0) {
        std::copy(f.begin(), f.end(), out.begin());
        return;
    }
    Plan& p = planFor(n);
    std::copy(f.begin(), f.end(), p.real);
    fftw_execute(p.r2c);
    const double w = 2.0 * std::numbers::pi / length;
    const std::size_t half = n / 2;
    for (std::size_t k = 0; k <= half; ++k) {
        const std::complex<double> c(p.cplx[k][0], p.cplx[k][1]);
        std::complex<double> mult(1.0, 0.0);
        const std::complex<double> ik(0.0, w * static_cast<double>(k));
        for (int r = 0; r < order; ++r) mult *= ik;
        std::complex<double> d = c * mult;
        if (n % 2 == 0 && k == half && order % 2 == 1) d = 0.0;
        p.cplx[k][0] = d.real() / static_cast<double>(n);
        p.cplx[k][1] = d.imag() / static_cast<double>(n);
    }
    fftw_execute(p.c2r);
    std::copy(p.real, p.real + n, out.begin());
}

std::vector<double> derivative(std::span<const double> f, double length, int order) {
    std::vector<double> out(f.size());
    derivative(f, length, order, out);
    return out;
}

GridFunction derivative(const GridFunction& f, int order) {
    GridFunction out(f.grid);
    derivative(f.values, f.grid.length(), order, out.values);
    return out;
}

std::vector<std::complex<double>> forward(std::span<const double> f) {
    Plan& p = planFor(f.size());
    std::copy(f.begin(), f.end(), p.real);
    fftw_execute(p.r2c);
    std::vector<std::complex<double>> c(f.size() / 2 + 1);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = {p.cplx[k][0], p.cplx[k][1]};
    return c;
}

std::vector<double> inverse(std::span<const std::complex<double>> c, std::size_t n) {
    Plan& p = planFor(n);
    for (std::size_t k = 0; k < n / 2 + 1; ++k) {
        const std::complex<double> v = k < c.size() ? c[k] : std::complex<double>{};
        p.cplx[k][0] = v.real() / static_cast<double>(n);
        p.cplx[k][1] = v.imag() / static_cast<double>(n);
    }
    fftw_execute(p.c2r);
    return {p.real, p.real + n};
}

std::vector<double> refine(std::span<const double> f, int factor) {
    const std::size_t n = f.size();
    const std::size_t m = n * static_cast<std::size_t>(factor);
    auto c = forward(f);
    std::vector<std::complex<double>> padded(m / 2 + 1);
    for (std::size_t k = 0; k < c.size(); ++k) padded[k] = c[k] * static_cast<double>(factor);
    // Split the Nyquist coefficient so the refined interpolant stays real and symmetric.
    if (n % 2 == 0) padded[n / 2] *= 0.5;
    return inverse(padded, m);
}

}  // namespace mfg::spectral
