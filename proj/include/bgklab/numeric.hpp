#pragma once

// Numerical plumbing shared by the Fourier-side modules: compensated sums,
// p-th roots of unity with exact argument reduction, the length-p discrete
// Fourier transform (direct or FFT-backed), and log-domain aggregation.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include <fftw3.h>

#include "bgklab/fp_core.hpp"

namespace bgklab {

using Complex = std::complex<double>;

/// Kahan-Babuska (Neumaier) compensated sum.
class KahanSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    KahanSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class KahanComplex {
public:
    void add(Complex z) noexcept {
        re_.add(z.real());
        im_.add(z.imag());
    }
    KahanComplex& operator+=(Complex z) noexcept {
        add(z);
        return *this;
    }
    Complex value() const noexcept { return {re_.value(), im_.value()}; }

private:
    KahanSum re_;
    KahanSum im_;
};

/// e(j/p) = exp(2 pi i j / p) for a reduced index j in [0, p).
inline Complex unit_root(std::uint64_t j, std::uint64_t p) {
    if (j == 0) return {1.0, 0.0};
    const double angle = 2.0 * std::numbers::pi * (static_cast<double>(j) / static_cast<double>(p));
    return {std::cos(angle), std::sin(angle)};
}

/// Table of all p-th roots of unity; index with an exactly reduced a*x mod p.
class RootTable {
public:
    explicit RootTable(std::uint64_t p) : p_(p), roots_(p) {
        for (std::uint64_t j = 0; j < p; ++j) roots_[j] = unit_root(j, p);
    }
    std::uint64_t p() const noexcept { return p_; }
    Complex operator[](std::uint64_t j) const noexcept { return roots_[j]; }
    /// e(a*x/p)
    Complex at(std::uint64_t a, std::uint64_t x) const noexcept { return roots_[a * x % p_]; }

private:
    std::uint64_t p_;
    std::vector<Complex> roots_;
};

enum class TransformPath { automatic, direct, chirp };

inline constexpr std::uint64_t kDirectTransformTerms = 100'000'000ULL;

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n)
        : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
        if (data == nullptr) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* data;
};

/// out[k] = sum_j in[j] exp(sign * 2 pi i j k / n); sign = +1 or -1.
inline std::vector<Complex> fft(std::span<const Complex> in, int sign) {
    const std::size_t n = in.size();
    FftwBuffer a(n), b(n);
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n), a.data, b.data,
                                sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
    }
    for (std::size_t j = 0; j < n; ++j) {
        a.data[j][0] = in[j].real();
        a.data[j][1] = in[j].imag();
    }
    fftw_execute(plan);
    std::vector<Complex> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = {b.data[k][0], b.data[k][1]};
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

}  // namespace detail

/// Fourier transform of a real function on F_p:
///   out[a] = sum_x f(x) e(a x / p).
/// The direct route sums over supp(f) only, with compensated summation; the
/// chirp route runs a single length-p FFT.
inline std::vector<Complex> forward_transform(std::span<const double> f,
                                              TransformPath path = TransformPath::automatic) {
    const std::uint64_t p = f.size();
    std::vector<std::uint64_t> support;
    for (std::uint64_t x = 0; x < p; ++x) {
        if (f[x] != 0.0) support.push_back(x);
    }
    if (path == TransformPath::automatic) {
        path = support.size() * p <= kDirectTransformTerms ? TransformPath::direct
                                                           : TransformPath::chirp;
    }
    if (path == TransformPath::chirp) {
        std::vector<Complex> in(f.begin(), f.end());
        return detail::fft(in, +1);
    }
    const RootTable roots(p);
    std::vector<Complex> out(p);
    for (std::uint64_t a = 0; a < p; ++a) {
        KahanComplex acc;
        for (std::uint64_t x : support) acc += f[x] * roots.at(a, x);
        out[a] = acc.value();
    }
    return out;
}

/// Inverse transform, real part only:
///   out[y] = (1/p) Re sum_a phi(a) e(-a y / p).
/// Meant for phi that is the transform of a real density.
inline std::vector<double> inverse_transform_real(std::span<const Complex> phi,
                                                  TransformPath path = TransformPath::automatic) {
    const std::uint64_t p = phi.size();
    if (path == TransformPath::automatic) {
        path = p * p <= kDirectTransformTerms ? TransformPath::direct : TransformPath::chirp;
    }
    std::vector<double> out(p);
    const double scale = 1.0 / static_cast<double>(p);
    if (path == TransformPath::chirp) {
        auto raw = detail::fft(phi, -1);
        for (std::uint64_t y = 0; y < p; ++y) out[y] = raw[y].real() * scale;
        return out;
    }
    const RootTable roots(p);
    for (std::uint64_t y = 0; y < p; ++y) {
        KahanSum acc;
        const std::uint64_t minus_y = (p - y) % p;
        for (std::uint64_t a = 0; a < p; ++a) {
            if (phi[a] == Complex{}) continue;
            acc += (phi[a] * roots.at(a, minus_y)).real();
        }
        out[y] = acc.value() * scale;
    }
    return out;
}

/// log(sum_i exp(v_i)); -inf entries are skipped, an all -inf input gives -inf.
inline double log_sum_exp(std::span<const double> logs) {
    double peak = -std::numeric_limits<double>::infinity();
    for (double v : logs) peak = std::max(peak, v);
    if (!std::isfinite(peak)) return peak;
    KahanSum acc;
    for (double v : logs) {
        if (std::isfinite(v)) acc += std::exp(v - peak);
    }
    return peak + std::log(acc.value());
}

/// Log-domain power |z|^e; results below exp(-700) flush to zero.
inline double abs_pow(double modulus, double exponent) {
    if (exponent == 0.0) return 1.0;
    if (modulus <= 0.0) return 0.0;
    const double l = exponent * std::log(modulus);
    return l < -700.0 ? 0.0 : std::exp(l);
}

}  // namespace bgklab
