#pragma once

/**
 * @file distributions.hpp
 * @brief Probability densities on F_p, characteristic functions, steppings
 *        and peakings.
 *
 * A DistFp is the density of a finitely supported F_p-valued random
 * variable. All expectations below are exact finite sums over densities;
 * nothing is sampled.
 *
 * Conventions (additive characters, identified with F_p):
 *   phi_X(a)   = sum_x rho_X(x) e(a x / p)
 *   stepping   Y = X1 - X2          (additive context)
 *              Y = X1 * X2^{-1}     (multiplicative context)
 *   peaking    P(Yhat = a) = |phi_X(a)|^2 / M_X,  M_X = sum_a |phi_X(a)|^2
 */

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bgklab/budget.hpp"
#include "bgklab/fp_core.hpp"
#include "bgklab/numeric.hpp"
#include "bgklab/report.hpp"

namespace bgklab {

inline constexpr double kDensitySumTolerance = 1e-12;
inline constexpr double kIdentityTolerance = 1e-9;
inline constexpr std::uint64_t kEagerCharFnMax = 100'000;

// ---------------------------------------------------------------------------
// DistFp
// ---------------------------------------------------------------------------

class DistFp {
public:
    DistFp(PrimeField field, std::vector<double> density)
        : field_(std::move(field)), density_(std::move(density)) {
        if (density_.size() != field_.size()) {
            throw std::invalid_argument("DistFp: density length must equal p");
        }
        KahanSum total;
        for (std::size_t x = 0; x < density_.size(); ++x) {
            const double v = density_[x];
            if (!std::isfinite(v) || v < 0.0) {
                throw std::invalid_argument("DistFp: density entries must be finite and >= 0");
            }
            if (v > 0.0) support_.push_back(static_cast<Residue>(x));
            total += v;
        }
        if (std::abs(total.value() - 1.0) > kDensitySumTolerance) {
            throw std::invalid_argument("DistFp: density sums to " + format_real(total.value()) +
                                        ", not 1");
        }
    }

    const PrimeField& field() const noexcept { return field_; }
    std::uint64_t p() const noexcept { return field_.p(); }
    double operator()(Residue x) const { return density_.at(x); }
    std::span<const double> density() const noexcept { return density_; }
    const std::vector<Residue>& support() const noexcept { return support_; }

    /// sum_x rho(x)^2, the identity mass of any stepping.
    double collision_mass() const {
        KahanSum acc;
        for (Residue x : support_) acc += density_[x] * density_[x];
        return acc.value();
    }

private:
    PrimeField field_;
    std::vector<double> density_;
    std::vector<Residue> support_;
};

inline DistFp uniform_on(const PrimeField& field, std::span<const Residue> support) {
    std::vector<Residue> s(support.begin(), support.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (s.empty()) throw std::invalid_argument("uniform_on: empty support");
    if (s.back() >= field.p()) throw std::invalid_argument("uniform_on: residue out of range");
    std::vector<double> rho(field.size(), 0.0);
    const double w = 1.0 / static_cast<double>(s.size());
    for (Residue x : s) rho[x] = w;
    return DistFp(field, std::move(rho));
}

inline DistFp uniform_on_field(const PrimeField& field) {
    return DistFp(field, std::vector<double>(field.size(), 1.0 / static_cast<double>(field.p())));
}

inline DistFp dirac(const PrimeField& field, Residue x) {
    if (x >= field.p()) throw std::invalid_argument("dirac: residue out of range");
    std::vector<double> rho(field.size(), 0.0);
    rho[x] = 1.0;
    return DistFp(field, std::move(rho));
}

/// Normalizes nonnegative weights into a density.
inline DistFp from_weights(const PrimeField& field, std::vector<double> weights) {
    if (weights.size() != field.size()) throw std::invalid_argument("from_weights: length != p");
    KahanSum total;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) throw std::invalid_argument("from_weights: bad weight");
        total += w;
    }
    if (total.value() <= 0.0) throw std::invalid_argument("from_weights: all weights zero");
    for (double& w : weights) w /= total.value();
    return DistFp(field, std::move(weights));
}

/// Clamps round-off negatives of a computed density and rebuilds it.
inline DistFp density_from_values(const PrimeField& field, std::vector<double> values) {
    for (double& v : values) {
        if (v < 0.0) {
            if (v < -1e-9) throw std::logic_error("density_from_values: negative mass");
            v = 0.0;
        }
    }
    return DistFp(field, std::move(values));
}

/// Density of -X.
inline DistFp negate(const DistFp& X) {
    const auto& f = X.field();
    std::vector<double> rho(f.size(), 0.0);
    for (Residue x : X.support()) rho[f.neg(x)] = X(x);
    return DistFp(f, std::move(rho));
}

/// Density of X1 + X2 for independent X1 ~ a, X2 ~ b.
inline DistFp convolve(const DistFp& a, const DistFp& b) {
    if (!(a.field() == b.field())) throw std::invalid_argument("convolve: field mismatch");
    const auto& f = a.field();
    charge("convolve", std::uint64_t{a.support().size()} * b.support().size(), kPairLoopTerms);
    std::vector<KahanSum> bins(f.size());
    for (Residue x : a.support()) {
        for (Residue y : b.support()) bins[f.add(x, y)] += a(x) * b(y);
    }
    std::vector<double> rho(f.size());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = bins[i].value();
    return DistFp(f, std::move(rho));
}

// ---------------------------------------------------------------------------
// CharFn
// ---------------------------------------------------------------------------

/// Characteristic function a -> E(e(aX/p)). Holds all p values when
/// p <= 10^5; above that it evaluates on demand from the source density.
class CharFn {
public:
    CharFn(PrimeField field, std::vector<Complex> values)
        : field_(std::move(field)), values_(std::move(values)) {
        if (values_.size() != field_.size()) throw std::invalid_argument("CharFn: length != p");
    }

    static CharFn on_demand(std::shared_ptr<const DistFp> source) {
        CharFn out(source->field());
        out.source_ = std::move(source);
        return out;
    }

    const PrimeField& field() const noexcept { return field_; }
    std::uint64_t p() const noexcept { return field_.p(); }
    bool eager() const noexcept { return source_ == nullptr; }

    Complex operator()(Residue a) const {
        if (eager()) return values_.at(a);
        KahanComplex acc;
        const auto p = field_.p();
        for (Residue x : source_->support()) acc += (*source_)(x) * unit_root(std::uint64_t{a} * x % p, p);
        return acc.value();
    }

    /// All p values (copied, or computed through the transform).
    std::vector<Complex> values() const {
        if (eager()) return values_;
        return forward_transform(source_->density());
    }

private:
    explicit CharFn(PrimeField field) : field_(std::move(field)) {}

    PrimeField field_;
    std::vector<Complex> values_;
    std::shared_ptr<const DistFp> source_;
};

inline CharFn char_fn(const DistFp& X, TransformPath path = TransformPath::automatic) {
    if (X.p() > kEagerCharFnMax && path == TransformPath::automatic) {
        return CharFn::on_demand(std::make_shared<const DistFp>(X));
    }
    return CharFn(X.field(), forward_transform(X.density(), path));
}

/// Inverse transform at a single point: rho(y) = (1/p) sum_a phi(a) e(-ay/p).
inline double density_at(const CharFn& phi, Residue y) {
    const auto p = phi.p();
    const std::uint64_t minus_y = (p - y % p) % p;
    KahanSum acc;
    for (std::uint64_t a = 0; a < p; ++a) {
        acc += (phi(static_cast<Residue>(a)) * unit_root(a * minus_y % p, p)).real();
    }
    return acc.value() / static_cast<double>(p);
}

/// Inverse transform at every point.
inline std::vector<double> density_values(const CharFn& phi,
                                          TransformPath path = TransformPath::automatic) {
    const auto values = phi.values();
    return inverse_transform_real(values, path);
}

// ---------------------------------------------------------------------------
// Stepping
// ---------------------------------------------------------------------------

/// Density of X1 X2^{-1} (X1 - X2 additively) for independent copies of X.
inline DistFp stepping(const DistFp& X, const GroupCtx& ctx) {
    if (!(X.field() == ctx.field())) throw std::invalid_argument("stepping: field mismatch");
    const auto& f = X.field();
    if (!ctx.additive() && X(0) > 0.0) {
        throw std::invalid_argument("stepping: multiplicative context needs rho_X(0) = 0");
    }
    const auto& supp = X.support();
    const std::uint64_t pairs = std::uint64_t{supp.size()} * supp.size();
    if (ctx.additive() && !within_budget(pairs, kPairLoopTerms)) {
        // rho_Y is the inverse transform of |phi_X|^2.
        auto phi = forward_transform(X.density(), TransformPath::chirp);
        for (auto& z : phi) z = std::norm(z);
        return density_from_values(f, inverse_transform_real(phi, TransformPath::chirp));
    }
    charge("stepping", pairs, kPairLoopTerms);
    std::vector<KahanSum> bins(f.size());
    std::vector<Residue> inverses(supp.size());
    for (std::size_t j = 0; j < supp.size(); ++j) inverses[j] = ctx.inv(supp[j]);
    for (Residue x1 : supp) {
        for (std::size_t j = 0; j < supp.size(); ++j) {
            const Residue y = ctx.additive() ? f.add(x1, inverses[j]) : f.mul(x1, inverses[j]);
            bins[y] += X(x1) * X(supp[j]);
        }
    }
    std::vector<double> rho(f.size());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = bins[i].value();
    return DistFp(f, std::move(rho));
}

// ---------------------------------------------------------------------------
// Peaking
// ---------------------------------------------------------------------------

/// Yhat with P(Yhat = a) = |phi(a)|^2 / M.
class PeakDist {
public:
    explicit PeakDist(std::shared_ptr<const CharFn> base) : base_(std::move(base)) {
        const auto values = base_->values();
        weights_.resize(values.size());
        KahanSum mass;
        for (std::size_t a = 0; a < values.size(); ++a) {
            weights_[a] = std::norm(values[a]);
            mass += weights_[a];
        }
        mass_ = mass.value();
        for (double& w : weights_) w /= mass_;
    }

    const CharFn& base() const noexcept { return *base_; }
    double mass() const noexcept { return mass_; }
    std::span<const double> weights() const noexcept { return weights_; }
    double operator()(Residue a) const { return weights_.at(a); }

    DistFp as_distribution() const { return DistFp(base_->field(), weights_); }

private:
    std::shared_ptr<const CharFn> base_;
    std::vector<double> weights_;
    double mass_ = 0.0;
};

inline PeakDist peaking(const CharFn& phi) { return PeakDist(std::make_shared<const CharFn>(phi)); }
inline PeakDist peaking(const DistFp& X) { return peaking(char_fn(X)); }

// ---------------------------------------------------------------------------
// Fourier duality check
// ---------------------------------------------------------------------------

/// rho_Y(y) = (M_X / p) phi_Yhat(y) for every y, and rho_Y(0) = M_X / p,
/// with Y the additive stepping of X.
inline Report verify_fourier_duality(const DistFp& X) {
    Report rep("fourier_duality");
    const double p = static_cast<double>(X.p());
    const DistFp Y = stepping(X, GroupCtx(X.field(), GroupMode::additive));
    const PeakDist peak = peaking(X);
    const auto phi_peak = forward_transform(peak.weights());
    double worst = 0.0;
    for (std::uint64_t y = 0; y < X.p(); ++y) {
        const Complex rhs = peak.mass() / p * phi_peak[y];
        worst = std::max(worst, std::abs(Y(static_cast<Residue>(y)) - rhs));
    }
    rep.set_quantity("p", X.p());
    rep.set_quantity("M_X", peak.mass());
    rep.set_quantity("rho_Y(0)", Y(0));
    rep.set_quantity("sum_rho_X_sq", X.collision_mass());
    rep.check_diff("lm-bgk-link.max_abs", worst, kIdentityTolerance);
    rep.check_close("eq-rho1", Y(0), peak.mass() / p, kIdentityTolerance);
    rep.check_close("eq-rho0", Y(0), X.collision_mass(), kIdentityTolerance);
    return rep;
}

// ---------------------------------------------------------------------------
// Bounded nonnegative variables: tail lower bound
// ---------------------------------------------------------------------------

/// E(V(X)) for a real function V on F_p.
inline double expectation(std::span<const double> values, const DistFp& X) {
    if (values.size() != X.field().size()) throw std::invalid_argument("expectation: length != p");
    KahanSum acc;
    for (Residue x : X.support()) acc += X(x) * values[x];
    return acc.value();
}

/// P(V(X) >= threshold).
inline double tail_probability(std::span<const double> values, const DistFp& X, double threshold) {
    KahanSum acc;
    for (Residue x : X.support()) {
        if (values[x] >= threshold) acc += X(x);
    }
    return acc.value();
}

/// For V >= 0 bounded by M = max V on supp(X), with delta defined by
/// E(V) = (1 - delta) M: checks P(V >= (1-gamma) M) >= 1 - delta/gamma for
/// every gamma in (0, 1], plus the P(V >= M/2alpha) >= 1/2alpha form.
inline Report check_tail_bound(std::span<const double> values, const DistFp& X,
                               std::span<const double> gammas) {
    Report rep("tail_bound");
    double top = 0.0;
    for (Residue x : X.support()) {
        if (values[x] < 0.0) throw std::invalid_argument("check_tail_bound: negative value");
        top = std::max(top, values[x]);
    }
    const double mean = expectation(values, X);
    rep.set_quantity("M", top);
    rep.set_quantity("E", mean);
    if (top == 0.0) {
        rep.warn("variable vanishes on the support; nothing to check");
        return rep;
    }
    const double delta = 1.0 - mean / top;
    for (double gamma : gammas) {
        if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("check_tail_bound: gamma");
        const double tail = tail_probability(values, X, (1.0 - gamma) * top);
        rep.check_ge("lm-proba-lower-bound.gamma=" + format_real(gamma), tail, 1.0 - delta / gamma,
                     1e-12);
    }
    const double alpha = top / mean;
    rep.check_ge("eq-proba-lb", tail_probability(values, X, top / (2.0 * alpha)), 1.0 / (2.0 * alpha),
                 1e-12);
    return rep;
}

}  // namespace bgklab
