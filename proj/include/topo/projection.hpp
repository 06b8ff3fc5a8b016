#ifndef TOPO_PROJECTION_HPP
#define TOPO_PROJECTION_HPP

#include "topo/types.hpp"

#include <cmath>
#include <utility>

namespace topo {

/// Relaxed Heaviside step rho = 1 - exp(-beta mu) + mu exp(-beta).
/// beta = 0 is the identity; mu = 1 maps to 1 for any beta. The expm1 form
/// keeps tiny positive inputs positive, so the projection preserves exact
/// support (needed by the propagation-reach assertions).
template <typename S>
S heaviside(S mu, S beta) {
    return -std::expm1(-beta * mu) + mu * std::exp(-beta);
}

template <typename S>
S heaviside_derivative(S mu, S beta) {
    return beta * std::exp(-beta * mu) + std::exp(-beta);
}

namespace detail {

template <typename S>
S log_cosh(S x) {
    const S a = std::abs(x);
    return a + std::log1p(std::exp(S(-2) * a)) - std::log(S(2));
}

template <typename S>
S log_sinh(S x) {  // x > 0
    if (x < S(1e-8)) return std::log(x);
    return x + std::log1p(-std::exp(S(-2) * x)) - std::log(S(2));
}

template <typename S>
S sech_squared(S x) {
    const S e = std::exp(-std::abs(x));
    const S s = S(2) * e / (S(1) + e * e);
    return s * s;
}

}  // namespace detail

template <typename S>
S smoothed_threshold_derivative(S mu, S beta, S theta);

/// Smoothed-step projection about a threshold theta in (0,1):
/// rho = (tanh(beta theta) + tanh(beta (mu - theta))) /
///       (tanh(beta theta) + tanh(beta (1 - theta))).
/// Below the threshold the numerator is evaluated through
/// tanh(a) - tanh(b) = sinh(a-b)/(cosh(a) cosh(b)) in log space; the naive
/// form cancels to exactly zero once both tanh arguments saturate.
template <typename S>
S smoothed_threshold(S mu, S beta, S theta) {
    if (beta == S(0)) return mu;  // limit of 0/0 form
    const S den = std::tanh(beta * theta) + std::tanh(beta * (S(1) - theta));
    const S t = beta * (mu - theta);
    if (t >= S(0)) return (std::tanh(beta * theta) + std::tanh(t)) / den;
    if (mu <= S(0)) return mu * smoothed_threshold_derivative(S(0), beta, theta);
    // tanh(beta theta) - tanh(beta (theta - mu)), arguments both positive
    const S lognum =
        detail::log_sinh(beta * mu) - detail::log_cosh(beta * theta) - detail::log_cosh(t);
    return std::exp(lognum) / den;
}

template <typename S>
S smoothed_threshold_derivative(S mu, S beta, S theta) {
    if (beta == S(0)) return S(1);
    const S den = std::tanh(beta * theta) + std::tanh(beta * (S(1) - theta));
    return beta * detail::sech_squared(beta * (mu - theta)) / den;
}

struct Projection {
    Vector rho;
    Vector drho_dmu;
};

/// Vector Heaviside projection with derivative. Throws for beta < 0.
inline Projection heaviside_project(const Vector& mu, Real beta) {
    if (beta < 0.0) throw InvalidSpecError("heaviside_project: beta must be nonnegative");
    Projection p;
    p.rho = mu.unaryExpr([beta](Real m) { return heaviside(m, beta); });
    p.drho_dmu = mu.unaryExpr([beta](Real m) { return heaviside_derivative(m, beta); });
    return p;
}

/// Vector threshold projection. Throws for beta < 0 or theta outside (0,1).
inline Projection threshold_project(const Vector& mu, Real beta, Real theta) {
    if (beta < 0.0) throw InvalidSpecError("threshold_project: beta must be nonnegative");
    if (theta <= 0.0 || theta >= 1.0) throw InvalidSpecError("threshold_project: threshold outside (0,1)");
    Projection p;
    p.rho = mu.unaryExpr([=](Real m) { return smoothed_threshold(m, beta, theta); });
    p.drho_dmu = mu.unaryExpr([=](Real m) { return smoothed_threshold_derivative(m, beta, theta); });
    return p;
}

}  // namespace topo

#endif
