#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

#include "spamforge/params.hpp"

namespace spamforge {

// Closed-form normalizer for the power profile min{kappa x^-delta, 1}:
// kappa = ((delta-1)/(2 delta))^delta makes the profile integrate to 1/2.
double profile_kappa(double delta);

// Normalizer for a general profile min{kappa L(x) x^-delta, 1}, found by
// bisection on kappa with adaptive Simpson quadrature of the integral.
double profile_kappa_quadrature(double delta,
                                const std::function<double(double)>& slowly_varying,
                                double tol = 1e-12);

// Connection profile. The power kind is the model default; the
// slowly-varying kind covers profiles L(x) x^-delta with L slowly varying.
class ProfileFunction {
public:
    static ProfileFunction power(double delta) {
        ProfileFunction p;
        p.delta_ = delta;
        p.kappa_ = profile_kappa(delta);
        return p;
    }

    static ProfileFunction slowly_varying(double delta, std::function<double(double)> L) {
        ProfileFunction p;
        p.delta_ = delta;
        p.L_ = std::move(L);
        p.kappa_ = profile_kappa_quadrature(delta, p.L_);
        return p;
    }

    double delta() const { return delta_; }
    double kappa() const { return kappa_; }
    bool is_power() const { return !L_; }

    double eval(double x) const {
        if (x < 0.0) throw std::invalid_argument("profile argument must be >= 0");
        if (x == 0.0) return 1.0;
        double v = L_ ? kappa_ * L_(x) * std::pow(x, -delta_)
                      : kappa_ * std::pow(x, -delta_);
        return v < 1.0 ? v : 1.0;
    }

private:
    double delta_ = 2.0;
    double kappa_ = 0.0625;
    std::function<double(double)> L_;
};

// Attachment rule f; affine gamma*z + gamma' by default, or a general
// nondecreasing function with asymptotic slope gamma.
class AttachmentRule {
public:
    static AttachmentRule affine(double gamma, double gamma_prime) {
        if (!(gamma > 0.0 && gamma < 1.0))
            throw std::invalid_argument("gamma must lie in (0,1)");
        if (!(gamma_prime > 0.0))
            throw std::invalid_argument("gamma_prime must be positive");
        AttachmentRule r;
        r.gamma_ = gamma;
        r.gamma_prime_ = gamma_prime;
        return r;
    }

    static AttachmentRule general(double gamma, std::function<double(std::uint64_t)> f) {
        AttachmentRule r;
        r.gamma_ = gamma;
        r.general_ = std::move(f);
        return r;
    }

    double gamma() const { return gamma_; }
    double gamma_prime() const { return gamma_prime_; }
    bool is_affine() const { return !general_; }

    double eval(std::int64_t z) const {
        if (z < 0) throw std::invalid_argument("in-degree must be >= 0");
        double v = general_ ? general_(static_cast<std::uint64_t>(z))
                            : gamma_ * static_cast<double>(z) + gamma_prime_;
        if (!(v > 0.0)) throw std::invalid_argument("attachment rule must be positive");
        return v;
    }

private:
    double gamma_ = 0.8;
    double gamma_prime_ = 1.0;
    std::function<double(std::uint64_t)> general_;
};

// Probability that a vertex arriving at time t connects to an older vertex
// of in-degree z at torus distance dist: phi(t |x-y|^d / f(z)).
inline double connection_probability(std::int64_t older_indegree, double distance,
                                     double t, const ModelParams& params,
                                     const ProfileFunction& phi, const AttachmentRule& f) {
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("birth time must lie in (0,1]");
    if (distance < 0.0) throw std::invalid_argument("distance must be >= 0");
    double dd = std::pow(distance, params.dimension);
    return phi.eval(t * dd / f.eval(older_indegree));
}

// Canonical accept/reject rule shared by every builder. Both the exact and
// the accelerated construction call this exact function, so their edge sets
// agree bit for bit. The cheap pre-reject is sound: for u >= 2 we have
// phi(u) <= kappa/u with at least 15% margin for any delta > 1.2, far above
// floating-point noise.
inline bool edge_accept(double mark, double t, double dist_pow_d, double fz,
                        const ProfileFunction& phi) {
    const double u = t * dist_pow_d / fz;
    if (phi.is_power() && u >= 2.0 && mark * u > phi.kappa()) return false;
    return mark <= phi.eval(u);
}

}  // namespace spamforge
