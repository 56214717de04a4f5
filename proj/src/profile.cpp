#include "spamforge/profile.hpp"

#include <cmath>

namespace spamforge {

double profile_kappa(double delta) {
    if (!(delta > 1.0))
        throw std::invalid_argument("profile integral diverges unless delta > 1");
    // Integral splits at the kink x0 = kappa^(1/delta):
    //   x0 + kappa * x0^(1-delta)/(delta-1) = x0 * delta/(delta-1) = 1/2.
    const double x0 = (delta - 1.0) / (2.0 * delta);
    return std::pow(x0, delta);
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

// Integral of min{kappa L(x) x^-delta, 1} over (0, inf), split into a unit
// head and a tail mapped through x = 1/u.
double profile_integral(double kappa, double delta,
                        const std::function<double(double)>& L) {
    auto phi = [&](double x) {
        if (x <= 0.0) return 1.0;
        double v = kappa * L(x) * std::pow(x, -delta);
        return v < 1.0 ? v : 1.0;
    };
    double head = simpson(phi, 0.0, 1.0, 4096);
    // tail via x = e^v: integrand decays like e^((1-delta) v), so a fixed
    // cut at 45/(delta-1) is far below double precision
    auto tail = [&](double v) {
        double x = std::exp(v);
        return phi(x) * x;
    };
    return head + simpson(tail, 0.0, 45.0 / (delta - 1.0), 65536);
}

}  // namespace

double profile_kappa_quadrature(double delta,
                                const std::function<double(double)>& slowly_varying,
                                double tol) {
    if (!(delta > 1.0))
        throw std::invalid_argument("profile integral diverges unless delta > 1");
    double lo = 0.0, hi = 1.0;
    while (profile_integral(hi, delta, slowly_varying) < 0.5) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > tol * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (profile_integral(mid, delta, slowly_varying) < 0.5 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace spamforge
