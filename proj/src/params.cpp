#include "spamforge/params.hpp"

#include <cmath>

namespace spamforge {

double torus_distance(const std::vector<double>& x, const std::vector<double>& y,
                      const TorusBox& box) {
    if (static_cast<int>(x.size()) != box.dimension ||
        static_cast<int>(y.size()) != box.dimension)
        throw std::invalid_argument("coordinate dimension mismatch");
    return box.distance(x.data(), y.data());
}

double ball_volume(int d) {
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

RegimeReport regime_report(const ModelParams& params, double alpha_choice,
                           double beta_choice) {
    params.validate();
    RegimeReport rep;
    const double gamma = params.gamma;
    const double delta = params.delta;
    rep.robust = params.robust();
    if (!rep.robust) {
        if (!std::isnan(alpha_choice) || !std::isnan(beta_choice))
            throw regime_error("layer parameters require the robust regime");
        return rep;
    }

    const double ratio = gamma / (delta * (1.0 - gamma));  // > 1 iff robust
    rep.rho = 1.0 / std::log(ratio);

    const double alpha_hi = ratio;
    double alpha = std::isnan(alpha_choice) ? 0.5 * (1.0 + alpha_hi) : alpha_choice;
    if (!(alpha > 1.0 && alpha < alpha_hi))
        throw std::invalid_argument("alpha outside (1, gamma/(delta(1-gamma)))");

    const double beta_hi = gamma / delta + alpha * gamma;
    double beta = std::isnan(beta_choice) ? 0.5 * (alpha + beta_hi) : beta_choice;
    if (!(beta > alpha && beta < beta_hi))
        throw std::invalid_argument("beta outside (alpha, gamma/delta + alpha*gamma)");

    rep.alpha = alpha;
    rep.beta = beta;
    rep.nu = std::min(-beta * delta + gamma + alpha * gamma * delta,
                      (beta - alpha) / params.dimension);

    rep.K = layer_count(std::log(params.volume), alpha, rep.nu);
    rep.K_empty = (rep.K == 0);
    return rep;
}

int layer_count(double ln_n, double alpha, double nu) {
    // Largest k >= 1 with alpha^-k * ln n >= (1/nu) * ln ln n; the layer
    // birth thresholds n^(-alpha^-k) stay below (ln n)^(-1/nu) exactly for
    // these k. Zero when even k = 1 fails.
    if (!(ln_n > 1.0) || !(nu > 0.0) || !(alpha > 1.0)) return 0;
    const double target = std::log(ln_n) / nu;
    int k = 0;
    double a_negk = 1.0;
    while (a_negk / alpha * ln_n >= target && k < 4096) {
        a_negk /= alpha;
        ++k;
    }
    return k;
}

}  // namespace spamforge
