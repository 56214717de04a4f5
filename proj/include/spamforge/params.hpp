#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace spamforge {

// Thrown when a closed-form quantity is requested outside the parameter
// regime where it is defined (e.g. the distance prefactor for a
// non-robust parameter set).
class regime_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when an operation is invoked on inputs violating its contract
// (e.g. an unsorted point cloud handed to a builder).
class contract_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Scalar model parameters. gamma is the attachment slope, gamma_prime the
// offset, delta the profile decay exponent, volume the torus volume n.
struct ModelParams {
    double gamma = 0.8;
    double gamma_prime = 1.0;
    double delta = 1.2;
    int dimension = 1;
    double volume = 1e4;
    double intensity = 1.0;
    std::uint64_t seed = 1;

    void validate() const {
        if (!(gamma > 0.0 && gamma < 1.0))
            throw std::invalid_argument("gamma must lie in (0,1)");
        if (!(gamma_prime > 0.0))
            throw std::invalid_argument("gamma_prime must be positive");
        if (!(delta > 1.0))
            throw std::invalid_argument("delta must exceed 1");
        if (dimension < 1)
            throw std::invalid_argument("dimension must be >= 1");
        if (!(volume > 0.0))
            throw std::invalid_argument("volume must be positive");
        if (!(intensity > 0.0))
            throw std::invalid_argument("intensity must be positive");
    }

    double side() const { return std::pow(volume, 1.0 / dimension); }
    bool robust() const { return gamma > delta / (1.0 + delta); }
};

// Flat torus of side length volume^(1/d); coordinates live in
// [-side/2, side/2).
struct TorusBox {
    int dimension = 1;
    double side = 1.0;

    TorusBox() = default;
    TorusBox(int d, double s) : dimension(d), side(s) {
        if (d < 1) throw std::invalid_argument("dimension must be >= 1");
        if (!(s > 0.0)) throw std::invalid_argument("side must be positive");
    }
    static TorusBox of(const ModelParams& p) { return TorusBox(p.dimension, p.side()); }

    // Wrapped distance along one axis.
    double wrap(double dx) const {
        double a = std::abs(dx);
        // positions are within one fundamental domain, so |dx| < side
        return std::min(a, side - a);
    }

    double distance2(const double* x, const double* y) const {
        double s = 0.0;
        for (int i = 0; i < dimension; ++i) {
            double w = wrap(x[i] - y[i]);
            s += w * w;
        }
        return s;
    }

    double distance(const double* x, const double* y) const {
        return std::sqrt(distance2(x, y));
    }

    // |x-y|^d from the squared distance; the canonical form used inside
    // the connection rule by every builder.
    double dist_pow_d(double dist2) const {
        switch (dimension) {
            case 1: return std::sqrt(dist2);
            case 2: return dist2;
            case 3: return dist2 * std::sqrt(dist2);
            case 4: return dist2 * dist2;
            default: return std::pow(dist2, 0.5 * dimension);
        }
    }
};

double torus_distance(const std::vector<double>& x, const std::vector<double>& y,
                      const TorusBox& box);

// Volume of the d-dimensional unit ball, pi^(d/2) / Gamma(d/2 + 1).
double ball_volume(int d);

// Closed-form regime arithmetic: robustness flag, distance prefactor rho,
// layer parameters alpha/beta, the error exponent nu and the layer count K.
struct RegimeReport {
    bool robust = false;
    double rho = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double nu = 0.0;
    int K = 0;
    bool K_empty = false;  // set when no admissible layer index exists
};

// alpha_choice/beta_choice NaN means "use the interval midpoint".
RegimeReport regime_report(const ModelParams& params,
                           double alpha_choice = std::nan(""),
                           double beta_choice = std::nan(""));

// Largest k >= 1 with alpha^-k * ln_n >= ln(ln_n)/nu; 0 when none exists.
int layer_count(double ln_n, double alpha, double nu);

}  // namespace spamforge
