#ifndef DETMAC_QUADRATURE_HPP
#define DETMAC_QUADRATURE_HPP

#include <functional>
#include <stdexcept>
#include <string>

namespace detmac {

struct QuadratureError : std::runtime_error {
    QuadratureError(const std::string& what, double estimate_, double error_)
        : std::runtime_error(what), estimate(estimate_), error(error_) {}
    double estimate;
    double error;
};

/// Adaptive Gauss-Kronrod (7,15) integration of f over [a, b] to the given
/// absolute tolerance. Panels are bisected until the embedded error estimate
/// drops below the local budget; exceeding the depth limit raises a
/// QuadratureError carrying the achieved estimate.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 48);

}  // namespace detmac

#endif
