#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "prime_lab/analysis.hpp"
#include "prime_lab/errors.hpp"

namespace prime_lab {

double budget_integral_approx(double cutoff, double exponent) {
    if (!(exponent > 0.0) || !std::isfinite(exponent))
        throw DomainError(fmt::format("weight exponent must be > 0, got {}", exponent));
    if (!(cutoff > 2.0) || !std::isfinite(cutoff))
        throw DomainError(fmt::format("integral needs P > 2, got {}", cutoff));

    // u = e^s turns u^{-2x}/ln u du into e^{(1-2x)s}/s ds on [ln 2, ln P],
    // which is smooth and free of the 1/ln u growth near u = 2.
    const double rate = 1.0 - 2.0 * exponent;
    auto integrand = [rate](double s) { return std::exp(rate * s) / s; };
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        integrand, std::log(2.0), std::log(cutoff), 20, 1e-13, &error);
}

}  // namespace prime_lab
