#include "bidcast/utility.hpp"

namespace bidcast {

double quasilinear_utility(const QuasiLinearParams& params, const HourlyCurveSet& curves,
                           double bid) noexcept {
    return (params.value - curves.cost.value(bid)) * curves.click.value(bid);
}

double quasilinear_grad(const QuasiLinearParams& params, const HourlyCurveSet& curves,
                        double bid) noexcept {
    const double x = curves.click.value(bid);
    const double dx = curves.click.grad(bid);
    const double slope = curves.cost.slope;
    return params.value * dx - slope * x - slope * bid * dx;
}

double visibility_level(const HourlyCurveSet& curves, double bid) noexcept {
    return bid / (curves.click.half_sat + bid);
}

double visibility_utility(const VisibilityParams& params, const HourlyCurveSet& curves,
                          double bid) noexcept {
    const QuasiLinearParams ql{params.value};
    const double base = quasilinear_utility(ql, curves, bid);
    if (params.alpha == 0.0) return base;
    const double dv = visibility_level(curves, bid) - params.vis0;
    return base + params.sign * 0.5 * params.alpha * dv * dv;
}

double visibility_grad(const VisibilityParams& params, const HourlyCurveSet& curves,
                       double bid) noexcept {
    const QuasiLinearParams ql{params.value};
    const double base = quasilinear_grad(ql, curves, bid);
    if (params.alpha == 0.0) return base;
    const double dv = visibility_level(curves, bid) - params.vis0;
    const double dvis = curves.click.grad(bid) / curves.click.saturation;
    return base + params.sign * params.alpha * dv * dvis;
}

} // namespace bidcast
