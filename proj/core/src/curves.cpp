#include "bidcast/curves.hpp"

#include "bidcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bidcast {

namespace {

double click_sse(std::span<const CurvePoint> pts, double a, double b) {
    double s = 0.0;
    for (const auto& p : pts) {
        const double r = p.click_prob - a * p.bid / (b + p.bid);
        s += r * r;
    }
    return s;
}

struct FitState {
    double a, b, sse;
};

// Damped Gauss-Newton from one start. Saturating curves have a flat valley in
// (a, b), so the step is Levenberg-damped and both parameters are kept
// strictly positive.
FitState gauss_newton(std::span<const CurvePoint> pts, double a0, double b0) {
    constexpr int kMaxIter = 500;
    constexpr double kStepTol = 1e-8;
    constexpr double kFloor = 1e-12;

    double a = std::max(a0, kFloor);
    double b = std::max(b0, kFloor);
    double sse = click_sse(pts, a, b);
    double damping = 1e-10;

    for (int it = 0; it < kMaxIter; ++it) {
        // normal equations for residual r_i = y_i - a*x/(b+x)
        double jaa = 0.0, jab = 0.0, jbb = 0.0, ga = 0.0, gb = 0.0;
        for (const auto& p : pts) {
            const double d = b + p.bid;
            const double u = p.bid / d;        // d(pred)/da
            const double w = -a * p.bid / (d * d); // d(pred)/db
            const double r = p.click_prob - a * u;
            jaa += u * u;
            jab += u * w;
            jbb += w * w;
            ga += u * r;
            gb += w * r;
        }
        bool moved = false;
        for (int attempt = 0; attempt < 40; ++attempt) {
            const double maa = jaa + damping;
            const double mbb = jbb + damping;
            const double det = maa * mbb - jab * jab;
            if (det <= 0.0 || !std::isfinite(det)) {
                damping = std::max(damping * 10.0, 1e-12);
                continue;
            }
            const double da = (mbb * ga - jab * gb) / det;
            const double db = (maa * gb - jab * ga) / det;
            const double na = std::max(a + da, kFloor);
            const double nb = std::max(b + db, kFloor);
            const double nsse = click_sse(pts, na, nb);
            if (nsse <= sse + 1e-18) {
                const double step = std::max(std::fabs(na - a), std::fabs(nb - b));
                a = na;
                b = nb;
                sse = nsse;
                damping = std::max(damping / 3.0, 1e-12);
                moved = true;
                if (step < kStepTol) return {a, b, sse};
                break;
            }
            damping = std::max(damping * 10.0, 1e-12);
        }
        if (!moved) break;
    }
    return {a, b, sse};
}

double median_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return (n % 2 == 1) ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

} // namespace

ClickCurve fit_click_curve(std::span<const CurvePoint> points) {
    if (points.size() < 2)
        throw DegenerateFit("fit_click_curve: need at least 2 points");

    double max_click = 0.0;
    std::vector<double> bids;
    bids.reserve(points.size());
    bool distinct = false;
    for (const auto& p : points) {
        max_click = std::max(max_click, p.click_prob);
        bids.push_back(p.bid);
        if (p.bid != points.front().bid) distinct = true;
    }
    if (max_click <= 0.0)
        throw DegenerateFit("fit_click_curve: all click probabilities are zero");
    if (!distinct)
        throw DegenerateFit("fit_click_curve: all bids identical");

    const double med = median_of(std::move(bids));
    const double a_starts[2] = {max_click, 2.0 * max_click};
    const double b_starts[2] = {med, 5.0 * med};

    FitState best{0.0, 0.0, std::numeric_limits<double>::infinity()};
    for (double a0 : a_starts) {
        for (double b0 : b_starts) {
            const FitState s = gauss_newton(points, a0, b0);
            if (s.sse < best.sse) best = s;
        }
    }
    if (!(best.a > 0.0) || !(best.b > 0.0) || !std::isfinite(best.sse))
        throw DegenerateFit("fit_click_curve: fit did not converge to positive parameters");
    return ClickCurve{best.a, best.b};
}

CostCurve fit_cost_curve(std::span<const CurvePoint> points) {
    double sxy = 0.0, sxx = 0.0;
    for (const auto& p : points) {
        sxy += p.bid * p.cpc;
        sxx += p.bid * p.bid;
    }
    if (sxx <= 0.0)
        throw DegenerateFit("fit_cost_curve: sum of squared bids is zero");
    return CostCurve{std::max(sxy / sxx, 0.0)};
}

} // namespace bidcast
