#pragma once

// One-dimensional numerical building blocks shared by every module:
// adaptive Simpson and Gauss-Kronrod quadrature, bisection and
// golden-section search.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>

namespace nlwave::numerics {

namespace detail {

template <class F>
double simpson_step(F& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // below a few ulps of the panel value further halving only chases roundoff
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                         (std::abs(left) + std::abs(right));
    if (depth <= 0 || std::abs(delta) <= 15.0 * std::max(tol, floor)) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] with absolute tolerance
/// abs_tol. The interval is pre-split into `initial_panels` panels so that
/// narrow features are not missed by the first coarse estimate.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double abs_tol, int max_depth = 48,
                        int initial_panels = 8) {
    if (!(b > a)) {
        return 0.0;
    }
    const double width = (b - a) / initial_panels;
    const double panel_tol = abs_tol / initial_panels;
    double total = 0.0;
    for (int p = 0; p < initial_panels; ++p) {
        const double lo = a + p * width;
        const double hi = (p + 1 == initial_panels) ? b : lo + width;
        const double mid = 0.5 * (lo + hi);
        const double flo = f(lo);
        const double fhi = f(hi);
        const double fmid = f(mid);
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += detail::simpson_step(f, lo, flo, hi, fhi, mid, fmid, whole, panel_tol, max_depth);
    }
    return total;
}

namespace detail {

// 7-point Gauss / 15-point Kronrod pair; nodes listed from the right end
// towards the centre, the last one is the midpoint.
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct KronrodPanel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const KronrodPanel& o) const { return error < o.error; }
};

template <class F>
KronrodPanel kronrod_panel(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double r = 0.5 * (b - a);
    double kronrod = 0.0;
    double gauss = 0.0;
    double magnitude = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double x = kKronrodNodes[i];
        const double fl = f(c - r * x);
        const double fr = (i == 7) ? 0.0 : f(c + r * x);
        kronrod += kKronrodWeights[i] * (fl + fr);
        magnitude += kKronrodWeights[i] * (std::abs(fl) + std::abs(fr));
        if (i % 2 == 1) {
            gauss += kGaussWeights[i / 2] * (fl + fr);
        }
    }
    // errors below a few ulps of the panel's |f| mass are roundoff
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * magnitude * r;
    const double err = std::abs(kronrod - gauss) * r;
    return {a, b, kronrod * r, err > floor ? err : 0.0};
}

}  // namespace detail

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature of f over [a, b].
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below max(abs_tol, rel_tol * |integral|) or max_panels
/// panels are in use.
template <class F>
double gauss_kronrod(F&& f, double a, double b, double abs_tol, double rel_tol = 1e-14,
                     int max_panels = 2000) {
    if (!(b > a)) {
        return 0.0;
    }
    std::priority_queue<detail::KronrodPanel> heap;
    heap.push(detail::kronrod_panel(f, a, b));
    double value = heap.top().value;
    double error = heap.top().error;
    while (error > std::max(abs_tol, rel_tol * std::abs(value)) &&
           static_cast<int>(heap.size()) < max_panels) {
        const detail::KronrodPanel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            break;
        }
        heap.pop();
        const detail::KronrodPanel left = detail::kronrod_panel(f, worst.a, mid);
        const detail::KronrodPanel right = detail::kronrod_panel(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    return value;
}

/// Bisection for a sign change of f on [lo, hi]. Iterates until the bracket
/// width falls below rel_tol * max(|lo|, |hi|) or stops shrinking.
template <class F>
double bisect(F&& f, double lo, double hi, double rel_tol = 1e-15) {
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) {
        return lo;
    }
    if (fhi == 0.0) {
        return hi;
    }
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw std::invalid_argument("bisect: no sign change on bracket");
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double fm = f(mid);
        if (fm == 0.0) {
            return mid;
        }
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi))) {
            break;
        }
    }
    return 0.5 * (lo + hi);
}

/// Golden-section minimisation of a unimodal f on [lo, hi]; returns the
/// abscissa of the minimum, located to rel_tol relative width.
template <class F>
double golden_section_min(F&& f, double lo, double hi, double rel_tol = 1e-10) {
    constexpr double inv_phi = 0.6180339887498948482;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 500; ++it) {
        if (hi - lo <= rel_tol * std::abs(0.5 * (lo + hi))) {
            break;
        }
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

inline constexpr double infinity = std::numeric_limits<double>::infinity();

}  // namespace nlwave::numerics
