#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "neqt/errors.hpp"
#include "neqt/parallel.hpp"

namespace neqt {

struct QuadratureSpec {
    double abs_tol = 1e-10;
    int max_level = 10;  // step 2^-level in the tanh-sinh variable
    int min_level = 3;
    double t_max = 4.0;  // truncation of the tanh-sinh variable
    bool throw_on_failure = true;
};

template <class T>
struct QuadratureResult {
    T value;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

namespace detail {

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& x) { return std::abs(x); }
template <class Derived>
double magnitude(const Eigen::MatrixBase<Derived>& x)
{
    return x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
}

} // namespace detail

/// Tanh-sinh rule on [a, b], refined by halving the step until successive
/// levels agree to tol. Endpoints are never evaluated.
template <class T, class F>
QuadratureResult<T> tanh_sinh(F&& f, double a, double b, double tol, const QuadratureSpec& spec)
{
    constexpr double half_pi = 1.57079632679489661923;
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    QuadratureResult<T> out{f(center), 0.0, 1, true};
    if (half <= 0.0) {
        out.value = out.value * 0.0;
        return out;
    }

    // sum over nodes of w(t) f(x(t)); start with the t = 0 node
    T sum = out.value * half_pi;
    auto add_node = [&](double t) {
        const double u = half_pi * std::sinh(t);
        const double cu = std::cosh(u);
        const double w = half_pi * std::cosh(t) / (cu * cu);
        if (w < 1e-300) return false;
        const double delta = half * 2.0 / (1.0 + std::exp(2.0 * std::abs(u))); // distance to endpoint
        const double left = a + delta;
        const double right = b - delta;
        bool used = false;
        if (left > a && left < b) {
            sum += f(left) * w;
            used = true;
        }
        if (right < b && right > a) {
            sum += f(right) * w;
            used = true;
        }
        out.evaluations += 2;
        return used || delta > 0.0;
    };

    double h = 1.0;
    for (double t = h; t <= spec.t_max; t += h)
        if (!add_node(t)) break;
    T estimate = sum * (h * half);
    double err = std::numeric_limits<double>::infinity();

    for (int level = 1; level <= spec.max_level; ++level) {
        h *= 0.5;
        for (double t = h; t <= spec.t_max; t += 2.0 * h)
            if (!add_node(t)) break;
        T next = sum * (h * half);
        err = detail::magnitude(next - estimate);
        estimate = next;
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() * detail::magnitude(estimate);
        if (level >= spec.min_level && err <= std::max(tol, floor)) {
            out.value = estimate;
            out.error = err;
            return out;
        }
    }
    out.value = estimate;
    out.error = err;
    out.converged = false;
    return out;
}

/// Integrates over [breakpoints.front(), breakpoints.back()] segment by segment.
/// Each segment receives a share of abs_tol proportional to its width.
template <class T, class F>
QuadratureResult<T> integrate_segments(F&& f, std::vector<double> breakpoints, const QuadratureSpec& spec)
{
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
    if (breakpoints.size() < 2) throw std::invalid_argument("integration needs a nonempty interval");
    const double total = breakpoints.back() - breakpoints.front();

    const std::size_t count = breakpoints.size() - 1;
    std::vector<QuadratureResult<T>> segments(count);
    parallel_for(count, [&](std::size_t i) {
        const double a = breakpoints[i], b = breakpoints[i + 1];
        segments[i] = tanh_sinh<T>(f, a, b, spec.abs_tol * (b - a) / total, spec);
    });

    QuadratureResult<T> out = segments[0];
    for (std::size_t i = 0; i < count; ++i) {
        const auto& seg = segments[i];
        if (!seg.converged && spec.throw_on_failure)
            throw QuadratureFailure("quadrature did not converge on [" + std::to_string(breakpoints[i]) + ", " +
                                    std::to_string(breakpoints[i + 1]) + "], error estimate " +
                                    std::to_string(seg.error));
        if (i == 0) continue;
        out.value += seg.value;
        out.error += seg.error;
        out.evaluations += seg.evaluations;
        out.converged = out.converged && seg.converged;
    }
    return out;
}

/// Breakpoints restricted to [lo, hi], with both ends included.
inline std::vector<double> clip_breakpoints(const std::vector<double>& points, double lo, double hi)
{
    std::vector<double> out{lo, hi};
    for (double p : points)
        if (p > lo && p < hi) out.push_back(p);
    std::sort(out.begin(), out.end());
    return out;
}

/// Adds uniformly spaced points so that no segment is wider than max_width.
inline std::vector<double> subdivide(const std::vector<double>& sorted_points, double max_width)
{
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < sorted_points.size(); ++i) {
        const double a = sorted_points[i], b = sorted_points[i + 1];
        const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
        for (int p = 0; p < pieces; ++p) out.push_back(a + (b - a) * p / pieces);
    }
    if (!sorted_points.empty()) out.push_back(sorted_points.back());
    return out;
}

} // namespace neqt
