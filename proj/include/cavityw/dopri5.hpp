#pragma once

// Adaptive Dormand-Prince 5(4) integrator for Eigen dense states.
//
// The fifth-order solution is propagated, the embedded fourth-order solution
// only drives step control. Steps are clipped so that every requested sample
// time is hit exactly; samples therefore need no interpolation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>

#include "cavityw/errors.hpp"

namespace cavityw {

struct StepControl {
    double tolerance = 1e-8;     // per-step error bound relative to max(1, |y|_inf)
    double initial_step = 1e-12; // seconds
    double safety = 0.9;
    double max_growth = 5.0;
    double min_shrink = 0.2;
    std::size_t max_steps = 50'000'000;
};

struct IntegrationStats {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evaluations = 0;
    double min_step = std::numeric_limits<double>::infinity();
    double max_step = 0.0;
};

namespace detail::dp {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// difference between fifth- and fourth-order weights
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace detail::dp

/// Integrates dy/dt = rhs(t, y) from t0 through the increasing `samples`.
///
/// `rhs(t, y, dy)` writes the derivative. `post(y)` runs after every
/// accepted step and returns true if it modified y. `observe(i, t, y)` is
/// called once per sample (including t0 when samples[0] == t0).
template <class State, class Rhs, class Post, class Observe>
IntegrationStats dopri5(Rhs&& rhs, State& y, double t0, std::span<const double> samples, const StepControl& ctl,
                        Post&& post, Observe&& observe) {
    using namespace detail::dp;
    IntegrationStats st;
    if (samples.empty()) return st;
    if (!(ctl.tolerance > 0.0)) throw DomainError("integrator tolerance must be positive");
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i] < t0 || (i > 0 && samples[i] <= samples[i - 1]))
            throw DomainError("sample times must be increasing and not before t0");

    const double t_end = samples.back();
    const double span = t_end - t0;
    const double h_floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t_end), span);

    double t = t0;
    std::size_t next = 0;
    while (next < samples.size() && samples[next] == t0) observe(next++, t, y);
    if (next == samples.size()) return st;

    State k1, k2, k3, k4, k5, k6, k7, tmp, y5, err;
    rhs(t, y, k1);
    ++st.rhs_evaluations;
    double h = std::min(ctl.initial_step > 0.0 ? ctl.initial_step : span * 1e-6, span);
    bool last_rejected = false;

    while (next < samples.size()) {
        if (st.steps + st.rejected >= ctl.max_steps) {
            std::ostringstream os;
            os << "tolerance not met within " << ctl.max_steps << " steps (t = " << t << " s)";
            throw ConvergenceError(os.str());
        }
        double step = h;
        bool lands = false;
        if (t + step >= samples[next] - 1e-12 * std::abs(samples[next])) {
            step = samples[next] - t;
            lands = true;
        }

        tmp = y + step * a21 * k1;
        rhs(t + c2 * step, tmp, k2);
        tmp = y + step * (a31 * k1 + a32 * k2);
        rhs(t + c3 * step, tmp, k3);
        tmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * step, tmp, k4);
        tmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * step, tmp, k5);
        tmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + step, tmp, k6);
        y5 = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + step, y5, k7);
        st.rhs_evaluations += 6;
        err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double scale =
            ctl.tolerance * std::max({1.0, y.cwiseAbs().maxCoeff(), y5.cwiseAbs().maxCoeff()});
        double ratio = err.cwiseAbs().maxCoeff() / scale;
        if (!std::isfinite(ratio)) ratio = std::numeric_limits<double>::infinity();

        if (ratio > 1.0) {
            ++st.rejected;
            last_rejected = true;
            const double f = std::isfinite(ratio) ? std::max(ctl.min_shrink, ctl.safety * std::pow(ratio, -0.2))
                                                  : ctl.min_shrink;
            h = step * f;
            if (h < h_floor) {
                std::ostringstream os;
                os << "step size underflow at t = " << t << " s (h = " << h << " s, error ratio " << ratio
                   << "); the problem looks stiff";
                throw StiffnessError(os.str());
            }
            continue;
        }

        t = lands ? samples[next] : t + step;
        y.swap(y5);
        ++st.steps;
        st.min_step = std::min(st.min_step, step);
        st.max_step = std::max(st.max_step, step);
        if (post(y)) {
            rhs(t, y, k1);
            ++st.rhs_evaluations;
        } else {
            k1.swap(k7);
        }
        if (lands) observe(next++, t, y);

        double f = ratio == 0.0 ? ctl.max_growth : ctl.safety * std::pow(ratio, -0.2);
        f = std::clamp(f, ctl.min_shrink, last_rejected ? 1.0 : ctl.max_growth);
        // a clipped landing step says nothing about the natural step size
        h = (lands && step < h) ? std::max(h, step * f) : step * f;
        last_rejected = false;
    }
    return st;
}

}  // namespace cavityw
