#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <functional>

#include "cousinlab/error.hpp"

namespace cousinlab {

/**
 * Adaptive Dormand-Prince 5(4) integrator for small fixed-size systems.
 * Used by the profile oracle and the conformal reparametrizations, which
 * must be more accurate than anything they are used to check.
 */
template <int N>
class DormandPrince {
public:
    using State = Eigen::Matrix<double, N, 1>;
    using Rhs = std::function<State(double, const State&)>;

    explicit DormandPrince(Rhs rhs, double tol = 1e-10) : rhs_(std::move(rhs)), tol_(tol) {}

    /// Advance from (t, y) to t_end, adapting the step size.
    State integrate(double t, State y, double t_end) const {
        const double dir = (t_end >= t) ? 1.0 : -1.0;
        double h = dir * std::min(1e-2, std::abs(t_end - t));
        if (h == 0.0) return y;
        int rejects_in_a_row = 0;
        while (dir * (t_end - t) > 0.0) {
            if (dir * (t + h - t_end) > 0.0) h = t_end - t;
            State y_new, err;
            step(t, y, h, y_new, err);
            const double scale = tol_ * (1.0 + y.template lpNorm<Eigen::Infinity>());
            const double e = err.template lpNorm<Eigen::Infinity>() / scale;
            if (e <= 1.0) {
                t += h;
                y = y_new;
                rejects_in_a_row = 0;
            } else if (++rejects_in_a_row > 60) {
                throw Error("DormandPrince: step size underflow");
            }
            const double factor = std::clamp(0.9 * std::pow(std::max(e, 1e-10), -0.2), 0.2, 5.0);
            h *= factor;
            if (std::abs(h) < 1e-14 * (1.0 + std::abs(t)))
                throw Error("DormandPrince: step size underflow");
        }
        return y;
    }

private:
    void step(double t, const State& y, double h, State& y_out, State& err_out) const {
        const State k1 = rhs_(t, y);
        const State k2 = rhs_(t + h / 5.0, y + h * (k1 / 5.0));
        const State k3 = rhs_(t + 3.0 * h / 10.0, y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
        const State k4 = rhs_(t + 4.0 * h / 5.0,
                              y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
        const State k5 = rhs_(t + 8.0 * h / 9.0,
                              y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                       64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
        const State k6 = rhs_(t + h,
                              y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                       46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                       5103.0 / 18656.0 * k5));
        y_out = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                         2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
        const State k7 = rhs_(t + h, y_out);
        const State y4 = y + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 +
                                  393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5 +
                                  187.0 / 2100.0 * k6 + 1.0 / 40.0 * k7);
        err_out = y_out - y4;
    }

    Rhs rhs_;
    double tol_;
};

} // namespace cousinlab
