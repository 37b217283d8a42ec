#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace chainshadow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace ode {

struct Options {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 1e-3;
    double h_min = 1e-14;
    double h_max = std::numeric_limits<double>::infinity();
    long max_steps = 50'000'000;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<double> step_errors;  // embedded error estimate per accepted step
    std::string method = "rk45(dopri)";
    double rtol = 0.0;
    double atol = 0.0;

    const Vec& back() const { return states.back(); }
    std::size_t size() const { return times.size(); }
};

using Rhs = std::function<Vec(double, const Vec&)>;

// Dormand-Prince 5(4) embedded pair.
class Rk45 {
  public:
    explicit Rk45(Rhs f, Options opt = {}) : f_(std::move(f)), opt_(opt) {}

    // Advance from (t0, y0) to t1, appending every accepted step to traj
    // when record is true. Returns the state at t1.
    Vec integrate(double t0, const Vec& y0, double t1, Trajectory* traj = nullptr) const {
        double t = t0;
        Vec y = y0;
        if (traj) {
            traj->rtol = opt_.rtol;
            traj->atol = opt_.atol;
            traj->times.push_back(t);
            traj->states.push_back(y);
            traj->step_errors.push_back(0.0);
        }
        if (t1 == t0) return y;
        const double dir = (t1 > t0) ? 1.0 : -1.0;
        double h = dir * std::min(opt_.h_init, std::abs(t1 - t0));
        Vec k1 = f_(t, y);
        for (long step = 0; step < opt_.max_steps; ++step) {
            if (dir * (t + h - t1) > 0.0) h = t1 - t;
            Vec y_new, err;
            double err_norm = attempt(t, y, k1, h, y_new, err);
            if (err_norm <= 1.0) {
                t += h;
                // first-same-as-last property of DOPRI5
                k1 = f_(t, y_new);
                y = y_new;
                if (traj) {
                    traj->times.push_back(t);
                    traj->states.push_back(y);
                    traj->step_errors.push_back(err.cwiseAbs().maxCoeff());
                }
                if (dir * (t1 - t) <= 0.0) return y;
            }
            double fac = 0.9 * std::pow(std::max(err_norm, 1e-12), -0.2);
            fac = std::min(5.0, std::max(0.2, fac));
            h *= fac;
            if (std::abs(h) > opt_.h_max) h = dir * opt_.h_max;
            if (std::abs(h) < opt_.h_min)
                throw std::runtime_error("rk45: step size underflow at t=" + std::to_string(t));
        }
        throw std::runtime_error("rk45: max step count exceeded");
    }

  private:
    // One trial step; returns scaled error norm and fills y_new/err.
    double attempt(double t, const Vec& y, const Vec& k1, double h, Vec& y_new, Vec& err) const {
        constexpr double a21 = 1.0 / 5;
        constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                         a54 = -212.0 / 729;
        constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                         a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                         b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                         e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        const Vec k2 = f_(t + h * a21, y + h * (a21 * k1));
        const Vec k3 = f_(t + h * 0.3, y + h * (a31 * k1 + a32 * k2));
        const Vec k4 = f_(t + h * 0.8, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Vec k5 = f_(t + h * (8.0 / 9), y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Vec k6 = f_(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Vec k7 = f_(t + h, y_new);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double norm = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            double sc = opt_.atol + opt_.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            norm = std::max(norm, std::abs(err[i]) / sc);
        }
        return norm;
    }

    Rhs f_;
    Options opt_;
};

inline Vec integrate(const Rhs& f, double t0, const Vec& y0, double t1, const Options& opt = {},
                     Trajectory* traj = nullptr) {
    return Rk45(f, opt).integrate(t0, y0, t1, traj);
}

}  // namespace ode
}  // namespace chainshadow
