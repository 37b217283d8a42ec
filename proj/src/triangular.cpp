#include "chainshadow/triangular.hpp"

#include <cmath>
#include <stdexcept>

#include "chainshadow/config.hpp"

namespace chainshadow::triangular {

void TriangularConfig::validate() const {
    if (n < 1) throw std::invalid_argument("triangular: n must be >= 1");
    auto check_len = [&](const std::vector<double>& v, const std::string& name) {
        if (v.size() != 1 && v.size() != static_cast<std::size_t>(n))
            throw std::invalid_argument("triangular: " + name + " must be scalar or length n");
    };
    check_len(lambda, "lambda");
    check_len(mu, "mu");
    for (int i = 0; i < n; ++i)
        if (!(lambda_at(i) > 0.0))
            throw std::invalid_argument("triangular: lambda_i > 0 violated at i=" +
                                        std::to_string(i + 1));
    if (x0.size() != n) throw std::invalid_argument("triangular: x0 must have length n");
    for (int i = 0; i < n; ++i)
        if (!(x0[i] > 0.0 && x0[i] < 1.0))
            throw std::invalid_argument("triangular: x0 components must lie in (0,1)");
    if (!(t_end >= 0.0)) throw std::invalid_argument("triangular: t_end must be nonnegative");
}

TriangularConfig TriangularConfig::from_config(const Config& cfg) {
    TriangularConfig c;
    const std::string s = "triangular";
    c.n = static_cast<int>(cfg.get_int(s, "n", 4));
    c.lambda = cfg.get_vector(s, "lambda", {1.0});
    c.mu = cfg.get_vector(s, "mu", {2.0});
    std::vector<double> x0 = cfg.get_vector(s, "x0", {0.1, 0.1, 0.1, 0.1});
    c.x0 = Eigen::Map<const Vec>(x0.data(), static_cast<Eigen::Index>(x0.size()));
    c.t_end = cfg.get_double(s, "t_end", 60.0);
    c.rtol = cfg.get_double(s, "rtol", 1e-10);
    c.atol = cfg.get_double(s, "atol", 1e-12);
    c.validate();
    return c;
}

Vec vector_field(const TriangularConfig& cfg, const Vec& x) {
    Vec f(cfg.n);
    f[0] = cfg.lambda_at(0) * x[0] - cfg.lambda_at(0) * x[0] * x[0];
    for (int i = 1; i < cfg.n; ++i)
        f[i] = (cfg.lambda_at(i) - cfg.mu_at(i)) * x[i] - cfg.lambda_at(i) * x[i] * x[i] +
               cfg.mu_at(i) * x[i] * x[i - 1];
    return f;
}

Mat jacobian(const TriangularConfig& cfg, const Vec& x) {
    Mat J = Mat::Zero(cfg.n, cfg.n);
    J(0, 0) = cfg.lambda_at(0) - 2.0 * cfg.lambda_at(0) * x[0];
    for (int i = 1; i < cfg.n; ++i) {
        J(i, i) = (cfg.lambda_at(i) - cfg.mu_at(i)) - 2.0 * cfg.lambda_at(i) * x[i] +
                  cfg.mu_at(i) * x[i - 1];
        J(i, i - 1) = cfg.mu_at(i) * x[i];
    }
    return J;
}

Vec fixed_point(const TriangularConfig& cfg, int i) {
    Vec p = Vec::Zero(cfg.n);
    for (int j = 0; j < i; ++j) p[j] = 1.0;
    return p;
}

ode::Trajectory integrate(const TriangularConfig& cfg) {
    cfg.validate();
    ode::Options opt;
    opt.rtol = cfg.rtol;
    opt.atol = cfg.atol;
    ode::Trajectory traj;
    ode::integrate([&cfg](double, const Vec& x) { return vector_field(cfg, x); }, 0.0, cfg.x0,
                   cfg.t_end, opt, &traj);
    return traj;
}

namespace {

// Cumulative integral of samples f(s_0..s_M) on a uniform grid: Simpson on
// even prefixes, one-sided quadratic rule to reach odd nodes.
std::vector<double> cumulative(const std::vector<double>& f, double h) {
    const std::size_t m = f.size();
    std::vector<double> F(m, 0.0);
    for (std::size_t j = 1; j < m; ++j) {
        if (j % 2 == 0) {
            F[j] = F[j - 2] + h / 3.0 * (f[j - 2] + 4.0 * f[j - 1] + f[j]);
        } else if (j + 1 < m) {
            F[j] = F[j - 1] + h / 12.0 * (5.0 * f[j - 1] + 8.0 * f[j] - f[j + 1]);
        } else {
            F[j] = F[j - 1] + h / 12.0 * (-f[j - 2] + 8.0 * f[j - 1] + 5.0 * f[j]);
        }
    }
    return F;
}

}  // namespace

Vec closed_form(const TriangularConfig& cfg, double t, int quad_steps) {
    cfg.validate();
    if (quad_steps < 2) throw std::invalid_argument("closed_form: quad_steps must be >= 2");
    int m = quad_steps + (quad_steps % 2);  // even number of intervals
    const double h = t / m;
    if (t == 0.0) return cfg.x0;

    std::vector<std::vector<double>> x(cfg.n, std::vector<double>(m + 1));
    for (int i = 0; i < cfg.n; ++i) {
        std::vector<double> f(m + 1);
        for (int j = 0; j <= m; ++j)
            f[j] = i == 0 ? cfg.lambda_at(0)
                          : cfg.lambda_at(i) - cfg.mu_at(i) + cfg.mu_at(i) * x[i - 1][j];
        const std::vector<double> F = cumulative(f, h);
        std::vector<double> E(m + 1);
        for (int j = 0; j <= m; ++j) E[j] = std::exp(F[j]);
        const std::vector<double> G = cumulative(E, h);
        for (int j = 0; j <= m; ++j)
            x[i][j] = cfg.x0[i] * E[j] / (1.0 + cfg.lambda_at(i) * cfg.x0[i] * G[j]);
    }
    Vec out(cfg.n);
    for (int i = 0; i < cfg.n; ++i) out[i] = x[i][m];
    return out;
}

std::vector<std::optional<double>> transition_times(const ode::Trajectory& traj,
                                                    double threshold) {
    if (traj.states.empty()) return {};
    const int n = static_cast<int>(traj.states.front().size());
    std::vector<std::optional<double>> out(n);
    for (int i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < traj.size(); ++j) {
            const double v = traj.states[j][i];
            if (v >= threshold) {
                if (j == 0) {
                    out[i] = traj.times[0];
                } else {
                    const double prev = traj.states[j - 1][i];
                    const double frac = (threshold - prev) / (v - prev);
                    out[i] = traj.times[j - 1] + frac * (traj.times[j] - traj.times[j - 1]);
                }
                break;
            }
        }
    }
    return out;
}

}  // namespace chainshadow::triangular
