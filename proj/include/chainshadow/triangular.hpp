#pragma once

#include <optional>
#include <vector>

#include "chainshadow/ode.hpp"

namespace chainshadow {

class Config;

namespace triangular {

// x1' = l1 x1 - l1 x1^2,  xi' = (li - mi) xi - li xi^2 + mi xi x_{i-1}.
struct TriangularConfig {
    int n = 4;
    std::vector<double> lambda = {1.0};  // scalar broadcasts
    std::vector<double> mu = {2.0};
    Vec x0;
    double t_end = 60.0;
    double rtol = 1e-10;
    double atol = 1e-12;

    double lambda_at(int i) const { return lambda.size() == 1 ? lambda[0] : lambda.at(i); }
    double mu_at(int i) const { return mu.size() == 1 ? mu[0] : mu.at(i); }
    void validate() const;
    static TriangularConfig from_config(const Config& cfg);
};

Vec vector_field(const TriangularConfig& cfg, const Vec& x);
Mat jacobian(const TriangularConfig& cfg, const Vec& x);

// Fixed point with i leading ones.
Vec fixed_point(const TriangularConfig& cfg, int i);

ode::Trajectory integrate(const TriangularConfig& cfg);

// Recursive quadrature of the per-coordinate Bernoulli equations with a
// composite-Simpson cumulative rule on a shared grid; seed f_1 = lambda_1.
Vec closed_form(const TriangularConfig& cfg, double t, int quad_steps);

// First time each coordinate reaches the threshold (linear interpolation
// between accepted steps); empty when never crossed.
std::vector<std::optional<double>> transition_times(const ode::Trajectory& traj,
                                                    double threshold);

}  // namespace triangular
}  // namespace chainshadow
