#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "chainshadow/chain.hpp"
#include "chainshadow/covering.hpp"
#include "chainshadow/geometry.hpp"
#include "chainshadow/ode.hpp"

namespace chainshadow {

class Config;

namespace toymodel {

using Complex = std::complex<double>;

// Chain of fixed points T_0 .. T_N, one coordinate chart per node. The
// j-th chart carries four hyperbolic reals (y-, x-, y+, x+) representing
// the complex modes j-1 and j+1, plus the remaining center modes c_k.
// Mode indices are padded to [-1, N+1] so that every chart has the same
// dimension and every jump is a linear bijection; the padded modes are
// identically zero on the nominal orbit.
struct ToyConfig {
    int N = 3;            // charts 0..N
    double sigma = 0.1;   // macro section offset
    double K = 1e-3;      // bound on the O-terms
    double kappa = 1e-3;  // hyperbolic coupling, |kappa| <= K
    Complex kappa_c = Complex(0.0, 1e-3);  // center coupling, |kappa_c| <= K
    int k = 2;            // polynomial exponent in the size hypotheses
    double G = 1.5;
    double L = std::sqrt(3.0);  // Lipschitz constant of g1/g2
    std::optional<double> T;    // transit time; resolved via admissible_T when unset
    double nu = 1e-3;           // dropped-direction size fraction
    bool jump_swap_pm = true;   // paper's argument order in the jump formulas
    double factor_tilde = 1.01;  // A~ = factor*A, Q3~ = factor*Q3
    double rtol = 1e-13;
    double atol = 1e-16;

    double sigma_prime() const { return 1.01 * sigma; }
    void validate() const;
    static ToyConfig desk();
    static ToyConfig from_config(const Config& cfg);
};

struct ChartLayout {
    int j = 0;
    int N = 0;
    std::vector<int> modes;  // sorted, [-1, N+1] minus {j-1, j, j+1}

    ChartLayout() = default;
    ChartLayout(int j_, int N_);

    static constexpr int iYm = 0, iXm = 1, iYp = 2, iXp = 3;
    int dim() const { return 4 + 2 * static_cast<int>(modes.size()); }
    bool has_mode(int k) const;
    int mode_offset(int k) const;  // offset of (re, im) in the state vector
    std::vector<int> past_modes() const;
    std::vector<int> future_modes() const;
};

// omega = e^{i 2 pi / 3}; g1(c-, c+) = omega c- + omega^2 c+, g2 = g1^{-1}.
Complex g1(double c_minus, double c_plus);
std::array<double, 2> g2(Complex c);
// Brute-force Lipschitz constants: |g1| over the unit max-norm square and
// the max-norm of g2 over the unit circle.
double derive_lipschitz_g1(int grid = 2001);
double derive_lipschitz_g2(int grid = 20001);

Vec rhs(const ToyConfig& cfg, const ChartLayout& lay, const Vec& state);

// Time shift along the chart-j ODE, integrated in exponentially scaled
// variables anchored at chart time 0 with horizon T (the config's transit
// time); state in/out are unscaled chart coordinates.
Vec flow(const ToyConfig& cfg, const ChartLayout& lay, const Vec& state, double t_from,
         double t_to, ode::Trajectory* traj = nullptr,
         const std::optional<ode::Options>& opts = std::nullopt);

Mat jump_matrix(const ToyConfig& cfg, int j);
MapHandle jump_handle(const ToyConfig& cfg, int j);

// Residuals of the four largeness constraints on T (negative = satisfied):
// two exponential-domination inequalities, T e^{-3T} < sigma', and the
// center-direction bound.
std::array<double, 4> admissibility_residuals(const ToyConfig& cfg, double T);
bool is_admissible(const ToyConfig& cfg, double T);
double admissible_T(const ToyConfig& cfg);  // minimal admissible T, bisected to 1e-6
double resolve_T(const ToyConfig& cfg);     // cfg.T if set (validated), else admissible_T

struct Interval {
    double lo = 0.0, hi = 0.0;
    bool contains(double x, double slack = 0.0) const { return x >= lo - slack && x <= hi + slack; }
    double radius() const { return 0.5 * (hi - lo); }
};

struct HyperbolicEnclosure {
    Interval ym, xm, yp, xp;
};

// Interval enclosure of the hyperbolic coordinates at time t in [0, T],
// for initial data y-(0)=eta, x-(0)=e^{-2T}a0, y+(0)=e^{-T}b0,
// x+(0)=e^{-T}d0 with |a0|,|b0|,|d0| bounded by T^k.
HyperbolicEnclosure hyperbolic_enclosure(const ToyConfig& cfg, double T, double eta, double a0,
                                         double b0, double d0, double t,
                                         double d_radius = -1.0);

// alpha-coefficients (ym, xm, yp, xp) of the successive approximation
// stages 1..3; stages 2 and 3 coincide.
std::array<double, 4> enclosure_stage_coeffs(const ToyConfig& cfg, int stage, double d_mag);

// Per-mode bounds [m^2/A, m^2 A] on |c(t)|^2 with A = exp(21 K G sigma'^2).
double center_amplification(const ToyConfig& cfg);
std::vector<Interval> center_bounds(const ToyConfig& cfg, const std::vector<double>& c0_magnitudes,
                                    double T);

struct InequalitySlack {
    std::string name;
    int j = -1;  // chart index, -1 when chart-independent
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // relative; positive = satisfied strictly
};

struct ToyCoveringParams {
    double T = 0.0;
    double Q1 = 0.0, Q2 = 0.0, Q3 = 0.0, Q3_tilde = 0.0;
    double A = 1.0, A_tilde = 1.0;
    // chart-independent sizes
    double gamma_in_ym = 0.0, gamma_in_xm = 0.0;  // near-zero (dropped into)
    double r_out_xp = 0.0, r_out_yp = 0.0;        // near-zero (to be dropped)
    double gamma_out_ym = 0.0, gamma_out_xm = 0.0;
    double r_in_xp = 0.0, r_in_yp = 0.0;
    // per chart j = 0..N
    std::vector<double> gamma_in_cp, gamma_out_cp, r_in_cf, r_out_cf;
    std::vector<InequalitySlack> slacks;
    double min_slack = 0.0;
    double size_bound = 0.0;  // A~^N max(2LQ2, 2Q3, Q2, Q1, 1) T
};

ToyCoveringParams covering_params(const ToyConfig& cfg);

struct ChartSets {
    HSet in;
    HSet out;
    HSet out_dropped;  // x+ and y+ retagged as entry
};
ChartSets build_chart_hsets(const ToyConfig& cfg, const ToyCoveringParams& params, int j);

MapHandle flow_handle(const ToyConfig& cfg, const ToyCoveringParams& params, int j);

inline SampleOptions default_flow_samples() {
    SampleOptions s;
    s.grid_density = 3;
    s.extra_random = 64;
    return s;
}

CoveringCertificate verify_flow_covering(const ToyConfig& cfg, const ToyCoveringParams& params,
                                         int j, const SampleOptions& opts = default_flow_samples());
CoveringCertificate verify_jump_covering(const ToyConfig& cfg, const ToyCoveringParams& params,
                                         int j);

ChainSpec diffusion_chain(const ToyConfig& cfg, const ToyCoveringParams& params);

struct ChartVisit {
    int chart = 0;
    double t_entry = 0.0;  // section y- = sigma
    double t_exit = 0.0;   // section x+ = sigma
    double t_min = 0.0;
    double min_distance = 0.0;  // chart sup-norm distance to T_j
};

struct DiffusionReport {
    ChainSolution solution;
    std::vector<ChartVisit> visits;
    double T = 0.0;
    double c_dist = 0.0;  // max_j min_distance / (T e^{-T})
};

DiffusionReport diffuse(const ToyConfig& cfg, const ToyCoveringParams& params);

}  // namespace toymodel
}  // namespace chainshadow
