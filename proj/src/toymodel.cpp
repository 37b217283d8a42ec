#include "chainshadow/toymodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chainshadow/config.hpp"

namespace chainshadow::toymodel {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

double sq(double x) { return x * x; }

}  // namespace

void ToyConfig::validate() const {
    if (N < 0) throw std::invalid_argument("toymodel: N must be >= 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("toymodel: sigma must be positive");
    if (!(K >= 0.0)) throw std::invalid_argument("toymodel: K must be nonnegative");
    if (std::abs(kappa) > K + 1e-15)
        throw std::invalid_argument("toymodel: |kappa| <= K violated");
    if (std::abs(kappa_c) > K + 1e-15)
        throw std::invalid_argument("toymodel: |kappa_c| <= K violated");
    if (k < 1) throw std::invalid_argument("toymodel: k must be >= 1");
    if (!(G >= 1.5)) throw std::invalid_argument("toymodel: G must be >= 3/2");
    if (!(L >= kSqrt3 - 1e-12)) throw std::invalid_argument("toymodel: L must be >= sqrt(3)");
    if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("toymodel: nu must lie in (0,1)");
    if (!(factor_tilde > 1.0))
        throw std::invalid_argument("toymodel: tilde factor must exceed 1");
    if (T && !(*T > 0.0)) throw std::invalid_argument("toymodel: T must be positive");
}

ToyConfig ToyConfig::desk() { return ToyConfig{}; }

ToyConfig ToyConfig::from_config(const Config& cfg) {
    ToyConfig c;
    const std::string s = "toymodel";
    c.N = static_cast<int>(cfg.get_int(s, "N", c.N));
    c.sigma = cfg.get_double(s, "sigma", c.sigma);
    c.K = cfg.get_double(s, "K", c.K);
    c.kappa = cfg.get_double(s, "kappa", c.K);
    c.kappa_c = Complex(cfg.get_double(s, "kappa_c_re", 0.0),
                        cfg.get_double(s, "kappa_c_im", c.K));
    c.k = static_cast<int>(cfg.get_int(s, "k", c.k));
    c.G = cfg.get_double(s, "G", c.G);
    c.L = cfg.get_double(s, "L", c.L);
    if (cfg.has(s, "T")) c.T = cfg.get_double(s, "T");
    c.nu = cfg.get_double(s, "nu", c.nu);
    c.jump_swap_pm = cfg.get_bool(s, "jump_swap_pm", c.jump_swap_pm);
    c.factor_tilde = cfg.get_double(s, "factor_tilde", c.factor_tilde);
    c.rtol = cfg.get_double(s, "rtol", c.rtol);
    c.atol = cfg.get_double(s, "atol", c.atol);
    c.validate();
    return c;
}

ChartLayout::ChartLayout(int j_, int N_) : j(j_), N(N_) {
    if (j < 0 || j > N) throw std::invalid_argument("chart index out of range");
    for (int k = -1; k <= N + 1; ++k)
        if (k != j - 1 && k != j && k != j + 1) modes.push_back(k);
}

bool ChartLayout::has_mode(int k) const {
    return std::find(modes.begin(), modes.end(), k) != modes.end();
}

int ChartLayout::mode_offset(int k) const {
    auto it = std::find(modes.begin(), modes.end(), k);
    if (it == modes.end())
        throw std::invalid_argument("chart " + std::to_string(j) + " has no mode " +
                                    std::to_string(k));
    return 4 + 2 * static_cast<int>(it - modes.begin());
}

std::vector<int> ChartLayout::past_modes() const {
    std::vector<int> out;
    for (int k : modes)
        if (k < j) out.push_back(k);
    return out;
}

std::vector<int> ChartLayout::future_modes() const {
    std::vector<int> out;
    for (int k : modes)
        if (k > j) out.push_back(k);
    return out;
}

Complex g1(double c_minus, double c_plus) {
    // omega = (-1/2, sqrt3/2), omega^2 = (-1/2, -sqrt3/2)
    return Complex(-0.5 * (c_minus + c_plus), 0.5 * kSqrt3 * (c_minus - c_plus));
}

std::array<double, 2> g2(Complex c) {
    return {-c.real() + c.imag() / kSqrt3, -c.real() - c.imag() / kSqrt3};
}

double derive_lipschitz_g1(int grid) {
    double m = 0.0;
    for (int i = 0; i < grid; ++i)
        for (int s = 0; s < 2; ++s) {
            // |g1| is convex, so the max over the square lies on its edges
            double a = -1.0 + 2.0 * i / (grid - 1);
            double edge = s == 0 ? 1.0 : -1.0;
            m = std::max({m, std::abs(g1(a, edge)), std::abs(g1(edge, a))});
        }
    return m;
}

double derive_lipschitz_g2(int grid) {
    double m = 0.0;
    for (int i = 0; i < grid; ++i) {
        double th = 2.0 * M_PI * i / grid;
        auto [cm, cp] = g2(Complex(std::cos(th), std::sin(th)));
        m = std::max(m, std::max(std::abs(cm), std::abs(cp)));
    }
    return m;
}

namespace {

// |g1(a,b)|^2 = a^2 + b^2 - a b.
double mode_sq(double a, double b) { return a * a + b * b - a * b; }

// Sum of |c|^2 over all non-torus modes in the chart's complex
// representation; state is unscaled.
double mass_s(const ChartLayout& lay, const Vec& v) {
    double s = mode_sq(v[ChartLayout::iYm], v[ChartLayout::iXm]) +
               mode_sq(v[ChartLayout::iYp], v[ChartLayout::iXp]);
    for (std::size_t m = 0; m < lay.modes.size(); ++m) {
        const int off = 4 + 2 * static_cast<int>(m);
        s += sq(v[off]) + sq(v[off + 1]);
    }
    return s;
}

double center_mass(const ChartLayout& lay, const Vec& v) {
    double s = 0.0;
    for (std::size_t m = 0; m < lay.modes.size(); ++m) {
        const int off = 4 + 2 * static_cast<int>(m);
        s += sq(v[off]) + sq(v[off + 1]);
    }
    return s;
}

}  // namespace

Vec rhs(const ToyConfig& cfg, const ChartLayout& lay, const Vec& v) {
    Vec f(v.size());
    const double ym = v[0], xm = v[1], yp = v[2], xp = v[3];
    const double kap = cfg.kappa;
    f[0] = -ym + kap * xm * yp * yp;
    f[1] = xm + kap * ym * xp * xp;
    f[2] = -yp + kap * xp * ym * ym;
    f[3] = xp + kap * yp * xm * xm;
    const double S = mass_s(lay, v);
    const Complex w = 1.0 + cfg.kappa_c * S;
    for (std::size_t m = 0; m < lay.modes.size(); ++m) {
        const int off = 4 + 2 * static_cast<int>(m);
        const double re = v[off], im = v[off + 1];
        // d/dt (re + i im) = i (re + i im) w
        f[off] = -(re * w.imag() + im * w.real());
        f[off + 1] = re * w.real() - im * w.imag();
    }
    return f;
}

Vec flow(const ToyConfig& cfg, const ChartLayout& lay, const Vec& state, double t_from,
         double t_to, ode::Trajectory* traj, const std::optional<ode::Options>& custom) {
    const double T = cfg.T ? *cfg.T : 0.0;
    if (!cfg.T) throw std::invalid_argument("toymodel flow: config has no resolved T");
    if (state.size() != lay.dim()) throw std::invalid_argument("toymodel flow: state size mismatch");

    // Exponentially scaled variables keep every coordinate O(poly(T))
    // through the transit:
    //   y- = Y e^{-t},  x- = X e^{t-2T},  y+ = P e^{-t-T},  x+ = Q e^{t-T},
    //   c  = C e^{-T}.
    auto to_scaled = [&](const Vec& u, double t) {
        Vec w = u;
        w[0] = u[0] * std::exp(t);
        w[1] = u[1] * std::exp(2.0 * T - t);
        w[2] = u[2] * std::exp(t + T);
        w[3] = u[3] * std::exp(T - t);
        for (int i = 4; i < u.size(); ++i) w[i] = u[i] * std::exp(T);
        return w;
    };
    auto from_scaled = [&](const Vec& w, double t) {
        Vec u = w;
        u[0] = w[0] * std::exp(-t);
        u[1] = w[1] * std::exp(t - 2.0 * T);
        u[2] = w[2] * std::exp(-t - T);
        u[3] = w[3] * std::exp(-(T - t));
        for (int i = 4; i < w.size(); ++i) u[i] = w[i] * std::exp(-T);
        return u;
    };

    const double e4 = std::exp(-4.0 * T);
    const double kap = cfg.kappa;
    auto scaled_rhs = [&](double t, const Vec& w) {
        Vec u = from_scaled(w, t);
        const double S = mass_s(lay, u);
        if (center_mass(lay, u) > 1.1)
            throw std::runtime_error("toymodel flow: center mass exceeded 1.1");
        Vec f(w.size());
        f[0] = kap * w[1] * w[2] * w[2] * e4;
        f[1] = kap * w[0] * w[3] * w[3];
        f[2] = kap * w[3] * w[0] * w[0];
        f[3] = kap * w[2] * w[1] * w[1] * e4;
        const Complex om = 1.0 + cfg.kappa_c * S;
        for (int i = 4; i < w.size(); i += 2) {
            const double re = w[i], im = w[i + 1];
            f[i] = -(re * om.imag() + im * om.real());
            f[i + 1] = re * om.real() - im * om.imag();
        }
        return f;
    };

    ode::Options opt;
    if (custom) {
        opt = *custom;
    } else {
        opt.rtol = cfg.rtol;
        opt.atol = cfg.atol;
    }
    opt.h_init = std::min(opt.h_init, 1e-2);

    ode::Trajectory scaled_traj;
    Vec w = ode::integrate(scaled_rhs, t_from, to_scaled(state, t_from), t_to, opt,
                           traj ? &scaled_traj : nullptr);
    if (traj) {
        traj->method = scaled_traj.method + " (scaled)";
        traj->rtol = scaled_traj.rtol;
        traj->atol = scaled_traj.atol;
        for (std::size_t i = 0; i < scaled_traj.size(); ++i) {
            traj->times.push_back(scaled_traj.times[i]);
            traj->states.push_back(from_scaled(scaled_traj.states[i], scaled_traj.times[i]));
            traj->step_errors.push_back(scaled_traj.step_errors[i]);
        }
    }
    return from_scaled(w, t_to);
}

Mat jump_matrix(const ToyConfig& cfg, int j) {
    if (j < 0 || j >= cfg.N)
        throw std::invalid_argument("jump: chart " + std::to_string(j) + " has no successor");
    const ChartLayout lay(j, cfg.N), nxt(j + 1, cfg.N);
    Mat J = Mat::Zero(nxt.dim(), lay.dim());
    J(ChartLayout::iYm, ChartLayout::iXp) = 1.0;  // y-~ = x+
    J(ChartLayout::iXm, ChartLayout::iYp) = 1.0;  // x-~ = y+

    // (x+~, y+~) = g2(c_{j+2}); g2(c) = (-re + im/sqrt3, -re - im/sqrt3)
    {
        const int p = lay.mode_offset(j + 2);
        const int row_first = cfg.jump_swap_pm ? ChartLayout::iXp : ChartLayout::iYp;
        const int row_second = cfg.jump_swap_pm ? ChartLayout::iYp : ChartLayout::iXp;
        J(row_first, p) = -1.0;
        J(row_first, p + 1) = 1.0 / kSqrt3;
        J(row_second, p) = -1.0;
        J(row_second, p + 1) = -1.0 / kSqrt3;
    }
    // c~_{j-1} = g1(x-, y-) in the paper's order (g1(y-, x-) when the
    // swap convention is disabled)
    {
        const int q = nxt.mode_offset(j - 1);
        const int col_a = cfg.jump_swap_pm ? ChartLayout::iXm : ChartLayout::iYm;
        const int col_b = cfg.jump_swap_pm ? ChartLayout::iYm : ChartLayout::iXm;
        J(q, col_a) = -0.5;
        J(q, col_b) = -0.5;
        J(q + 1, col_a) = 0.5 * kSqrt3;
        J(q + 1, col_b) = -0.5 * kSqrt3;
    }
    for (int k : lay.modes) {
        if (k == j + 2) continue;
        const int p = lay.mode_offset(k);
        const int q = nxt.mode_offset(k);
        J(q, p) = 1.0;
        J(q + 1, p + 1) = 1.0;
    }
    return J;
}

MapHandle jump_handle(const ToyConfig& cfg, int j) {
    Mat J = jump_matrix(cfg, j);
    return MapHandle::from_affine({std::move(J), Vec::Zero(ChartLayout(j + 1, cfg.N).dim())},
                                  "J" + std::to_string(j));
}

std::array<double, 4> admissibility_residuals(const ToyConfig& cfg, double T) {
    const double sp = cfg.sigma_prime();
    const double K = cfg.K, G = cfg.G;
    const double Tk = std::pow(T, cfg.k);
    const double f1 = Tk + T * 2.0 * K * sp * sq(Tk + sp);
    const double f2 = Tk + T * 4.0 * K * sp * sp * (Tk + sp);
    const double lhs1 = K * f1 * f2 * f2;
    const double lhs2 = K * f2 * f1 * f1;
    const double r1 = lhs1 > 0.0 ? std::log(lhs1) - T : -1e9;
    const double r2 = lhs2 > 0.0 ? std::log(lhs2) - T : -1e9;
    const double r3 = T * std::exp(-3.0 * T) - sp;
    const double bound4 =
        G * std::exp(-2.0 * T) *
            (sq(Tk + T * (2.0 * K * sp * sq(3.5 * sp))) + sq(Tk + T * (4.0 * K * sp * (3.5 * sp)))) +
        2.0 * cfg.N * std::exp(21.0 * K * G * sp * sp) * std::pow(T, 2 * cfg.k + 1) *
            std::exp(-2.0 * T);
    const double r4 = bound4 - G * sp * sp;
    return {r1, r2, r3, r4};
}

bool is_admissible(const ToyConfig& cfg, double T) {
    const auto r = admissibility_residuals(cfg, T);
    return r[0] < 0.0 && r[1] < 0.0 && r[2] < 0.0 && r[3] < 0.0;
}

double admissible_T(const ToyConfig& cfg) {
    cfg.validate();
    double lo = 1.0, hi = 2.0;
    while (!is_admissible(cfg, hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e4) throw std::runtime_error("admissible_T: no admissible T below 1e4");
    }
    while (hi - lo > 1e-6) {
        double mid = 0.5 * (lo + hi);
        (is_admissible(cfg, mid) ? hi : lo) = mid;
    }
    if (!is_admissible(cfg, hi + 1.0))
        throw std::runtime_error("admissible_T: satisfaction not monotone above the threshold");
    return hi;
}

double resolve_T(const ToyConfig& cfg) {
    if (cfg.T) {
        const auto r = admissibility_residuals(cfg, *cfg.T);
        static const char* names[4] = {"exp-domination-1", "exp-domination-2", "Te^{-3T}<sigma'",
                                       "center-bound-on-T"};
        for (int i = 0; i < 4; ++i)
            if (r[i] >= 0.0)
                throw std::runtime_error(std::string("toymodel: configured T violates ") +
                                         names[i] + " (residual " + std::to_string(r[i]) + ")");
        return *cfg.T;
    }
    return admissible_T(cfg);
}

HyperbolicEnclosure hyperbolic_enclosure(const ToyConfig& cfg, double T, double eta, double a0,
                                         double b0, double d0, double t, double d_radius) {
    const double sp = cfg.sigma_prime();
    if (!(eta > 0.0 && eta < sp))
        throw std::invalid_argument("enclosure: eta must lie in (0, sigma')");
    const double Tk = std::pow(T, cfg.k);
    if (std::abs(a0) > Tk || std::abs(b0) > Tk || std::abs(d0) > Tk)
        throw std::invalid_argument("enclosure: |a0|,|b0|,|d0| must be bounded by T^k");
    if (!is_admissible(cfg, T)) throw std::invalid_argument("enclosure: T is not admissible");
    if (!(t >= 0.0 && t <= T)) throw std::invalid_argument("enclosure: t must lie in [0, T]");

    const double dmag = std::max(std::abs(d0), d_radius >= 0.0 ? d_radius : 2.5 * sp);
    const auto coef = enclosure_stage_coeffs(cfg, 3, dmag);
    HyperbolicEnclosure e;
    auto iv = [](double c, double r) { return Interval{c - r, c + r}; };
    e.ym = iv(eta * std::exp(-t), t * std::exp(-t) * std::exp(-3.0 * T) * coef[0]);
    e.xm = iv(std::exp(-2.0 * T) * a0 * std::exp(t),
              t * std::exp(-2.0 * T) * std::exp(t) * coef[1]);
    e.yp = iv(std::exp(-T) * b0 * std::exp(-t), t * std::exp(-T) * std::exp(-t) * coef[2]);
    e.xp = iv(std::exp(-T) * d0 * std::exp(t), t * std::exp(-4.0 * T) * std::exp(t) * coef[3]);
    return e;
}

std::array<double, 4> enclosure_stage_coeffs(const ToyConfig& cfg, int stage, double d) {
    const double sp = cfg.sigma_prime();
    const double K = cfg.K;
    switch (stage) {
        case 1:
            return {1.0, K * sp * d * d, K * d * sp * sp, 1.0};
        case 2:
        case 3:
            return {1.0, 2.0 * K * sp * sq(d + sp), 4.0 * K * sp * sp * (d + sp), 1.0};
        default:
            throw std::invalid_argument("enclosure stage must be 1, 2 or 3");
    }
}

double center_amplification(const ToyConfig& cfg) {
    const double sp = cfg.sigma_prime();
    return std::exp(21.0 * cfg.K * cfg.G * sp * sp);
}

std::vector<Interval> center_bounds(const ToyConfig& cfg, const std::vector<double>& c0_magnitudes,
                                    double T) {
    const auto r = admissibility_residuals(cfg, T);
    if (r[3] >= 0.0)
        throw std::runtime_error("center_bounds: bound-on-T hypothesis violated (residual " +
                                 std::to_string(r[3]) + ")");
    const double Tk = std::pow(T, cfg.k);
    for (double m : c0_magnitudes)
        if (m * std::exp(T) > Tk)
            throw std::invalid_argument("center_bounds: |c(0)| exceeds the micro size T^k e^{-T}");
    const double A = center_amplification(cfg);
    std::vector<Interval> out;
    for (double m : c0_magnitudes) out.push_back({m * m / A, m * m * A});
    return out;
}

ToyCoveringParams covering_params(const ToyConfig& cfg) {
    cfg.validate();
    ToyCoveringParams p;
    const double T = resolve_T(cfg);
    const double sp = cfg.sigma_prime();
    const double K = cfg.K, L = cfg.L, nu = cfg.nu, sigma = cfg.sigma;

    p.T = T;
    p.Q1 = 2.1 * K * sp * sq(3.1 * sp);
    p.Q2 = 4.1 * K * sp * sp * (3.1 * sp);
    p.Q3 = L * (2.0 * sp / T + p.Q1);
    p.Q3_tilde = cfg.factor_tilde * p.Q3;
    p.A = center_amplification(cfg);
    p.A_tilde = cfg.factor_tilde * p.A;

    p.gamma_out_xm = T * p.Q1;
    p.gamma_out_ym = 2.0 * sp;
    p.r_in_xp = 2.1 * sigma;
    p.r_in_yp = T * p.Q2;

    // near-zero sizes for the directions that are (or just were) dropped
    p.gamma_in_xm = nu * T * (0.1 * K * sp * sq(3.1 * sp));
    p.r_out_yp = nu * T * (0.1 * K * sp * sp * (3.1 * sp));
    p.r_out_xp = nu * 0.09 * sigma;
    p.gamma_in_ym = p.r_out_xp / nu;  // = 0.09 sigma

    // entry recursion (c_p) upward, exit recursion (c_f) downward; the
    // geometric-mean factor keeps every inequality strictly slack.
    const double mid = std::sqrt(p.A * p.A_tilde);
    p.gamma_in_cp.resize(cfg.N + 1);
    p.gamma_out_cp.resize(cfg.N + 1);
    p.r_in_cf.resize(cfg.N + 1);
    p.r_out_cf.resize(cfg.N + 1);
    p.gamma_in_cp[0] = p.Q3_tilde * T;
    for (int j = 1; j <= cfg.N; ++j) p.gamma_in_cp[j] = p.A_tilde * p.gamma_in_cp[j - 1];
    for (int j = 0; j <= cfg.N; ++j) p.gamma_out_cp[j] = mid * p.gamma_in_cp[j];
    p.r_out_cf[cfg.N] = std::max(T * L * p.Q2, 2.1 * L * sigma);
    for (int j = cfg.N - 1; j >= 0; --j) p.r_out_cf[j] = p.A_tilde * p.r_out_cf[j + 1];
    for (int j = 0; j <= cfg.N; ++j) p.r_in_cf[j] = mid * p.r_out_cf[j];

    auto entry_slack = [&](const std::string& name, int j, double lhs, double rhs) {
        double s = rhs > 0.0 ? 1.0 - lhs / rhs : (lhs == 0.0 ? 1.0 - nu : -1.0);
        p.slacks.push_back({name, j, lhs, rhs, s});
    };
    auto exit_slack = [&](const std::string& name, int j, double lhs, double rhs) {
        double s = rhs > 0.0 ? lhs / rhs - 1.0 : (lhs == 0.0 ? 1.0 / nu - 1.0 : 1e9);
        p.slacks.push_back({name, j, lhs, rhs, s});
    };

    for (int j = 0; j <= cfg.N; ++j) {
        entry_slack("cp-flow", j, p.A * p.gamma_in_cp[j], p.gamma_out_cp[j]);
        exit_slack("r-flow-cf", j, p.r_in_cf[j], p.A * p.r_out_cf[j]);
    }
    for (int j = 0; j + 1 <= cfg.N; ++j) {
        entry_slack("tran-cov-cp-1", j, L * (p.gamma_out_ym + p.gamma_out_xm),
                    p.gamma_in_cp[j + 1]);
        entry_slack("cp-i-cond", j, p.gamma_out_cp[j], p.gamma_in_cp[j + 1]);
        entry_slack("tran-cov-entry-x+", j, p.r_out_xp, p.gamma_in_ym);
        entry_slack("tran-cov-entry-y+", j, p.r_out_yp, p.gamma_in_xm);
        exit_slack("rcf-tran-x+", j, p.r_out_cf[j], L * p.r_in_xp);
        exit_slack("rcf-tran-y+", j, p.r_out_cf[j], L * p.r_in_yp);
        exit_slack("rcf-i", j, p.r_out_cf[j], p.r_in_cf[j + 1]);
    }
    entry_slack("r-out-x+", -1, p.r_out_xp * std::exp(-T), 0.09 * sigma);
    entry_slack("gamma-in-x-", -1, p.gamma_in_xm, T * (0.1 * K * sp * sq(3.1 * sp)));
    entry_slack("r-out-y+", -1, p.r_out_yp, T * (0.1 * K * sp * sp * (3.1 * sp)));
    entry_slack("gamma-in-y-", -1, p.gamma_in_ym * std::exp(-T), 0.01 * sigma);

    p.min_slack = 1e300;
    for (const auto& s : p.slacks) p.min_slack = std::min(p.min_slack, s.slack);
    if (p.min_slack <= 0.0) {
        std::string bad;
        for (const auto& s : p.slacks)
            if (s.slack <= 0.0) bad += (bad.empty() ? "" : ", ") + s.name;
        throw std::runtime_error("covering_params: inequality violated: " + bad);
    }

    p.size_bound = std::pow(p.A_tilde, cfg.N) *
                   std::max({2.0 * L * p.Q2, 2.0 * p.Q3, p.Q2, p.Q1, 1.0}) * T;
    double largest = 0.0;
    for (double v : {p.gamma_out_xm, p.gamma_out_ym, p.r_in_xp, p.r_in_yp, p.gamma_in_xm,
                     p.gamma_in_ym, p.r_out_xp, p.r_out_yp})
        largest = std::max(largest, v);
    for (int j = 0; j <= cfg.N; ++j)
        largest = std::max({largest, p.gamma_in_cp[j], p.gamma_out_cp[j], p.r_in_cf[j],
                            p.r_out_cf[j]});
    if (largest > p.size_bound + 1e-12)
        throw std::runtime_error("covering_params: size table exceeds the closing O(T) bound");
    if (largest > std::pow(T, cfg.k))
        throw std::runtime_error("covering_params: size table exceeds T^k");
    return p;
}

ChartSets build_chart_hsets(const ToyConfig& cfg, const ToyCoveringParams& params, int j) {
    const ChartLayout lay(j, cfg.N);
    const double T = params.T;
    const double eT = std::exp(-T), e2T = std::exp(-2.0 * T);

    auto make = [&](double c_ym, double c_xp, double ym_r, double xm_r, double yp_r, double xp_r,
                    double cp_r, double cf_r) {
        Vec center = Vec::Zero(lay.dim());
        center[ChartLayout::iYm] = c_ym;
        center[ChartLayout::iXp] = c_xp;
        std::vector<Block> blocks;
        blocks.push_back({"y-", 1, ym_r, BlockTag::Entry});
        blocks.push_back({"x-", 1, xm_r, BlockTag::Entry});
        blocks.push_back({"y+", 1, yp_r, BlockTag::Exit});
        blocks.push_back({"x+", 1, xp_r, BlockTag::Exit});
        for (int k : lay.modes)
            blocks.push_back({"c" + std::to_string(k), 2, k < j ? cp_r : cf_r,
                              k < j ? BlockTag::Entry : BlockTag::Exit, BlockNorm::Disc});
        return HSet(center, std::move(blocks));
    };

    HSet in = make(cfg.sigma, 0.0, params.gamma_in_ym * eT, params.gamma_in_xm * e2T,
                   params.r_in_yp * eT, params.r_in_xp * eT, params.gamma_in_cp[j] * eT,
                   params.r_in_cf[j] * eT);
    HSet out = make(0.0, cfg.sigma, params.gamma_out_ym * eT, params.gamma_out_xm * eT,
                    params.r_out_yp * e2T, params.r_out_xp * eT, params.gamma_out_cp[j] * eT,
                    params.r_out_cf[j] * eT);
    HSet dropped = out.drop_exit("x+").drop_exit("y+");
    return {std::move(in), std::move(out), std::move(dropped)};
}

MapHandle flow_handle(const ToyConfig& cfg, const ToyCoveringParams& params, int j) {
    ToyConfig c = cfg;
    c.T = params.T;
    const ChartLayout lay(j, cfg.N);
    MapHandle h;
    h.dim_in = h.dim_out = lay.dim();
    h.name = "phi_T@" + std::to_string(j);
    const double T = params.T;
    h.evaluator = [c, lay, T](const Vec& x) { return flow(c, lay, x, 0.0, T); };

    // exit-block linearization in unit coordinates of (N_in, N_out):
    // diagonal gains for y+ and x+, scaled rotation by T for each future mode
    const auto fut = lay.future_modes();
    const int u = 2 + 2 * static_cast<int>(fut.size());
    Mat A = Mat::Zero(u, u);
    A(0, 0) = params.r_in_yp / params.r_out_yp;                        // y+ (micro -> nano)
    A(1, 1) = params.r_in_xp * std::exp(T) / params.r_out_xp;          // x+
    const double s = params.r_in_cf[j] / params.r_out_cf[j];
    for (std::size_t m = 0; m < fut.size(); ++m) {
        const int at = 2 + 2 * static_cast<int>(m);
        A(at, at) = s * std::cos(T);
        A(at, at + 1) = -s * std::sin(T);
        A(at + 1, at) = s * std::sin(T);
        A(at + 1, at + 1) = s * std::cos(T);
    }
    h.exit_linearization = std::move(A);
    return h;
}

CoveringCertificate verify_flow_covering(const ToyConfig& cfg, const ToyCoveringParams& params,
                                         int j, const SampleOptions& opts) {
    const ChartSets sets = build_chart_hsets(cfg, params, j);
    return check_covering_sampled(sets.in, flow_handle(cfg, params, j), sets.out, opts);
}

CoveringCertificate verify_jump_covering(const ToyConfig& cfg, const ToyCoveringParams& params,
                                         int j) {
    if (j < 0 || j >= cfg.N) throw std::invalid_argument("verify_jump_covering: bad chart index");
    const ChartSets from = build_chart_hsets(cfg, params, j);
    const ChartSets to = build_chart_hsets(cfg, params, j + 1);
    return check_covering_affine(from.out_dropped, jump_handle(cfg, j), to.in);
}

ChainSpec diffusion_chain(const ToyConfig& cfg, const ToyCoveringParams& params) {
    ChainSpec spec;
    for (int j = 0; j <= cfg.N; ++j) {
        const ChartSets sets = build_chart_hsets(cfg, params, j);
        spec.add(sets.in);
        spec.add(flow_handle(cfg, params, j));
        spec.add(sets.out);
        if (j < cfg.N) {
            spec.drop("x+");
            spec.drop("y+");
            spec.add(jump_handle(cfg, j));
        }
    }
    return spec;
}

DiffusionReport diffuse(const ToyConfig& cfg, const ToyCoveringParams& params) {
    DiffusionReport rep;
    rep.T = params.T;
    ToyConfig c = cfg;
    c.T = params.T;

    ChainSpec spec = diffusion_chain(cfg, params);
    // The drop-anchor rows are normalized by the nano radius r_out(x+)e^{-T};
    // unit residual 1e-8 already means ~1e-17 absolute on the anchored
    // coordinate, the double-precision floor.
    SolveOptions opts;
    opts.tol = 1e-8;
    rep.solution = solve_chain(spec, opts);

    const double T = params.T;
    for (int j = 0; j <= cfg.N; ++j) {
        const ChartLayout lay(j, cfg.N);
        const Vec entry = rep.solution.itinerary[static_cast<std::size_t>(2 * j)];
        ode::Trajectory traj;
        flow(c, lay, entry, 0.0, T, &traj);
        ChartVisit v;
        v.chart = j;
        v.t_entry = j * T;
        v.t_exit = (j + 1) * T;
        double best = 1e300, best_t = 0.0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const Vec& x = traj.states[i];
            double d = std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2]), std::abs(x[3])});
            for (std::size_t m = 0; m < lay.modes.size(); ++m) {
                const int off = 4 + 2 * static_cast<int>(m);
                d = std::max(d, std::hypot(x[off], x[off + 1]));
            }
            if (d < best) {
                best = d;
                best_t = traj.times[i];
            }
        }
        v.min_distance = best;
        v.t_min = j * T + best_t;
        rep.visits.push_back(v);
    }
    double worst = 0.0;
    for (const auto& v : rep.visits) worst = std::max(worst, v.min_distance);
    rep.c_dist = worst / (T * std::exp(-T));
    return rep;
}

}  // namespace chainshadow::toymodel
