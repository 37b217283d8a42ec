#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "chainshadow/toymodel.hpp"

using namespace chainshadow;
using namespace chainshadow::toymodel;

namespace {

Vec zero_state(const ChartLayout& lay) { return Vec::Zero(lay.dim()); }

void set_mode(const ChartLayout& lay, Vec& v, int k, Complex c) {
    const int off = lay.mode_offset(k);
    v[off] = c.real();
    v[off + 1] = c.imag();
}

Complex get_mode(const ChartLayout& lay, const Vec& v, int k) {
    const int off = lay.mode_offset(k);
    return {v[off], v[off + 1]};
}

}  // namespace

TEST_CASE("chart layouts are uniform and the padded modes bracket the range") {
    ToyConfig cfg = ToyConfig::desk();
    for (int j = 0; j <= cfg.N; ++j) {
        ChartLayout lay(j, cfg.N);
        CHECK(lay.dim() == 4 + 2 * cfg.N);
        CHECK_FALSE(lay.has_mode(j));
        CHECK_FALSE(lay.has_mode(j - 1));
        CHECK_FALSE(lay.has_mode(j + 1));
        CHECK(static_cast<int>(lay.past_modes().size()) == j);
        CHECK(static_cast<int>(lay.future_modes().size()) == cfg.N - j);
    }
    CHECK(ChartLayout(0, 3).past_modes().empty());
    CHECK(ChartLayout(0, 3).has_mode(-1) == false);  // -1 is hyperbolic in chart 0
    CHECK(ChartLayout(1, 3).has_mode(-1));
}

TEST_CASE("g1 and g2 are exact inverses") {
    Complex w = g1(1.0, 0.0);
    CHECK(w.real() == doctest::Approx(-0.5));
    CHECK(w.imag() == doctest::Approx(std::sqrt(3.0) / 2.0));
    Complex m1 = g1(1.0, 1.0);  // omega + omega^2 = -1
    CHECK(m1.real() == doctest::Approx(-1.0));
    CHECK(std::abs(m1.imag()) < 1e-15);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        double a = unif(rng), b = unif(rng);
        auto [am, ap] = g2(g1(a, b));
        CHECK(std::abs(am - a) < 1e-14);
        CHECK(std::abs(ap - b) < 1e-14);
    }
}

TEST_CASE("default Lipschitz constant dominates the derived ones") {
    const double l1 = derive_lipschitz_g1();
    const double l2 = derive_lipschitz_g2();
    CHECK(l1 == doctest::Approx(std::sqrt(3.0)).epsilon(1e-6));
    CHECK(l2 == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-6));
    ToyConfig cfg = ToyConfig::desk();
    CHECK(cfg.L >= l1 - 1e-9);
    CHECK(cfg.L >= l2 - 1e-9);
}

TEST_CASE("vector field on distinguished states") {
    ToyConfig cfg = ToyConfig::desk();
    ChartLayout lay(1, cfg.N);

    // fixed point
    CHECK(rhs(cfg, lay, zero_state(lay)).norm() == 0.0);

    // heteroclinic escape: only x+ nonzero evolves as x+' = x+
    Vec v = zero_state(lay);
    v[ChartLayout::iXp] = 0.37;
    Vec f = rhs(cfg, lay, v);
    CHECK(f[ChartLayout::iXp] == doctest::Approx(0.37));
    f[ChartLayout::iXp] = 0.0;
    // modes rotate but the hyperbolic rest stays zero
    for (int i = 0; i < 4; ++i) CHECK(f[i] == 0.0);

    // kappa = 0: pure linear saddle plus rotation
    ToyConfig lin = cfg;
    lin.kappa = 0.0;
    lin.kappa_c = 0.0;
    Vec w = Vec::Random(lay.dim());
    Vec g = rhs(lin, lay, w);
    CHECK(g[0] == doctest::Approx(-w[0]));
    CHECK(g[1] == doctest::Approx(w[1]));
    CHECK(g[2] == doctest::Approx(-w[2]));
    CHECK(g[3] == doctest::Approx(w[3]));
    for (std::size_t m = 0; m < lay.modes.size(); ++m) {
        const int off = 4 + 2 * static_cast<int>(m);
        CHECK(g[off] == doctest::Approx(-w[off + 1]));
        CHECK(g[off + 1] == doctest::Approx(w[off]));
    }

    // the O-term bound |O(z)| <= K |z| holds by the factored form
    Vec big = Vec::Random(lay.dim()) * 2.0;
    Vec fb = rhs(cfg, lay, big);
    const double ym = big[0], xm = big[1], yp = big[2], xp = big[3];
    CHECK(std::abs(fb[0] + ym) <= cfg.K * std::abs(xm * yp * yp) + 1e-15);
    CHECK(std::abs(fb[1] - xm) <= cfg.K * std::abs(ym * xp * xp) + 1e-15);
}

TEST_CASE("flow reproduces the linear solution when kappa vanishes") {
    ToyConfig cfg = ToyConfig::desk();
    cfg.kappa = 0.0;
    cfg.kappa_c = 0.0;
    cfg.T = 8.0;
    ChartLayout lay(1, cfg.N);
    Vec v = zero_state(lay);
    v[ChartLayout::iXp] = 1e-4;
    v[ChartLayout::iYm] = 0.09;
    set_mode(lay, v, 3, Complex(1e-4, -2e-5));
    const double t = 5.0;
    Vec out = flow(cfg, lay, v, 0.0, t);
    CHECK(out[ChartLayout::iXp] ==
          doctest::Approx(1e-4 * std::exp(t)).epsilon(1e-10));
    CHECK(out[ChartLayout::iYm] == doctest::Approx(0.09 * std::exp(-t)).epsilon(1e-10));
    Complex c = get_mode(lay, out, 3);
    CHECK(std::abs(c) == doctest::Approx(std::abs(Complex(1e-4, -2e-5))).epsilon(1e-10));
}

TEST_CASE("mode magnitudes are conserved for real center coupling") {
    ToyConfig cfg = ToyConfig::desk();
    cfg.kappa_c = Complex(cfg.K, 0.0);  // real coupling: Im g = 0
    cfg.T = 8.0;
    ChartLayout lay(2, cfg.N);
    Vec v = zero_state(lay);
    v[ChartLayout::iYm] = 0.1;
    v[ChartLayout::iXp] = 2e-4;
    set_mode(lay, v, 0, Complex(3e-4, 1e-4));
    Vec out = flow(cfg, lay, v, 0.0, 8.0);
    CHECK(std::abs(get_mode(lay, out, 0)) ==
          doctest::Approx(std::abs(Complex(3e-4, 1e-4))).epsilon(1e-11));
}

TEST_CASE("flow satisfies the group property") {
    ToyConfig cfg = ToyConfig::desk();
    cfg.T = 8.0;
    ChartLayout lay(1, cfg.N);
    Vec v = zero_state(lay);
    v[ChartLayout::iYm] = 0.1;
    v[ChartLayout::iXm] = 1e-7;
    v[ChartLayout::iYp] = 1e-4;
    v[ChartLayout::iXp] = 2e-4;
    set_mode(lay, v, 3, Complex(1e-4, 5e-5));
    Vec once = flow(cfg, lay, v, 0.0, 7.0);
    Vec split = flow(cfg, lay, flow(cfg, lay, v, 0.0, 3.0), 3.0, 7.0);
    CHECK((once - split).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("runaway center mass is flagged") {
    ToyConfig cfg = ToyConfig::desk();
    cfg.T = 8.0;
    ChartLayout lay(1, cfg.N);
    Vec v = zero_state(lay);
    set_mode(lay, v, 3, Complex(1.2, 0.0));  // |c|^2 = 1.44 > 1.1
    CHECK_THROWS(flow(cfg, lay, v, 0.0, 1.0));
}

TEST_CASE("jump maps the heteroclinic exit state onto the entry state") {
    ToyConfig cfg = ToyConfig::desk();
    for (int j = 0; j < cfg.N; ++j) {
        ChartLayout lay(j, cfg.N), nxt(j + 1, cfg.N);
        Vec v = zero_state(lay);
        v[ChartLayout::iXp] = cfg.sigma;
        Vec w = jump_matrix(cfg, j) * v;
        CHECK(w[ChartLayout::iYm] == doctest::Approx(cfg.sigma));
        w[ChartLayout::iYm] = 0.0;
        CHECK(w.cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK_THROWS(jump_matrix(cfg, cfg.N));  // top chart has no successor
}

TEST_CASE("jump is linear, invertible, and consistent with g1/g2") {
    ToyConfig cfg = ToyConfig::desk();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-0.3, 0.3);
    for (int j = 0; j < cfg.N; ++j) {
        Mat J = jump_matrix(cfg, j);
        CHECK(std::abs(J.partialPivLu().determinant()) > 1e-12);
        ChartLayout lay(j, cfg.N), nxt(j + 1, cfg.N);
        Mat Jinv = J.inverse();
        for (int trial = 0; trial < 20; ++trial) {
            Vec v(lay.dim());
            for (int i = 0; i < v.size(); ++i) v[i] = unif(rng);
            CHECK((Jinv * (J * v) - v).cwiseAbs().maxCoeff() < 1e-14);
        }
        // paper's argument order: new mode j-1 is g1(x-, y-)
        Vec v = zero_state(lay);
        v[ChartLayout::iXm] = 0.2;
        v[ChartLayout::iYm] = -0.1;
        Vec w = J * v;
        Complex expect = g1(0.2, -0.1);
        CHECK(get_mode(nxt, w, j - 1).real() == doctest::Approx(expect.real()));
        CHECK(get_mode(nxt, w, j - 1).imag() == doctest::Approx(expect.imag()));
    }
}

TEST_CASE("admissibility search brackets the threshold") {
    ToyConfig cfg = ToyConfig::desk();
    const double T = admissible_T(cfg);
    CHECK(T > 5.0);
    CHECK(T < 15.0);
    auto r = admissibility_residuals(cfg, T);
    for (double x : r) CHECK(x < 0.0);
    CHECK_FALSE(is_admissible(cfg, T - 0.5));
    CHECK(is_admissible(cfg, T + 1.0));

    // K = 0 kills the exponential-domination constraints
    ToyConfig k0 = cfg;
    k0.K = 0.0;
    k0.kappa = 0.0;
    k0.kappa_c = 0.0;
    auto r0 = admissibility_residuals(k0, 5.0);
    CHECK(r0[0] == -1e9);
    CHECK(r0[1] == -1e9);
    CHECK(admissible_T(k0) < 12.0);

    ToyConfig bad = cfg;
    bad.T = 2.0;
    CHECK_THROWS(resolve_T(bad));
}

TEST_CASE("enclosure degenerates to the initial data at t = 0") {
    ToyConfig cfg = ToyConfig::desk();
    const double T = admissible_T(cfg);
    auto e = hyperbolic_enclosure(cfg, T, 0.09, 1.0, -2.0, 0.1, 0.0);
    CHECK(e.ym.lo == e.ym.hi);
    CHECK(e.ym.lo == doctest::Approx(0.09));
    CHECK(e.xm.lo == doctest::Approx(std::exp(-2.0 * T)));
    CHECK(e.yp.hi == doctest::Approx(-2.0 * std::exp(-T)));
    CHECK(e.xp.lo == doctest::Approx(0.1 * std::exp(-T)));
}

TEST_CASE("stage coefficients stabilize at the second iterate") {
    ToyConfig cfg = ToyConfig::desk();
    const double d = 2.5 * cfg.sigma_prime();
    auto s1 = enclosure_stage_coeffs(cfg, 1, d);
    auto s2 = enclosure_stage_coeffs(cfg, 2, d);
    auto s3 = enclosure_stage_coeffs(cfg, 3, d);
    CHECK(s2 == s3);
    CHECK(s1[0] == s2[0]);  // y- coefficient unchanged by the iteration
    CHECK(s1[3] == s2[3]);  // x+ coefficient unchanged by the iteration
    CHECK(s2[1] > s1[1]);
    CHECK(s2[2] > s1[2]);
}

TEST_CASE("integrated trajectories respect the enclosures and center bounds") {
    ToyConfig cfg = ToyConfig::desk();
    const double T = admissible_T(cfg);
    cfg.T = T;
    const double sp = cfg.sigma_prime();
    const double Tk = std::pow(T, cfg.k);
    ChartLayout lay(1, cfg.N);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u01(0.01, 0.99);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);

    ode::Options tight;
    tight.rtol = 3e-14;
    tight.atol = 1e-18;

    const double A = center_amplification(cfg);
    for (int trial = 0; trial < 20; ++trial) {
        const double eta = sp * u01(rng);
        const double a0 = Tk * sym(rng);
        const double b0 = Tk * sym(rng);
        const double d0 = 2.5 * sp * sym(rng);
        Vec v = zero_state(lay);
        v[ChartLayout::iYm] = eta;
        v[ChartLayout::iXm] = a0 * std::exp(-2.0 * T);
        v[ChartLayout::iYp] = b0 * std::exp(-T);
        v[ChartLayout::iXp] = d0 * std::exp(-T);
        std::vector<double> mags;
        for (int k : lay.modes) {
            const double r = Tk * u01(rng) * std::exp(-T);
            const double th = 2.0 * M_PI * u01(rng);
            set_mode(lay, v, k, std::polar(r, th));
            mags.push_back(r);
        }
        auto cb = center_bounds(cfg, mags, T);
        Vec x = v;
        double t = 0.0;
        for (int step = 1; step <= 10; ++step) {
            const double tn = T * step / 10.0;
            x = flow(cfg, lay, x, t, tn, nullptr, tight);
            t = tn;
            auto e = hyperbolic_enclosure(cfg, T, eta, a0, b0, d0, t);
            CHECK(e.ym.contains(x[0], 1e-16));
            CHECK(e.xm.contains(x[1], 1e-16));
            CHECK(e.yp.contains(x[2], 1e-16));
            CHECK(e.xp.contains(x[3], 1e-16));
            for (std::size_t m = 0; m < lay.modes.size(); ++m) {
                const double msq = std::norm(get_mode(lay, x, lay.modes[m]));
                CHECK(msq >= cb[m].lo - 1e-20);
                CHECK(msq <= cb[m].hi + 1e-20);
            }
        }
    }

    // kappa = 0 keeps the trajectory at the interval centers exactly
    ToyConfig lin = cfg;
    lin.kappa = 0.0;
    Vec v = zero_state(lay);
    v[ChartLayout::iYm] = 0.05;
    v[ChartLayout::iXp] = 0.2 * std::exp(-T);
    Vec out = flow(lin, lay, v, 0.0, T / 2.0, nullptr, tight);
    auto e = hyperbolic_enclosure(lin, T, 0.05, 0.0, 0.0, 0.2, T / 2.0);
    CHECK(out[0] == doctest::Approx(0.5 * (e.ym.lo + e.ym.hi)).epsilon(1e-10));
    CHECK(out[3] == doctest::Approx(0.5 * (e.xp.lo + e.xp.hi)).epsilon(1e-10));
}

TEST_CASE("center amplification constant") {
    ToyConfig cfg = ToyConfig::desk();
    const double sp = cfg.sigma_prime();
    const double expect = std::exp(21.0 * 1e-3 * 1.5 * sp * sp);
    CHECK(center_amplification(cfg) == doctest::Approx(expect));
    CHECK(expect == doctest::Approx(1.0 + 3.2e-4).epsilon(1e-2));

    ToyConfig k0 = cfg;
    k0.K = 0.0;
    k0.kappa = 0.0;
    k0.kappa_c = 0.0;
    CHECK(center_amplification(k0) == 1.0);
    auto b = center_bounds(k0, {1e-4}, admissible_T(k0));
    CHECK(b[0].lo == b[0].hi);

    CHECK_THROWS(center_bounds(cfg, {1e-4}, 2.0));  // bound-on-T violated
}

TEST_CASE("covering parameters satisfy every inequality with positive slack") {
    ToyConfig cfg = ToyConfig::desk();
    auto p = covering_params(cfg);
    CHECK(p.min_slack > 0.0);
    CHECK(p.slacks.size() >= 13);
    // exactly the 13 named families appear
    std::vector<std::string> names;
    for (const auto& s : p.slacks)
        if (std::find(names.begin(), names.end(), s.name) == names.end()) names.push_back(s.name);
    CHECK(names.size() == 13);

    CHECK(p.Q1 == doctest::Approx(2.1 * cfg.K * cfg.sigma_prime() *
                                  std::pow(3.1 * cfg.sigma_prime(), 2)));
    CHECK(p.r_in_xp == doctest::Approx(2.1 * cfg.sigma));
    CHECK(p.gamma_out_ym == doctest::Approx(2.0 * cfg.sigma_prime()));
    CHECK(p.r_out_xp == doctest::Approx(cfg.nu * 0.09 * cfg.sigma));
    // entry recursion
    for (int j = 0; j + 1 <= cfg.N; ++j)
        CHECK(p.gamma_in_cp[j + 1] == doctest::Approx(p.A_tilde * p.gamma_in_cp[j]));
    CHECK(p.r_out_cf[cfg.N] ==
          doctest::Approx(std::max(p.T * cfg.L * p.Q2, 2.1 * cfg.L * cfg.sigma)));
}

TEST_CASE("K = 0 degenerates the parameter tables as expected") {
    ToyConfig cfg = ToyConfig::desk();
    cfg.K = 0.0;
    cfg.kappa = 0.0;
    cfg.kappa_c = 0.0;
    auto p = covering_params(cfg);
    CHECK(p.Q1 == 0.0);
    CHECK(p.Q2 == 0.0);
    CHECK(p.A == 1.0);
    CHECK(p.Q3 == doctest::Approx(2.0 * cfg.L * cfg.sigma_prime() / p.T));
    CHECK(p.gamma_in_cp[0] == doctest::Approx(p.Q3_tilde * p.T));
    CHECK(p.min_slack > 0.0);
}

TEST_CASE("chart h-sets count exit dimensions by block") {
    ToyConfig cfg = ToyConfig::desk();
    auto p = covering_params(cfg);
    for (int j = 0; j <= cfg.N; ++j) {
        ChartSets s = build_chart_hsets(cfg, p, j);
        const int fut = cfg.N - j;
        CHECK(s.in.exit_dim() == 2 + 2 * fut);
        CHECK(s.out_dropped.exit_dim() == 2 * fut);
        CHECK(s.in.center()[ChartLayout::iYm] == doctest::Approx(cfg.sigma));
        CHECK(s.out.center()[ChartLayout::iXp] == doctest::Approx(cfg.sigma));
        if (j == 0) {
            for (const auto& b : s.in.blocks())
                if (b.label.rfind("c", 0) == 0) CHECK(b.tag == BlockTag::Exit);
        }
    }
}

TEST_CASE("jump coverings certify exactly and margins match the slacks") {
    ToyConfig cfg = ToyConfig::desk();
    auto p = covering_params(cfg);
    for (int j = 0; j < cfg.N; ++j) {
        auto cert = verify_jump_covering(cfg, p, j);
        CAPTURE(j);
        CHECK(cert.pass);
        CHECK(cert.rigorous());
        CHECK(cert.exit_margin > 0.0);
        CHECK(cert.entry_margin > 0.0);

        // Interior jumps carry identity-linked c_p/c_f blocks whose ratio
        // margins are the binding inequality slacks, with identical
        // arithmetic on both sides. Edge jumps lack those links, so only
        // positivity is asserted there.
        if (j >= 1 && j <= cfg.N - 2) {
            double entry_slack = 1e300, exit_slack = 1e300;
            for (const auto& s : p.slacks) {
                if (s.j != j) continue;
                if (s.name == "tran-cov-cp-1" || s.name == "cp-i-cond" ||
                    s.name == "tran-cov-entry-x+" || s.name == "tran-cov-entry-y+")
                    entry_slack = std::min(entry_slack, s.slack);
                if (s.name == "rcf-tran-x+" || s.name == "rcf-tran-y+" || s.name == "rcf-i")
                    exit_slack = std::min(exit_slack, s.slack);
            }
            // the exact checker deflates margins by 1e-10 against rounding
            CHECK(std::abs(cert.entry_margin + 1e-10 - entry_slack) < 1e-12);
            CHECK(std::abs(cert.exit_margin + 1e-10 - exit_slack) < 1e-12);
        }
    }
}

TEST_CASE("a shrunk entry size breaks the jump covering") {
    ToyConfig cfg = ToyConfig::desk();
    auto p = covering_params(cfg);
    auto bad = p;
    for (double& g : bad.gamma_in_cp)
        g = 0.9 * cfg.L * (p.gamma_out_ym + p.gamma_out_xm);  // below tran-cov-cp-1
    bool failed = false;
    for (int j = 0; j < cfg.N; ++j)
        if (!verify_jump_covering(cfg, bad, j).pass) failed = true;
    CHECK(failed);
}

TEST_CASE("flow covering passes on a coarse sample grid") {
    ToyConfig cfg = ToyConfig::desk();
    auto p = covering_params(cfg);
    SampleOptions so;
    so.grid_density = 2;
    so.extra_random = 16;
    so.seed = 99;
    for (int j : {0, 1}) {
        auto cert = verify_flow_covering(cfg, p, j, so);
        CAPTURE(j);
        CHECK(cert.pass);
        CHECK_FALSE(cert.rigorous());
        CHECK(cert.exit_margin > 0.0);
        CHECK(cert.entry_margin > 0.0);
        CHECK(cert.degree.value() == 1);
    }
}

TEST_CASE("kappa = 0 flow covering margins match the closed-form linear flow") {
    ToyConfig cfg = ToyConfig::desk();
    cfg.kappa = 0.0;
    cfg.kappa_c = 0.0;  // K stays positive: same parameter tables
    auto p = covering_params(cfg);
    SampleOptions so;
    so.grid_density = 3;
    so.extra_random = 0;
    auto cert = verify_flow_covering(cfg, p, 1, so);
    CHECK(cert.pass);
    const double T = p.T;
    // entry margin: the y- block image dominates;
    // |y-(T)| = (sigma + gamma_in_ym e^{-T}) e^{-T} against 2 sigma' e^{-T}
    double ym_ratio = (cfg.sigma + p.gamma_in_ym * std::exp(-T)) / p.gamma_out_ym;
    double cp_ratio = p.gamma_in_cp[1] / p.gamma_out_cp[1];
    double xm_ratio = p.gamma_in_xm * std::exp(-T) / p.gamma_out_xm;
    double expect_entry = 1.0 - std::max({ym_ratio, cp_ratio, xm_ratio});
    CHECK(cert.entry_margin == doctest::Approx(expect_entry).epsilon(1e-8));

    // exit margin over the grid: x+ images sit at 0 or +-2.1 sigma, so every
    // sample clears the macro-centered x+ block by sigma / (nano radius)
    double expect_exit = cfg.sigma / (p.r_out_xp * std::exp(-T)) - 1.0;
    CHECK(cert.exit_margin == doctest::Approx(expect_exit).epsilon(1e-6));

    // the true boundary minimum sits on the preimage of the section
    // x+(T) = sigma, where the binding gain is the c_f contraction ratio
    ToyConfig resolved = cfg;
    resolved.T = T;
    ChartLayout lay(1, cfg.N);
    ChartSets sets = build_chart_hsets(cfg, p, 1);
    Vec unit = Vec::Zero(lay.dim());
    unit[ChartLayout::iXp] = 1.0 / 2.1;               // x+(0) = sigma e^{-T}
    unit[sets.in.block_offset(static_cast<std::size_t>(sets.in.block_index("c3")))] = 1.0;
    Vec image = sets.out.to_unit(
        flow(resolved, lay, sets.in.from_unit(unit), 0.0, T));
    double worst = 0.0;
    for (std::size_t b = 0; b < sets.out.blocks().size(); ++b)
        if (sets.out.blocks()[b].tag == BlockTag::Exit)
            worst = std::max(worst, sets.out.block_unit_norm(image, b));
    // x+ lands exactly on the section center, y+ decays to nothing, and the
    // c3 boundary circle contracts by exactly r_in_cf / r_out_cf
    CHECK(worst == doctest::Approx(p.r_in_cf[1] / p.r_out_cf[1]).epsilon(1e-8));
}

TEST_CASE("halved transit time is flagged as inadmissible") {
    ToyConfig cfg = ToyConfig::desk();
    const double T = admissible_T(cfg);
    CHECK_FALSE(is_admissible(cfg, T / 2.0));
    ToyConfig bad = cfg;
    bad.T = T / 2.0;
    CHECK_THROWS(covering_params(bad));
}

TEST_CASE("single-chart diffusion run (N = 0)") {
    ToyConfig cfg = ToyConfig::desk();
    cfg.N = 0;
    auto p = covering_params(cfg);
    auto rep = diffuse(cfg, p);
    CHECK(rep.solution.converged);
    CHECK(rep.solution.interior);
    REQUIRE(rep.visits.size() == 1);
    CHECK(rep.visits[0].min_distance < 10.0 * p.T * std::exp(-p.T));
}

TEST_CASE("diffusion across two tori with itinerary sections") {
    ToyConfig cfg = ToyConfig::desk();
    cfg.N = 2;
    auto p = covering_params(cfg);
    auto rep = diffuse(cfg, p);
    REQUIRE(rep.solution.converged);
    CHECK(rep.solution.interior);
    CHECK(rep.solution.residual < 1e-8);
    REQUIRE(rep.visits.size() == 3);
    for (const auto& v : rep.visits) {
        CAPTURE(v.chart);
        CHECK(v.min_distance <= 10.0 * p.T * std::exp(-p.T));
        CHECK(v.t_entry < v.t_min);
        CHECK(v.t_min < v.t_exit);
    }
    // entry/exit section hits: y- = sigma at each in-set, x+ = sigma at out
    const ChainView view = ChainView::build(diffusion_chain(cfg, p));
    for (int j = 0; j <= cfg.N; ++j) {
        const Vec& in_pt = rep.solution.itinerary[static_cast<std::size_t>(2 * j)];
        const Vec& out_pt = rep.solution.itinerary[static_cast<std::size_t>(2 * j + 1)];
        CHECK(in_pt[ChartLayout::iYm] == doctest::Approx(cfg.sigma).epsilon(1e-9));
        CHECK(out_pt[ChartLayout::iXp] == doctest::Approx(cfg.sigma).epsilon(1e-9));
    }
}

TEST_CASE("distances shrink when the transit time grows") {
    ToyConfig cfg = ToyConfig::desk();
    cfg.N = 1;
    auto p1 = covering_params(cfg);
    auto r1 = diffuse(cfg, p1);
    ToyConfig longer = cfg;
    longer.T = p1.T + 2.0;
    auto p2 = covering_params(longer);
    auto r2 = diffuse(longer, p2);
    REQUIRE(r1.solution.converged);
    REQUIRE(r2.solution.converged);
    for (std::size_t i = 0; i < r1.visits.size(); ++i)
        CHECK(r2.visits[i].min_distance < r1.visits[i].min_distance);
}

TEST_CASE("config validation") {
    ToyConfig cfg = ToyConfig::desk();
    cfg.kappa = 2.0 * cfg.K;
    CHECK_THROWS(cfg.validate());
    cfg = ToyConfig::desk();
    cfg.L = 1.0;  // below sqrt(3)
    CHECK_THROWS(cfg.validate());
    cfg = ToyConfig::desk();
    CHECK(cfg.sigma_prime() == doctest::Approx(1.01 * cfg.sigma));
}
