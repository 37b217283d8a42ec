#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chainshadow/triangular.hpp"

using namespace chainshadow;
using namespace chainshadow::triangular;

namespace {

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    int i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

TriangularConfig fig_regime(int which) {
    TriangularConfig c;
    c.n = 4;
    switch (which) {
        case 2:
            c.lambda = {1.0};
            c.mu = {2.0};
            c.x0 = vec({0.1, 0.1, 0.1, 0.1});
            break;
        case 3:
            c.lambda = {1.0};
            c.mu = {1.0};
            c.x0 = vec({0.1, 0.01, 0.01, 0.01});
            break;
        default:
            c.lambda = {2.0};
            c.mu = {1.0};
            c.x0 = vec({0.1, 0.01, 0.001, 0.0001});
            break;
    }
    return c;
}

}  // namespace

TEST_CASE("fixed points are equilibria") {
    TriangularConfig c = fig_regime(2);
    for (int i = 0; i <= c.n; ++i)
        CHECK(vector_field(c, fixed_point(c, i)).norm() == 0.0);
}

TEST_CASE("connecting segments are invariant") {
    TriangularConfig c = fig_regime(4);
    for (int i = 0; i < c.n; ++i) {
        for (double t : {0.1, 0.5, 0.9}) {
            Vec x = fixed_point(c, i);
            x[i] = t;
            Vec f = vector_field(c, x);
            for (int j = 0; j < c.n; ++j)
                if (j != i) CHECK(f[j] == 0.0);
            CHECK(f[i] == doctest::Approx(c.lambda_at(i) * t * (1.0 - t)).epsilon(1e-14));
        }
    }
}

TEST_CASE("logistic component value") {
    TriangularConfig c;
    c.n = 1;
    c.lambda = {1.0};
    c.mu = {0.0};
    c.x0 = vec({0.5});
    CHECK(vector_field(c, vec({0.5}))[0] == doctest::Approx(0.25));
}

TEST_CASE("jacobian matches finite differences and the spectral structure") {
    TriangularConfig c = fig_regime(2);
    Vec x = vec({0.3, 0.7, 0.2, 0.9});
    Mat J = jacobian(c, x);
    const double h = 1e-7;
    for (int j = 0; j < c.n; ++j) {
        Vec xp = x;
        xp[j] += h;
        Vec col = (vector_field(c, xp) - vector_field(c, x)) / h;
        for (int i = 0; i < c.n; ++i) CHECK(std::abs(J(i, j) - col[i]) < 1e-6);
    }
    // eigenvalues at p_i: slots <= i give -lambda, slot i+1 gives lambda_{i+1}
    for (int i = 0; i <= c.n; ++i) {
        Mat Jp = jacobian(c, fixed_point(c, i));
        for (int j = 0; j < c.n; ++j) {
            if (j < i)
                CHECK(Jp(j, j) == doctest::Approx(-c.lambda_at(j)));
            else if (j == i)
                CHECK(Jp(j, j) == doctest::Approx(c.lambda_at(j)));
            else
                CHECK(Jp(j, j) == doctest::Approx(c.lambda_at(j) - c.mu_at(j)));
        }
    }
}

TEST_CASE("figure regimes reach the all-ones state by t = 60") {
    for (int which : {2, 3, 4}) {
        CAPTURE(which);
        TriangularConfig c = fig_regime(which);
        auto traj = integrate(c);
        const Vec& xf = traj.back();
        for (int i = 0; i < c.n; ++i) CHECK(std::abs(xf[i] - 1.0) < 1e-3);
        for (const Vec& x : traj.states) {
            CHECK(x.minCoeff() > 0.0);
            CHECK(x.maxCoeff() < 1.0 + 1e-6);
        }
        // staircase: ordered 0.9-crossings
        auto times = transition_times(traj, 0.9);
        for (int i = 0; i < c.n; ++i) REQUIRE(times[i].has_value());
        for (int i = 1; i < c.n; ++i) CHECK(*times[i] > *times[i - 1]);
    }
}

TEST_CASE("closed form reproduces the logistic solution") {
    TriangularConfig c;
    c.n = 1;
    c.lambda = {1.0};
    c.mu = {0.0};
    c.x0 = vec({0.1});
    const double t = std::log(9.0);
    Vec x = closed_form(c, t, 2000);
    CHECK(x[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(closed_form(c, 0.0, 100)[0] == 0.1);

    auto traj = integrate(c);
    auto times = transition_times(traj, 0.5);
    CHECK(*times[0] == doctest::Approx(std::log(9.0)).epsilon(1e-4));
}

TEST_CASE("closed form agrees with integration at t = 10") {
    TriangularConfig c = fig_regime(2);
    c.t_end = 10.0;
    auto traj = integrate(c);
    Vec xc = closed_form(c, 10.0, 4000);
    CHECK((traj.back() - xc).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("coordinates are eventually monotone along the figure regimes") {
    for (int which : {2, 3, 4}) {
        TriangularConfig c = fig_regime(which);
        auto traj = integrate(c);
        // from the midpoint on, all coordinates increase
        for (std::size_t j = traj.size() / 2; j + 1 < traj.size(); ++j)
            for (int i = 0; i < c.n; ++i) CHECK(traj.states[j + 1][i] >= traj.states[j][i] - 1e-9);
    }
}

TEST_CASE("threshold zero crosses at the initial time") {
    TriangularConfig c = fig_regime(2);
    auto traj = integrate(c);
    for (auto& t : transition_times(traj, 0.0)) CHECK(*t == 0.0);
}

TEST_CASE("config validation") {
    TriangularConfig c = fig_regime(2);
    c.lambda = {-1.0};
    CHECK_THROWS(c.validate());
    c = fig_regime(2);
    c.x0[2] = 1.5;
    CHECK_THROWS(c.validate());
    c = fig_regime(2);
    CHECK_THROWS(closed_form(c, 1.0, 1));
}
