#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "chainshadow/geometry.hpp"

using namespace chainshadow;

namespace {

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    int i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

HSet random_hset(std::mt19937_64& rng, int max_dim = 5) {
    std::uniform_int_distribution<int> dimd(1, max_dim);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    std::uniform_real_distribution<double> rad(0.1, 3.0);
    const int nblocks = dimd(rng) % 3 + 1;
    std::vector<Block> blocks;
    int n = 0;
    for (int b = 0; b < nblocks; ++b) {
        Block blk;
        blk.label = "b" + std::to_string(b);
        blk.dim = dimd(rng);
        blk.radius = rad(rng);
        blk.tag = rng() % 2 ? BlockTag::Exit : BlockTag::Entry;
        if (blk.dim == 2 && rng() % 2) blk.norm = BlockNorm::Disc;
        n += blk.dim;
        blocks.push_back(blk);
    }
    Vec center(n);
    for (int i = 0; i < n; ++i) center[i] = unif(rng);
    if (rng() % 2) {
        Mat B;
        do {
            B = Mat::Random(n, n) + 2.0 * Mat::Identity(n, n);
        } while (std::abs(B.determinant()) < 1e-3);
        return HSet(center, B, std::move(blocks));
    }
    return HSet(center, std::move(blocks));
}

}  // namespace

TEST_CASE("unit map basics") {
    HSet h = natural_hset(vec({1.0, 2.0, 3.0}), 2, 0.5, 1, 2.0);
    CHECK(h.dim() == 3);
    CHECK(h.exit_dim() == 2);
    CHECK(h.entry_dim() == 1);
    CHECK(h.to_unit(h.center()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    // unit vector in the exit block maps to center + radius * direction
    Vec v = vec({1.0, 0.0, 0.0});
    CHECK((h.from_unit(v) - vec({1.5, 2.0, 3.0})).cwiseAbs().maxCoeff() ==
          doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("incoming-set displacement maps to unit coordinate 1") {
    // cube of half-width eps around q_inc; offset of eps along the first
    // block direction lands on unit coordinate 1
    const double eps = 0.1, sigma = 0.05;
    Vec q_inc = vec({0.0, sigma, 0.0, 0.0});
    HSet h = natural_hset(q_inc, {eps, eps}, {eps, eps});
    Vec x = q_inc;
    x[0] += eps;
    Vec u = h.to_unit(x);
    CHECK(u[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(u.tail(3).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("round trip to 1e-12 on 100 random points") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-10.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        HSet h = random_hset(rng);
        Vec x(h.dim());
        for (int i = 0; i < h.dim(); ++i) x[i] = h.center()[i] + unif(rng);
        CHECK((h.from_unit(h.to_unit(x)) - x).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("classification") {
    HSet h = natural_hset(vec({0.0, 0.0}), 1, 1.0, 1, 1.0);
    auto c = classify(h, vec({0.0, 0.0}));
    CHECK(c.inside);
    CHECK_FALSE(c.on_exit_boundary);
    CHECK_FALSE(c.on_entry_boundary);

    c = classify(h, vec({1.0, 0.5}));
    CHECK(c.inside);
    CHECK(c.on_exit_boundary);
    CHECK_FALSE(c.on_entry_boundary);

    c = classify(h, vec({1.5, 0.5}));
    CHECK_FALSE(c.inside);

    c = classify(h, vec({0.5, 1.0}));
    CHECK(c.on_entry_boundary);
}

TEST_CASE("transpose swaps tags and is an involution") {
    HSet h = natural_hset(vec({0.0, 0.0, 0.0}), 3, 1.0, 0, 1.0);
    CHECK(h.entry_dim() == 0);
    HSet t = h.transpose();
    CHECK(t.exit_dim() == 0);
    CHECK(t.entry_dim() == 3);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        HSet g = random_hset(rng);
        HSet gtt = g.transpose().transpose();
        CHECK(g.exit_dim() == gtt.exit_dim());
        for (std::size_t b = 0; b < g.blocks().size(); ++b)
            CHECK(g.blocks()[b].tag == gtt.blocks()[b].tag);
    }
}

TEST_CASE("N^{T,+} equals N^- on sampled boundary points") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    HSet h = natural_hset(vec({0.5, -0.25}), 1, 2.0, 1, 0.5);
    HSet ht = h.transpose();
    for (int trial = 0; trial < 200; ++trial) {
        Vec u = vec({unif(rng), unif(rng)});
        u[trial % 2] = rng() % 2 ? 1.0 : -1.0;  // on some block face
        Vec x = h.from_unit(u);
        CHECK(classify(h, x).on_exit_boundary == classify(ht, x).on_entry_boundary);
        CHECK(classify(h, x).on_entry_boundary == classify(ht, x).on_exit_boundary);
    }
}

TEST_CASE("drop_exit retags and preserves the support") {
    HSet h = natural_hset(vec({0.0, 0.0, 0.0}), {1.0, 2.0}, {0.5});
    HSet d = h.drop_exit("x1");
    CHECK(h.exit_dim() == 2);
    CHECK(d.exit_dim() == 1);
    CHECK(d.entry_dim() == 2);
    CHECK_THROWS(h.drop_exit("nope"));
    CHECK_THROWS(h.drop_exit("y0"));

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(-2.5, 2.5);
    for (int trial = 0; trial < 1000; ++trial) {
        Vec x = vec({unif(rng), unif(rng), unif(rng)});
        CHECK(classify(h, x).inside == classify(d, x).inside);
    }
}

TEST_CASE("drop then transpose equals transpose with pre-swapped tag") {
    HSet h = natural_hset(vec({0.0, 0.0}), {1.0, 0.7}, {});
    HSet a = h.drop_exit("x0").transpose();
    // pre-swap the dropped block's tag, then transpose; exit sets must
    // agree pointwise
    HSet b = h.with_tags({BlockTag::Entry, BlockTag::Exit}).transpose();
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);
    for (int trial = 0; trial < 500; ++trial) {
        Vec x = vec({unif(rng), unif(rng)});
        if (trial % 2) x[0] = rng() % 2 ? 1.0 : -1.0;
        CHECK(classify(a, x).on_exit_boundary == classify(b, x).on_exit_boundary);
    }
}

TEST_CASE("drop on a single-exit-block set yields u = 0") {
    HSet h = natural_hset(vec({0.0, 0.0}), 1, 1.0, 1, 1.0);
    HSet d = h.drop_exit("x");
    CHECK(d.exit_dim() == 0);
    CHECK(d.entry_dim() == 2);
    // empty exit set
    CHECK_FALSE(classify(d, vec({1.0, 0.0})).on_exit_boundary);
}

TEST_CASE("u + s = dim always") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        HSet h = random_hset(rng);
        CHECK(h.exit_dim() + h.entry_dim() == h.dim());
    }
}

TEST_CASE("natural hset vertex maps to all ones") {
    HSet h = natural_hset(vec({0.0, 0.0}), 1, 1.0, 1, 1.0);
    CHECK((h.to_unit(vec({1.0, 1.0})) - vec({1.0, 1.0})).cwiseAbs().maxCoeff() ==
          doctest::Approx(0.0));
    CHECK_THROWS(natural_hset(vec({0.0, 0.0}), 1, -1.0, 1, 1.0));
}

TEST_CASE("text round trip is exact") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        HSet h = random_hset(rng);
        HSet g = parse_hset_text(to_text(h));
        CHECK((h.center() - g.center()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(h.has_basis() == g.has_basis());
        if (h.has_basis()) CHECK((h.basis() - g.basis()).cwiseAbs().maxCoeff() == 0.0);
        REQUIRE(h.blocks().size() == g.blocks().size());
        for (std::size_t b = 0; b < h.blocks().size(); ++b) {
            CHECK(h.blocks()[b].label == g.blocks()[b].label);
            CHECK(h.blocks()[b].radius == g.blocks()[b].radius);
            CHECK(h.blocks()[b].tag == g.blocks()[b].tag);
            CHECK(h.blocks()[b].norm == g.blocks()[b].norm);
        }
    }
}

TEST_CASE("disc blocks use the euclidean norm") {
    HSet h(vec({0.0, 0.0}), {{"c", 2, 2.0, BlockTag::Exit, BlockNorm::Disc}});
    CHECK(classify(h, vec({1.2, 1.2})).inside);        // box corner would be outside a box
    CHECK_FALSE(classify(h, vec({1.7, 1.7})).inside);  // euclidean norm 2.4 > 2
    CHECK(classify(h, vec({2.0, 0.0})).on_exit_boundary);
}
