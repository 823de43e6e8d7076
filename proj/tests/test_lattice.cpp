#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "spreadout/lattice.hpp"

using namespace spreadout;

TEST_CASE("kernel values") {
    SpreadOutModel m2(2, 1, 1.0);
    Point o = Point::zero(2);
    Point diag(2);
    diag.c[0] = 1;
    diag.c[1] = 1;
    CHECK(m2.kernel(o, diag) == doctest::Approx(1.0 / 8).epsilon(1e-15));
    CHECK(m2.kernel(o, o) == 0.0);

    SpreadOutModel m7(7, 1, 1.0);
    CHECK(m7.lambda_star == 2186);
    CHECK(m7.kernel(Point::zero(7), Point::axis(7, 0, 1)) == doctest::Approx(1.0 / 2186).epsilon(1e-15));
}

TEST_CASE("edge probability") {
    SpreadOutModel zero(2, 1, 0.0);
    Point o = Point::zero(2);
    Point e1 = Point::axis(2, 0, 1);
    CHECK(zero.edge_probability(o, e1) == 0.0);

    SpreadOutModel m(2, 1, 1.0);
    CHECK(m.edge_probability(o, e1) == doctest::Approx(1.0 - std::exp(-1.0 / 8)).epsilon(1e-12));
    CHECK(m.p_beta == doctest::Approx(0.117503).epsilon(1e-4));

    Point far = Point::axis(2, 0, 2);
    CHECK(m.edge_probability(o, far) == 0.0);
}

TEST_CASE("neighborhood enumeration") {
    SpreadOutModel m1(1, 2, 1.0);
    std::set<int> got;
    m1.for_each_neighbor(Point::zero(1), [&](const Point& y) { got.insert(y.c[0]); });
    CHECK(got == std::set<int>{-2, -1, 1, 2});

    SpreadOutModel m2(2, 1, 1.0);
    int count = 0;
    m2.for_each_neighbor(Point::zero(2), [&](const Point&) { ++count; });
    CHECK(count == 8);

    CHECK(SpreadOutModel::lambda_star_count(7, 2) == 78124.0);
    SpreadOutModel m72(7, 2, 1.0);
    CHECK(m72.lambda_star == 78124);
}

TEST_CASE("neighbor_offset indexes the punctured box consistently") {
    SpreadOutModel m(2, 1, 1.0);
    std::set<std::pair<int, int>> seen;
    for (int64_t k = 0; k < m.lambda_star; ++k) {
        Point y = m.neighbor_offset(k);
        CHECK(y.linf() >= 1);
        CHECK(y.linf() <= 1);
        seen.insert({y.c[0], y.c[1]});
    }
    CHECK(seen.size() == 8);
}

TEST_CASE("boundary distance on blocks") {
    GeneralizedBlock b5 = GeneralizedBlock::box(2, 5);
    CHECK(boundary_distance(b5, Point::zero(2)) == 5);

    GeneralizedBlock hs = GeneralizedBlock::half_space(3, 0);
    Point x(3);
    x.c[0] = 3;
    x.c[1] = 100;
    x.c[2] = -7;
    CHECK(boundary_distance(hs, x) == 3);

    GeneralizedBlock ray;
    ray.dim = 2;
    ray.lo[0] = -2;
    ray.hi[0] = kPosInf;
    ray.lo[1] = kNegInf;
    ray.hi[1] = kPosInf;
    Point edge(2);
    edge.c[0] = -2;
    CHECK(boundary_distance(ray, edge) == 0);
    CHECK(on_boundary(Region{ray}, edge));
}

TEST_CASE("region membership and torus wrap") {
    Region box = Box{Point::zero(2), 3};
    CHECK(contains(box, Point::axis(2, 0, 3)));
    CHECK(!contains(box, Point::axis(2, 0, 4)));
    CHECK(contains(Region{Full{}}, Point::axis(2, 1, 12345)));

    Region hs = HalfSpace{2};
    CHECK(contains(hs, Point::axis(2, 0, -2)));
    CHECK(!contains(hs, Point::axis(2, 0, -3)));

    Torus t{6};
    Point p(2);
    p.c[0] = -1;
    p.c[1] = 8;
    Point w = torus_wrap(t, p);
    CHECK(w.c[0] == 5);
    CHECK(w.c[1] == 2);
}

TEST_CASE("exterior neighbor count matches enumeration") {
    SpreadOutModel m(2, 2, 1.0);
    Region box = Box{Point::zero(2), 3};
    for (int a = -3; a <= 3; ++a)
        for (int b = -3; b <= 3; ++b) {
            Point y(2);
            y.c[0] = a;
            y.c[1] = b;
            int64_t brute = 0;
            m.for_each_neighbor(y, [&](const Point& z) {
                if (!contains(box, z)) ++brute;
            });
            CHECK(exterior_neighbor_count(m, box, y) == brute);
        }
    Region hs = HalfSpace{1};
    Point y = Point::axis(2, 0, 0);
    int64_t brute = 0;
    m.for_each_neighbor(y, [&](const Point& z) {
        if (!contains(hs, z)) ++brute;
    });
    CHECK(exterior_neighbor_count(m, hs, y) == brute);
}

TEST_CASE("counter rng determinism and stream independence") {
    CounterRng a(RngStream{42});
    CounterRng b(RngStream{42});
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    CounterRng c(RngStream{42}.child(1));
    CounterRng d(RngStream{42}.child(2));
    int agree = 0;
    for (int i = 0; i < 64; ++i) agree += (c.next_u64() == d.next_u64());
    CHECK(agree == 0);
}

TEST_CASE("geometric skip matches direct bernoulli sampling in distribution") {
    // both count failures before the first success at p = 0.3
    const double p = 0.3;
    CounterRng rng(RngStream{7});
    double mean = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) mean += static_cast<double>(rng.geometric_failures(p));
    mean /= n;
    const double expect = (1 - p) / p;
    const double se = std::sqrt((1 - p) / (p * p) / n);
    CHECK(std::abs(mean - expect) < 5 * se);
}

TEST_CASE("parallel_mc is deterministic and worker-count independent") {
    auto run = [](int workers) {
        return parallel_mc<ScalarAcc>(50000, workers, RngStream{9},
                                      [](CounterRng& rng, ScalarAcc& acc) { acc.add(rng.next_unit()); });
    };
    ScalarAcc a = run(1);
    ScalarAcc b = run(4);
    ScalarAcc c = run(7);
    CHECK(a.sum == b.sum);
    CHECK(b.sum == c.sum);
    CHECK(a.sumsq == c.sumsq);
    CHECK(a.n == 50000);
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(SpreadOutModel(0, 1, 1.0), UsageError);
    CHECK_THROWS_AS(SpreadOutModel(2, 0, 1.0), UsageError);
    CHECK_THROWS_AS(SpreadOutModel(2, 1, -0.5), UsageError);
    CHECK_THROWS_AS(SpreadOutModel(9, 1, 1.0), UsageError);
}
