#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "cejulia/sphere.hpp"

using namespace cejulia::sphere;
using Catch::Approx;
using cplx = std::complex<double>;

namespace {

SpherePoint random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> kind(0, 9);
    if (kind(rng) == 0) return SpherePoint::infinity();
    double scale = std::exp(3.0 * u(rng));
    return SpherePoint(cplx{scale * u(rng), scale * u(rng)});
}

// polynomial composition p(q(z)), ascending coefficients
std::vector<cplx> compose(const std::vector<cplx>& p, const std::vector<cplx>& q) {
    std::vector<cplx> acc{cplx{0.0, 0.0}};
    for (std::size_t i = p.size(); i-- > 0;) {
        // acc = acc*q + p[i]
        std::vector<cplx> next(acc.size() + q.size() - 1, cplx{0.0, 0.0});
        for (std::size_t a = 0; a < acc.size(); ++a)
            for (std::size_t b = 0; b < q.size(); ++b) next[a + b] += acc[a] * q[b];
        next[0] += p[i];
        acc = std::move(next);
    }
    return acc;
}

}  // namespace

TEST_CASE("chordal distance basic values", "[sphere]") {
    CHECK(chordal_dist(SpherePoint(0.0, 0.0), SpherePoint::infinity()) == Approx(2.0));
    CHECK(chordal_dist(SpherePoint(0.0, 0.0), SpherePoint(0.0, 0.0)) == 0.0);
    CHECK(chordal_dist(SpherePoint(1.0, 0.0), SpherePoint(-1.0, 0.0)) == Approx(2.0));
    CHECK(chordal_dist(SpherePoint::infinity(), SpherePoint::infinity()) == 0.0);
}

TEST_CASE("chordal distance is a metric on random triples", "[sphere]") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 10000; ++trial) {
        SpherePoint a = random_point(rng), b = random_point(rng), c = random_point(rng);
        double ab = chordal_dist(a, b), ba = chordal_dist(b, a);
        CHECK(ab == ba);
        CHECK(ab <= 2.0 + 1e-12);
        CHECK(ab <= chordal_dist(a, c) + chordal_dist(c, b) + 1e-12);
    }
}

TEST_CASE("rational map evaluation", "[sphere]") {
    auto f = RationalMap::quadratic(cplx{-2.0, 0.0});
    CHECK(f.eval(SpherePoint(0.0, 0.0)) == SpherePoint(-2.0, 0.0));
    CHECK(f.eval(SpherePoint::infinity()).is_infinity());

    auto inv_sq = RationalMap({cplx{1.0, 0.0}}, {cplx{0.0, 0.0}, cplx{0.0, 0.0}, cplx{1.0, 0.0}});
    CHECK(inv_sq.eval(SpherePoint(0.0, 0.0)).is_infinity());
    CHECK(inv_sq.eval(SpherePoint::infinity()) == SpherePoint(0.0, 0.0));
    // pole interior to the unit disc and a large finite argument
    CHECK(std::abs(inv_sq.eval(SpherePoint(2.0, 0.0)).value - cplx{0.25, 0.0}) < 1e-15);
}

TEST_CASE("rational map validation", "[sphere]") {
    CHECK_THROWS(RationalMap({cplx{1.0, 0.0}, cplx{1.0, 0.0}}, {cplx{1.0, 0.0}}));  // degree 1
    // shared root z=1: (z-1)(z-2) / (z-1)
    CHECK_THROWS(RationalMap({cplx{2.0, 0.0}, cplx{-3.0, 0.0}, cplx{1.0, 0.0}},
                             {cplx{-1.0, 0.0}, cplx{1.0, 0.0}}));
}

TEST_CASE("spherical derivative closed forms", "[sphere]") {
    auto f = RationalMap::quadratic(cplx{-2.0, 0.0});
    CHECK(f.spherical_deriv(SpherePoint(-2.0, 0.0)) == Approx(4.0));
    auto sq = RationalMap::quadratic(cplx{0.0, 0.0});
    CHECK(sq.spherical_deriv(SpherePoint(0.0, 0.0)) == 0.0);
    auto id = RationalMap::mobius(cplx{1.0, 0.0}, cplx{0.0, 0.0}, cplx{0.0, 0.0}, cplx{1.0, 0.0});
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i)
        CHECK(id.spherical_deriv(random_point(rng)) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spherical derivative chain rule", "[sphere]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 400; ++trial) {
        cplx cf{u(rng), u(rng)}, cg{u(rng), u(rng)};
        auto f = RationalMap::quadratic(cf);
        auto g = RationalMap::quadratic(cg);
        auto fg = RationalMap::polynomial(compose(f.numer(), g.numer()));
        SpherePoint z = random_point(rng);
        double lhs = fg.spherical_deriv(z);
        double rhs = f.spherical_deriv(g.eval(z)) * g.spherical_deriv(z);
        if (rhs > 1e-12 && std::isfinite(rhs))
            CHECK(lhs == Approx(rhs).epsilon(1e-9));
        else
            CHECK(lhs <= 1e-8);
    }
}

TEST_CASE("mobius maps have derivative bounded away from zero", "[sphere]") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int m = 0; m < 10; ++m) {
        cplx a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)}, d{u(rng), u(rng)};
        if (std::abs(a * d - b * c) < 0.1) continue;
        auto mob = RationalMap::mobius(a, b, c, d);
        for (int i = 0; i < 1000; ++i) {
            double s = mob.spherical_deriv(random_point(rng));
            CHECK(s > 1e-8);
            CHECK(s < 1e8);
        }
    }
}

TEST_CASE("critical set of the quadratic family", "[sphere]") {
    auto f = RationalMap::quadratic(cplx{0.0, 1.0});
    std::vector<SpherePoint> sample{SpherePoint(0.0, 0.0)};
    auto cs = critical_set(f, sample);
    REQUIRE(cs.points.size() == 2);
    int total = 0;
    bool has_zero = false, has_inf = false;
    for (const auto& e : cs.points) {
        total += e.local_degree - 1;
        if (e.point.is_infinity())
            has_inf = true;
        else if (std::abs(e.point.value) < 1e-9)
            has_zero = true;
        CHECK(e.local_degree == 2);
    }
    CHECK(total == 2);  // Riemann-Hurwitz for degree 2
    CHECK(has_zero);
    CHECK(has_inf);
}

TEST_CASE("critical set flags for the Chebyshev map", "[sphere]") {
    auto f = RationalMap::quadratic(cplx{-2.0, 0.0});
    std::vector<SpherePoint> sample;
    for (int i = 0; i <= 400; ++i) sample.emplace_back(-2.0 + i * 0.01, 0.0);
    auto cs = critical_set(f, sample);
    for (const auto& e : cs.points) {
        if (e.point.is_infinity())
            CHECK_FALSE(e.in_julia);  // attracted to the superattracting fixed point
        else
            CHECK(e.in_julia);  // orbit 0 -> -2 -> 2 stays in [-2,2]
    }
    CHECK(cs.nu == 2);
    CHECK(cs.count_in_julia() == 1);
}
