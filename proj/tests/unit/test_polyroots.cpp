#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <complex>
#include <random>

#include "cejulia/polyroots.hpp"

using namespace cejulia::polyroots;
using Catch::Approx;

TEST_CASE("closed-form degrees", "[polyroots]") {
    auto lin = solve({cplx{-3.0, 0.0}, cplx{1.0, 0.0}});
    REQUIRE(lin.size() == 1);
    CHECK(std::abs(lin[0] - cplx{3.0, 0.0}) < 1e-14);

    auto quad = solve({cplx{2.0, 0.0}, cplx{-3.0, 0.0}, cplx{1.0, 0.0}});  // (z-1)(z-2)
    REQUIRE(quad.size() == 2);
    std::sort(quad.begin(), quad.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    CHECK(std::abs(quad[0] - cplx{1.0, 0.0}) < 1e-12);
    CHECK(std::abs(quad[1] - cplx{2.0, 0.0}) < 1e-12);
}

TEST_CASE("random polynomials have small residuals at the returned roots", "[polyroots]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_int_distribution<int> deg_dist(3, 7);
    for (int trial = 0; trial < 200; ++trial) {
        int deg = deg_dist(rng);
        std::vector<cplx> coeffs(deg + 1);
        for (auto& c : coeffs) c = cplx{u(rng), u(rng)};
        if (std::abs(coeffs.back()) < 0.2) coeffs.back() += cplx{1.0, 0.0};
        auto roots = solve(coeffs);
        REQUIRE(roots.size() == static_cast<std::size_t>(deg));
        double scale = 0.0;
        for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
        for (const auto& r : roots)
            CHECK(std::abs(horner(coeffs, r)) < 1e-6 * scale * std::max(1.0, std::pow(std::abs(r), deg)));
    }
}

TEST_CASE("multiplicity clustering", "[polyroots]") {
    // (z-1)^2 (z+2)
    std::vector<cplx> coeffs{cplx{2.0, 0.0}, cplx{-3.0, 0.0}, cplx{0.0, 0.0}, cplx{1.0, 0.0}};
    auto cl = cluster(solve(coeffs), 1e-5);
    REQUIRE(cl.size() == 2);
    std::sort(cl.begin(), cl.end(),
              [](const auto& a, const auto& b) { return a.first.real() < b.first.real(); });
    CHECK(cl[0].second == 1);
    CHECK(std::abs(cl[0].first - cplx{-2.0, 0.0}) < 1e-7);
    CHECK(cl[1].second == 2);
    CHECK(std::abs(cl[1].first - cplx{1.0, 0.0}) < 1e-5);
}
