#include <doctest.h>

#include <cmath>

#include "birkreg/geometry.hpp"

using namespace birkreg;

TEST_CASE("critical ray counts") {
    for (int n = 1; n <= 12; ++n) {
        CAPTURE(n);
        const auto rays = critical_rays(n);
        CHECK(rays.angles.size() == static_cast<size_t>(n % 2 ? 2 * n : n));
        CHECK(std::is_sorted(rays.angles.begin(), rays.angles.end()));
        // Each ray makes some exponent i eps_k rho purely imaginary.
        for (double a : rays.angles) {
            double best = 1.0;
            for (int k = 0; k < n; ++k)
                best = std::min(best, std::abs((cplx(0, 1) * std::polar(1.0, 2 * pi * k / n) * std::polar(1.0, a)).real()));
            CHECK(best < 1e-12);
        }
    }
}

TEST_CASE("critical ray examples") {
    const auto two = critical_rays(2).angles;
    REQUIRE(two.size() == 2);
    CHECK(two[0] == doctest::Approx(0.0));
    CHECK(two[1] == doctest::Approx(pi));

    const auto four = critical_rays(4).angles;
    REQUIRE(four.size() == 4);
    for (int k = 0; k < 4; ++k) CHECK(four[static_cast<size_t>(k)] == doctest::Approx(k * pi / 2));

    const auto one = critical_rays(1).angles;
    REQUIRE(one.size() == 2);
    CHECK(one[0] == doctest::Approx(0.0));
    CHECK(one[1] == doctest::Approx(pi));

    // The shifted variant gives twice as many rays for n = 2.
    CHECK(critical_rays(2, RayConvention::shifted).angles.size() == 4);
}

TEST_CASE("omega sectors") {
    const auto s = omega_sectors(2, 0.2);
    REQUIRE(s.sectors.size() == 2);
    CHECK(s.sectors[0].begin == doctest::Approx(0.1));
    CHECK(s.sectors[0].end == doctest::Approx(pi - 0.1));
    CHECK(s.sectors[1].begin == doctest::Approx(pi + 0.1));
    CHECK(s.sectors[1].end == doctest::Approx(2 * pi - 0.1));
    CHECK(omega_sectors(4, 0.1).sectors.size() == 4);
    CHECK(omega_sectors(3, 0.1).sectors.size() == 6);
    CHECK_THROWS_AS(omega_sectors(2, pi), argument_error);
    CHECK_THROWS_AS(omega_sectors(2, 0.0), argument_error);
    CHECK(s.sectors[0].contains(pi / 2));
    CHECK_FALSE(s.sectors[0].contains(0.05));
}

TEST_CASE("ray clearance against Dirichlet disks") {
    std::vector<cplx> lambdas;
    for (int j = 1; j <= 40; ++j) lambdas.push_back(pi * pi * j * j);
    const auto disks = disks_from_eigenvalues(lambdas, 2, 0.5);
    CHECK(disks.centers.size() == 80);

    const auto diagonal = ray_clearance(pi / 4, disks, 100.0);
    CHECK_FALSE(diagonal.blocked);
    CHECK(diagonal.radius == 0.0);

    for (double r_max : {pi, 10.0, 50.0, 100.0}) {
        CAPTURE(r_max);
        std::vector<cplx> local;
        for (int j = 1; pi * j <= r_max + 0.5; ++j) local.push_back(pi * pi * j * j);
        CHECK(ray_clearance(0.0, disks_from_eigenvalues(local, 2, 0.5), r_max).blocked);
    }

    CHECK(ray_clearance(1.0, DiskSet{{}, 0.5}, 10.0).radius == 0.0);
    CHECK_FALSE(ray_clearance(1.0, DiskSet{{}, 0.5}, 10.0).blocked);
}

TEST_CASE("disk centers are closed under roots of unity") {
    const std::vector<cplx> lambdas{cplx(3.0, 1.0)};
    const auto d = disks_from_eigenvalues(lambdas, 3, 0.1);
    REQUIRE(d.centers.size() == 3);
    for (const auto& c : d.centers) CHECK(std::abs(std::pow(c, 3) - lambdas[0]) < 1e-12);
}

TEST_CASE("rarity") {
    std::vector<double> geometric, arithmetic;
    for (int j = 1; j <= 20; ++j) geometric.push_back(std::ldexp(1.0, j));
    for (int j = 1; j <= 100; ++j) arithmetic.push_back(j);
    CHECK(is_rare(geometric, 10) == 1);
    CHECK_FALSE(is_rare(arithmetic, 10).has_value());
    CHECK(is_rare(std::vector<double>{}, 3) == 1);

    std::vector<double> slow;
    for (int j = 0; j < 30; ++j) slow.push_back(std::pow(1.3, j));
    const auto l = is_rare(slow, 10);
    REQUIRE(l.has_value());
    CHECK(*l == 3);
    // Any larger shift also works.
    for (int k = *l; k <= 10; ++k) {
        bool ok = true;
        for (size_t j = 0; j + static_cast<size_t>(k) < slow.size(); ++j) ok = ok && slow[j + static_cast<size_t>(k)] >= 2 * slow[j];
        CHECK(ok);
    }
}

TEST_CASE("angles") {
    CHECK(wrap_angle(-pi / 2) == doctest::Approx(3 * pi / 2));
    CHECK(angular_distance(0.1, 2 * pi - 0.1) == doctest::Approx(0.2));
    CHECK(distance_to_critical(pi / 4, 2) == doctest::Approx(pi / 4));
    CHECK(distance_to_critical(pi / 8, 4) == doctest::Approx(pi / 8));
}
