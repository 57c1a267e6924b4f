#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "fdiv/divergence.hpp"
#include "support.hpp"

using namespace fdx;
namespace ft = fdx::testing;

namespace {

FiniteDistribution dist(std::vector<double> w) { return FiniteDistribution(std::move(w)); }

std::vector<Generator> catalog() {
    auto gs = bound_table_generators();
    gs.push_back(delta_generator());
    return gs;
}

}  // namespace

TEST_CASE("divergence examples") {
    const auto half = dist({0.5, 0.5});
    const auto e0 = dist({1.0, 0.0});
    for (const auto& g : catalog()) {
        CAPTURE(g.label());
        CHECK(f_divergence(g, half, half) == ExtReal(0.0));
    }
    CHECK(f_divergence(make_generator("pearson_chi2"), e0, half).value() ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f_divergence(make_generator("total_variation"), e0, half).value() ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f_divergence(make_generator("kl"), half, dist({0.0, 1.0})).is_pos_inf());
}

TEST_CASE("zero-mass conventions") {
    const auto kl = make_generator("kl");
    const auto rkl = make_generator("reverse_kl");
    // both zero: the term vanishes
    const auto a = dist({0.5, 0.5, 0.0});
    const auto b = dist({0.25, 0.75, 0.0});
    CHECK(f_divergence(kl, a, b).value() == doctest::Approx(named::kl(a, b).value()).epsilon(1e-14));
    // nu_i = 0 < pi_i contributes pi_i f(0)
    const auto c = dist({1.0, 0.0});
    const auto half = dist({0.5, 0.5});
    CHECK(f_divergence(kl, c, half).value() == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(f_divergence(rkl, c, half).is_pos_inf());
    CHECK_THROWS_AS(f_divergence(kl, half, dist({1.0 / 3, 1.0 / 3, 1.0 / 3})), std::invalid_argument);
}

TEST_CASE("pair check examples") {
    const auto kl = make_generator("kl");
    const auto nu = dist({0.25, 0.75});
    const auto pi = dist({0.5, 0.5});
    const double expected = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
    const auto [rev, direct] = divergence_pair_check(kl, nu, pi);
    CHECK(std::abs(rev.value() - expected) <= 1e-12);
    CHECK(std::abs(direct.value() - expected) <= 1e-12);
    CHECK(expected == doctest::Approx(0.1438).epsilon(1e-3));

    const auto [d0, d1] = divergence_pair_check(delta_generator(), nu, pi);
    CHECK(std::abs(d0.value()) <= 1e-15);
    CHECK(std::abs(d1.value()) <= 1e-15);

    const auto [p0, p1] = divergence_pair_check(make_generator("pearson_chi2"), dist({1.0, 0.0}), pi);
    CHECK(p0.is_pos_inf());
    CHECK(p1.is_pos_inf());
}

TEST_CASE("pair check agrees on random full-support pairs") {
    auto rng = ft::rng_for(3);
    for (const auto& g : catalog()) {
        CAPTURE(g.label());
        for (int k = 0; k < 40; ++k) {
            const std::size_t n = ft::uniform_int(rng, 2, 8);
            const auto nu = ft::dirichlet_full_support(rng, n);
            const auto pi = ft::dirichlet_full_support(rng, n);
            const auto [a, b] = divergence_pair_check(g, nu, pi);
            CHECK(near(a, b, 1e-10 * std::max(1.0, std::abs(b.value()))));
        }
    }
}

TEST_CASE("pair check with a support gap and g'(inf) = +inf") {
    auto rng = ft::rng_for(4);
    const auto kl = make_generator("kl");
    for (int k = 0; k < 50; ++k) {
        auto w = ft::dirichlet(rng, 5);
        std::vector<double> v(w.weights().begin(), w.weights().end());
        v[0] = 0.0;
        const auto nu = FiniteDistribution::normalized(v);
        const auto pi = ft::dirichlet_full_support(rng, 5);
        const auto [a, b] = divergence_pair_check(kl, nu, pi);
        CHECK(a.is_pos_inf());
        CHECK(b.is_pos_inf());
    }
}

TEST_CASE("nonnegativity, kernel invariance and scaling") {
    auto rng = ft::rng_for(5);
    for (const auto& g : catalog()) {
        CAPTURE(g.label());
        for (int k = 0; k < 60; ++k) {
            const std::size_t n = ft::uniform_int(rng, 1, 16);
            const auto nu = ft::dirichlet(rng, n, 0.7);
            const auto pi = ft::dirichlet(rng, n, 0.7);
            const ExtReal d = f_divergence(g, nu, pi);
            CHECK(d >= ExtReal(0.0));
            const double c = ft::uniform(rng, -3.0, 3.0);
            const ExtReal dc = f_divergence(kernel_shifted(g, c), nu, pi);
            CHECK(near(dc, d, 1e-10 * std::max(1.0, std::abs(d.value()))));
            const double lam = std::exp(ft::uniform(rng, -3.0, 3.0));
            const ExtReal ds = f_divergence(scaled(g, lam), nu, pi);
            CHECK(near(ds, lam * d, 1e-10 * std::max(1.0, std::abs(ds.value()))));
        }
    }
}

TEST_CASE("generator divergences match the named formulas") {
    auto rng = ft::rng_for(6);
    const auto tv = make_generator("total_variation");
    const auto chi = make_generator("pearson_chi2");
    const auto hel = make_generator("squared_hellinger");
    const auto kl = make_generator("kl");
    for (int k = 0; k < 500; ++k) {
        const std::size_t n = ft::uniform_int(rng, 1, 16);
        const auto nu = ft::dirichlet(rng, n, 0.5);
        const auto pi = ft::dirichlet(rng, n, 0.5);
        CHECK(std::abs(f_divergence(tv, nu, pi).value() - named::total_variation(nu, pi)) <= 1e-10);
        const ExtReal chi_ref = named::pearson_chi2(nu, pi);
        CHECK(near(f_divergence(chi, nu, pi), chi_ref, 1e-10 * std::max(1.0, chi_ref.value())));
        CHECK(std::abs(f_divergence(hel, nu, pi).value() - named::squared_hellinger(nu, pi)) <= 1e-10);
        const ExtReal kl_ref = named::kl(nu, pi);
        CHECK(near(f_divergence(kl, nu, pi), kl_ref, 1e-10 * std::max(1.0, kl_ref.value())));
    }
}

TEST_CASE("compensated sums stay accurate at large n") {
    const std::size_t n = 5000;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = 1.0 + 0.5 * std::sin(double(i));
        b[i] = 1.0 + 0.5 * std::cos(double(i));
    }
    const auto nu = FiniteDistribution::normalized(a);
    const auto pi = FiniteDistribution::normalized(b);
    const auto kl = make_generator("kl");
    CHECK(near(f_divergence(kernel_shifted(kl, 2.5), nu, pi), f_divergence(kl, nu, pi), 1e-10));
}

TEST_CASE("distribution validation") {
    CHECK_THROWS_AS(dist({}), std::invalid_argument);
    CHECK_THROWS_AS(dist({0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(dist({-0.5, 1.5}), std::invalid_argument);
    CHECK_NOTHROW(dist({0.5, 0.5 + 1e-13}));
    CHECK_THROWS_AS(MeasurableFunction({1.0, INFINITY}), std::invalid_argument);
}

TEST_CASE("file readers") {
    const auto dir = std::filesystem::temp_directory_path() / "fdiv_test_io";
    std::filesystem::create_directories(dir);
    auto write = [&](const char* name, const char* text) {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    };
    const auto j = read_distribution(write("pi.json", R"({"weights":[0.25,0.75]})"));
    CHECK(j == dist({0.25, 0.75}));
    const auto c = read_distribution(write("pi.csv", "w\n0.25\r\n0.75\n"));
    CHECK(c == j);
    const auto h = read_function(write("h.csv", "h\n-1\n2.5\n"));
    CHECK(h[1] == 2.5);
    const auto hj = read_function(write("h.json", R"({"values":[0, 1e-3]})"));
    CHECK(hj[1] == 1e-3);
    CHECK_THROWS_AS(read_distribution(write("bad.csv", "x\n1\n")), std::invalid_argument);
    CHECK_THROWS_AS(read_distribution(write("bad2.csv", "w\n1\nfoo\n")), std::invalid_argument);
    CHECK_THROWS_AS(read_distribution(write("bad.json", R"({"values":[1]})")), std::invalid_argument);
    CHECK_THROWS_AS(read_distribution((dir / "missing.json").string()), IoError);
    std::filesystem::remove_all(dir);
}
