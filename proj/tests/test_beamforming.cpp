#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "passim/beamforming.hpp"
#include "passim/rng.hpp"

using namespace passim;

namespace {

CMatrix random_channel(int k, int m, std::uint64_t seed, double scale = 1.0) {
    SplitMix64 rng(seed);
    CMatrix h(k, m);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < m; ++j) {
            h(i, j) = scale * cplx{rng.next_in(-1.0, 1.0), rng.next_in(-1.0, 1.0)};
        }
    }
    return h;
}

}  // namespace

TEST_CASE("SINR against a scalar signal-model oracle") {
    const auto h = random_channel(2, 2, 42);
    const auto w = random_channel(2, 2, 43, 0.5);
    const double noise = 0.03;
    const auto sinr = compute_sinr(h, w, noise);
    REQUIRE(sinr.size() == 2);

    for (int k = 0; k < 2; ++k) {
        // y_k = h_k^H (w_k s_k + w_{k'} s_{k'}) + n with unit-power symbols;
        // rows of h_eff already hold h_k^H.
        cplx sig{0.0, 0.0};
        cplx intf{0.0, 0.0};
        for (int m = 0; m < 2; ++m) {
            sig += h(k, m) * w(m, k);
            intf += h(k, m) * w(m, 1 - k);
        }
        const double want = std::norm(sig) / (std::norm(intf) + noise);
        CHECK(std::abs(sinr[k] - want) <= 1e-12 * std::max(1.0, want));
    }
}

TEST_CASE("sum rate from SINR values") {
    CHECK(sum_rate({1.0, 1.0}) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(sum_rate({3.0, 1.0}) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(sum_rate({}) == doctest::Approx(0.0));
}

TEST_CASE("rate report feasibility flag") {
    CMatrix h = CMatrix::Identity(2, 2);
    CMatrix w = CMatrix::Identity(2, 2);
    const auto ok = rate_report(h, w, 0.1, 1.0);
    CHECK(ok.feasible);
    CHECK(ok.sum_rate == doctest::Approx(2.0 * std::log2(11.0)));
    const auto bad = rate_report(h, w, 0.1, 10.01);
    CHECK_FALSE(bad.feasible);
}

TEST_CASE("water-filling allocation") {
    SUBCASE("KKT conditions on random gains") {
        SplitMix64 rng(7);
        for (int rep = 0; rep < 200; ++rep) {
            std::vector<double> g(4);
            for (auto& v : g) v = rng.next_in(1e-3, 2.0);
            const double budget = rng.next_in(0.1, 5.0);
            const double noise = rng.next_in(1e-4, 0.5);
            const auto [p, mu] = waterfill(g, budget, noise);
            double total = 0.0;
            for (size_t k = 0; k < g.size(); ++k) {
                CHECK(p[k] >= -1e-15);
                total += p[k];
                if (p[k] > 1e-12) {
                    // Active user sits exactly at the water level.
                    CHECK(std::abs(p[k] + noise / g[k] - mu) <= 1e-9 * std::max(1.0, mu));
                } else {
                    CHECK(noise / g[k] >= mu - 1e-9);
                }
            }
            CHECK(std::abs(total - budget) <= 1e-9 * budget);
        }
    }
    SUBCASE("equal gains split evenly") {
        const auto [p, mu] = waterfill({0.5, 0.5}, 2.0, 0.1);
        CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("hopeless channel is shut off") {
        const auto [p, mu] = waterfill({1.0, 1e-9}, 0.5, 0.1);
        CHECK(p[1] == doctest::Approx(0.0));
        CHECK(p[0] == doctest::Approx(0.5));
    }
    SUBCASE("degenerate inputs") {
        CHECK_THROWS_AS(waterfill({}, 1.0, 0.1), InfeasibleError);
        CHECK_THROWS_AS(waterfill({0.0, 0.0}, 1.0, 0.1), InfeasibleError);
    }
}

TEST_CASE("MRT with water-filled powers") {
    SUBCASE("orthogonal channels reduce to scalar water-filling") {
        CMatrix h = CMatrix::Zero(2, 2);
        h(0, 0) = cplx{2.0, 0.0};
        h(1, 1) = cplx{0.0, 1.0};
        const double pmax = 1.5;
        const double noise = 0.2;
        const auto bf = mrt_waterfilling(h, pmax, noise);
        const auto [p, mu] = waterfill({4.0, 1.0}, pmax, noise);
        CHECK(bf.power[0] == doctest::Approx(p[0]).epsilon(1e-12));
        CHECK(bf.power[1] == doctest::Approx(p[1]).epsilon(1e-12));
        // Columns align with the (conjugated) channel directions.
        CHECK(std::abs(bf.W(0, 0)) == doctest::Approx(std::sqrt(p[0])).epsilon(1e-12));
        CHECK(std::abs(bf.W(1, 1)) == doctest::Approx(std::sqrt(p[1])).epsilon(1e-12));
        CHECK(std::abs(bf.W(1, 0)) < 1e-15);
        CHECK(std::abs(bf.W.squaredNorm() - pmax) <= 1e-12 * pmax);
    }
    SUBCASE("power budget is met on random channels") {
        for (std::uint64_t s = 0; s < 20; ++s) {
            const auto h = random_channel(2, 2, 100 + s);
            const auto bf = mrt_waterfilling(h, 0.8, 0.05);
            CHECK(std::abs(bf.W.squaredNorm() - 0.8) <= 1e-12);
        }
    }
}

TEST_CASE("zero-forcing precoder") {
    SUBCASE("identity channel") {
        CMatrix h = CMatrix::Identity(2, 2);
        const auto bf = zf_precoder(h, 1.0);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const double want = (i == j) ? std::sqrt(0.5) : 0.0;
                CHECK(std::abs(bf.W(i, j) - want) < 1e-12);
            }
        }
    }
    SUBCASE("interference nulling and exact power on random channels") {
        for (std::uint64_t s = 0; s < 50; ++s) {
            const auto h = random_channel(2, 2, 500 + s);
            if (std::abs(h.determinant()) < 1e-3) continue;
            const auto bf = zf_precoder(h, 2.0);
            const CMatrix cross = h * bf.W;
            const double diag = std::min(std::abs(cross(0, 0)), std::abs(cross(1, 1)));
            CHECK(std::abs(cross(0, 1)) <= 1e-9 * diag);
            CHECK(std::abs(cross(1, 0)) <= 1e-9 * diag);
            CHECK(std::abs(bf.W.squaredNorm() - 2.0) <= 1e-12 * 2.0);
        }
    }
    SUBCASE("singular channel falls back to diagonal loading") {
        CMatrix h(2, 2);
        h << cplx{1.0, 0.0}, cplx{2.0, 0.0}, cplx{1.0, 0.0}, cplx{2.0, 0.0};
        const auto bf = zf_precoder(h, 1.0);
        CHECK(std::isfinite(bf.W.squaredNorm()));
        CHECK(std::abs(bf.W.squaredNorm() - 1.0) <= 1e-12);
    }
    SUBCASE("explicit zero loading on a singular channel is rejected") {
        CMatrix h(2, 2);
        h << cplx{1.0, 0.0}, cplx{2.0, 0.0}, cplx{1.0, 0.0}, cplx{2.0, 0.0};
        CHECK_THROWS_AS(zf_precoder(h, 1.0, 0.0), InfeasibleError);
    }
}

TEST_CASE("WMMSE sum-rate maximization") {
    SUBCASE("trace is non-decreasing and final value is the best iterate") {
        for (std::uint64_t s = 0; s < 20; ++s) {
            const auto h = random_channel(2, 2, 900 + s);
            const auto res = wmmse_precoder(h, 1.0, 0.05);
            REQUIRE(!res.rate_trace.empty());
            double best = res.rate_trace.front();
            for (size_t i = 1; i < res.rate_trace.size(); ++i) {
                CHECK(res.rate_trace[i] >= res.rate_trace[i - 1] - 1e-8);
                best = std::max(best, res.rate_trace[i]);
            }
            // The returned precoder is the best iterate, which may be the
            // initial point when the first update overshoots.
            const auto rr = rate_report(h, res.beamformer.W, 0.05, 0.0);
            CHECK(rr.sum_rate >= best - 1e-9 * std::max(1.0, best));
            CHECK(res.beamformer.W.squaredNorm() <= 1.0 + 1e-9);
        }
    }
    SUBCASE("orthogonal channels match MRT water-filling") {
        CMatrix h = CMatrix::Zero(2, 2);
        h(0, 0) = cplx{1.3, 0.4};
        h(1, 1) = cplx{-0.2, 0.9};
        const double pmax = 1.0;
        const double noise = 0.05;
        const auto res = wmmse_precoder(h, pmax, noise, 500, 1e-12);
        const auto bf = mrt_waterfilling(h, pmax, noise);
        const auto wm = rate_report(h, res.beamformer.W, noise, 0.0);
        const auto mr = rate_report(h, bf.W, noise, 0.0);
        CHECK(std::abs(wm.sum_rate - mr.sum_rate) <= 1e-6 * mr.sum_rate);
    }
}
