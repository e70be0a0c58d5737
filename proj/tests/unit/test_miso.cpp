// SPDX-License-Identifier: Apache-2.0
//
// fapt - fluid antenna port prediction toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <doctest.h>

#include "fapt/miso.hpp"
#include "fapt/rng.hpp"

using namespace fapt;

namespace
{
    std::vector<std::vector<cxd>> random_rows(int n_ue, int n_t, Rng& rng)
    {
        std::vector<std::vector<cxd>> h(static_cast<std::size_t>(n_ue),
                                        std::vector<cxd>(static_cast<std::size_t>(n_t)));
        for (auto& row : h)
            for (cxd& v : row)
                v = cxd(rng.uniform(-1, 1), rng.uniform(-1, 1));
        return h;
    }
} // namespace

TEST_CASE("zero-forcing nulls cross gains")
{
    SUBCASE("orthonormal rows yield matched filters")
    {
        std::vector<std::vector<cxd>> h{{cxd(1, 0), cxd(0, 0)}, {cxd(0, 0), cxd(1, 0)}};
        auto w = ezf_precoder(h);
        // Each column proportional to the user's channel, cross terms zero.
        CHECK(std::abs(w[0][0]) == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(std::abs(w[0][1]) == doctest::Approx(0.0));
        CHECK(std::abs(w[1][0]) == doctest::Approx(0.0));
    }

    SUBCASE("single user gets the maximum-ratio direction")
    {
        std::vector<std::vector<cxd>> h{{cxd(1, 1), cxd(0, -2), cxd(0.5, 0)}};
        auto w = ezf_precoder(h);
        // w proportional to h (conjugate pairing in the gain), unit norm.
        double nrm = 0.0;
        for (const cxd& v : w[0])
            nrm += std::norm(v);
        CHECK(std::sqrt(nrm) == doctest::Approx(1.0));
        cxd gain(0, 0);
        for (std::size_t k = 0; k < 3; ++k)
            gain += std::conj(h[0][k]) * w[0][k];
        double hnorm = std::sqrt(std::norm(h[0][0]) + std::norm(h[0][1]) + std::norm(h[0][2]));
        CHECK(std::abs(gain) == doctest::Approx(hnorm));
        CHECK(std::abs(gain.imag()) < 1e-12);
    }

    SUBCASE("random full-rank rows: cross gains below 1e-10")
    {
        Rng rng(1);
        for (int rep = 0; rep < 20; ++rep)
        {
            auto h = random_rows(4, 8, rng);
            auto w = ezf_precoder(h);
            for (std::size_t u = 0; u < 4; ++u)
                for (std::size_t v = 0; v < 4; ++v)
                {
                    if (u == v)
                        continue;
                    cxd gain(0, 0);
                    for (std::size_t k = 0; k < 8; ++k)
                        gain += std::conj(h[u][k]) * w[v][k];
                    CHECK(std::abs(gain) < 1e-10);
                }
        }
    }

    SUBCASE("rank-deficient rows are rejected")
    {
        std::vector<std::vector<cxd>> h{{cxd(1, 0), cxd(2, 0)}, {cxd(2, 0), cxd(4, 0)}};
        CHECK_THROWS_AS(ezf_precoder(h), std::domain_error);
    }
}

TEST_CASE("sinr and spectral efficiency")
{
    SUBCASE("perfect ZF with two orthonormal users at rho=1")
    {
        std::vector<std::vector<cxd>> h{{cxd(1, 0), cxd(0, 0)}, {cxd(0, 0), cxd(1, 0)}};
        auto w = ezf_precoder(h);
        auto [sinr, se] = sinr_and_se(h, w, 0.0);
        // Power split 1/2 per user, no interference.
        CHECK(sinr[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(se == doctest::Approx(2.0 * std::log2(1.5)).epsilon(1e-12));
    }

    SUBCASE("vanishing power kills the rate")
    {
        Rng rng(2);
        auto h = random_rows(3, 4, rng);
        auto w = ezf_precoder(h);
        auto [sinr, se] = sinr_and_se(h, w, -300.0);
        (void)sinr;
        CHECK(se == doctest::Approx(0.0).epsilon(1e-9));
    }

    SUBCASE("interference-free single user at 30 dB with unit gain")
    {
        std::vector<std::vector<cxd>> h{{cxd(1, 0)}};
        std::vector<std::vector<cxd>> w{{cxd(1, 0)}}; // full power, matched
        auto [sinr, se] = sinr_and_se(h, w, 30.0);
        CHECK(sinr[0] == doctest::Approx(1000.0));
        CHECK(se == doctest::Approx(std::log2(1001.0)));
    }

    SUBCASE("SE is monotone in SNR for fixed channels and precoders")
    {
        Rng rng(3);
        auto h = random_rows(4, 8, rng);
        auto w = ezf_precoder(h);
        double prev = -1.0;
        for (double snr : {-10.0, 0.0, 10.0, 20.0, 30.0})
        {
            double se = sinr_and_se(h, w, snr).second;
            CHECK(se > prev);
            prev = se;
        }
    }
}

TEST_CASE("benchmark wiring on a small scenario")
{
    MisoScenario sc;
    sc.n_ue = 3;
    sc.base.grid = PortGrid{6, 5, 1.0, 1.2};
    sc.base.geom = ArrayGeometry{2, 2, 0.5, 0.5};
    sc.base.t_past = 6;
    sc.base.f_future = 4;
    sc.base.n_paths = 3;
    sc.n_trials = 6;
    sc.snr_db = {0.0, 20.0};
    sc.seed = 9;

    auto factory = [] {
        std::vector<std::unique_ptr<Predictor>> v;
        v.push_back(std::make_unique<HoldLastPredictor>());
        return v;
    };

    SUBCASE("report completeness and stationary dominance")
    {
        SEReport rep = run_benchmark(sc, factory);
        // (stationary, hold-last, no-prediction) x 2 SNRs.
        CHECK(rep.rows.size() == 6);

        auto find = [&](const std::string& cond, double snr) {
            for (const SERow& r : rep.rows)
                if (r.condition == cond && r.snr_db == snr)
                    return r.se_bps_hz;
            FAIL("missing row");
            return 0.0;
        };
        for (double snr : {0.0, 20.0})
        {
            CHECK(find("stationary", snr) >= find("hold-last", snr));
            CHECK(find("stationary", snr) > 0.0);
        }
    }

    SUBCASE("zero velocity collapses all conditions")
    {
        MisoScenario still = sc;
        still.speed_mps = 0.0;
        SEReport rep = run_benchmark(still, factory);
        auto find = [&](const std::string& cond, double snr) {
            for (const SERow& r : rep.rows)
                if (r.condition == cond && r.snr_db == snr)
                    return r.se_bps_hz;
            return -1.0;
        };
        for (double snr : {0.0, 20.0})
        {
            double st = find("stationary", snr);
            CHECK(find("hold-last", snr) == doctest::Approx(st).epsilon(1e-9));
            CHECK(find("no-prediction", snr) == doctest::Approx(st).epsilon(1e-9));
        }
    }
}

TEST_CASE("horizon bench emits one row per predictor and step")
{
    MisoScenario sc;
    sc.n_ue = 2;
    sc.base.grid = PortGrid{6, 5, 1.0, 1.2};
    sc.base.geom = ArrayGeometry{1, 2, 0.5, 0.5};
    sc.base.t_past = 6;
    sc.base.f_future = 5;
    sc.base.n_paths = 2;
    sc.n_trials = 4;
    sc.seed = 11;

    auto factory = [] {
        std::vector<std::unique_ptr<Predictor>> v;
        v.push_back(std::make_unique<HoldLastPredictor>());
        v.push_back(std::make_unique<VecPronyPredictor>(2));
        return v;
    };

    auto rows = nmse_horizon_bench(sc, factory);
    CHECK(rows.size() == 10);
    int steps_seen = 0;
    for (const HorizonRow& r : rows)
    {
        CHECK((r.predictor == "hold-last" || r.predictor == "vec-prony"));
        CHECK(r.step >= 1);
        CHECK(r.step <= 5);
        CHECK(r.bs_config == "1x2");
        steps_seen += 1;
    }
    CHECK(steps_seen == 10);
}

TEST_CASE("hold-last horizon error grows within a quarter rotation")
{
    // Slow scenario: per-slot LoS phase advance far below a quarter turn over
    // the whole horizon, so the phase-drift error is monotone in the step.
    MisoScenario sc;
    sc.n_ue = 2;
    sc.base.grid = PortGrid{6, 5, 1.0, 1.2};
    sc.base.geom = ArrayGeometry{1, 2, 0.5, 0.5};
    sc.base.t_past = 6;
    sc.base.f_future = 5;
    sc.base.n_paths = 1; // pure LoS: single rotating exponential per antenna
    sc.base.csi_delay_slots = 0;
    sc.speed_mps = 0.02; // ~3.4 degrees per slot at 39 GHz
    sc.n_trials = 8;
    sc.seed = 13;

    auto factory = [] {
        std::vector<std::unique_ptr<Predictor>> v;
        v.push_back(std::make_unique<HoldLastPredictor>());
        return v;
    };

    auto rows = nmse_horizon_bench(sc, factory);
    REQUIRE(rows.size() == 5);
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(rows[i].nmse_db >= rows[i - 1].nmse_db);
}
