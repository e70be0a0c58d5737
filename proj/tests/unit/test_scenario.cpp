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

#include <cstdlib>

#include "fapt/scenario.hpp"

using namespace fapt;

namespace
{
    ScenarioConfig small_cfg()
    {
        ScenarioConfig cfg;
        cfg.grid = PortGrid{6, 5, 1.0, 1.2};
        cfg.t_past = 4;
        cfg.f_future = 3;
        cfg.n_paths = 4;
        cfg.seed = 99;
        return cfg;
    }
} // namespace

TEST_CASE("path set construction")
{
    ScenarioConfig cfg = small_cfg();

    SUBCASE("degenerate single-path set")
    {
        cfg.n_paths = 1;
        PathSet ps = sample_path_set(cfg, 0);
        REQUIRE(ps.paths.size() == 1);
        CHECK(ps.paths[0].is_los);
        CHECK(ps.paths[0].beta == doctest::Approx(1.0));
        CHECK(ps.paths[0].tau == 0.0);
    }

    SUBCASE("path count and LoS uniqueness")
    {
        cfg.n_paths = 37;
        PathSet ps = sample_path_set(cfg, 2);
        CHECK(ps.paths.size() == 37);
        int n_los = 0;
        for (const Path& p : ps.paths)
            n_los += p.is_los ? 1 : 0;
        CHECK(n_los == 1);
    }

    SUBCASE("unit power and sorted delays")
    {
        PathSet ps = sample_path_set(cfg, 1);
        double power = 0.0;
        for (const Path& p : ps.paths)
            power += p.beta * p.beta;
        CHECK(power == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t i = 2; i < ps.paths.size(); ++i)
            CHECK(ps.paths[i].tau >= ps.paths[i - 1].tau);
        for (const Path& p : ps.paths)
        {
            CHECK(p.theta_eoa >= 0.0);
            CHECK(p.theta_eoa <= kPi);
            CHECK(p.phi_aoa > -kPi);
            CHECK(p.phi_aoa <= kPi);
        }
    }

    SUBCASE("deterministic per (seed, ue)")
    {
        PathSet a = sample_path_set(cfg, 3);
        PathSet b = sample_path_set(cfg, 3);
        REQUIRE(a.paths.size() == b.paths.size());
        for (std::size_t i = 0; i < a.paths.size(); ++i)
        {
            CHECK(a.paths[i].tau == b.paths[i].tau);
            CHECK(a.paths[i].phi_aoa == b.paths[i].phi_aoa);
            CHECK(a.paths[i].beta == b.paths[i].beta);
        }
        PathSet c = sample_path_set(cfg, 4);
        CHECK(a.paths[1].tau != c.paths[1].tau);
    }

    SUBCASE("errors")
    {
        cfg.angle_tuples_deg.clear();
        CHECK_THROWS_AS(sample_path_set(cfg, 0), std::invalid_argument);
        ScenarioConfig c2 = small_cfg();
        CHECK_THROWS_AS(sample_path_set(c2, 1000), std::out_of_range);
    }
}

TEST_CASE("sample generation")
{
    ScenarioConfig cfg = small_cfg();
    PathSet ps = sample_path_set(cfg, 0);

    SUBCASE("shapes and time anchoring")
    {
        SampleRecord rec = generate_sample(cfg, ps, 100, Velocity{{0, 3.0, 4.0}});
        CHECK(rec.past.steps == 4);
        CHECK(rec.future.steps == 3);
        CHECK(rec.reference.steps == 3);
        CHECK(rec.past.rows == 6);
        CHECK(rec.past.cols == 5);
        CHECK(rec.meta.speed_mps == doctest::Approx(5.0));
    }

    SUBCASE("zero speed: stationary tables and exact reference")
    {
        SampleRecord rec = generate_sample(cfg, ps, 50, Velocity{{0, 0, 0}});
        for (int t = 1; t < rec.past.steps; ++t)
            for (std::size_t i = 0; i < rec.past.table_size(); ++i)
                CHECK(std::abs(rec.past.slice(t)[i] - rec.past.slice(0)[i]) < 1e-12);
        for (int t = 0; t < rec.future.steps; ++t)
            for (std::size_t i = 0; i < rec.future.table_size(); ++i)
                CHECK(std::abs(rec.future.slice(t)[i] - rec.past.slice(0)[i]) < 1e-12);
        // Reference equals the port-(1,1) entry.
        CHECK(rec.reference.at(0, 0, 0) == rec.past.at(rec.past.steps - 1, 0, 0));
    }

    SUBCASE("reference slices are constant")
    {
        SampleRecord rec = generate_sample(cfg, ps, 123, Velocity{{0, 10.0, -5.0}});
        for (int t = 0; t < rec.reference.steps; ++t)
        {
            const cxd* s = rec.reference.slice(t);
            for (std::size_t i = 1; i < rec.reference.table_size(); ++i)
                CHECK(s[i] == s[0]);
        }
    }

    SUBCASE("tables match a hand-rolled per-slot loop")
    {
        Velocity vel{{0, -7.0, 2.0}};
        SampleRecord rec = generate_sample(cfg, ps, 10, vel);

        PathSet moving = ps;
        apply_velocity(moving, vel);
        ArrayGeometry siso{1, 1, cfg.geom.d_ty, cfg.geom.d_tz};
        for (int i = 0; i < rec.past.steps; ++i)
        {
            double t = (10 - cfg.t_past + i + 1) * cfg.slot_duration_s;
            for (int n = 1; n <= cfg.grid.n_ports_z; ++n)
                for (int m = 1; m <= cfg.grid.n_ports_y; ++m)
                    CHECK(std::abs(rec.past.at(i, n - 1, m - 1) -
                                   channel_coeff(1, n, m, t, moving, siso, cfg.grid)) < 1e-10);
        }
        for (int i = 0; i < rec.future.steps; ++i)
        {
            double t = (10 + cfg.csi_delay_slots + i + 1) * cfg.slot_duration_s;
            for (int n = 1; n <= cfg.grid.n_ports_z; ++n)
                for (int m = 1; m <= cfg.grid.n_ports_y; ++m)
                    CHECK(std::abs(rec.future.at(i, n - 1, m - 1) -
                                   channel_coeff(1, n, m, t, moving, siso, cfg.grid)) < 1e-10);
        }
    }
}

TEST_CASE("dataset construction")
{
    ScenarioConfig cfg = small_cfg();

    SUBCASE("split sizes")
    {
        auto [train, test] = build_dataset(cfg, 40, 0.75);
        CHECK(train.samples.size() == 30);
        CHECK(test.samples.size() == 10);
        CHECK(train.t_past == 4);
        CHECK(train.n_rows == 6);
        CHECK(train.m_cols == 5);
    }

    SUBCASE("two-sample boundary")
    {
        auto [train, test] = build_dataset(cfg, 2, 0.75);
        CHECK(train.samples.size() == 1);
        CHECK(test.samples.size() == 1);
    }

    SUBCASE("errors")
    {
        CHECK_THROWS_AS(build_dataset(cfg, 1, 0.75), std::invalid_argument);
        CHECK_THROWS_AS(build_dataset(cfg, 10, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(build_dataset(cfg, 10, 1.0), std::invalid_argument);
    }

    SUBCASE("deterministic across repeated builds and thread counts")
    {
        auto [train1, test1] = build_dataset(cfg, 24, 0.5);

        setenv("FAPT_THREADS", "1", 1);
        auto [train2, test2] = build_dataset(cfg, 24, 0.5);
        unsetenv("FAPT_THREADS");

        REQUIRE(train1.samples.size() == train2.samples.size());
        for (std::size_t s = 0; s < train1.samples.size(); ++s)
        {
            CHECK(train1.samples[s].meta.seed == train2.samples[s].meta.seed);
            for (std::size_t i = 0; i < train1.samples[s].past.a.size(); ++i)
                CHECK(train1.samples[s].past.a[i] == train2.samples[s].past.a[i]);
        }
    }

    SUBCASE("round robin over UEs")
    {
        auto [train, test] = build_dataset(cfg, 20, 0.5);
        std::vector<int> counts(cfg.angle_tuples_deg.size(), 0);
        for (const auto& ds : {train, test})
            for (const SampleRecord& r : ds.samples)
                counts[r.meta.ue_id] += 1;
        for (int c : counts)
            CHECK(c == 2);
    }
}

TEST_CASE("normalization")
{
    SUBCASE("constant tensor collapses to zeros with floored sigma")
    {
        CxSeries x(2, 2, 2);
        std::fill(x.a.begin(), x.a.end(), cxd(3.0, -1.0));
        auto [y, stats] = normalize(x);
        CHECK(stats.mu == cxd(3.0, -1.0));
        CHECK(stats.sigma == kSigmaFloor);
        for (const cxd& v : y.a)
            CHECK(std::abs(v) < 1e-9);
    }

    SUBCASE("normalized moments")
    {
        Rng rng(4);
        CxSeries x(3, 4, 5);
        for (cxd& v : x.a)
            v = cxd(rng.uniform(-2, 5), rng.uniform(-1, 9));
        auto [y, stats] = normalize(x);

        cxd mean(0, 0);
        for (const cxd& v : y.a)
            mean += v;
        mean /= static_cast<double>(y.a.size());
        CHECK(std::abs(mean) < 1e-6);

        double var = 0.0;
        for (const cxd& v : y.a)
            var += std::norm(v);
        var /= static_cast<double>(2 * y.a.size());
        CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(1e-6));
    }

    SUBCASE("round trip and affine identity")
    {
        Rng rng(8);
        CxSeries x(2, 3, 3);
        for (cxd& v : x.a)
            v = cxd(rng.uniform(-4, 4), rng.uniform(-4, 4));
        auto [y, stats] = normalize(x);
        CxSeries back = denormalize(y, stats);
        for (std::size_t i = 0; i < x.a.size(); ++i)
            CHECK(std::abs(back.a[i] - x.a[i]) / std::abs(x.a[i]) < 1e-6);

        // denorm(a+b) - denorm(a) - denorm(b) = -mu
        CxSeries a = y, b = y;
        for (cxd& v : b.a)
            v *= 0.3;
        CxSeries ab(y.steps, y.rows, y.cols);
        for (std::size_t i = 0; i < ab.a.size(); ++i)
            ab.a[i] = a.a[i] + b.a[i];
        CxSeries d1 = denormalize(ab, stats), d2 = denormalize(a, stats), d3 = denormalize(b, stats);
        for (std::size_t i = 0; i < ab.a.size(); ++i)
            CHECK(std::abs(d1.a[i] - d2.a[i] - d3.a[i] + stats.mu) < 1e-12);
    }

    SUBCASE("zeros denormalize to mu")
    {
        CxSeries z(1, 2, 2);
        NormStats st{cxd(1.0, 1.0), 2.0};
        CxSeries out = denormalize(z, st);
        for (const cxd& v : out.a)
            CHECK(v == cxd(1.0, 1.0));
    }
}
