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

#include "fapt/port_select.hpp"
#include "fapt/rng.hpp"

using namespace fapt;

namespace
{
    CxTable random_table(int n, int m, Rng& rng)
    {
        CxTable t(n, m);
        for (cxd& v : t.a)
            v = cxd(rng.uniform(-1, 1), rng.uniform(-1, 1));
        return t;
    }
} // namespace

TEST_CASE("flat index round trip")
{
    CHECK(flat_to_port(0, 100, 50) == PortIndex{1, 1, 0});
    CHECK(flat_to_port(57, 100, 50) == PortIndex{2, 8, 57});
    CHECK(flat_to_port(100 * 50 - 1, 100, 50) == PortIndex{100, 50, 4999});
    CHECK_THROWS_AS(flat_to_port(-1, 4, 4), std::out_of_range);
    CHECK_THROWS_AS(flat_to_port(16, 4, 4), std::out_of_range);
}

TEST_CASE("single-table selection")
{
    SUBCASE("exact match resolves to (1,1) by the tie rule")
    {
        Rng rng(5);
        CxTable t = random_table(4, 4, rng);
        CHECK(select_port_single(t, t) == PortIndex{1, 1, 0});
    }

    SUBCASE("2x2 example")
    {
        CxTable pred(2, 2);
        pred.a = {cxd(1, 0), cxd(2, 0), cxd(3, 0), cxd(0.5, 0)};
        CxTable ref(2, 2);
        std::fill(ref.a.begin(), ref.a.end(), cxd(0.4, 0));
        CHECK(select_port_single(pred, ref) == PortIndex{2, 2, 3});
    }

    SUBCASE("shape mismatch")
    {
        Rng rng(6);
        CxTable a = random_table(2, 3, rng), b = random_table(3, 2, rng);
        CHECK_THROWS_AS(select_port_single(a, b), std::invalid_argument);
    }
}

TEST_CASE("miso selection reduces to single-table for one antenna")
{
    Rng rng(10);
    for (int rep = 0; rep < 20; ++rep)
    {
        CxTable pred = random_table(5, 7, rng), ref = random_table(5, 7, rng);
        CHECK(select_port_miso({pred}, {ref}) == select_port_single(pred, ref));
    }
}

TEST_CASE("miso selection equals the brute-force oracle")
{
    Rng rng(42);
    for (int rep = 0; rep < 1000; ++rep)
    {
        int n = 1 + static_cast<int>(rng.uniform_int(20));
        int m = 1 + static_cast<int>(rng.uniform_int(20));
        int n_ant = 1 + static_cast<int>(rng.uniform_int(4));
        std::vector<CxTable> pred, ref;
        for (int i = 0; i < n_ant; ++i)
        {
            pred.push_back(random_table(n, m, rng));
            ref.push_back(random_table(n, m, rng));
        }
        CHECK(select_port_miso(pred, ref) == brute_force_port_oracle(pred, ref));
    }
}

TEST_CASE("oracle boundary behaviour")
{
    CxTable one(1, 1);
    one.a = {cxd(0.3, -0.2)};
    CHECK(brute_force_port_oracle({one}, {one}) == PortIndex{1, 1, 0});

    // All-equal distance map keeps the first cell.
    CxTable pred(3, 3), ref(3, 3);
    std::fill(pred.a.begin(), pred.a.end(), cxd(1, 1));
    std::fill(ref.a.begin(), ref.a.end(), cxd(0, 0));
    CHECK(brute_force_port_oracle({pred}, {ref}) == PortIndex{1, 1, 0});
}

TEST_CASE("selection is invariant to a common positive scale")
{
    Rng rng(77);
    for (int rep = 0; rep < 50; ++rep)
    {
        std::vector<CxTable> pred{random_table(6, 5, rng), random_table(6, 5, rng)};
        std::vector<CxTable> ref{random_table(6, 5, rng), random_table(6, 5, rng)};
        PortIndex base = select_port_miso(pred, ref);

        double c = rng.uniform(0.1, 9.0);
        auto scale = [c](std::vector<CxTable> v) {
            for (CxTable& t : v)
                for (cxd& x : t.a)
                    x *= c;
            return v;
        };
        CHECK(select_port_miso(scale(pred), scale(ref)) == base);
    }
}

TEST_CASE("conflicting per-antenna minima resolve by the summed distance")
{
    // Antenna 1 prefers port (1,2); antenna 2 prefers (2,1); the sum favours
    // (2,2). Checked against the oracle and by hand.
    CxTable p1(2, 2), p2(2, 2), r(2, 2);
    std::fill(r.a.begin(), r.a.end(), cxd(0, 0));
    p1.a = {cxd(5, 0), cxd(0.1, 0), cxd(4, 0), cxd(1, 0)};
    p2.a = {cxd(5, 0), cxd(4, 0), cxd(0.1, 0), cxd(1, 0)};
    PortIndex got = select_port_miso({p1, p2}, {r, r});
    CHECK(got == PortIndex{2, 2, 3});
    CHECK(got == brute_force_port_oracle({p1, p2}, {r, r}));
}

TEST_CASE("validation nmse fixed points")
{
    std::vector<cxd> h{cxd(1, 1), cxd(2, -1), cxd(0.5, 0)};

    CHECK(validation_nmse(h, h) == -std::numeric_limits<double>::infinity());

    std::vector<cxd> zero(h.size(), cxd(0, 0));
    CHECK(validation_nmse(zero, h) == doctest::Approx(0.0));

    // 10% scalar error -> -20 dB.
    std::vector<cxd> scaled = h;
    for (cxd& v : scaled)
        v *= 1.1;
    CHECK(validation_nmse(scaled, h) == doctest::Approx(-20.0).epsilon(1e-9));

    CHECK_THROWS_AS(validation_nmse(h, zero), std::domain_error);
    CHECK_THROWS_AS(validation_nmse(h, std::vector<cxd>{cxd(1, 0)}), std::invalid_argument);
}

TEST_CASE("table accuracy fixed points")
{
    CxSeries truth(2, 2, 2);
    Rng rng(9);
    for (cxd& v : truth.a)
        v = cxd(rng.uniform(-1, 1), rng.uniform(-1, 1));

    CHECK(table_accuracy(truth, truth) == doctest::Approx(100.0));

    CxSeries zero(2, 2, 2);
    CHECK(table_accuracy(zero, truth) == doctest::Approx(0.0));

    CxSeries scaled = truth;
    for (cxd& v : scaled.a)
        v *= 1.01;
    CHECK(table_accuracy(scaled, truth) == doctest::Approx(99.0).epsilon(1e-9));

    // Gross over-prediction clamps at 0 rather than going negative.
    CxSeries wild = truth;
    for (cxd& v : wild.a)
        v *= 5.0;
    CHECK(table_accuracy(wild, truth) == 0.0);

    CHECK_THROWS_AS(table_accuracy(truth, zero), std::domain_error);
}
