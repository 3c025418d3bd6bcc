// SPDX-License-Identifier: Apache-2.0
//
// rismb: multi-beam reflection synthesis for RIS-assisted mmWave links
// Copyright (C) 2026 The rismb authors
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

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace rismb;
using Catch::Approx;

namespace
{
    const ArrayGeometry geom8(8, 8);
    const PsiGrid grid = make_default_grid(geom8);
}

TEST_CASE("report - flat pattern")
{
    const CoverSet cover = CoverSet::from_cells({{3, 3}, {3, 4}, {10, 12}});
    const PatternReport r = report(Beamformer::basis(geom8, 0), cover, grid);
    CHECK(r.leakage_fraction == Approx(1.0 - 3 * grid.cell_area() / full_period_area).epsilon(1e-12));
    CHECK(r.mean_in_db == Approx(0.0).margin(1e-12));
    CHECK(r.ripple_db == Approx(0.0).margin(1e-12));
    CHECK(r.ideal_level_db == Approx(ideal_gain_level(cover, grid).level_db()).epsilon(1e-15));
    CHECK_THROWS_AS(report(Beamformer::basis(geom8, 0), CoverSet{}, grid), empty_cover_error);
    CHECK_THROWS_AS(report(Beamformer::basis(geom8, 0), cover, grid, 16), invalid_argument_error);
    CHECK_THROWS_AS(report(Beamformer::basis(geom8, 0), cover, grid, 32, 0.5), invalid_argument_error);
}

TEST_CASE("report - ordering, leakage accounting and phase invariance")
{
    std::mt19937_64 rng(17);
    const CoverSet cover = CoverSet::from_cells({{5, 5}, {5, 6}, {12, 3}});
    for (int i = 0; i < 5; ++i)
    {
        const Beamformer c(geom8, oracle::random_unit(rng, 64));
        const PatternReport r = report(c, cover, grid);
        CHECK(r.min_in_db <= r.median_in_db);
        CHECK(r.median_in_db <= r.max_in_db);
        CHECK(r.ripple_db >= 0.0);
        CHECK(r.leakage_fraction >= 0.0);
        CHECK(r.leakage_fraction <= 1.0);

        double inside = 0.0;
        for (const auto &cell : cover.indices)
            inside += oracle::quadrature_region(geom8, c.entries(), grid.cell(cell), 120);
        CHECK(r.leakage_fraction + inside / full_period_area == Approx(1.0).epsilon(1e-6));

        const Beamformer rotated(geom8, c.entries() * std::polar(1.0, 1.234));
        const PatternReport q = report(rotated, cover, grid);
        CHECK(q.mean_in_db == Approx(r.mean_in_db).epsilon(1e-12));
        CHECK(q.ripple_db == Approx(r.ripple_db).epsilon(1e-9).margin(1e-12));
        CHECK(q.leakage_fraction == Approx(r.leakage_fraction).epsilon(1e-12));
    }
}

TEST_CASE("compare - identical designs and power halving")
{
    const CoverSet cover = CoverSet::from_cells({{4, 4}});
    const Beamformer c = design_closed_form(cover, grid, geom8, {}).beamformer;
    const PatternReport a = report(c, cover, grid);
    CHECK(compare(a, a) == 0.0);

    ComplexVector half = c.entries() / std::sqrt(2.0);
    const PatternReport b = report(8, 8, half, cover, grid);
    CHECK(compare(a, b) == Approx(10 * std::log10(2.0)).epsilon(1e-12));

    const PatternReport other = report(c, CoverSet::from_cells({{4, 5}}), grid);
    CHECK_THROWS_AS(compare(a, other), invalid_argument_error);
}

TEST_CASE("report_from_grid - agrees with itself after a dB round trip")
{
    const CoverSet cover = CoverSet::from_cells({{8, 8}, {8, 9}});
    const Beamformer c = design_closed_form(cover, grid, geom8, {}).beamformer;
    const PatternGrid pg = pattern(c, 97, 131, grid.bounds());
    const PatternReport a = report_from_grid(pg, cover, grid);
    PatternGrid rt = pg;
    rt.gains = gains_to_db(pg.gains).unaryExpr([](double d)
                                               { return from_db(d); });
    const PatternReport b = report_from_grid(rt, cover, grid);
    CHECK(a.mean_in_db == Approx(b.mean_in_db).epsilon(1e-12));
    CHECK(a.ripple_db == Approx(b.ripple_db).margin(1e-9));
    CHECK(a.leakage_fraction == Approx(b.leakage_fraction).margin(1e-9));
    // sampled statistics land close to the dense report
    const PatternReport dense = report(c, cover, grid);
    CHECK(std::abs(a.mean_in_db - dense.mean_in_db) < 0.5);
}

TEST_CASE("cut - flat pattern has no widths")
{
    const CutProfile c = cut(Beamformer::basis(geom8, 0), geom8, CutAxis::fixed_phi, 0.1, 256);
    CHECK(c.lobes.empty());
    CHECK(c.angles.size() == 256);
    for (double g : c.gains_db)
        CHECK(g == Approx(0.0).margin(1e-12));
    CHECK(std::is_sorted(c.angles.begin(), c.angles.end()));
    CHECK_THROWS_AS(cut(Beamformer::basis(geom8, 0), geom8, CutAxis::fixed_phi, 1.0, 256), invalid_argument_error);
    CHECK_THROWS_AS(cut(Beamformer::basis(geom8, 0), geom8, CutAxis::fixed_phi, 0.1, 32), invalid_argument_error);
}

TEST_CASE("cut - steering beam widths against the array factor")
{
    const ArrayGeometry geom(1, 16);
    const Beamformer c = Beamformer::steering(geom, {0.0, 0.0});
    const CutProfile prof = cut(c, geom, CutAxis::fixed_phi, 0.0, 8192, {3.0, 10.0});
    REQUIRE(prof.lobes.size() == 1);
    // half-power angle of a 16-element broadside array, found by bisection
    auto af = [](double th)
    {
        const double x = pi * std::sin(th);
        return std::norm(std::sin(8 * x) / (16 * std::sin(x / 2)));
    };
    double lo = 1e-6, hi = 0.2;
    for (int i = 0; i < 200; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        (to_db(af(mid)) > -3.0 ? lo : hi) = mid;
    }
    CHECK(prof.lobes[0].widths.at(3.0) == Approx(2 * lo).epsilon(2e-3));
    CHECK(prof.lobes[0].widths.at(10.0) > prof.lobes[0].widths.at(3.0));
}

TEST_CASE("cut - widths shrink as the array grows")
{
    const CoverSet cover = CoverSet::from_cells({{9, 9}});
    const double through_center = std::asin(0.5 * grid.delta_v() / pi);
    double prev = std::numeric_limits<double>::infinity();
    for (int m : {4, 8, 16, 32})
    {
        const ArrayGeometry geom(m, m);
        const Beamformer c = design_closed_form(cover, grid, geom, {}).beamformer;
        const CutProfile p = cut(c, geom, CutAxis::fixed_phi, through_center, 4096, {10.0});
        REQUIRE_FALSE(p.lobes.empty());
        const double w = p.lobes.front().widths.at(10.0);
        CHECK(w <= prev * 1.02);
        prev = w;
    }
}

TEST_CASE("count_components - 4-connectivity")
{
    RealMatrix m = RealMatrix::Zero(5, 5);
    m(0, 0) = m(0, 1) = 1.0;
    m(2, 2) = 1.0;
    m(3, 3) = 1.0; // diagonal neighbour: separate component
    m(4, 0) = m(4, 1) = m(3, 0) = 1.0;
    CHECK(count_components(m, 0.5) == 4);
    CHECK(count_components(m, 2.0) == 0);
    CHECK(count_components(m, -1.0) == 1);
}
