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
    MultiBeamSpec dual_beam()
    {
        return {{{"lobe_1", {AngularBox::from_center(-8 * pi / 32, -5 * pi / 32, pi / 16, pi / 16)}},
                 {"lobe_2", {AngularBox::from_center(7 * pi / 32, pi / 32, pi / 16, pi / 16)}}}};
    }
}

TEST_CASE("to_psi - reference points at half-wavelength spacing")
{
    const ArrayGeometry g(4, 4);
    auto p = to_psi({0.0, 0.0}, g);
    CHECK(p.xi == 0.0);
    CHECK(p.zeta == 0.0);

    p = to_psi({pi / 4, 0.0}, g);
    CHECK(p.xi == Approx(2.221441).epsilon(1e-6));
    CHECK(p.zeta == Approx(0.0).margin(1e-15));

    p = to_psi({0.0, pi / 2}, g);
    CHECK(p.xi == 0.0);
    CHECK(p.zeta == Approx(pi).epsilon(1e-15));
}

TEST_CASE("from_psi - inverse and out-of-image")
{
    const ArrayGeometry g(4, 4);
    auto a = from_psi({0.0, 0.0}, g);
    CHECK(a.phi == 0.0);
    CHECK(a.theta == 0.0);

    a = from_psi({pi * std::sqrt(2.0) / 2, 0.0}, g);
    CHECK(a.phi == Approx(pi / 4).epsilon(1e-12));
    CHECK(a.theta == Approx(0.0).margin(1e-15));

    CHECK_THROWS_AS(from_psi({0.0, 2 * pi * 1.5}, g), out_of_image_error);
    CHECK_THROWS_AS(from_psi({4.0, 0.0}, g), out_of_image_error);
}

TEST_CASE("to_psi / from_psi - round trip over the coverage range")
{
    const ArrayGeometry g(8, 8);
    const CoverageRange range;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i)
    {
        const SolidAngle a(-range.phi_bound + 2 * range.phi_bound * u(rng), -range.theta_bound + 2 * range.theta_bound * u(rng));
        const SolidAngle b = from_psi(to_psi(a, g), g);
        worst = std::max({worst, std::abs(a.phi - b.phi), std::abs(a.theta - b.theta)});
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("SolidAngle and ArrayGeometry - validation")
{
    CHECK_THROWS_AS(SolidAngle(2.0, 0.0), invalid_argument_error);
    CHECK_THROWS_AS(SolidAngle(0.0, pi), invalid_argument_error);
    CHECK_NOTHROW(SolidAngle(0.0, -pi));
    CHECK_THROWS_AS(ArrayGeometry(0, 4), invalid_argument_error);
    CHECK_THROWS_AS(ArrayGeometry(4, 4, 0.0, 0.5), invalid_argument_error);
    CHECK(ArrayGeometry(3, 5).size() == 15);
    CHECK(ArrayGeometry(3, 5).flat_index(2, 4) == 14);
}

TEST_CASE("make_grid - default constants")
{
    const PsiGrid g = make_grid(16, 16, pi * std::sqrt(2.0) / 2, pi);
    CHECK(g.delta_v() == Approx(0.277680).epsilon(1e-6));
    CHECK(g.delta_h() == Approx(0.392699).epsilon(1e-6));
    CHECK(g.delta_v() * g.q_v() == Approx(2 * g.xi_bound()).epsilon(1e-15));
    CHECK(g.xi_edge(0) == -g.xi_bound());
    CHECK(g.xi_edge(16) == g.xi_bound());
    CHECK(g.zeta_edge(8) == Approx(0.0).margin(1e-15));

    const PsiGrid d = make_default_grid(ArrayGeometry(4, 4));
    CHECK(d == g);

    const PsiGrid one = make_grid(1, 1, pi, pi);
    const PsiRect c = one.cell({1, 1});
    CHECK(c.xi_lo == -pi);
    CHECK(c.xi_hi == pi);
    CHECK(c.zeta_lo == -pi);
    CHECK(c.zeta_hi == pi);

    CHECK_THROWS_AS(make_grid(0, 4, 1.0, 1.0), invalid_argument_error);
    CHECK_THROWS_AS(make_grid(4, 4, -1.0, 1.0), invalid_argument_error);
}

TEST_CASE("subregion_of - corners and half-open edges")
{
    const PsiGrid g = make_default_grid(ArrayGeometry(4, 4));
    auto c = subregion_of({-g.xi_bound(), -g.zeta_bound()}, g);
    CHECK(c.p == 1);
    CHECK(c.q == 1);

    c = subregion_of({1e-12, 1e-12}, g);
    CHECK(c.p == 9);
    CHECK(c.q == 9);

    c = subregion_of({g.xi_edge(3), g.zeta_edge(5)}, g);
    CHECK(c.p == 4);
    CHECK(c.q == 6);

    CHECK_THROWS_AS(subregion_of({g.xi_bound(), 0.0}, g), out_of_range_error);
    CHECK_THROWS_AS(subregion_of({0.0, g.zeta_bound()}, g), out_of_range_error);
    CHECK_THROWS_AS(subregion_of({-4.0, 0.0}, g), out_of_range_error);
}

TEST_CASE("subregion_of - tiling by random points")
{
    const PsiGrid g = make_grid(7, 11, 2.0, 3.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(-2.0, 2.0), uz(-3.0, 3.0);
    int failures = 0;
    for (int i = 0; i < 100000; ++i)
    {
        const PsiPoint pt{ux(rng), uz(rng)};
        const CellIndex c = subregion_of(pt, g);
        int owners = 0;
        for (int p = 1; p <= g.q_v(); ++p)
            for (int q = 1; q <= g.q_h(); ++q)
            {
                const PsiRect r = g.cell({p, q});
                if (pt.xi >= r.xi_lo && pt.xi < r.xi_hi && pt.zeta >= r.zeta_lo && pt.zeta < r.zeta_hi)
                    owners += (p == c.p && q == c.q) ? 1 : 100;
            }
        failures += owners != 1;
    }
    CHECK(failures == 0);
}

TEST_CASE("cover_set - exact cells and adjacent pairs")
{
    const ArrayGeometry geom(4, 4);
    const PsiGrid g = make_default_grid(geom);

    const MultiBeamSpec one{{{"cell", {g.cell({3, 5})}}}};
    const CoverSet a = cover_set(one, g, geom);
    REQUIRE(a.size() == 1);
    CHECK(a.indices[0] == CellIndex{3, 5});

    const PsiRect c1 = g.cell({3, 5}), c2 = g.cell({3, 6});
    const MultiBeamSpec two{{{"pair", {PsiRect{c1.xi_lo, c1.xi_hi, c1.zeta_lo, c2.zeta_hi}}}}};
    CHECK(cover_set(two, g, geom).size() == 2);
}

TEST_CASE("cover_set - dual beam against a brute-force scan")
{
    const ArrayGeometry geom(32, 32);
    const CoverageRange range;
    const PsiGrid g = make_default_grid(geom, range);
    const auto lobes = resolve_lobes(dual_beam(), g, geom, range);
    CHECK(lobes[0].clipped);
    CHECK_FALSE(lobes[1].clipped);

    const CoverSet cs = cover_set(lobes, g);
    std::vector<PsiRect> rects;
    for (const auto &l : lobes)
        rects.insert(rects.end(), l.rects.begin(), l.rects.end());
    const auto brute = oracle::brute_force_cover(rects, g);
    CHECK(cs.indices == brute);

    const std::vector<CellIndex> expected{{1, 5}, {1, 6}, {15, 9}, {15, 10}, {16, 9}, {16, 10}};
    CHECK(cs.indices == expected);
    REQUIRE(cs.per_lobe.size() == 2);
    CHECK(cs.per_lobe[0].size() == 2);
    CHECK(cs.per_lobe[1].size() == 4);

    // union of cover cells contains every lobe rectangle
    for (const auto &r : rects)
        for (int a = 0; a <= 20; ++a)
            for (int b = 0; b <= 20; ++b)
            {
                PsiPoint pt{r.xi_lo + a / 20.0 * r.width_xi(), r.zeta_lo + b / 20.0 * r.width_zeta()};
                pt.xi = std::min(pt.xi, std::nextafter(g.xi_bound(), 0.0));
                pt.zeta = std::min(pt.zeta, std::nextafter(g.zeta_bound(), 0.0));
                CHECK(cs.contains(subregion_of(pt, g)));
            }
}

TEST_CASE("cover_set - random rectangles match brute force and are minimal")
{
    const PsiGrid g = make_grid(12, 10, 2.2, 3.1);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ux(-2.2, 2.2), uz(-3.1, 3.1);
    for (int trial = 0; trial < 40; ++trial)
    {
        double x0 = ux(rng), x1 = ux(rng), z0 = uz(rng), z1 = uz(rng);
        if (x0 > x1)
            std::swap(x0, x1);
        if (z0 > z1)
            std::swap(z0, z1);
        const PsiRect r{x0, x1, z0, z1};
        if (r.width_xi() < 0.05 || r.width_zeta() < 0.05)
            continue;
        const auto cells = cells_meeting(r, g);
        // the lattice misses slivers thinner than its spacing; every extra
        // cell must be such a sliver
        const auto lattice = oracle::brute_force_cover({r}, g, 64);
        CHECK(std::includes(cells.begin(), cells.end(), lattice.begin(), lattice.end()));
        for (const auto &c : cells)
        {
            if (std::binary_search(lattice.begin(), lattice.end(), c))
                continue;
            const PsiRect cell = g.cell(c);
            const double over_xi = std::min(cell.xi_hi, r.xi_hi) - std::max(cell.xi_lo, r.xi_lo);
            const double over_zeta = std::min(cell.zeta_hi, r.zeta_hi) - std::max(cell.zeta_lo, r.zeta_lo);
            CHECK(std::min(over_xi / cell.width_xi(), over_zeta / cell.width_zeta()) < 1.0 / 64);
        }

        // minimality: each cell holds a lobe point that no other cover cell holds
        for (const auto &c : cells)
        {
            const PsiRect cell = g.cell(c);
            const PsiRect overlap{std::max(cell.xi_lo, r.xi_lo), std::min(cell.xi_hi, r.xi_hi),
                                  std::max(cell.zeta_lo, r.zeta_lo), std::min(cell.zeta_hi, r.zeta_hi)};
            CHECK(overlap.area() > 0.0);
            const PsiPoint mid{0.5 * (overlap.xi_lo + overlap.xi_hi), 0.5 * (overlap.zeta_lo + overlap.zeta_hi)};
            CHECK(subregion_of(mid, g) == c);
        }
    }
}

TEST_CASE("cover_set - refinement never loosens the cover")
{
    const ArrayGeometry geom(8, 8);
    const CoverageRange range;
    const auto spec = dual_beam();
    double prev = std::numeric_limits<double>::infinity();
    for (int q : {4, 8, 16, 32, 64})
    {
        const PsiGrid g = make_default_grid(geom, range, q, q);
        const auto lobes = resolve_lobes(spec, g, geom, range);
        double lobe_area = 0.0;
        for (const auto &l : lobes)
            lobe_area += l.area();
        const double slack = cover_set(lobes, g).size() * g.cell_area() - lobe_area;
        CHECK(slack >= -1e-12);
        CHECK(slack <= prev + 1e-12);
        prev = slack;
    }
}

TEST_CASE("resolve_lobe - errors name the offending lobe")
{
    const ArrayGeometry geom(4, 4);
    const PsiGrid g = make_default_grid(geom);
    const MultiBeamSpec outside{{{"far_away", {AngularBox::from_center(1.2, 0.0, 0.1, 0.1)}}}};
    try
    {
        (void)cover_set(outside, g, geom);
        FAIL("expected empty_cover_error");
    }
    catch (const empty_cover_error &e)
    {
        CHECK(std::string(e.what()).find("far_away") != std::string::npos);
    }
    CHECK_THROWS_AS(cover_set(MultiBeamSpec{}, g, geom), invalid_argument_error);
    const MultiBeamSpec inverted{{{"bad", {PsiRect{0.5, 0.1, 0.0, 0.1}}}}};
    CHECK_THROWS_AS(cover_set(inverted, g, geom), invalid_argument_error);
}

TEST_CASE("psi_bounds - zeta extremes when the box straddles phi = 0")
{
    const ArrayGeometry geom(4, 4);
    const PsiRect r = psi_bounds({-0.3, 0.3, 0.2, 0.6}, geom);
    CHECK(r.zeta_hi == Approx(pi * std::sin(0.6)).epsilon(1e-14));
    CHECK(r.zeta_lo == Approx(pi * std::sin(0.2) * std::cos(0.3)).epsilon(1e-14));
    CHECK(r.xi_lo == Approx(-pi * std::sin(0.3)).epsilon(1e-14));

    // dense scan of the box stays inside the rectangle
    for (int a = 0; a <= 50; ++a)
        for (int b = 0; b <= 50; ++b)
        {
            const PsiPoint p = to_psi({-0.3 + 0.6 * a / 50, 0.2 + 0.4 * b / 50}, geom);
            CHECK(p.xi >= r.xi_lo - 1e-12);
            CHECK(p.xi <= r.xi_hi + 1e-12);
            CHECK(p.zeta >= r.zeta_lo - 1e-12);
            CHECK(p.zeta <= r.zeta_hi + 1e-12);
        }
}

TEST_CASE("bounding_cover - smallest enclosing block")
{
    const CoverSet cs = CoverSet::from_cells({{1, 5}, {1, 6}, {16, 9}, {15, 10}});
    const CoverSet b = bounding_cover(cs);
    CHECK(b.size() == 16 * 6);
    CHECK(b.contains({8, 7}));
    CHECK_FALSE(b.contains({8, 4}));
    CHECK_THROWS_AS(bounding_cover(CoverSet{}), empty_cover_error);
}
