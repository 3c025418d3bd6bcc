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

#pragma once

// Solid-angle geometry, the psi-domain change of variables and the
// partition of the coverage rectangle into subregions.
//
// Conventions:
//   - The surface lies in the x-z plane; elements sit at (m_h d_x, 0, m_v d_z).
//   - phi is elevation, theta is azimuth measured from the broadside normal.
//   - xi   = 2 pi (d_z / lambda) sin(phi)
//     zeta = 2 pi (d_x / lambda) sin(theta) cos(phi)
//   - Subregion (p, q) is 1-based and half-open: [xi^{p-1}, xi^p) x [zeta^{q-1}, zeta^q).

#include "common.hpp"

#include <algorithm>
#include <compare>
#include <limits>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace rismb
{
    struct SolidAngle
    {
        double phi = 0.0;   // elevation, radians
        double theta = 0.0; // azimuth, radians

        SolidAngle() = default;
        SolidAngle(double phi_, double theta_) : phi(phi_), theta(theta_)
        {
            constexpr double tol = 1e-12;
            if (!std::isfinite(phi) || !std::isfinite(theta))
                throw invalid_argument_error("SolidAngle: angles must be finite");
            if (phi < -pi / 2 - tol || phi > pi / 2 + tol)
                throw invalid_argument_error("SolidAngle: elevation must lie in [-pi/2, pi/2]");
            if (theta < -pi - tol || theta >= pi)
                throw invalid_argument_error("SolidAngle: azimuth must lie in [-pi, pi)");
        }
    };

    struct PsiPoint
    {
        double xi = 0.0;
        double zeta = 0.0;
    };

    struct ArrayGeometry
    {
        int m_v = 1;
        int m_h = 1;
        double d_x_over_lambda = 0.5;
        double d_z_over_lambda = 0.5;

        ArrayGeometry() = default;
        ArrayGeometry(int m_v_, int m_h_, double d_x = 0.5, double d_z = 0.5)
            : m_v(m_v_), m_h(m_h_), d_x_over_lambda(d_x), d_z_over_lambda(d_z)
        {
            if (m_v < 1 || m_h < 1)
                throw invalid_argument_error("ArrayGeometry: element counts must be >= 1");
            if (!(d_x > 0.0) || !(d_z > 0.0))
                throw invalid_argument_error("ArrayGeometry: spacing ratios must be > 0");
        }

        int size() const { return m_v * m_h; }
        int flat_index(int mv, int mh) const { return mv * m_h + mh; }

        // Scale factors of the psi transform
        double k_v() const { return two_pi * d_z_over_lambda; }
        double k_h() const { return two_pi * d_x_over_lambda; }
    };

    // Angular range under cover, [-phi_bound, phi_bound) x [-theta_bound, theta_bound)
    struct CoverageRange
    {
        double phi_bound = pi / 4;
        double theta_bound = pi / 2;

        bool contains(const SolidAngle &a) const
        {
            return a.phi >= -phi_bound && a.phi < phi_bound && a.theta >= -theta_bound && a.theta < theta_bound;
        }
    };

    inline PsiPoint to_psi(const SolidAngle &angle, const ArrayGeometry &geom)
    {
        return {geom.k_v() * std::sin(angle.phi),
                geom.k_h() * std::sin(angle.theta) * std::cos(angle.phi)};
    }

    inline SolidAngle from_psi(const PsiPoint &point, const ArrayGeometry &geom)
    {
        constexpr double tol = 1e-12;
        double s_phi = point.xi / geom.k_v();
        if (!std::isfinite(s_phi) || std::abs(s_phi) > 1.0 + tol)
            throw out_of_image_error("from_psi: |xi| exceeds 2 pi d_z / lambda");
        s_phi = std::clamp(s_phi, -1.0, 1.0);
        const double phi = std::asin(s_phi);

        const double scale = geom.k_h() * std::cos(phi);
        double s_theta = 0.0;
        if (scale > 0.0)
            s_theta = point.zeta / scale;
        else if (point.zeta != 0.0)
            throw out_of_image_error("from_psi: zeta must vanish at the poles");
        if (!std::isfinite(s_theta) || std::abs(s_theta) > 1.0 + tol)
            throw out_of_image_error("from_psi: |zeta| exceeds 2 pi d_x cos(phi) / lambda");
        s_theta = std::clamp(s_theta, -1.0, 1.0);
        return {phi, std::asin(s_theta)};
    }

    struct PsiRect
    {
        double xi_lo = 0.0;
        double xi_hi = 0.0;
        double zeta_lo = 0.0;
        double zeta_hi = 0.0;

        double width_xi() const { return std::max(0.0, xi_hi - xi_lo); }
        double width_zeta() const { return std::max(0.0, zeta_hi - zeta_lo); }
        double area() const { return width_xi() * width_zeta(); }
        bool contains(const PsiPoint &pt) const
        {
            return pt.xi >= xi_lo && pt.xi <= xi_hi && pt.zeta >= zeta_lo && pt.zeta <= zeta_hi;
        }
    };

    // 1-based subregion index
    struct CellIndex
    {
        int p = 1;
        int q = 1;
        auto operator<=>(const CellIndex &) const = default;
    };

    class PsiGrid
    {
    public:
        PsiGrid() = default;
        PsiGrid(int q_v, int q_h, double xi_bound, double zeta_bound)
            : q_v_(q_v), q_h_(q_h), xi_bound_(xi_bound), zeta_bound_(zeta_bound)
        {
            if (q_v < 1 || q_h < 1)
                throw invalid_argument_error("PsiGrid: division counts must be >= 1");
            if (!(xi_bound > 0.0) || !(zeta_bound > 0.0) || !std::isfinite(xi_bound) || !std::isfinite(zeta_bound))
                throw invalid_argument_error("PsiGrid: bounds must be positive and finite");
            delta_v_ = 2.0 * xi_bound / q_v;
            delta_h_ = 2.0 * zeta_bound / q_h;
        }

        int q_v() const { return q_v_; }
        int q_h() const { return q_h_; }
        int count() const { return q_v_ * q_h_; }
        double xi_bound() const { return xi_bound_; }
        double zeta_bound() const { return zeta_bound_; }
        double delta_v() const { return delta_v_; }
        double delta_h() const { return delta_h_; }
        double cell_area() const { return delta_v_ * delta_h_; }

        // xi^p = -xi_B + p delta_v for p = 0..Q_v; the last edge is pinned to xi_B
        double xi_edge(int p) const { return p == q_v_ ? xi_bound_ : -xi_bound_ + p * delta_v_; }
        double zeta_edge(int q) const { return q == q_h_ ? zeta_bound_ : -zeta_bound_ + q * delta_h_; }

        PsiRect cell(const CellIndex &c) const
        {
            return {xi_edge(c.p - 1), xi_edge(c.p), zeta_edge(c.q - 1), zeta_edge(c.q)};
        }
        PsiRect bounds() const { return {-xi_bound_, xi_bound_, -zeta_bound_, zeta_bound_}; }

        bool operator==(const PsiGrid &) const = default;

    private:
        int q_v_ = 1;
        int q_h_ = 1;
        double xi_bound_ = pi;
        double zeta_bound_ = pi;
        double delta_v_ = two_pi;
        double delta_h_ = two_pi;
    };

    inline PsiGrid make_grid(int q_v, int q_h, double xi_bound, double zeta_bound)
    {
        return PsiGrid(q_v, q_h, xi_bound, zeta_bound);
    }

    // Psi-domain image of the coverage range. The zeta bound uses cos(phi) <= 1.
    inline PsiRect coverage_image(const CoverageRange &range, const ArrayGeometry &geom)
    {
        const double xb = geom.k_v() * std::sin(std::min(range.phi_bound, pi / 2));
        const double zb = geom.k_h() * std::sin(std::min(range.theta_bound, pi / 2));
        return {-xb, xb, -zb, zb};
    }

    inline PsiGrid make_default_grid(const ArrayGeometry &geom, const CoverageRange &range = {}, int q_v = 16, int q_h = 16)
    {
        const PsiRect img = coverage_image(range, geom);
        return PsiGrid(q_v, q_h, img.xi_hi, img.zeta_hi);
    }

    inline CellIndex subregion_of(const PsiPoint &point, const PsiGrid &grid)
    {
        if (!(point.xi >= -grid.xi_bound() && point.xi < grid.xi_bound() &&
              point.zeta >= -grid.zeta_bound() && point.zeta < grid.zeta_bound()))
            throw out_of_range_error("subregion_of: point outside the coverage rectangle");

        auto locate = [](double x, int n, double delta, double bound, auto edge)
        {
            int k = static_cast<int>(std::floor((x + bound) / delta)) + 1;
            k = std::clamp(k, 1, n);
            while (k > 1 && x < edge(k - 1))
                --k;
            while (k < n && x >= edge(k))
                ++k;
            return k;
        };
        const int p = locate(point.xi, grid.q_v(), grid.delta_v(), grid.xi_bound(), [&](int i)
                             { return grid.xi_edge(i); });
        const int q = locate(point.zeta, grid.q_h(), grid.delta_h(), grid.zeta_bound(), [&](int i)
                             { return grid.zeta_edge(i); });
        return {p, q};
    }

    // ---- Multi-beam specification ----

    // Axis-aligned box in (phi, theta)
    struct AngularBox
    {
        double phi_lo = 0.0;
        double phi_hi = 0.0;
        double theta_lo = 0.0;
        double theta_hi = 0.0;

        static AngularBox from_center(double phi_c, double theta_c, double width_phi, double width_theta)
        {
            return {phi_c - width_phi / 2, phi_c + width_phi / 2, theta_c - width_theta / 2, theta_c + width_theta / 2};
        }
    };

    using LobePart = std::variant<AngularBox, PsiRect>;

    // One compound beam: a finite union of rectangles
    struct Lobe
    {
        std::string name;
        std::vector<LobePart> parts;
    };

    struct MultiBeamSpec
    {
        std::vector<Lobe> lobes;
    };

    // A lobe after transformation into the psi domain and clipping to the grid
    struct ResolvedLobe
    {
        std::string name;
        std::vector<PsiRect> rects;
        bool clipped = false;

        double area() const
        {
            double a = 0.0;
            for (const auto &r : rects)
                a += r.area();
            return a;
        }
    };

    // Exact psi bounding rectangle of an angular box. xi is monotone in phi;
    // zeta = k sin(theta) cos(phi) attains its extremes at the theta edges and
    // at phi in {phi_lo, phi_hi, 0}.
    inline PsiRect psi_bounds(const AngularBox &box, const ArrayGeometry &geom)
    {
        PsiRect r;
        r.xi_lo = geom.k_v() * std::sin(box.phi_lo);
        r.xi_hi = geom.k_v() * std::sin(box.phi_hi);

        std::vector<double> cos_phi = {std::cos(box.phi_lo), std::cos(box.phi_hi)};
        if (box.phi_lo < 0.0 && box.phi_hi > 0.0)
            cos_phi.push_back(1.0);
        r.zeta_lo = std::numeric_limits<double>::infinity();
        r.zeta_hi = -std::numeric_limits<double>::infinity();
        for (double th : {box.theta_lo, box.theta_hi})
            for (double c : cos_phi)
            {
                const double z = geom.k_h() * std::sin(th) * c;
                r.zeta_lo = std::min(r.zeta_lo, z);
                r.zeta_hi = std::max(r.zeta_hi, z);
            }
        return r;
    }

    inline ResolvedLobe resolve_lobe(const Lobe &lobe, const PsiGrid &grid, const ArrayGeometry &geom,
                                     const CoverageRange &range = {})
    {
        ResolvedLobe out;
        out.name = lobe.name;
        const PsiRect g = grid.bounds();
        for (const auto &part : lobe.parts)
        {
            PsiRect r;
            if (const auto *box = std::get_if<AngularBox>(&part))
            {
                if (box->phi_hi < box->phi_lo || box->theta_hi < box->theta_lo)
                    throw invalid_argument_error("lobe '" + lobe.name + "': inverted angular bounds");
                AngularBox b = *box;
                b.phi_lo = std::max(b.phi_lo, -range.phi_bound);
                b.phi_hi = std::min(b.phi_hi, range.phi_bound);
                b.theta_lo = std::max(b.theta_lo, -range.theta_bound);
                b.theta_hi = std::min(b.theta_hi, range.theta_bound);
                if (b.phi_lo != box->phi_lo || b.phi_hi != box->phi_hi || b.theta_lo != box->theta_lo ||
                    b.theta_hi != box->theta_hi)
                    out.clipped = true;
                if (b.phi_hi <= b.phi_lo || b.theta_hi <= b.theta_lo)
                    continue;
                r = psi_bounds(b, geom);
            }
            else
            {
                r = std::get<PsiRect>(part);
                if (r.xi_hi < r.xi_lo || r.zeta_hi < r.zeta_lo)
                    throw invalid_argument_error("lobe '" + lobe.name + "': inverted psi bounds");
            }
            PsiRect c{std::max(r.xi_lo, g.xi_lo), std::min(r.xi_hi, g.xi_hi),
                      std::max(r.zeta_lo, g.zeta_lo), std::min(r.zeta_hi, g.zeta_hi)};
            if (c.xi_lo != r.xi_lo || c.xi_hi != r.xi_hi || c.zeta_lo != r.zeta_lo || c.zeta_hi != r.zeta_hi)
                out.clipped = true;
            if (c.area() > 0.0)
                out.rects.push_back(c);
        }
        if (out.rects.empty())
            throw empty_cover_error("lobe '" + lobe.name + "' has zero area inside the coverage range");
        return out;
    }

    inline std::vector<ResolvedLobe> resolve_lobes(const MultiBeamSpec &spec, const PsiGrid &grid, const ArrayGeometry &geom,
                                                   const CoverageRange &range = {})
    {
        if (spec.lobes.empty())
            throw invalid_argument_error("multi-beam specification has no lobes");
        std::vector<ResolvedLobe> out;
        out.reserve(spec.lobes.size());
        for (const auto &l : spec.lobes)
            out.push_back(resolve_lobe(l, grid, geom, range));
        return out;
    }

    struct CoverSet
    {
        std::vector<CellIndex> indices;               // sorted, unique
        std::vector<std::vector<CellIndex>> per_lobe; // sorted, unique per lobe

        std::size_t size() const { return indices.size(); }
        bool empty() const { return indices.empty(); }
        bool contains(const CellIndex &c) const { return std::binary_search(indices.begin(), indices.end(), c); }
        bool operator==(const CoverSet &) const = default;

        static CoverSet from_cells(std::vector<CellIndex> cells)
        {
            std::sort(cells.begin(), cells.end());
            cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
            CoverSet cs;
            cs.indices = cells;
            cs.per_lobe.push_back(std::move(cells));
            return cs;
        }
    };

    // Cells whose interior meets the rectangle with positive area
    inline std::vector<CellIndex> cells_meeting(const PsiRect &r, const PsiGrid &grid)
    {
        const double tol_v = 1e-9 * grid.delta_v();
        const double tol_h = 1e-9 * grid.delta_h();
        std::vector<int> ps, qs;
        for (int p = 1; p <= grid.q_v(); ++p)
            if (std::min(grid.xi_edge(p), r.xi_hi) - std::max(grid.xi_edge(p - 1), r.xi_lo) > tol_v)
                ps.push_back(p);
        for (int q = 1; q <= grid.q_h(); ++q)
            if (std::min(grid.zeta_edge(q), r.zeta_hi) - std::max(grid.zeta_edge(q - 1), r.zeta_lo) > tol_h)
                qs.push_back(q);
        std::vector<CellIndex> out;
        out.reserve(ps.size() * qs.size());
        for (int p : ps)
            for (int q : qs)
                out.push_back({p, q});
        return out;
    }

    inline CoverSet cover_set(const std::vector<ResolvedLobe> &lobes, const PsiGrid &grid)
    {
        CoverSet cs;
        std::set<CellIndex> all;
        for (const auto &lobe : lobes)
        {
            std::set<CellIndex> mine;
            for (const auto &r : lobe.rects)
                for (const auto &c : cells_meeting(r, grid))
                    mine.insert(c);
            if (mine.empty())
                throw empty_cover_error("lobe '" + lobe.name + "' degenerates to zero area on the grid");
            all.insert(mine.begin(), mine.end());
            cs.per_lobe.emplace_back(mine.begin(), mine.end());
        }
        cs.indices.assign(all.begin(), all.end());
        return cs;
    }

    inline CoverSet cover_set(const MultiBeamSpec &spec, const PsiGrid &grid, const ArrayGeometry &geom,
                              const CoverageRange &range = {})
    {
        return cover_set(resolve_lobes(spec, grid, geom, range), grid);
    }

    // Smallest block of cells (a single axis-aligned rectangle of subregions)
    // that contains every cell of the cover
    inline CoverSet bounding_cover(const CoverSet &cover)
    {
        if (cover.empty())
            throw empty_cover_error("bounding_cover: empty cover");
        int p0 = cover.indices.front().p, p1 = p0, q0 = cover.indices.front().q, q1 = q0;
        for (const auto &c : cover.indices)
        {
            p0 = std::min(p0, c.p);
            p1 = std::max(p1, c.p);
            q0 = std::min(q0, c.q);
            q1 = std::max(q1, c.q);
        }
        std::vector<CellIndex> cells;
        for (int p = p0; p <= p1; ++p)
            for (int q = q0; q <= q1; ++q)
                cells.push_back({p, q});
        return CoverSet::from_cells(std::move(cells));
    }
}
