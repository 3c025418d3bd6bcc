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

// Pattern statistics, beamwidth cuts and design comparison

#include "designer.hpp"

#include <map>
#include <optional>

namespace rismb
{
    struct PatternReport
    {
        double mean_in_db = db_floor; // mean of linear gains, then converted
        double median_in_db = db_floor;
        double min_in_db = db_floor;
        double max_in_db = db_floor;
        double ripple_db = 0.0; // max - min over the interior samples
        double leakage_fraction = 0.0;
        double ideal_level_db = 0.0;
        CoverSet cover;
        PsiGrid grid;
    };

    inline constexpr double default_interior_shrink = 0.1;

    namespace detail
    {
        struct Accumulator
        {
            std::vector<double> db;
            double linear_sum = 0.0;
            double interior_lo = std::numeric_limits<double>::infinity();
            double interior_hi = -std::numeric_limits<double>::infinity();

            void add(double g, bool interior)
            {
                const double v = to_db(g);
                db.push_back(v);
                linear_sum += g;
                if (interior)
                {
                    interior_lo = std::min(interior_lo, v);
                    interior_hi = std::max(interior_hi, v);
                }
            }

            void finish(PatternReport &r)
            {
                if (db.empty())
                    throw invalid_argument_error("report: no samples fall inside the cover");
                r.mean_in_db = to_db(linear_sum / static_cast<double>(db.size()));
                std::vector<double> s = db;
                std::sort(s.begin(), s.end());
                const std::size_t n = s.size();
                r.median_in_db = n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
                r.min_in_db = s.front();
                r.max_in_db = s.back();
                r.ripple_db = interior_hi >= interior_lo ? interior_hi - interior_lo : 0.0;
            }
        };

        inline void check_report_inputs(const CoverSet &cover, double shrink)
        {
            if (cover.empty())
                throw empty_cover_error("report: empty cover");
            if (!(shrink >= 0.0 && shrink < 0.5))
                throw invalid_argument_error("report: interior_shrink must lie in [0, 0.5)");
        }
    }

    // Statistics over `resolution` x `resolution` midpoint samples in each cover
    // subregion. Leakage is integrated exactly.
    inline PatternReport report(int m_v, int m_h, const ComplexVector &w, const CoverSet &cover, const PsiGrid &grid,
                                int resolution = 32, double interior_shrink = default_interior_shrink)
    {
        detail::check_report_inputs(cover, interior_shrink);
        if (resolution < 32)
            throw invalid_argument_error("report: resolution must be >= 32");
        PatternReport r;
        r.cover = cover;
        r.grid = grid;
        r.ideal_level_db = ideal_gain_level(cover, grid).level_db();

        detail::Accumulator acc;
        for (const auto &cell : cover.indices)
        {
            const CellSamples s = sample_cell(m_v, m_h, w, grid.cell(cell), resolution, interior_shrink);
            for (int i = 0; i < resolution; ++i)
                for (int k = 0; k < resolution; ++k)
                    acc.add(s.gains(i, k), s.interior_v[i] && s.interior_h[k]);
        }
        acc.finish(r);

        const double total = total_integral(w);
        if (!(total > 0.0))
            throw invalid_argument_error("report: zero pattern");
        r.leakage_fraction = std::clamp(1.0 - cover_integral(m_v, m_h, w, cover, grid) / total, 0.0, 1.0);
        return r;
    }

    inline PatternReport report(const Beamformer &c, const CoverSet &cover, const PsiGrid &grid, int resolution = 32,
                                double interior_shrink = default_interior_shrink)
    {
        return report(c.m_v(), c.m_h(), c.entries(), cover, grid, resolution, interior_shrink);
    }

    // Same statistics from an already sampled grid, e.g. a pattern re-read from
    // disk. A sample belongs to the half-open subregion containing it. Leakage is
    // the Riemann-sum fraction outside the cover, so it is meaningful only when
    // the grid spans a full period.
    inline PatternReport report_from_grid(const PatternGrid &pg, const CoverSet &cover, const PsiGrid &grid,
                                          double interior_shrink = default_interior_shrink)
    {
        detail::check_report_inputs(cover, interior_shrink);
        PatternReport r;
        r.cover = cover;
        r.grid = grid;
        r.ideal_level_db = ideal_gain_level(cover, grid).level_db();

        detail::Accumulator acc;
        double inside = 0.0, total = 0.0;
        for (Eigen::Index i = 0; i < pg.xi_samples.size(); ++i)
            for (Eigen::Index k = 0; k < pg.zeta_samples.size(); ++k)
            {
                const double g = pg.gains(i, k);
                total += g;
                const PsiPoint pt{pg.xi_samples[i], pg.zeta_samples[k]};
                const PsiRect b = grid.bounds();
                if (pt.xi < b.xi_lo || pt.xi >= b.xi_hi || pt.zeta < b.zeta_lo || pt.zeta >= b.zeta_hi)
                    continue;
                const CellIndex c = subregion_of(pt, grid);
                if (!cover.contains(c))
                    continue;
                inside += g;
                const PsiRect cell = grid.cell(c);
                const double u = (pt.xi - cell.xi_lo) / cell.width_xi();
                const double v = (pt.zeta - cell.zeta_lo) / cell.width_zeta();
                const bool interior = u >= interior_shrink && u <= 1.0 - interior_shrink &&
                                      v >= interior_shrink && v <= 1.0 - interior_shrink;
                acc.add(g, interior);
            }
        acc.finish(r);
        r.leakage_fraction = total > 0.0 ? std::clamp(1.0 - inside / total, 0.0, 1.0) : 0.0;
        return r;
    }

    // mean_in_db(a) - mean_in_db(b); both reports must describe the same cover
    inline double compare(const PatternReport &a, const PatternReport &b)
    {
        if (!(a.cover == b.cover) || !(a.grid == b.grid))
            throw invalid_argument_error("compare: reports cover different regions");
        return a.mean_in_db - b.mean_in_db;
    }

    // ---- cuts ----

    enum class CutAxis
    {
        fixed_phi,   // sweep azimuth
        fixed_theta, // sweep elevation
    };

    struct LobeWidth
    {
        double peak_angle = 0.0;
        double peak_db = 0.0;
        std::map<double, double> widths; // level (dB down) -> width (radians)
    };

    struct CutProfile
    {
        CutAxis axis = CutAxis::fixed_phi;
        double fixed_value = 0.0;
        std::vector<double> angles;
        std::vector<double> gains_db;
        std::vector<LobeWidth> lobes; // only lobes with at least one measured width
    };

    inline const std::vector<double> &default_cut_levels()
    {
        static const std::vector<double> levels{3.0, 10.0};
        return levels;
    }

    // Distance between the first crossings below (local peak - level) on each
    // side of the peak at index `k`, interpolated linearly between samples.
    inline std::optional<double> width_at(const std::vector<double> &x, const std::vector<double> &y, std::size_t k, double level)
    {
        const double thr = y[k] - level;
        std::optional<double> left, right;
        for (std::size_t i = k; i-- > 0;)
            if (y[i] < thr)
            {
                const double f = (y[i + 1] - thr) / (y[i + 1] - y[i]);
                left = x[i + 1] - f * (x[i + 1] - x[i]);
                break;
            }
        for (std::size_t i = k + 1; i < y.size(); ++i)
            if (y[i] < thr)
            {
                const double f = (y[i - 1] - thr) / (y[i - 1] - y[i]);
                right = x[i - 1] + f * (x[i] - x[i - 1]);
                break;
            }
        if (!left || !right)
            return std::nullopt;
        return *right - *left;
    }

    // 1D gain profile through a beamformer pattern over the front hemisphere.
    // fixed_phi sweeps theta, fixed_theta sweeps phi, both over [-pi/2, pi/2). Lobes are
    // the maximal runs of samples above (cut peak - deepest level); widths are
    // measured from each run's own peak.
    inline CutProfile cut(const Beamformer &c, const ArrayGeometry &geom, CutAxis axis, double fixed_value,
                          int resolution = 1024, const std::vector<double> &levels = default_cut_levels(),
                          const CoverageRange &range = {})
    {
        if (resolution < 64)
            throw invalid_argument_error("cut: resolution must be >= 64");
        const double fixed_bound = axis == CutAxis::fixed_phi ? range.phi_bound : range.theta_bound;
        if (!std::isfinite(fixed_value) || fixed_value < -fixed_bound || fixed_value >= fixed_bound)
            throw invalid_argument_error("cut: fixed value outside the coverage range");
        for (double l : levels)
            if (!(l > 0.0))
                throw invalid_argument_error("cut: levels must be positive dB-down values");

        CutProfile prof;
        prof.axis = axis;
        prof.fixed_value = fixed_value;
        const double sweep = pi / 2;
        prof.angles.resize(resolution);
        prof.gains_db.resize(resolution);
        for (int i = 0; i < resolution; ++i)
        {
            const double a = -sweep + 2.0 * sweep * i / resolution;
            const SolidAngle sa = axis == CutAxis::fixed_phi ? SolidAngle(fixed_value, a) : SolidAngle(a, fixed_value);
            prof.angles[i] = a;
            prof.gains_db[i] = to_db(gain(c, to_psi(sa, geom)));
        }
        if (levels.empty())
            return prof;

        const auto &y = prof.gains_db;
        const double peak = *std::max_element(y.begin(), y.end());
        const double seed = peak - *std::max_element(levels.begin(), levels.end());
        std::size_t i = 0;
        while (i < y.size())
        {
            if (y[i] < seed)
            {
                ++i;
                continue;
            }
            std::size_t j = i, k = i;
            while (j < y.size() && y[j] >= seed)
            {
                if (y[j] > y[k])
                    k = j;
                ++j;
            }
            LobeWidth lw{prof.angles[k], y[k], {}};
            for (double l : levels)
                if (auto w = width_at(prof.angles, y, k, l))
                    lw.widths[l] = *w;
            if (!lw.widths.empty())
                prof.lobes.push_back(std::move(lw));
            i = j;
        }
        return prof;
    }

    // ---- connected components ----

    // Number of 4-connected components of samples strictly above `threshold_db`
    inline int count_components(const RealMatrix &gains_db, double threshold_db)
    {
        const Eigen::Index rows = gains_db.rows(), cols = gains_db.cols();
        std::vector<int> label(static_cast<std::size_t>(rows * cols), 0);
        int count = 0;
        std::vector<Eigen::Index> stack;
        for (Eigen::Index r0 = 0; r0 < rows; ++r0)
            for (Eigen::Index c0 = 0; c0 < cols; ++c0)
            {
                if (gains_db(r0, c0) <= threshold_db || label[r0 * cols + c0])
                    continue;
                ++count;
                stack.push_back(r0 * cols + c0);
                label[r0 * cols + c0] = count;
                while (!stack.empty())
                {
                    const Eigen::Index id = stack.back();
                    stack.pop_back();
                    const Eigen::Index r = id / cols, c = id % cols;
                    const Eigen::Index nb[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
                    for (const auto &n : nb)
                    {
                        if (n[0] < 0 || n[0] >= rows || n[1] < 0 || n[1] >= cols)
                            continue;
                        const Eigen::Index nid = n[0] * cols + n[1];
                        if (label[nid] || gains_db(n[0], n[1]) <= threshold_db)
                            continue;
                        label[nid] = count;
                        stack.push_back(nid);
                    }
                }
            }
        return count;
    }

    inline RealMatrix gains_to_db(const RealMatrix &linear)
    {
        return linear.unaryExpr([](double g)
                                { return to_db(g); });
    }

    inline int count_components(const PatternGrid &pg, double threshold_db)
    {
        return count_components(gains_to_db(pg.gains), threshold_db);
    }
}
