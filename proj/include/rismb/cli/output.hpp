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

// CSV tables, pattern grids and SVG heatmaps.
// Numbers in CSV use the shortest representation that round-trips exactly.

#include "../rismb.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

namespace rismb::cli
{
    inline constexpr const char *generator_version = "rismb 0.1.0";

    class io_error : public error
    {
    public:
        using error::error;
    };

    inline std::string fmt_num(double v)
    {
        std::array<char, 64> buf{};
        const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        return std::string(buf.data(), res.ptr);
    }

    inline std::string fmt_fixed(double v, int digits)
    {
        std::array<char, 64> buf{};
        const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
        return std::string(buf.data(), res.ptr);
    }

    // m_v,m_h,beta,theta_radians
    inline std::string coefficients_csv(const RisConfig &config)
    {
        std::string out = "m_v,m_h,beta,theta_radians\n";
        const auto &g = config.geometry();
        for (int mv = 0; mv < g.m_v; ++mv)
            for (int mh = 0; mh < g.m_h; ++mh)
            {
                const auto &e = config.at(mv, mh);
                out += std::to_string(mv) + ',' + std::to_string(mh) + ',' + fmt_num(e.beta) + ',' + fmt_num(e.theta) + '\n';
            }
        return out;
    }

    // Header row: corner label then zeta samples; each further row: xi then gains in dB
    inline std::string pattern_csv(const PatternGrid &pg)
    {
        std::string out = "xi\\zeta";
        for (Eigen::Index k = 0; k < pg.zeta_samples.size(); ++k)
            out += ',' + fmt_num(pg.zeta_samples[k]);
        out += '\n';
        for (Eigen::Index i = 0; i < pg.xi_samples.size(); ++i)
        {
            out += fmt_num(pg.xi_samples[i]);
            for (Eigen::Index k = 0; k < pg.zeta_samples.size(); ++k)
                out += ',' + fmt_num(to_db(pg.gains(i, k)));
            out += '\n';
        }
        return out;
    }

    inline double parse_csv_number(const std::string &cell)
    {
        double v = 0.0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
            throw invalid_argument_error("malformed CSV number '" + cell + "'");
        return v;
    }

    inline std::vector<std::string> split_csv_line(const std::string &line)
    {
        std::vector<std::string> cells;
        std::string cur;
        for (char ch : line)
        {
            if (ch == ',')
            {
                cells.push_back(cur);
                cur.clear();
            }
            else if (ch != '\r')
                cur += ch;
        }
        cells.push_back(cur);
        return cells;
    }

    // Inverse of pattern_csv; gains come back in linear scale
    inline PatternGrid parse_pattern_csv(const std::string &text)
    {
        std::istringstream in(text);
        std::string line;
        if (!std::getline(in, line))
            throw invalid_argument_error("pattern CSV is empty");
        const auto header = split_csv_line(line);
        if (header.size() < 2)
            throw invalid_argument_error("pattern CSV header has no zeta samples");
        std::vector<double> zetas, xis;
        for (std::size_t k = 1; k < header.size(); ++k)
            zetas.push_back(parse_csv_number(header[k]));
        std::vector<std::vector<double>> rows;
        while (std::getline(in, line))
        {
            if (line.empty())
                continue;
            const auto cells = split_csv_line(line);
            if (cells.size() != header.size())
                throw invalid_argument_error("pattern CSV row has the wrong number of cells");
            xis.push_back(parse_csv_number(cells[0]));
            std::vector<double> r;
            for (std::size_t k = 1; k < cells.size(); ++k)
                r.push_back(from_db(parse_csv_number(cells[k])));
            rows.push_back(std::move(r));
        }
        PatternGrid pg;
        pg.xi_samples = Eigen::Map<const RealVector>(xis.data(), static_cast<Eigen::Index>(xis.size()));
        pg.zeta_samples = Eigen::Map<const RealVector>(zetas.data(), static_cast<Eigen::Index>(zetas.size()));
        pg.gains.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(zetas.size()));
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t k = 0; k < zetas.size(); ++k)
                pg.gains(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
        return pg;
    }

    // angle_radians,gain_db
    inline std::string cut_csv(const CutProfile &c)
    {
        std::string out = "angle_radians,gain_db\n";
        for (std::size_t i = 0; i < c.angles.size(); ++i)
            out += fmt_num(c.angles[i]) + ',' + fmt_num(c.gains_db[i]) + '\n';
        return out;
    }

    // ---- SVG heatmap ----

    // Viridis anchors at 0, 1/8, ..., 1, interpolated linearly
    inline std::array<int, 3> viridis(double u)
    {
        static constexpr int lut[9][3] = {{68, 1, 84}, {71, 45, 123}, {59, 82, 139}, {44, 114, 142}, {33, 145, 140},
                                          {40, 174, 128}, {94, 201, 98}, {170, 220, 50}, {253, 231, 37}};
        u = std::clamp(u, 0.0, 1.0) * 8.0;
        const int i = std::min(static_cast<int>(u), 7);
        const double f = u - i;
        std::array<int, 3> c{};
        for (int k = 0; k < 3; ++k)
            c[k] = static_cast<int>(std::lround(lut[i][k] + f * (lut[i + 1][k] - lut[i][k])));
        return c;
    }

    inline std::string hex_color(const std::array<int, 3> &c)
    {
        static constexpr char digits[] = "0123456789abcdef";
        std::string s = "#";
        for (int v : c)
        {
            s += digits[(v >> 4) & 15];
            s += digits[v & 15];
        }
        return s;
    }

    inline constexpr int svg_max_cells = 256;
    inline constexpr double svg_dynamic_range_db = 50.0;

    // Rows are xi (increasing upwards), columns zeta. Grids larger than
    // 256 x 256 are decimated by a uniform stride.
    inline std::string heatmap_svg(const PatternGrid &pg, const std::string &title)
    {
        const Eigen::Index rows = pg.gains.rows(), cols = pg.gains.cols();
        const Eigen::Index sr = (rows + svg_max_cells - 1) / svg_max_cells;
        const Eigen::Index sc = (cols + svg_max_cells - 1) / svg_max_cells;
        const Eigen::Index nr = (rows + sr - 1) / sr, nc = (cols + sc - 1) / sc;

        const RealMatrix db = gains_to_db(pg.gains);
        const double top = db.maxCoeff();
        const double bottom = std::max(db.minCoeff(), top - svg_dynamic_range_db);
        const double span = top > bottom ? top - bottom : 1.0;

        const double left = 80, upper = 40, plot = 512, bar_x = left + plot + 30, bar_w = 20;
        const double cw = plot / static_cast<double>(nc), ch = plot / static_cast<double>(nr);

        std::string s;
        s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        s += "<!-- generator: " + std::string(generator_version) + " -->\n";
        s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"620\" viewBox=\"0 0 720 620\" "
             "font-family=\"sans-serif\" font-size=\"12\">\n";
        s += "<rect width=\"720\" height=\"620\" fill=\"white\"/>\n";
        s += "<text x=\"" + fmt_fixed(left + plot / 2, 1) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + title + "</text>\n";
        s += "<g shape-rendering=\"crispEdges\">\n";
        for (Eigen::Index i = 0; i < nr; ++i)
            for (Eigen::Index k = 0; k < nc; ++k)
            {
                const double v = db(i * sr, k * sc);
                const double y = upper + plot - (i + 1) * ch;
                s += "<rect x=\"" + fmt_fixed(left + k * cw, 3) + "\" y=\"" + fmt_fixed(y, 3) + "\" width=\"" +
                     fmt_fixed(cw, 3) + "\" height=\"" + fmt_fixed(ch, 3) + "\" fill=\"" +
                     hex_color(viridis((v - bottom) / span)) + "\"/>\n";
            }
        s += "</g>\n";
        s += "<rect x=\"" + fmt_fixed(left, 1) + "\" y=\"" + fmt_fixed(upper, 1) + "\" width=\"" + fmt_fixed(plot, 1) +
             "\" height=\"" + fmt_fixed(plot, 1) + "\" fill=\"none\" stroke=\"black\"/>\n";

        // axes: ticks at both ends and the midpoint
        const double z0 = pg.zeta_samples[0], z1 = pg.zeta_samples[cols - 1];
        const double x0 = pg.xi_samples[0], x1 = pg.xi_samples[rows - 1];
        for (int t = 0; t <= 2; ++t)
        {
            const double f = t / 2.0;
            const double px = left + f * plot, py = upper + plot - f * plot;
            s += "<text x=\"" + fmt_fixed(px, 1) + "\" y=\"" + fmt_fixed(upper + plot + 18, 1) +
                 "\" text-anchor=\"middle\">" + fmt_fixed(z0 + f * (z1 - z0), 3) + "</text>\n";
            s += "<text x=\"" + fmt_fixed(left - 6, 1) + "\" y=\"" + fmt_fixed(py + 4, 1) +
                 "\" text-anchor=\"end\">" + fmt_fixed(x0 + f * (x1 - x0), 3) + "</text>\n";
        }
        s += "<text x=\"" + fmt_fixed(left + plot / 2, 1) + "\" y=\"" + fmt_fixed(upper + plot + 40, 1) +
             "\" text-anchor=\"middle\">zeta (rad)</text>\n";
        s += "<text x=\"20\" y=\"" + fmt_fixed(upper + plot / 2, 1) + "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
             fmt_fixed(upper + plot / 2, 1) + ")\">xi (rad)</text>\n";

        // colorbar
        const int steps = 64;
        for (int b = 0; b < steps; ++b)
        {
            const double y = upper + plot - (b + 1) * plot / steps;
            s += "<rect x=\"" + fmt_fixed(bar_x, 1) + "\" y=\"" + fmt_fixed(y, 3) + "\" width=\"" + fmt_fixed(bar_w, 1) +
                 "\" height=\"" + fmt_fixed(plot / steps, 3) + "\" fill=\"" + hex_color(viridis((b + 0.5) / steps)) + "\"/>\n";
        }
        for (int t = 0; t <= 4; ++t)
        {
            const double f = t / 4.0;
            s += "<text x=\"" + fmt_fixed(bar_x + bar_w + 6, 1) + "\" y=\"" + fmt_fixed(upper + plot - f * plot + 4, 1) +
                 "\">" + fmt_fixed(bottom + f * span, 1) + "</text>\n";
        }
        s += "<text x=\"" + fmt_fixed(bar_x + bar_w / 2, 1) + "\" y=\"" + fmt_fixed(upper - 8, 1) +
             "\" text-anchor=\"middle\">gain (dB)</text>\n";
        s += "</svg>\n";
        return s;
    }

    inline void write_file(const std::string &path, const std::string &content)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw io_error("cannot open '" + path + "' for writing");
        out << content;
        out.flush();
        if (!out)
            throw io_error("failed writing '" + path + "'");
    }
}
