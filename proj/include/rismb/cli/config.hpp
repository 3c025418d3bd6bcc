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

// Scenario configuration files (JSON). See README.md for the schema.

#include "../rismb.hpp"

#include <json.hpp>

#include <fstream>
#include <regex>
#include <sstream>

namespace rismb::cli
{
    using json = nlohmann::json;

    // Input error with the location it refers to: a JSON pointer for field
    // errors, or line and column for syntax errors.
    class config_error : public error
    {
    public:
        config_error(const std::string &where, const std::string &what)
            : error(where + ": " + what), where_(where) {}
        const std::string &where() const { return where_; }

    private:
        std::string where_;
    };

    // Accepts a number (radians) or a string "[-]a[/b] pi", "[-]pi[/b]", or a
    // plain decimal. The unicode minus sign and the letter pi are both accepted.
    inline double parse_angle_text(std::string s)
    {
        const std::string umin = "\xE2\x88\x92"; // U+2212
        for (std::size_t p; (p = s.find(umin)) != std::string::npos;)
            s.replace(p, umin.size(), "-");
        const std::string upi = "\xCF\x80"; // U+03C0
        for (std::size_t p; (p = s.find(upi)) != std::string::npos;)
            s.replace(p, upi.size(), "pi");

        static const std::regex rational(R"(^\s*([+-]?)\s*(\d+(?:\.\d*)?|\.\d+)?\s*(?:/\s*(\d+(?:\.\d*)?))?\s*\*?\s*(pi)?\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$)");
        std::smatch m;
        if (!std::regex_match(s, m, rational) || (!m[2].matched && !m[4].matched) || (m[3].matched && m[5].matched) ||
            (m[5].matched && !m[4].matched))
            throw invalid_argument_error("cannot parse angle '" + s + "'");
        double v = m[2].matched ? std::stod(m[2].str()) : 1.0;
        if (m[3].matched)
            v /= std::stod(m[3].str());
        if (m[5].matched)
            v /= std::stod(m[5].str());
        if (m[4].matched)
            v *= pi;
        if (m[1].str() == "-")
            v = -v;
        if (!std::isfinite(v))
            throw invalid_argument_error("angle '" + s + "' is not finite");
        return v;
    }

    struct EtaMode
    {
        enum class Kind
        {
            zero,
            search,
            fixed
        } kind = Kind::zero;
        int search_resolution = 1;
        EqualGainParams fixed;
    };

    struct DesignOptions
    {
        bool finite_l = false;
        int l_v = 16;
        int l_h = 16;
        bool exact_ls = false;
        EtaMode eta;
        bool unit_modulus = false;
        AmplitudeScaling scaling = AmplitudeScaling::max_one;
    };

    struct CutSpec
    {
        CutAxis axis = CutAxis::fixed_phi;
        double value = 0.0;
    };

    struct OutputOptions
    {
        int pattern_rows = 256; // xi samples
        int pattern_cols = 256; // zeta samples
        int report_resolution = 32;
        double interior_shrink = default_interior_shrink;
        int cut_resolution = 2048;
        std::vector<double> levels = default_cut_levels();
        std::vector<CutSpec> cuts;
    };

    struct LinkOptions
    {
        double tx_power = 1.0;
        double noise_var = 1.0;
        int m_t = 1;
        int m_r = 1;
        SolidAngle omega_t{0.0, 0.0};
        SolidAngle omega_r{0.0, 0.0};
        cplx rho_t = 1.0;
        cplx rho_r = 1.0;
        std::vector<SolidAngle> observations; // empty: lobe centers
    };

    struct ScenarioConfig
    {
        std::string name;
        ArrayGeometry geom{32, 32};
        CoverageRange range;
        int q_v = 16;
        int q_h = 16;
        MultiBeamSpec spec;
        std::vector<SolidAngle> lobe_centers; // per lobe, when given by center
        SolidAngle incident{0.0, 0.0};
        DesignOptions design;
        OutputOptions output;
        LinkOptions link;

        PsiGrid grid() const { return make_default_grid(geom, range, q_v, q_h); }
    };

    namespace detail
    {
        // Field reader that reports the JSON pointer of any failure
        class Reader
        {
        public:
            Reader(const json &j, std::string path) : j_(j), path_(std::move(path)) {}

            const std::string &path() const { return path_; }
            const json &value() const { return j_; }
            bool has(const char *key) const { return j_.is_object() && j_.contains(key); }
            Reader at(const char *key) const { return {j_.at(key), path_ + "/" + key}; }
            Reader at(std::size_t i) const { return {j_.at(i), path_ + "/" + std::to_string(i)}; }

            [[noreturn]] void fail(const std::string &what) const { throw config_error(path_.empty() ? "/" : path_, what); }

            void expect_object(std::initializer_list<const char *> allowed) const
            {
                if (!j_.is_object())
                    fail("expected an object");
                for (const auto &[k, v] : j_.items())
                {
                    bool ok = false;
                    for (const char *a : allowed)
                        ok = ok || k == a;
                    if (!ok)
                        Reader(v, path_ + "/" + k).fail("unknown field");
                }
            }

            int integer(int lo, int hi) const
            {
                if (!j_.is_number_integer())
                    fail("expected an integer");
                const auto v = j_.get<long long>();
                if (v < lo || v > hi)
                    fail("must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
                return static_cast<int>(v);
            }

            double number() const
            {
                if (!j_.is_number())
                    fail("expected a number");
                const double v = j_.get<double>();
                if (!std::isfinite(v))
                    fail("expected a finite number");
                return v;
            }

            double positive() const
            {
                const double v = number();
                if (!(v > 0.0))
                    fail("must be > 0");
                return v;
            }

            bool boolean() const
            {
                if (!j_.is_boolean())
                    fail("expected true or false");
                return j_.get<bool>();
            }

            std::string string() const
            {
                if (!j_.is_string())
                    fail("expected a string");
                return j_.get<std::string>();
            }

            double angle() const
            {
                if (j_.is_number())
                    return number();
                if (!j_.is_string())
                    fail("expected an angle (radians or a string such as \"-8/32 pi\")");
                try
                {
                    return parse_angle_text(j_.get<std::string>());
                }
                catch (const error &e)
                {
                    fail(e.what());
                }
            }

            std::pair<double, double> angle_pair() const
            {
                if (!j_.is_array() || j_.size() != 2)
                    fail("expected a two-element array");
                return {at(std::size_t{0}).angle(), at(std::size_t{1}).angle()};
            }

            SolidAngle solid_angle() const
            {
                expect_object({"phi", "theta"});
                const double phi = at("phi").angle();
                const double theta = at("theta").angle();
                try
                {
                    return SolidAngle(phi, theta);
                }
                catch (const error &e)
                {
                    fail(e.what());
                }
            }

            cplx complex() const
            {
                if (j_.is_number())
                    return number();
                if (j_.is_array() && j_.size() == 2)
                    return {at(std::size_t{0}).number(), at(std::size_t{1}).number()};
                fail("expected a number or [re, im]");
            }

        private:
            const json &j_;
            std::string path_;
        };

        inline LobePart read_part(const Reader &r, std::optional<SolidAngle> &center)
        {
            if (r.has("xi") || r.has("zeta"))
            {
                r.expect_object({"name", "xi", "zeta"});
                const auto [x0, x1] = r.at("xi").angle_pair();
                const auto [z0, z1] = r.at("zeta").angle_pair();
                if (x1 <= x0 || z1 <= z0)
                    r.fail("psi rectangle must have lo < hi on both axes");
                return PsiRect{x0, x1, z0, z1};
            }
            r.expect_object({"name", "center_phi", "center_theta", "width", "width_phi", "width_theta"});
            const double pc = r.at("center_phi").angle();
            const double tc = r.at("center_theta").angle();
            double wp = 0.0, wt = 0.0;
            if (r.has("width"))
            {
                if (r.has("width_phi") || r.has("width_theta"))
                    r.fail("give either width or width_phi/width_theta");
                wp = wt = r.at("width").angle();
            }
            else
            {
                wp = r.at("width_phi").angle();
                wt = r.at("width_theta").angle();
            }
            if (!(wp > 0.0) || !(wt > 0.0))
                r.fail("lobe widths must be > 0");
            if (!center)
            {
                try
                {
                    center = SolidAngle(pc, tc);
                }
                catch (const error &e)
                {
                    r.fail(e.what());
                }
            }
            return AngularBox::from_center(pc, tc, wp, wt);
        }

        inline CutSpec read_cut(const Reader &r)
        {
            r.expect_object({"axis", "value"});
            const std::string axis = r.at("axis").string();
            CutSpec c;
            if (axis == "phi")
                c.axis = CutAxis::fixed_phi;
            else if (axis == "theta")
                c.axis = CutAxis::fixed_theta;
            else
                r.at("axis").fail("expected \"phi\" or \"theta\"");
            c.value = r.at("value").angle();
            return c;
        }
    }

    // Cut values must lie inside the coverage range
    inline void validate_cut(const CutSpec &c, const CoverageRange &range, const std::string &where)
    {
        const double b = c.axis == CutAxis::fixed_phi ? range.phi_bound : range.theta_bound;
        if (!(c.value >= -b && c.value < b))
            throw config_error(where, "cut value lies outside the coverage range");
    }

    inline ScenarioConfig parse_config(const json &root)
    {
        using detail::Reader;
        const Reader r(root, "");
        r.expect_object({"name", "array", "coverage", "grid", "lobes", "incident", "design", "output", "link"});
        ScenarioConfig cfg;
        if (r.has("name"))
            cfg.name = r.at("name").string();

        if (r.has("array"))
        {
            const Reader a = r.at("array");
            a.expect_object({"m_v", "m_h", "d_x", "d_z"});
            const int mv = a.has("m_v") ? a.at("m_v").integer(1, 4096) : 32;
            const int mh = a.has("m_h") ? a.at("m_h").integer(1, 4096) : 32;
            const double dx = a.has("d_x") ? a.at("d_x").positive() : 0.5;
            const double dz = a.has("d_z") ? a.at("d_z").positive() : 0.5;
            cfg.geom = ArrayGeometry(mv, mh, dx, dz);
        }

        if (r.has("coverage"))
        {
            const Reader c = r.at("coverage");
            c.expect_object({"phi_bound", "theta_bound"});
            if (c.has("phi_bound"))
                cfg.range.phi_bound = c.at("phi_bound").angle();
            if (c.has("theta_bound"))
                cfg.range.theta_bound = c.at("theta_bound").angle();
            if (!(cfg.range.phi_bound > 0.0 && cfg.range.phi_bound <= pi / 2))
                c.at("phi_bound").fail("must lie in (0, pi/2]");
            if (!(cfg.range.theta_bound > 0.0 && cfg.range.theta_bound <= pi / 2))
                c.at("theta_bound").fail("must lie in (0, pi/2]");
        }

        if (r.has("grid"))
        {
            const Reader g = r.at("grid");
            g.expect_object({"q_v", "q_h"});
            if (g.has("q_v"))
                cfg.q_v = g.at("q_v").integer(1, 4096);
            if (g.has("q_h"))
                cfg.q_h = g.at("q_h").integer(1, 4096);
        }

        if (!r.has("lobes"))
            r.fail("missing field 'lobes'");
        const Reader lobes = r.at("lobes");
        if (!lobes.value().is_array() || lobes.value().empty())
            lobes.fail("expected a non-empty array");
        for (std::size_t i = 0; i < lobes.value().size(); ++i)
        {
            const Reader l = lobes.at(i);
            Lobe lobe;
            lobe.name = l.has("name") ? l.at("name").string() : "lobe_" + std::to_string(i + 1);
            std::optional<SolidAngle> center;
            if (l.has("parts"))
            {
                l.expect_object({"name", "parts"});
                const Reader parts = l.at("parts");
                if (!parts.value().is_array() || parts.value().empty())
                    parts.fail("expected a non-empty array");
                for (std::size_t k = 0; k < parts.value().size(); ++k)
                    lobe.parts.push_back(detail::read_part(parts.at(k), center));
            }
            else
                lobe.parts.push_back(detail::read_part(l, center));
            cfg.spec.lobes.push_back(std::move(lobe));
            cfg.lobe_centers.push_back(center.value_or(SolidAngle(0.0, 0.0)));
        }

        if (r.has("incident"))
            cfg.incident = r.at("incident").solid_angle();

        if (r.has("design"))
        {
            const Reader d = r.at("design");
            d.expect_object({"method", "l_v", "l_h", "exact_ls", "eta", "unit_modulus", "amplitude_scaling"});
            if (d.has("method"))
            {
                const std::string m = d.at("method").string();
                if (m == "finite_L")
                    cfg.design.finite_l = true;
                else if (m != "closed_form")
                    d.at("method").fail("expected \"closed_form\" or \"finite_L\"");
            }
            if (d.has("l_v"))
                cfg.design.l_v = d.at("l_v").integer(1, 4096);
            if (d.has("l_h"))
                cfg.design.l_h = d.at("l_h").integer(1, 4096);
            if (d.has("exact_ls"))
                cfg.design.exact_ls = d.at("exact_ls").boolean();
            if (d.has("eta"))
            {
                const Reader e = d.at("eta");
                if (e.value().is_string())
                {
                    if (e.string() != "zero")
                        e.fail("expected \"zero\", {\"search\": n} or {\"fixed\": [eta_v, eta_h]}");
                }
                else if (e.has("search"))
                {
                    e.expect_object({"search"});
                    cfg.design.eta.kind = EtaMode::Kind::search;
                    cfg.design.eta.search_resolution = e.at("search").integer(1, 257);
                }
                else if (e.has("fixed"))
                {
                    e.expect_object({"fixed"});
                    const auto [ev, eh] = e.at("fixed").angle_pair();
                    try
                    {
                        cfg.design.eta.fixed = EqualGainParams(ev, eh);
                    }
                    catch (const error &ex)
                    {
                        e.at("fixed").fail(ex.what());
                    }
                    cfg.design.eta.kind = EtaMode::Kind::fixed;
                }
                else
                    e.fail("expected \"zero\", {\"search\": n} or {\"fixed\": [eta_v, eta_h]}");
            }
            if (d.has("unit_modulus"))
                cfg.design.unit_modulus = d.at("unit_modulus").boolean();
            if (d.has("amplitude_scaling"))
            {
                const std::string s = d.at("amplitude_scaling").string();
                if (s == "unit_norm")
                    cfg.design.scaling = AmplitudeScaling::unit_norm;
                else if (s != "max_one")
                    d.at("amplitude_scaling").fail("expected \"max_one\" or \"unit_norm\"");
            }
        }

        if (r.has("output"))
        {
            const Reader o = r.at("output");
            o.expect_object({"pattern_resolution", "report_resolution", "interior_shrink", "cut_resolution", "levels", "cuts"});
            if (o.has("pattern_resolution"))
            {
                const Reader p = o.at("pattern_resolution");
                if (!p.value().is_array() || p.value().size() != 2)
                    p.fail("expected [rows, cols]");
                cfg.output.pattern_rows = p.at(std::size_t{0}).integer(2, 8192);
                cfg.output.pattern_cols = p.at(std::size_t{1}).integer(2, 8192);
            }
            if (o.has("report_resolution"))
                cfg.output.report_resolution = o.at("report_resolution").integer(32, 4096);
            if (o.has("interior_shrink"))
            {
                cfg.output.interior_shrink = o.at("interior_shrink").number();
                if (!(cfg.output.interior_shrink >= 0.0 && cfg.output.interior_shrink < 0.5))
                    o.at("interior_shrink").fail("must lie in [0, 0.5)");
            }
            if (o.has("cut_resolution"))
                cfg.output.cut_resolution = o.at("cut_resolution").integer(64, 1 << 20);
            if (o.has("levels"))
            {
                const Reader lv = o.at("levels");
                if (!lv.value().is_array() || lv.value().empty())
                    lv.fail("expected a non-empty array of dB values");
                cfg.output.levels.clear();
                for (std::size_t i = 0; i < lv.value().size(); ++i)
                    cfg.output.levels.push_back(lv.at(i).positive());
            }
            if (o.has("cuts"))
            {
                const Reader cs = o.at("cuts");
                if (!cs.value().is_array())
                    cs.fail("expected an array");
                for (std::size_t i = 0; i < cs.value().size(); ++i)
                {
                    CutSpec c = detail::read_cut(cs.at(i));
                    validate_cut(c, cfg.range, cs.at(i).path() + "/value");
                    cfg.output.cuts.push_back(c);
                }
            }
        }

        if (r.has("link"))
        {
            const Reader k = r.at("link");
            k.expect_object({"tx_power", "noise_var", "m_t", "m_r", "omega_t", "omega_r", "rho_t", "rho_r", "observations"});
            auto &L = cfg.link;
            if (k.has("tx_power"))
                L.tx_power = k.at("tx_power").positive();
            if (k.has("noise_var"))
                L.noise_var = k.at("noise_var").positive();
            if (k.has("m_t"))
                L.m_t = k.at("m_t").integer(1, 4096);
            if (k.has("m_r"))
                L.m_r = k.at("m_r").integer(1, 4096);
            if (k.has("omega_t"))
                L.omega_t = k.at("omega_t").solid_angle();
            if (k.has("omega_r"))
                L.omega_r = k.at("omega_r").solid_angle();
            if (k.has("rho_t"))
                L.rho_t = k.at("rho_t").complex();
            if (k.has("rho_r"))
                L.rho_r = k.at("rho_r").complex();
            if (k.has("observations"))
            {
                const Reader obs = k.at("observations");
                if (!obs.value().is_array())
                    obs.fail("expected an array");
                for (std::size_t i = 0; i < obs.value().size(); ++i)
                    L.observations.push_back(obs.at(i).solid_angle());
            }
        }

        try
        {
            (void)cfg.grid();
        }
        catch (const error &e)
        {
            throw config_error("/grid", e.what());
        }
        return cfg;
    }

    // Parses text; syntax errors are reported by line and column
    inline ScenarioConfig parse_config_text(const std::string &text)
    {
        json root;
        try
        {
            root = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            std::size_t line = 1, col = 1;
            for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
            {
                if (text[i] == '\n')
                {
                    ++line;
                    col = 1;
                }
                else
                    ++col;
            }
            throw config_error("line " + std::to_string(line) + ", column " + std::to_string(col), "JSON syntax error");
        }
        return parse_config(root);
    }

    inline ScenarioConfig load_config(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw config_error(path, "cannot read config file");
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_config_text(ss.str());
    }
}
