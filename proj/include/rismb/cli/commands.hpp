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

// The design | pattern | cuts | compare | link commands.
//
// Exit codes: 0 success, 2 input error, 3 design error, 4 I/O error.
// Every command computes all of its outputs before the first file is written.

#include "config.hpp"
#include "output.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>

namespace rismb::cli
{
    enum exit_code : int
    {
        exit_ok = 0,
        exit_input = 2,
        exit_design = 3,
        exit_io = 4,
    };

    class design_error : public error
    {
    public:
        using error::error;
    };

    struct CommandOptions
    {
        std::string config_path;
        std::string out_dir = ".";
        std::optional<std::pair<int, int>> resolution;
        std::optional<std::uint64_t> seed;

        std::vector<CutSpec> cuts; // replaces the config's cuts when non-empty

        std::optional<double> tx_power;
        std::optional<double> noise_var;
        std::optional<int> m_t;
        std::optional<int> m_r;
        std::optional<SolidAngle> omega_t;
        std::optional<SolidAngle> omega_r;
        std::vector<SolidAngle> observations;
    };

    // "phi,theta" with each component parsed as an angle
    inline SolidAngle parse_solid_angle_text(const std::string &s)
    {
        const auto comma = s.find(',');
        if (comma == std::string::npos)
            throw invalid_argument_error("expected 'phi,theta', got '" + s + "'");
        return SolidAngle(parse_angle_text(s.substr(0, comma)), parse_angle_text(s.substr(comma + 1)));
    }

    // "NxM" with N, M >= 2
    inline std::pair<int, int> parse_resolution_text(const std::string &s)
    {
        static const std::regex re(R"(^\s*(\d+)\s*[xX]\s*(\d+)\s*$)");
        std::smatch m;
        if (!std::regex_match(s, m, re))
            throw invalid_argument_error("resolution must look like NxM, got '" + s + "'");
        const long long a = std::stoll(m[1].str()), b = std::stoll(m[2].str());
        if (a < 2 || b < 2 || a > 8192 || b > 8192)
            throw invalid_argument_error("resolution components must lie in [2, 8192]");
        return {static_cast<int>(a), static_cast<int>(b)};
    }

    // ---- design pipeline ----

    struct Pipeline
    {
        ScenarioConfig cfg;
        PsiGrid grid;
        std::vector<ResolvedLobe> lobes;
        CoverSet cover;
        std::optional<DesignResult> design;
        std::optional<RisConfig> ris;
        std::optional<Beamformer> effective; // unit-norm pattern source of the RIS config
        std::vector<std::string> warnings;
    };

    inline EqualGainParams resolve_eta(const EtaMode &mode, const CoverSet &cover, const PsiGrid &grid, const ArrayGeometry &geom)
    {
        switch (mode.kind)
        {
        case EtaMode::Kind::search:
            return select_eta(cover, grid, geom, mode.search_resolution);
        case EtaMode::Kind::fixed:
            return mode.fixed;
        case EtaMode::Kind::zero:
            break;
        }
        return {};
    }

    inline DesignResult run_design(const DesignOptions &opt, const CoverSet &cover, const PsiGrid &grid, const ArrayGeometry &geom)
    {
        const EqualGainParams eta = resolve_eta(opt.eta, cover, grid, geom);
        if (opt.finite_l)
            return design_finite_L(cover, grid, geom, eta, opt.l_v, opt.l_h, opt.exact_ls);
        return design_closed_form(cover, grid, geom, eta);
    }

    inline RisConfig map_to_ris(const DesignOptions &opt, const Beamformer &c, const SolidAngle &incident, const ArrayGeometry &geom)
    {
        RisConfig ris = ris_from_beamformer(c, incident, geom, opt.scaling);
        return opt.unit_modulus ? unit_modulus_project(ris) : ris;
    }

    inline Pipeline build_pipeline(const ScenarioConfig &cfg)
    {
        Pipeline p;
        p.cfg = cfg;
        p.grid = cfg.grid();
        p.lobes = resolve_lobes(cfg.spec, p.grid, cfg.geom, cfg.range);
        for (const auto &l : p.lobes)
            if (l.clipped)
                p.warnings.push_back("lobe '" + l.name + "' extends beyond the coverage range and was clipped");
        p.cover = cover_set(p.lobes, p.grid);
        p.design = run_design(cfg.design, p.cover, p.grid, cfg.geom);
        if (p.design->rank_warning)
            p.warnings.push_back("exact least-squares system is ill-conditioned; small singular values were truncated");
        p.ris = map_to_ris(cfg.design, p.design->beamformer, cfg.incident, cfg.geom);
        p.effective = effective_beamformer(*p.ris);
        return p;
    }

    // ---- JSON helpers ----

    using ojson = nlohmann::ordered_json;

    inline ojson defaults_json()
    {
        return {{"d_x_over_lambda", 0.5}, {"d_z_over_lambda", 0.5}, {"phi_bound", pi / 4}, {"theta_bound", pi / 2}, {"q_v", 16}, {"q_h", 16}};
    }

    inline ojson cells_json(const std::vector<CellIndex> &cells)
    {
        ojson a = ojson::array();
        for (const auto &c : cells)
            a.push_back({c.p, c.q});
        return a;
    }

    inline ojson report_json(const PatternReport &r)
    {
        return {{"mean_in_db", r.mean_in_db},
                {"median_in_db", r.median_in_db},
                {"min_in_db", r.min_in_db},
                {"max_in_db", r.max_in_db},
                {"ripple_db", r.ripple_db},
                {"leakage_fraction", r.leakage_fraction},
                {"ideal_level_db", r.ideal_level_db}};
    }

    inline ojson common_json(const Pipeline &p, const CommandOptions &opt, const std::string &command)
    {
        const auto &c = p.cfg;
        ojson j;
        j["generator"] = generator_version;
        j["command"] = command;
        j["scenario"] = c.name;
        j["defaults"] = defaults_json();
        j["array"] = {{"m_v", c.geom.m_v}, {"m_h", c.geom.m_h}, {"d_x_over_lambda", c.geom.d_x_over_lambda}, {"d_z_over_lambda", c.geom.d_z_over_lambda}};
        j["coverage"] = {{"phi_bound", c.range.phi_bound}, {"theta_bound", c.range.theta_bound}};
        j["grid"] = {{"q_v", p.grid.q_v()}, {"q_h", p.grid.q_h()}, {"xi_bound", p.grid.xi_bound()}, {"zeta_bound", p.grid.zeta_bound()}, {"delta_v", p.grid.delta_v()}, {"delta_h", p.grid.delta_h()}};
        j["incident"] = {{"phi", c.incident.phi}, {"theta", c.incident.theta}};
        ojson lobes = ojson::array();
        for (std::size_t i = 0; i < p.lobes.size(); ++i)
            lobes.push_back({{"name", p.lobes[i].name}, {"clipped", p.lobes[i].clipped}, {"cells", cells_json(p.cover.per_lobe[i])}});
        j["lobes"] = lobes;
        j["warnings"] = p.warnings;
        if (opt.seed)
            j["seed"] = *opt.seed;
        return j;
    }

    inline std::string dump(const ojson &j) { return j.dump(2) + "\n"; }

    // Flat level the pattern would have if its in-cover power were spread
    // evenly over the cover: t for the ideal design, t' after projection.
    inline double reference_level_db(const Beamformer &c, const CoverSet &cover, const PsiGrid &grid)
    {
        const double inside = cover_integral(c.m_v(), c.m_h(), c.entries(), cover, grid);
        return to_db(inside / (static_cast<double>(cover.size()) * grid.cell_area()));
    }

    inline constexpr double component_margin_db = 3.0;
    inline constexpr int component_resolution = 512;

    inline int components_above(const Beamformer &c, const PsiGrid &grid, double level_db)
    {
        const PatternGrid pg = pattern(c, component_resolution, component_resolution, grid.bounds());
        return count_components(pg, level_db - component_margin_db);
    }

    // ---- commands ----

    using Files = std::vector<std::pair<std::string, std::string>>; // name, content

    inline Files cmd_design(const Pipeline &p, const CommandOptions &opt)
    {
        const auto &d = *p.design;
        const auto &o = p.cfg.output;
        ojson j = common_json(p, opt, "design");
        j["cover_size"] = p.cover.size();
        j["cover"] = cells_json(p.cover.indices);
        j["ideal_level_t"] = d.ideal.level_t;
        j["ideal_level_db"] = d.ideal.level_db();

        const char *mode = p.cfg.design.eta.kind == EtaMode::Kind::search  ? "search"
                           : p.cfg.design.eta.kind == EtaMode::Kind::fixed ? "fixed"
                                                                            : "zero";
        j["eta"] = {{"mode", mode}, {"eta_v", d.params.eta_v}, {"eta_h", d.params.eta_h}};
        if (p.cfg.design.eta.kind == EtaMode::Kind::search)
            j["eta"]["search_resolution"] = p.cfg.design.eta.search_resolution;

        if (const auto *f = std::get_if<FiniteL>(&d.method))
        {
            j["method"] = {{"name", "finite_L"}, {"l_v", f->l_v}, {"l_h", f->l_h}, {"exact_ls", f->exact_ls}};
            if (f->exact_ls)
                j["method"]["condition"] = {{"vertical", d.condition_v}, {"horizontal", d.condition_h}, {"rank_warning", d.rank_warning}};
        }
        else
            j["method"] = {{"name", "closed_form"}};

        j["amplitude_scaling"] = p.cfg.design.scaling == AmplitudeScaling::unit_norm ? "unit_norm" : "max_one";
        j["unit_modulus"] = p.cfg.design.unit_modulus;

        double max_beta = 0.0, min_beta = 1.0;
        for (const auto &e : p.ris->coefficients())
        {
            max_beta = std::max(max_beta, e.beta);
            min_beta = std::min(min_beta, e.beta);
        }
        j["norm_checks"] = {{"beamformer_norm", d.beamformer.entries().norm()}, {"max_beta", max_beta}, {"min_beta", min_beta}, {"scale", p.ris->scale()}};

        const PatternReport designed = report(d.beamformer, p.cover, p.grid, o.report_resolution, o.interior_shrink);
        j["report"] = report_json(designed);
        if (p.cfg.design.unit_modulus)
        {
            const PatternReport projected = report(*p.effective, p.cover, p.grid, o.report_resolution, o.interior_shrink);
            const double t_prime = reference_level_db(*p.effective, p.cover, p.grid);
            j["projection"] = {{"report", report_json(projected)},
                               {"reference_level_db", t_prime},
                               {"components_above_reference_minus_3db", components_above(*p.effective, p.grid, t_prime)},
                               {"mean_degradation_db", designed.mean_in_db - projected.mean_in_db}};
        }
        return {{"ris_coefficients.csv", coefficients_csv(*p.ris)}, {"design.json", dump(j)}};
    }

    inline Files cmd_pattern(const Pipeline &p, const CommandOptions &opt)
    {
        const auto &o = p.cfg.output;
        const int rows = opt.resolution ? opt.resolution->first : o.pattern_rows;
        const int cols = opt.resolution ? opt.resolution->second : o.pattern_cols;
        const PatternGrid pg = pattern(*p.effective, rows, cols, p.grid.bounds());

        ojson j = common_json(p, opt, "pattern");
        j["resolution"] = {rows, cols};
        j["unit_modulus"] = p.cfg.design.unit_modulus;
        const double level = p.cfg.design.unit_modulus ? reference_level_db(*p.effective, p.cover, p.grid)
                                                       : p.design->ideal.level_db();
        j["reference_level_db"] = level;
        j["threshold_db"] = level - component_margin_db;
        j["components_above_threshold"] = count_components(pg, level - component_margin_db);
        j["report"] = report_json(report(*p.effective, p.cover, p.grid, o.report_resolution, o.interior_shrink));

        const std::string title = "Reflected gain, " + std::to_string(p.cfg.geom.m_v) + "x" + std::to_string(p.cfg.geom.m_h) + " RIS";
        return {{"pattern.csv", pattern_csv(pg)}, {"pattern.svg", heatmap_svg(pg, title)}, {"pattern.json", dump(j)}};
    }

    inline Files cmd_cuts(const Pipeline &p, const CommandOptions &opt)
    {
        const auto &o = p.cfg.output;
        const std::vector<CutSpec> &specs = opt.cuts.empty() ? o.cuts : opt.cuts;
        if (specs.empty())
            throw config_error("/output/cuts", "no cuts requested");
        Files files;
        ojson j = common_json(p, opt, "cuts");
        j["levels_db"] = o.levels;
        ojson list = ojson::array();
        for (std::size_t i = 0; i < specs.size(); ++i)
        {
            const CutProfile c = cut(*p.effective, p.cfg.geom, specs[i].axis, specs[i].value, o.cut_resolution, o.levels, p.cfg.range);
            const std::string name = "cut_" + std::to_string(i + 1) + ".csv";
            files.emplace_back(name, cut_csv(c));
            ojson lobes = ojson::array();
            for (const auto &l : c.lobes)
            {
                ojson widths = ojson::object();
                for (const auto &[lvl, w] : l.widths)
                    widths[fmt_num(lvl)] = w;
                ojson entry = {{"peak_angle", l.peak_angle}, {"peak_db", l.peak_db}, {"widths", widths}};
                if (l.widths.count(3.0) && l.widths.count(10.0))
                    entry["width_ratio_10_vs_3"] = (l.widths.at(10.0) - l.widths.at(3.0)) / l.widths.at(3.0);
                lobes.push_back(entry);
            }
            list.push_back({{"file", name},
                            {"axis", specs[i].axis == CutAxis::fixed_phi ? "phi" : "theta"},
                            {"value", specs[i].value},
                            {"resolution", o.cut_resolution},
                            {"lobes", lobes}});
        }
        j["cuts"] = list;
        files.emplace_back("cuts.json", dump(j));
        return files;
    }

    inline Files cmd_compare(const Pipeline &p, const CommandOptions &opt)
    {
        if (p.cfg.spec.lobes.size() < 2)
            throw design_error("compare needs at least two lobes");
        const auto &o = p.cfg.output;
        const CoverSet baseline_cover = bounding_cover(p.cover);
        const DesignResult baseline = run_design(p.cfg.design, baseline_cover, p.grid, p.cfg.geom);
        const Beamformer baseline_eff = effective_beamformer(map_to_ris(p.cfg.design, baseline.beamformer, p.cfg.incident, p.cfg.geom));

        const PatternReport multi = report(*p.effective, p.cover, p.grid, o.report_resolution, o.interior_shrink);
        const PatternReport single = report(baseline_eff, p.cover, p.grid, o.report_resolution, o.interior_shrink);

        ojson j = common_json(p, opt, "compare");
        j["multi_mean_db"] = multi.mean_in_db;
        j["single_mean_db"] = single.mean_in_db;
        j["delta_db"] = compare(multi, single);
        j["multi_cover_size"] = p.cover.size();
        j["single_cover_size"] = baseline_cover.size();
        j["single_cover"] = cells_json(baseline_cover.indices);
        j["single_eta"] = {{"eta_v", baseline.params.eta_v}, {"eta_h", baseline.params.eta_h}};
        return {{"compare.json", dump(j)}};
    }

    inline Files cmd_link(const Pipeline &p, const CommandOptions &opt)
    {
        LinkScene scene;
        const auto &L = p.cfg.link;
        scene.omega_t = opt.omega_t.value_or(L.omega_t);
        scene.omega_r = opt.omega_r.value_or(L.omega_r);
        scene.omega_1 = p.cfg.incident;
        scene.rho_t = L.rho_t;
        scene.rho_r = L.rho_r;
        scene.m_t = opt.m_t.value_or(L.m_t);
        scene.m_r = opt.m_r.value_or(L.m_r);
        const double tx = opt.tx_power.value_or(L.tx_power);
        const double noise = opt.noise_var.value_or(L.noise_var);
        std::vector<SolidAngle> obs = !opt.observations.empty() ? opt.observations : L.observations;
        if (obs.empty())
            obs = p.cfg.lobe_centers;

        ojson j = common_json(p, opt, "link");
        j["scene"] = {{"omega_t", {{"phi", scene.omega_t.phi}, {"theta", scene.omega_t.theta}}},
                      {"omega_r", {{"phi", scene.omega_r.phi}, {"theta", scene.omega_r.theta}}},
                      {"rho_t", {scene.rho_t.real(), scene.rho_t.imag()}},
                      {"rho_r", {scene.rho_r.real(), scene.rho_r.imag()}},
                      {"m_t", scene.m_t},
                      {"m_r", scene.m_r},
                      {"tx_power", tx},
                      {"noise_var", noise},
                      {"snr_convention", "10 log10(P ||H||_F^2 / (M_t noise_var))"}};
        ojson list = ojson::array();
        const PsiRect b = p.grid.bounds();
        for (const auto &o2 : obs)
        {
            scene.omega_2 = o2;
            const cplx gamma = effective_gain(*p.ris, o2);
            const ComplexMatrix H = cascaded_channel(scene, *p.ris);
            const PsiPoint pt = to_psi(o2, p.cfg.geom);
            const bool inside = pt.xi >= b.xi_lo && pt.xi < b.xi_hi && pt.zeta >= b.zeta_lo && pt.zeta < b.zeta_hi &&
                                p.cover.contains(subregion_of(pt, p.grid));
            list.push_back({{"phi", o2.phi},
                            {"theta", o2.theta},
                            {"in_cover", inside},
                            {"gamma_abs", std::abs(gamma)},
                            {"gamma_db", to_db(std::norm(gamma))},
                            {"channel_frobenius", H.norm()},
                            {"snr_db", received_snr(scene, *p.ris, tx, noise)}});
        }
        j["observations"] = list;
        return {{"link.json", dump(j)}};
    }

    inline const std::map<std::string, std::function<Files(const Pipeline &, const CommandOptions &)>> &command_table()
    {
        static const std::map<std::string, std::function<Files(const Pipeline &, const CommandOptions &)>> t = {
            {"design", cmd_design}, {"pattern", cmd_pattern}, {"cuts", cmd_cuts}, {"compare", cmd_compare}, {"link", cmd_link}};
        return t;
    }

    // Runs one command end to end and maps failures onto exit codes
    inline int run_command(const std::string &command, const CommandOptions &opt, std::ostream &err = std::cerr)
    {
        const auto &table = command_table();
        const auto it = table.find(command);
        if (it == table.end())
        {
            err << "error: unknown command '" << command << "'\n";
            return exit_input;
        }

        ScenarioConfig cfg;
        try
        {
            cfg = load_config(opt.config_path);
            for (const auto &c : opt.cuts)
                validate_cut(c, cfg.range, "--cut");
        }
        catch (const error &e)
        {
            err << "config error: " << e.what() << "\n";
            return exit_input;
        }

        Pipeline p;
        Files files;
        try
        {
            p = build_pipeline(cfg);
        }
        catch (const error &e)
        {
            err << "design error: " << e.what() << "\n";
            return exit_design;
        }
        try
        {
            files = it->second(p, opt);
        }
        catch (const config_error &e)
        {
            err << "config error: " << e.what() << "\n";
            return exit_input;
        }
        catch (const error &e)
        {
            err << "design error: " << e.what() << "\n";
            return exit_design;
        }
        for (const auto &w : p.warnings)
            err << "warning: " << w << "\n";

        try
        {
            std::error_code ec;
            std::filesystem::create_directories(opt.out_dir, ec);
            if (ec)
                throw io_error("cannot create output directory '" + opt.out_dir + "': " + ec.message());
            for (const auto &[name, content] : files)
                write_file((std::filesystem::path(opt.out_dir) / name).string(), content);
        }
        catch (const io_error &e)
        {
            err << "io error: " << e.what() << "\n";
            return exit_io;
        }
        return exit_ok;
    }
}
