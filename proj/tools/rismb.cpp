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

#include <rismb/cli/commands.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv)
{
    using namespace rismb;
    using namespace rismb::cli;

    CLI::App app{"Multi-beam RIS reflection design"};
    app.require_subcommand(1);

    CommandOptions opt;
    std::string resolution;
    std::vector<std::string> cut_phi, cut_theta, observe;
    std::string omega_t, omega_r;

    auto add_common = [&](CLI::App *sub)
    {
        sub->add_option("--config", opt.config_path, "Scenario config (JSON)")->required();
        sub->add_option("--out", opt.out_dir, "Output directory");
        sub->add_option("--resolution", resolution, "Pattern resolution NxM (xi samples x zeta samples)");
        sub->add_option("--seed", opt.seed, "Seed recorded in the metadata");
    };

    auto *design = app.add_subcommand("design", "Write RIS coefficients and design metadata");
    auto *pattern = app.add_subcommand("pattern", "Write the gain grid (CSV) and heatmap (SVG)");
    auto *cuts = app.add_subcommand("cuts", "Write 1D pattern cuts and beamwidths");
    auto *compare = app.add_subcommand("compare", "Compare against the single bounding-beam baseline");
    auto *link = app.add_subcommand("link", "Evaluate the cascaded link SNR");
    for (auto *s : {design, pattern, cuts, compare, link})
        add_common(s);

    cuts->add_option("--cut-phi", cut_phi, "Cut at fixed elevation (repeatable)");
    cuts->add_option("--cut-theta", cut_theta, "Cut at fixed azimuth (repeatable)");

    link->add_option("--tx-power", opt.tx_power, "Transmit power (W)");
    link->add_option("--noise", opt.noise_var, "Noise variance (W)");
    link->add_option("--m-t", opt.m_t, "Transmit antennas");
    link->add_option("--m-r", opt.m_r, "Receive antennas");
    link->add_option("--omega-t", omega_t, "Departure angle at the transmitter, 'phi,theta'");
    link->add_option("--omega-r", omega_r, "Arrival angle at the receiver, 'phi,theta'");
    link->add_option("--observe", observe, "Departure angle at the RIS, 'phi,theta' (repeatable)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_input;
    }

    try
    {
        if (!resolution.empty())
            opt.resolution = parse_resolution_text(resolution);
        for (const auto &s : cut_phi)
            opt.cuts.push_back({CutAxis::fixed_phi, parse_angle_text(s)});
        for (const auto &s : cut_theta)
            opt.cuts.push_back({CutAxis::fixed_theta, parse_angle_text(s)});
        if (!omega_t.empty())
            opt.omega_t = parse_solid_angle_text(omega_t);
        if (!omega_r.empty())
            opt.omega_r = parse_solid_angle_text(omega_r);
        for (const auto &s : observe)
            opt.observations.push_back(parse_solid_angle_text(s));
        if ((opt.tx_power && !(*opt.tx_power > 0.0)) || (opt.noise_var && !(*opt.noise_var > 0.0)))
            throw invalid_argument_error("powers must be > 0");
        if ((opt.m_t && *opt.m_t < 1) || (opt.m_r && *opt.m_r < 1))
            throw invalid_argument_error("antenna counts must be >= 1");
    }
    catch (const error &e)
    {
        std::cerr << "argument error: " << e.what() << "\n";
        return exit_input;
    }

    return run_command(app.get_subcommands().front()->get_name(), opt);
}
