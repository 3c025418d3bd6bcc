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

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rismb
{
    using cplx = std::complex<double>;
    using ComplexVector = Eigen::VectorXcd;
    using ComplexMatrix = Eigen::MatrixXcd;
    using RealVector = Eigen::VectorXd;
    using RealMatrix = Eigen::MatrixXd;

    inline constexpr double pi = std::numbers::pi;
    inline constexpr double two_pi = 2.0 * std::numbers::pi;

    // Integral of any unit-norm pattern over one full period in both axes
    inline constexpr double full_period_area = two_pi * two_pi;

    // Floor used whenever a linear gain is reported in dB
    inline constexpr double db_floor = -120.0;

    // Error hierarchy. Every failure raised by the library derives from rismb::error.
    class error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class invalid_argument_error : public error
    {
    public:
        using error::error;
    };

    // No real solid angle maps to the requested psi-domain point
    class out_of_image_error : public error
    {
    public:
        using error::error;
    };

    // Point outside the half-open coverage rectangle
    class out_of_range_error : public error
    {
    public:
        using error::error;
    };

    class empty_cover_error : public error
    {
    public:
        using error::error;
    };

    class dimension_mismatch_error : public error
    {
    public:
        using error::error;
    };

    inline double to_db(double linear)
    {
        if (!(linear > 0.0))
            return db_floor;
        return std::max(10.0 * std::log10(linear), db_floor);
    }

    inline double from_db(double db)
    {
        return std::pow(10.0, db / 10.0);
    }

    // Normalized sinc, sin(pi u) / (pi u)
    inline double sinc(double u)
    {
        if (std::abs(u) < 1e-12)
            return 1.0;
        const double x = pi * u;
        return std::sin(x) / x;
    }

    // Wraps a phase to [0, 2 pi)
    inline double wrap_phase(double phase)
    {
        double w = std::fmod(phase, two_pi);
        if (w < 0.0)
            w += two_pi;
        if (w >= two_pi)
            w = 0.0;
        return w;
    }
}
