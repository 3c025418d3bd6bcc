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

// Mapping a UPA beamformer onto passive RIS reflection coefficients.
//
// A RIS illuminated from Omega_1 and observed from Omega_2 contributes
//   Gamma = a^H(Omega_2) diag(Theta) a(Omega_1) = d^H(psi_2) lambda,
// with lambda_m = Theta_m exp(j m . psi_1). Choosing Theta_m = c_m exp(-j m . psi_1)
// reproduces the UPA pattern of c for every incident angle.

#include "arrayresp.hpp"

namespace rismb
{
    struct ElementCoefficient
    {
        double beta = 1.0;  // amplitude in [0, 1]
        double theta = 0.0; // phase in [0, 2 pi)

        cplx value() const { return std::polar(beta, theta); }
    };

    enum class AmplitudeScaling
    {
        max_one, // beta = |c| / max |c|
        unit_norm, // beta = |c| with ||c|| = 1
    };

    class RisConfig
    {
    public:
        RisConfig(ArrayGeometry geom, SolidAngle incident, std::vector<ElementCoefficient> coefficients, double scale = 1.0)
            : geom_(geom), incident_(incident), coefficients_(std::move(coefficients)), scale_(scale)
        {
            if (coefficients_.size() != static_cast<std::size_t>(geom_.size()))
                throw dimension_mismatch_error("RisConfig: coefficient count does not match the array size");
            for (auto &e : coefficients_)
            {
                if (!std::isfinite(e.beta) || !std::isfinite(e.theta))
                    throw invalid_argument_error("RisConfig: coefficients must be finite");
                if (e.beta < 0.0 || e.beta > 1.0 + 1e-12)
                    throw invalid_argument_error("RisConfig: amplitudes must lie in [0, 1]");
                e.beta = std::min(e.beta, 1.0);
                e.theta = wrap_phase(e.theta);
            }
        }

        const ArrayGeometry &geometry() const { return geom_; }
        const SolidAngle &incident() const { return incident_; }
        const std::vector<ElementCoefficient> &coefficients() const { return coefficients_; }
        const ElementCoefficient &at(int mv, int mh) const { return coefficients_[geom_.flat_index(mv, mh)]; }
        int size() const { return geom_.size(); }

        // Factor s with lambda = s c for the beamformer the config was built from
        double scale() const { return scale_; }

    private:
        ArrayGeometry geom_;
        SolidAngle incident_;
        std::vector<ElementCoefficient> coefficients_;
        double scale_ = 1.0;
    };

    inline RisConfig ris_from_beamformer(const Beamformer &c, const SolidAngle &incident, const ArrayGeometry &geom,
                                         AmplitudeScaling scaling = AmplitudeScaling::max_one)
    {
        if (c.m_v() != geom.m_v || c.m_h() != geom.m_h)
            throw dimension_mismatch_error("ris_from_beamformer: beamformer and geometry differ in size");
        const double peak = c.entries().cwiseAbs().maxCoeff();
        if (!(peak > 0.0))
            throw invalid_argument_error("ris_from_beamformer: zero beamformer");
        const bool to_peak = scaling == AmplitudeScaling::max_one;
        const double s = to_peak ? 1.0 / peak : 1.0;
        const PsiPoint in = to_psi(incident, geom);

        std::vector<ElementCoefficient> coeffs(geom.size());
        for (int mv = 0; mv < geom.m_v; ++mv)
            for (int mh = 0; mh < geom.m_h; ++mh)
            {
                const cplx v = c(mv, mh);
                auto &e = coeffs[geom.flat_index(mv, mh)];
                e.beta = std::min(to_peak ? std::abs(v) / peak : std::abs(v), 1.0);
                e.theta = wrap_phase(std::arg(v) - mv * in.xi - mh * in.zeta);
            }
        return RisConfig(geom, incident, std::move(coeffs), s);
    }

    // Phase-only version of a config
    inline RisConfig unit_modulus_project(const RisConfig &config)
    {
        std::vector<ElementCoefficient> coeffs = config.coefficients();
        for (auto &e : coeffs)
            e.beta = 1.0;
        return RisConfig(config.geometry(), config.incident(), std::move(coeffs), config.scale());
    }

    // lambda_m = Theta_m a_m(Omega_1)
    inline ComplexVector effective_weights(const RisConfig &config)
    {
        const ComplexVector a1 = steering_solid(config.geometry(), config.incident());
        ComplexVector lam(config.size());
        for (int m = 0; m < config.size(); ++m)
            lam[m] = config.coefficients()[m].value() * a1[m];
        return lam;
    }

    // Unit-norm beamformer with the same pattern shape as the config
    inline Beamformer effective_beamformer(const RisConfig &config)
    {
        return Beamformer(config.geometry(), effective_weights(config));
    }

    // Gamma = a^H(Omega_2) diag(Theta) a(Omega_1), summed element by element
    inline cplx effective_gain(const RisConfig &config, const SolidAngle &observation)
    {
        const ComplexVector a1 = steering_solid(config.geometry(), config.incident());
        const ComplexVector a2 = steering_solid(config.geometry(), observation);
        cplx acc = 0.0;
        for (int m = 0; m < config.size(); ++m)
            acc += std::conj(a2[m]) * config.coefficients()[m].value() * a1[m];
        return acc;
    }

    // ---- cascaded LoS link ----

    struct LinkScene
    {
        SolidAngle omega_t; // departure at the transmitter
        SolidAngle omega_1; // arrival at the RIS
        SolidAngle omega_2; // departure at the RIS
        SolidAngle omega_r; // arrival at the receiver
        cplx rho_t = 1.0;
        cplx rho_r = 1.0;
        int m_t = 1;
        int m_r = 1;

        void validate() const
        {
            if (m_t < 1 || m_r < 1)
                throw invalid_argument_error("LinkScene: antenna counts must be >= 1");
            if (!std::isfinite(rho_t.real()) || !std::isfinite(rho_t.imag()) || !std::isfinite(rho_r.real()) ||
                !std::isfinite(rho_r.imag()))
                throw invalid_argument_error("LinkScene: path gains must be finite");
        }
    };

    // Half-wavelength horizontal ULA at the transmitter or receiver
    inline ComplexVector terminal_steering(int count, const SolidAngle &angle)
    {
        return directivity_axis(count, pi * std::sin(angle.theta) * std::cos(angle.phi));
    }

    // H = rho_r rho_t Gamma a_r(Omega_r) a_t^H(Omega_t), m_r x m_t. The RIS is
    // evaluated with the scene's incident angle.
    inline ComplexMatrix cascaded_channel(const LinkScene &scene, const RisConfig &config)
    {
        scene.validate();
        if (static_cast<int>(config.coefficients().size()) != config.geometry().size())
            throw dimension_mismatch_error("cascaded_channel: config size does not match its geometry");
        const RisConfig at_scene(config.geometry(), scene.omega_1, config.coefficients(), config.scale());
        const cplx gamma = effective_gain(at_scene, scene.omega_2);
        const ComplexVector ar = terminal_steering(scene.m_r, scene.omega_r);
        const ComplexVector at = terminal_steering(scene.m_t, scene.omega_t);
        return (scene.rho_r * scene.rho_t * gamma) * (ar * at.adjoint());
    }

    // 10 log10(P ||H||_F^2 / (M_t noise)), isotropic transmit
    inline double received_snr(const LinkScene &scene, const RisConfig &config, double tx_power, double noise_var)
    {
        if (!(tx_power > 0.0) || !(noise_var > 0.0) || !std::isfinite(tx_power) || !std::isfinite(noise_var))
            throw invalid_argument_error("received_snr: powers must be positive and finite");
        const ComplexMatrix H = cascaded_channel(scene, config);
        return to_db(tx_power * H.squaredNorm() / (scene.m_t * noise_var));
    }
}
