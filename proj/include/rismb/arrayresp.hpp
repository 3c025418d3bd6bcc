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

// Steering vectors, gain evaluation and pattern sampling for a UPA.
// Flat element index is m_v * M_h + m_h everywhere.

#include "angular.hpp"

#include <vector>

namespace rismb
{
    // Entry n = exp(j n coord), n = 0..count-1
    inline ComplexVector directivity_axis(int count, double coord)
    {
        if (count < 1)
            throw invalid_argument_error("directivity_axis: count must be >= 1");
        ComplexVector d(count);
        for (int n = 0; n < count; ++n)
            d[n] = std::polar(1.0, n * coord);
        return d;
    }

    inline ComplexVector kron(const ComplexVector &a, const ComplexVector &b)
    {
        ComplexVector out(a.size() * b.size());
        for (Eigen::Index i = 0; i < a.size(); ++i)
            out.segment(i * b.size(), b.size()) = a[i] * b;
        return out;
    }

    // d_{M_v}(xi) (x) d_{M_h}(zeta)
    inline ComplexVector directivity(const ArrayGeometry &geom, const PsiPoint &point)
    {
        return kron(directivity_axis(geom.m_v, point.xi), directivity_axis(geom.m_h, point.zeta));
    }

    // Array response built from element positions and the direction vector,
    // exp(j 2 pi / lambda <r_Omega, r_m>) with r_m = (m_h d_x, 0, m_v d_z) and
    // r_Omega = (cos phi sin theta, cos phi cos theta, sin phi).
    inline ComplexVector steering_solid(const ArrayGeometry &geom, const SolidAngle &angle)
    {
        const double rx = std::cos(angle.phi) * std::sin(angle.theta);
        const double rz = std::sin(angle.phi);
        ComplexVector a(geom.size());
        for (int mv = 0; mv < geom.m_v; ++mv)
            for (int mh = 0; mh < geom.m_h; ++mh)
            {
                const double path = mh * geom.d_x_over_lambda * rx + mv * geom.d_z_over_lambda * rz;
                a[geom.flat_index(mv, mh)] = std::polar(1.0, two_pi * path);
            }
        return a;
    }

    // Unit-norm feed vector of a UPA
    class Beamformer
    {
    public:
        Beamformer(int m_v, int m_h, ComplexVector entries) : m_v_(m_v), m_h_(m_h), entries_(std::move(entries))
        {
            if (m_v < 1 || m_h < 1)
                throw invalid_argument_error("Beamformer: element counts must be >= 1");
            if (entries_.size() != static_cast<Eigen::Index>(m_v) * m_h)
                throw dimension_mismatch_error("Beamformer: entry count does not match M_v * M_h");
            if (!entries_.allFinite())
                throw invalid_argument_error("Beamformer: entries must be finite");
            const double n = entries_.norm();
            if (!(n > 0.0))
                throw invalid_argument_error("Beamformer: zero vector cannot be normalized");
            entries_ /= n;
        }
        Beamformer(const ArrayGeometry &geom, ComplexVector entries) : Beamformer(geom.m_v, geom.m_h, std::move(entries)) {}

        static Beamformer steering(const ArrayGeometry &geom, const PsiPoint &point)
        {
            return Beamformer(geom, directivity(geom, point));
        }

        static Beamformer basis(const ArrayGeometry &geom, int flat_index)
        {
            ComplexVector e = ComplexVector::Zero(geom.size());
            e[flat_index] = 1.0;
            return Beamformer(geom, std::move(e));
        }

        int m_v() const { return m_v_; }
        int m_h() const { return m_h_; }
        int size() const { return m_v_ * m_h_; }
        const ComplexVector &entries() const { return entries_; }
        cplx operator()(int mv, int mh) const { return entries_[mv * m_h_ + mh]; }

    private:
        int m_v_;
        int m_h_;
        ComplexVector entries_;
    };

    // Row-major flat vector to an M_v x M_h matrix
    inline ComplexMatrix as_matrix(const ComplexVector &w, int m_v, int m_h)
    {
        ComplexMatrix W(m_v, m_h);
        for (int mv = 0; mv < m_v; ++mv)
            for (int mh = 0; mh < m_h; ++mh)
                W(mv, mh) = w[mv * m_h + mh];
        return W;
    }

    inline ComplexVector as_flat(const ComplexMatrix &W)
    {
        ComplexVector w(W.size());
        const auto m_h = W.cols();
        for (Eigen::Index mv = 0; mv < W.rows(); ++mv)
            for (Eigen::Index mh = 0; mh < m_h; ++mh)
                w[mv * m_h + mh] = W(mv, mh);
        return w;
    }

    // Complex response d^H(psi) w for arbitrary (not necessarily unit) weights
    inline cplx response(int m_v, int m_h, const ComplexVector &w, const PsiPoint &point)
    {
        cplx acc = 0.0;
        for (int mv = 0; mv < m_v; ++mv)
            for (int mh = 0; mh < m_h; ++mh)
                acc += std::polar(1.0, -(mv * point.xi + mh * point.zeta)) * w[mv * m_h + mh];
        return acc;
    }

    inline double gain(const Beamformer &c, const PsiPoint &point)
    {
        return std::norm(response(c.m_v(), c.m_h(), c.entries(), point));
    }

    // Gains on the tensor grid xi_samples x zeta_samples, evaluated through the
    // separable factorization E_v W E_h.
    inline RealMatrix gain_on_axes(int m_v, int m_h, const ComplexVector &w,
                                   const RealVector &xi_samples, const RealVector &zeta_samples)
    {
        ComplexMatrix Ev(xi_samples.size(), m_v);
        for (Eigen::Index i = 0; i < xi_samples.size(); ++i)
            for (int mv = 0; mv < m_v; ++mv)
                Ev(i, mv) = std::polar(1.0, -mv * xi_samples[i]);
        ComplexMatrix Eh(m_h, zeta_samples.size());
        for (int mh = 0; mh < m_h; ++mh)
            for (Eigen::Index k = 0; k < zeta_samples.size(); ++k)
                Eh(mh, k) = std::polar(1.0, -mh * zeta_samples[k]);
        const ComplexMatrix A = Ev * (as_matrix(w, m_v, m_h) * Eh);
        return A.cwiseAbs2();
    }

    inline RealMatrix gain_on_axes(const Beamformer &c, const RealVector &xi_samples, const RealVector &zeta_samples)
    {
        return gain_on_axes(c.m_v(), c.m_h(), c.entries(), xi_samples, zeta_samples);
    }

    struct PatternGrid
    {
        RealVector xi_samples;   // ascending
        RealVector zeta_samples; // ascending
        RealMatrix gains;        // linear, rows over xi, columns over zeta
    };

    inline RealVector linspace(double lo, double hi, int n)
    {
        RealVector v(n);
        if (n == 1)
        {
            v[0] = lo;
            return v;
        }
        for (int i = 0; i < n; ++i)
            v[i] = (i == n - 1) ? hi : lo + (hi - lo) * i / (n - 1);
        return v;
    }

    // Uniform sampling, endpoints included
    inline PatternGrid pattern(int m_v, int m_h, const ComplexVector &w, int resolution_v, int resolution_h, const PsiRect &bounds)
    {
        if (resolution_v < 2 || resolution_h < 2)
            throw invalid_argument_error("pattern: resolutions must be >= 2");
        PatternGrid g;
        g.xi_samples = linspace(bounds.xi_lo, bounds.xi_hi, resolution_v);
        g.zeta_samples = linspace(bounds.zeta_lo, bounds.zeta_hi, resolution_h);
        g.gains = gain_on_axes(m_v, m_h, w, g.xi_samples, g.zeta_samples);
        return g;
    }

    inline PatternGrid pattern(const Beamformer &c, int resolution_v, int resolution_h, const PsiRect &bounds)
    {
        return pattern(c.m_v(), c.m_h(), c.entries(), resolution_v, resolution_h, bounds);
    }

    // Trapezoidal rule over [-pi, pi]^2 with `quadrature_resolution` intervals per axis
    inline double gain_integral(const Beamformer &c, int quadrature_resolution)
    {
        const int n = quadrature_resolution;
        if (n < 1)
            throw invalid_argument_error("gain_integral: resolution must be >= 1");
        const RealVector nodes = linspace(-pi, pi, n + 1);
        RealVector wts = RealVector::Constant(n + 1, two_pi / n);
        wts[0] *= 0.5;
        wts[n] *= 0.5;
        const RealMatrix G = gain_on_axes(c, nodes, nodes);
        return wts.dot(G * wts);
    }

    // Exact integral of exp(-j k x) over [a, b]
    inline cplx phasor_integral(int k, double a, double b)
    {
        if (k == 0)
            return b - a;
        const cplx jk(0.0, static_cast<double>(k));
        return (std::exp(-jk * a) - std::exp(-jk * b)) / jk;
    }

    // Exact integral of |d^H(psi) w|^2 over an axis-aligned rectangle
    inline double region_integral(int m_v, int m_h, const ComplexVector &w, const PsiRect &rect)
    {
        ComplexMatrix Iv(m_v, m_v), Ih(m_h, m_h);
        for (int a = 0; a < m_v; ++a)
            for (int b = 0; b < m_v; ++b)
                Iv(a, b) = phasor_integral(a - b, rect.xi_lo, rect.xi_hi);
        for (int a = 0; a < m_h; ++a)
            for (int b = 0; b < m_h; ++b)
                Ih(a, b) = phasor_integral(a - b, rect.zeta_lo, rect.zeta_hi);
        const ComplexMatrix W = as_matrix(w, m_v, m_h);
        const ComplexMatrix T = Iv.transpose() * W * Ih;
        return (W.conjugate().cwiseProduct(T)).sum().real();
    }

    inline double region_integral(const Beamformer &c, const PsiRect &rect)
    {
        return region_integral(c.m_v(), c.m_h(), c.entries(), rect);
    }

    // Midpoint lattice of `resolution` samples per axis inside one subregion.
    // Samples whose relative position lies in [shrink, 1 - shrink] on both axes
    // are flagged as interior.
    struct CellSamples
    {
        RealMatrix gains;
        std::vector<bool> interior_v;
        std::vector<bool> interior_h;
    };

    inline CellSamples sample_cell(int m_v, int m_h, const ComplexVector &w, const PsiRect &cell, int resolution, double shrink)
    {
        CellSamples s;
        RealVector xs(resolution), zs(resolution);
        s.interior_v.resize(resolution);
        s.interior_h.resize(resolution);
        for (int i = 0; i < resolution; ++i)
        {
            const double u = (i + 0.5) / resolution;
            xs[i] = cell.xi_lo + u * cell.width_xi();
            zs[i] = cell.zeta_lo + u * cell.width_zeta();
            const bool inside = u >= shrink - 1e-12 && u <= 1.0 - shrink + 1e-12;
            s.interior_v[i] = inside;
            s.interior_h[i] = inside;
        }
        s.gains = gain_on_axes(m_v, m_h, w, xs, zs);
        return s;
    }

    // Exact integral of the gain over the union of cover cells
    inline double cover_integral(int m_v, int m_h, const ComplexVector &w, const CoverSet &cover, const PsiGrid &grid)
    {
        double acc = 0.0;
        for (const auto &c : cover.indices)
            acc += region_integral(m_v, m_h, w, grid.cell(c));
        return acc;
    }

    // Integral over one full period in both axes (Parseval)
    inline double total_integral(const ComplexVector &w)
    {
        return full_period_area * w.squaredNorm();
    }
}
