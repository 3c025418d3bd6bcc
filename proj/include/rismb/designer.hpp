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

// Multi-beam synthesis.
//
// The target is a flat gain t over the union of cover subregions and zero
// elsewhere. Writing the target amplitude per subregion as an equal-gain
// phase ramp g with parameters (eta_v, eta_h), the least-squares beamformer
// is a sum over cover cells of sampled steering vectors weighted by g. Two
// evaluations are provided:
//
//   design_closed_form  the L -> infinity limit, a sum of sinc-weighted
//                       phasors per cell
//   design_finite_L     explicit assembly of the sampled steering matrices,
//                       either with the scalar approximation of D D^H or with
//                       an exact pseudo-inverse solve

#include "arrayresp.hpp"

#include <optional>
#include <variant>

namespace rismb
{
    struct IdealGain
    {
        double level_t = 0.0; // linear
        CoverSet cover;
        PsiGrid grid;

        double level_db() const { return to_db(level_t); }
    };

    // t = (2 pi)^2 / (|A| delta_v delta_h)
    inline IdealGain ideal_gain_level(const CoverSet &cover, const PsiGrid &grid)
    {
        if (cover.empty())
            throw empty_cover_error("ideal_gain_level: empty cover");
        return {full_period_area / (static_cast<double>(cover.size()) * grid.cell_area()), cover, grid};
    }

    struct EqualGainParams
    {
        double eta_v = 0.0;
        double eta_h = 0.0;

        EqualGainParams() = default;
        EqualGainParams(double v, double h) : eta_v(v), eta_h(h)
        {
            if (!std::isfinite(v) || !std::isfinite(h))
                throw invalid_argument_error("EqualGainParams: eta must be finite");
            if (std::abs(v) > two_pi + 1e-12 || std::abs(h) > two_pi + 1e-12)
                throw invalid_argument_error("EqualGainParams: eta must lie in [-2 pi, 2 pi]");
        }
    };

    // Entry (l_v', l_h') = exp(j (eta_v l_v' / L_v + eta_h l_h' / L_h)), flat row-major
    inline ComplexVector equal_gain_vector(const EqualGainParams &params, int l_v, int l_h)
    {
        if (l_v < 1 || l_h < 1)
            throw invalid_argument_error("equal_gain_vector: counts must be >= 1");
        ComplexVector g(static_cast<Eigen::Index>(l_v) * l_h);
        for (int a = 0; a < l_v; ++a)
            for (int b = 0; b < l_h; ++b)
                g[a * l_h + b] = std::polar(1.0, params.eta_v * a / l_v + params.eta_h * b / l_h);
        return g;
    }

    struct ClosedForm
    {
    };

    struct FiniteL
    {
        int l_v = 16;
        int l_h = 16;
        bool exact_ls = false;
    };

    using DesignMethod = std::variant<ClosedForm, FiniteL>;

    struct DesignResult
    {
        Beamformer beamformer;
        CoverSet cover;
        PsiGrid grid;
        IdealGain ideal;
        EqualGainParams params;
        DesignMethod method;
        ComplexVector raw; // synthesized vector before unit-norm scaling

        // exact least-squares path only
        bool rank_warning = false;
        double condition_v = 1.0;
        double condition_h = 1.0;
    };

    inline void check_design_inputs(const CoverSet &cover, const PsiGrid &grid)
    {
        if (cover.empty())
            throw empty_cover_error("design: empty cover");
        for (const auto &c : cover.indices)
            if (c.p < 1 || c.p > grid.q_v() || c.q < 1 || c.q > grid.q_h())
                throw invalid_argument_error("design: cover index outside the grid");
    }

    // Entry (m_v, m_h) before normalization:
    //   sum over (p,q) in A of (2 pi / Q) exp(j (chi + (x_v + x_h) / 2)) sinc(x_v / 2 pi) sinc(x_h / 2 pi)
    // with chi = m_v xi^{p-1} + m_h zeta^{q-1} and x_a = delta_a m_a + eta_a.
    inline ComplexVector closed_form_entries(const CoverSet &cover, const PsiGrid &grid, const ArrayGeometry &geom,
                                             const EqualGainParams &params)
    {
        check_design_inputs(cover, grid);
        const double prefactor = two_pi / grid.count();
        ComplexVector c = ComplexVector::Zero(geom.size());
        for (int mv = 0; mv < geom.m_v; ++mv)
        {
            const double x_v = grid.delta_v() * mv + params.eta_v;
            const double s_v = sinc(x_v / two_pi);
            for (int mh = 0; mh < geom.m_h; ++mh)
            {
                const double x_h = grid.delta_h() * mh + params.eta_h;
                const double amp = prefactor * s_v * sinc(x_h / two_pi);
                cplx acc = 0.0;
                for (const auto &cell : cover.indices)
                {
                    const double chi = mv * grid.xi_edge(cell.p - 1) + mh * grid.zeta_edge(cell.q - 1);
                    acc += std::polar(amp, chi + 0.5 * (x_v + x_h));
                }
                c[geom.flat_index(mv, mh)] = acc;
            }
        }
        return c;
    }

    inline DesignResult design_closed_form(const CoverSet &cover, const PsiGrid &grid, const ArrayGeometry &geom,
                                           const EqualGainParams &params = {})
    {
        ComplexVector raw = closed_form_entries(cover, grid, geom, params);
        Beamformer bf(geom, raw);
        return DesignResult{std::move(bf), cover, grid, ideal_gain_level(cover, grid), params, ClosedForm{}, std::move(raw)};
    }

    // ---- finite-L least squares ----

    // sigma = 2 pi / (L Q sqrt(delta_v delta_h |A|))
    inline double ls_sigma(int l, int q, double delta_v, double delta_h, std::size_t cover_size)
    {
        return two_pi / (static_cast<double>(l) * q * std::sqrt(delta_v * delta_h * static_cast<double>(cover_size)));
    }

    // Sample positions xi_{r,l} = xi^{r-1} + l delta / L, l = 1..L, ordered (r, l) with r major
    inline RealVector sample_axis(int q_count, int l, auto edge, double delta)
    {
        RealVector s(static_cast<Eigen::Index>(q_count) * l);
        for (int r = 1; r <= q_count; ++r)
            for (int k = 1; k <= l; ++k)
                s[(r - 1) * l + (k - 1)] = edge(r - 1) + k * delta / l;
        return s;
    }

    // Columns are per-axis steering vectors at the sample positions, M_a x (L_a Q_a)
    inline ComplexMatrix sampled_steering(int m, const RealVector &samples)
    {
        ComplexMatrix D(m, samples.size());
        for (Eigen::Index i = 0; i < samples.size(); ++i)
            for (int n = 0; n < m; ++n)
                D(n, i) = std::polar(1.0, n * samples[i]);
        return D;
    }

    // The sampled least-squares problem || b - D^H c ||, kept in separable
    // form: D^H = sqrt(delta_v delta_h) (D_v^H (x) D_h^H) and b reshaped to a
    // (L_v Q_v) x (L_h Q_h) matrix.
    struct SampledProblem
    {
        ComplexMatrix d_v;
        ComplexMatrix d_h;
        ComplexMatrix target; // b
        double scale = 1.0;   // sqrt(delta_v delta_h)
    };

    inline SampledProblem build_sampled_problem(const CoverSet &cover, const PsiGrid &grid, const ArrayGeometry &geom,
                                                const EqualGainParams &params, int l_v, int l_h)
    {
        check_design_inputs(cover, grid);
        if (l_v < 1 || l_h < 1)
            throw invalid_argument_error("design_finite_L: sample counts must be >= 1");
        SampledProblem sp;
        sp.d_v = sampled_steering(geom.m_v, sample_axis(grid.q_v(), l_v, [&](int p)
                                                        { return grid.xi_edge(p); }, grid.delta_v()));
        sp.d_h = sampled_steering(geom.m_h, sample_axis(grid.q_h(), l_h, [&](int q)
                                                        { return grid.zeta_edge(q); }, grid.delta_h()));
        sp.scale = std::sqrt(grid.delta_v() * grid.delta_h());

        const ComplexVector g = equal_gain_vector(params, l_v, l_h);
        const double amp = two_pi / std::sqrt(static_cast<double>(cover.size()));
        sp.target = ComplexMatrix::Zero(static_cast<Eigen::Index>(grid.q_v()) * l_v, static_cast<Eigen::Index>(grid.q_h()) * l_h);
        for (const auto &cell : cover.indices)
            for (int a = 0; a < l_v; ++a)
                for (int b = 0; b < l_h; ++b)
                    sp.target((cell.p - 1) * l_v + a, (cell.q - 1) * l_h + b) = amp * g[a * l_h + b];
        return sp;
    }

    // D^H c in matrix form
    inline ComplexMatrix apply_dh(const SampledProblem &sp, const ComplexMatrix &C)
    {
        return sp.scale * (sp.d_v.adjoint() * C * sp.d_h.conjugate());
    }

    // min over complex scale a of || b - a D^H c || / || b ||
    inline double ls_residual(const SampledProblem &sp, const ComplexVector &c, int m_v, int m_h)
    {
        const ComplexMatrix r = apply_dh(sp, as_matrix(c, m_v, m_h));
        const double rr = r.squaredNorm();
        const double bb = sp.target.squaredNorm();
        if (!(rr > 0.0))
            return 1.0;
        const cplx a = (r.conjugate().cwiseProduct(sp.target)).sum() / rr;
        return (sp.target - a * r).norm() / std::sqrt(bb);
    }

    struct Pseudoinverse
    {
        ComplexMatrix pinv;
        double condition = 1.0;
    };

    // Pseudo-inverse with the usual max(rows, cols) * eps * s_max cutoff
    inline Pseudoinverse pseudoinverse(const ComplexMatrix &A)
    {
        Eigen::JacobiSVD<ComplexMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const RealVector &s = svd.singularValues();
        Pseudoinverse out;
        if (s.size() == 0 || !(s[0] > 0.0))
        {
            out.pinv = ComplexMatrix::Zero(A.cols(), A.rows());
            out.condition = std::numeric_limits<double>::infinity();
            return out;
        }
        const double cutoff = static_cast<double>(std::max(A.rows(), A.cols())) * std::numeric_limits<double>::epsilon() * s[0];
        RealVector inv = RealVector::Zero(s.size());
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s[i] > cutoff)
                inv[i] = 1.0 / s[i];
        out.pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
        out.condition = s[s.size() - 1] > 0.0 ? s[0] / s[s.size() - 1] : std::numeric_limits<double>::infinity();
        return out;
    }

    inline DesignResult design_finite_L(const CoverSet &cover, const PsiGrid &grid, const ArrayGeometry &geom,
                                        const EqualGainParams &params, int l_v, int l_h, bool exact_ls)
    {
        check_design_inputs(cover, grid);
        if (l_v < 1 || l_h < 1)
            throw invalid_argument_error("design_finite_L: sample counts must be >= 1");

        ComplexMatrix C;
        bool rank_warning = false;
        double cond_v = 1.0, cond_h = 1.0;
        if (!exact_ls)
        {
            // c = sum over (p,q) in A of sigma D_{p,q} g_{p,q}
            const double sigma = ls_sigma(l_v * l_h, grid.count(), grid.delta_v(), grid.delta_h(), cover.size());
            const ComplexVector g = equal_gain_vector(params, l_v, l_h);
            ComplexMatrix G(l_v, l_h);
            for (int a = 0; a < l_v; ++a)
                for (int b = 0; b < l_h; ++b)
                    G(a, b) = g[a * l_h + b];
            C = ComplexMatrix::Zero(geom.m_v, geom.m_h);
            for (const auto &cell : cover.indices)
            {
                RealVector xs(l_v), zs(l_h);
                for (int a = 1; a <= l_v; ++a)
                    xs[a - 1] = grid.xi_edge(cell.p - 1) + a * grid.delta_v() / l_v;
                for (int b = 1; b <= l_h; ++b)
                    zs[b - 1] = grid.zeta_edge(cell.q - 1) + b * grid.delta_h() / l_h;
                // D_{p,q} g = sum_{a,b} g_{a,b} d_v(xi_a) (x) d_h(zeta_b)
                C += sigma * (sampled_steering(geom.m_v, xs) * G * sampled_steering(geom.m_h, zs).transpose());
            }
        }
        else
        {
            const SampledProblem sp = build_sampled_problem(cover, grid, geom, params, l_v, l_h);
            // pinv(A (x) B) = pinv(A) (x) pinv(B)
            const Pseudoinverse pv = pseudoinverse(std::sqrt(grid.delta_v()) * sp.d_v.adjoint());
            const Pseudoinverse ph = pseudoinverse(std::sqrt(grid.delta_h()) * sp.d_h.adjoint());
            C = pv.pinv * sp.target * ph.pinv.transpose();
            cond_v = pv.condition;
            cond_h = ph.condition;
            // normal equations square the condition number
            rank_warning = cond_v * cond_h > 1e6;
        }

        ComplexVector raw = as_flat(C);
        Beamformer bf(geom, raw);
        DesignResult r{std::move(bf), cover, grid, ideal_gain_level(cover, grid), params, FiniteL{l_v, l_h, exact_ls}, std::move(raw)};
        r.rank_warning = rank_warning;
        r.condition_v = cond_v;
        r.condition_h = cond_h;
        return r;
    }

    // ---- D D^H diagnostic ----

    // || D D^H - delta_v delta_h L Q I ||_F / || delta_v delta_h L Q I ||_F, computed
    // from the per-axis factors X = D_v D_v^H and Y = D_h D_h^H without forming
    // the Kronecker product.
    inline double dd_h_deviation(const PsiGrid &grid, const ArrayGeometry &geom, int l_v, int l_h)
    {
        if (l_v < 1 || l_h < 1)
            throw invalid_argument_error("dd_h_deviation: sample counts must be >= 1");
        const ComplexMatrix Dv = sampled_steering(geom.m_v, sample_axis(grid.q_v(), l_v, [&](int p)
                                                                        { return grid.xi_edge(p); }, grid.delta_v()));
        const ComplexMatrix Dh = sampled_steering(geom.m_h, sample_axis(grid.q_h(), l_h, [&](int q)
                                                                        { return grid.zeta_edge(q); }, grid.delta_h()));
        const ComplexMatrix X = Dv * Dv.adjoint();
        const ComplexMatrix Y = Dh * Dh.adjoint();
        const double s = static_cast<double>(l_v) * l_h * grid.count();

        auto split = [](const ComplexMatrix &A, double &diag2, double &off2)
        {
            diag2 = A.diagonal().squaredNorm();
            double o = 0.0;
            for (Eigen::Index i = 0; i < A.rows(); ++i)
                for (Eigen::Index j = 0; j < A.cols(); ++j)
                    if (i != j)
                        o += std::norm(A(i, j));
            off2 = o;
        };
        double xd2, xo2, yd2, yo2;
        split(X, xd2, xo2);
        split(Y, yd2, yo2);

        double diag_part = 0.0;
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            for (Eigen::Index k = 0; k < Y.rows(); ++k)
                diag_part += std::norm(X(i, i) * Y(k, k) - s);
        const double off_part = xo2 * (yd2 + yo2) + xd2 * yo2;
        return std::sqrt(diag_part + off_part) / (s * std::sqrt(static_cast<double>(geom.size())));
    }

    // ---- eta selection ----

    struct EtaObjective
    {
        double ripple_db = 0.0;
        double leakage = 0.0;
        double value = 0.0;
    };

    inline constexpr double eta_leakage_weight = 10.0;
    inline constexpr int eta_samples_per_cell = 16;
    inline constexpr double eta_interior_shrink = 0.1;

    // Interior ripple (max - min, dB) over the cover plus weighted leakage fraction
    inline EtaObjective eta_objective(const Beamformer &c, const CoverSet &cover, const PsiGrid &grid,
                                      int samples_per_cell = eta_samples_per_cell, double shrink = eta_interior_shrink)
    {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto &cell : cover.indices)
        {
            const CellSamples s = sample_cell(c.m_v(), c.m_h(), c.entries(), grid.cell(cell), samples_per_cell, shrink);
            for (int i = 0; i < samples_per_cell; ++i)
                for (int k = 0; k < samples_per_cell; ++k)
                    if (s.interior_v[i] && s.interior_h[k])
                    {
                        const double db = to_db(s.gains(i, k));
                        lo = std::min(lo, db);
                        hi = std::max(hi, db);
                    }
        }
        EtaObjective o;
        o.ripple_db = hi >= lo ? hi - lo : 0.0;
        const double inside = cover_integral(c.m_v(), c.m_h(), c.entries(), cover, grid);
        o.leakage = std::clamp(1.0 - inside / total_integral(c.entries()), 0.0, 1.0);
        o.value = o.ripple_db + eta_leakage_weight * o.leakage;
        return o;
    }

    // Candidate values per axis: `resolution` evenly spaced points on
    // [-2 pi, 2 pi], plus 0 when it is not among them. resolution 1 gives {0}.
    inline std::vector<double> eta_candidates(int resolution)
    {
        if (resolution < 1)
            throw invalid_argument_error("select_eta: resolution must be >= 1");
        std::vector<double> v;
        if (resolution == 1)
            return {0.0};
        const RealVector ls = linspace(-two_pi, two_pi, resolution);
        bool has_zero = false;
        for (Eigen::Index i = 0; i < ls.size(); ++i)
        {
            double x = ls[i];
            if (std::abs(x) < 1e-12)
            {
                x = 0.0;
                has_zero = true;
            }
            v.push_back(x);
        }
        if (!has_zero)
        {
            v.push_back(0.0);
            std::sort(v.begin(), v.end());
        }
        return v;
    }

    // Grid search of the closed-form design over (eta_v, eta_h). Ties go to the
    // smallest eta_v, then the smallest eta_h.
    inline EqualGainParams select_eta(const CoverSet &cover, const PsiGrid &grid, const ArrayGeometry &geom, int search_resolution)
    {
        check_design_inputs(cover, grid);
        const std::vector<double> cand = eta_candidates(search_resolution);
        if (cand.size() == 1)
            return {};
        EqualGainParams best;
        double best_value = std::numeric_limits<double>::infinity();
        for (double ev : cand)
            for (double eh : cand)
            {
                const EqualGainParams p(ev, eh);
                const Beamformer c(geom, closed_form_entries(cover, grid, geom, p));
                const double v = eta_objective(c, cover, grid).value;
                if (v < best_value)
                {
                    best_value = v;
                    best = p;
                }
            }
        return best;
    }
}
