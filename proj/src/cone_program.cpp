// SPDX-License-Identifier: Apache-2.0
//
// iabsim - integrated access and backhaul simulator for cell-free massive MIMO
// Copyright (C) 2026 The iabsim authors
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

#include "iab/cone_program.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace iab::backhaul
{
    namespace soc
    {
        double margin(const arma::vec &u)
        {
            if (u.n_elem == 1)
                return u(0);
            return u(0) - arma::norm(u.tail(u.n_elem - 1));
        }

        namespace
        {
            // sqrt(u' J u) computed as sqrt((u0 - |u1|)(u0 + |u1|)).
            double jnorm(const arma::vec &u)
            {
                double t = u.n_elem > 1 ? arma::norm(u.tail(u.n_elem - 1)) : 0.0;
                return std::sqrt(std::max(0.0, (u(0) - t) * (u(0) + t)));
            }

            // u' J v
            double jdot(const arma::vec &u, const arma::vec &v)
            {
                double r = u(0) * v(0);
                for (arma::uword i = 1; i < u.n_elem; ++i)
                    r -= u(i) * v(i);
                return r;
            }

            arma::vec jflip(arma::vec u)
            {
                for (arma::uword i = 1; i < u.n_elem; ++i)
                    u(i) = -u(i);
                return u;
            }
        }

        double max_step(const arma::vec &u, const arma::vec &d)
        {
            constexpr double inf = std::numeric_limits<double>::infinity();
            if (u.n_elem == 1)
                return d(0) < 0.0 ? -u(0) / d(0) : inf;

            const double un = jnorm(u);
            const arma::vec ub = u / un;
            const double ubjd = jdot(ub, d);
            const double rho0 = ubjd / un;
            const double factor = (ubjd + d(0)) / (ub(0) + 1.0);
            double rho1 = 0.0;
            for (arma::uword i = 1; i < u.n_elem; ++i)
            {
                double r = (d(i) - factor * ub(i)) / un;
                rho1 += r * r;
            }
            const double sigma = std::sqrt(rho1) - rho0;
            return sigma > 0.0 ? 1.0 / sigma : inf;
        }

        arma::vec Scaling::apply(const arma::vec &x) const
        {
            arma::vec r = 2.0 * arma::dot(v, x) * v - jflip(x);
            return beta * r;
        }

        arma::vec Scaling::apply_inverse(const arma::vec &x) const
        {
            const arma::vec vt = jflip(v);
            arma::vec r = 2.0 * arma::dot(vt, x) * vt - jflip(x);
            return r / beta;
        }

        Scaling nt_scaling(const arma::vec &s, const arma::vec &z)
        {
            Scaling w;
            if (s.n_elem == 1)
            {
                w.beta = std::sqrt(s(0) / z(0));
                w.v = arma::vec{1.0};
                return w;
            }
            const double sn = jnorm(s);
            const double zn = jnorm(z);
            const arma::vec sb = s / sn;
            const arma::vec zb = z / zn;
            const double gamma = std::sqrt((1.0 + arma::dot(sb, zb)) / 2.0);
            arma::vec wb = (sb + jflip(zb)) / (2.0 * gamma);
            w.beta = std::sqrt(sn / zn);
            wb(0) += 1.0;
            w.v = wb / std::sqrt(2.0 * wb(0));
            return w;
        }

        arma::vec jordan_product(const arma::vec &u, const arma::vec &v)
        {
            arma::vec r(u.n_elem);
            r(0) = arma::dot(u, v);
            for (arma::uword i = 1; i < u.n_elem; ++i)
                r(i) = u(0) * v(i) + v(0) * u(i);
            return r;
        }

        arma::vec jordan_divide(const arma::vec &lambda, const arma::vec &w)
        {
            arma::vec u(lambda.n_elem);
            if (lambda.n_elem == 1)
            {
                u(0) = w(0) / lambda(0);
                return u;
            }
            const arma::uword n = lambda.n_elem - 1;
            const arma::vec l1 = lambda.tail(n);
            const arma::vec w1 = w.tail(n);
            const double det = jnorm(lambda);
            u(0) = (lambda(0) * w(0) - arma::dot(l1, w1)) / (det * det);
            u.tail(n) = (w1 - u(0) * l1) / lambda(0);
            return u;
        }
    }

    namespace
    {
        constexpr double near_optimal_feasibility = 1e-6;
        constexpr double near_optimal_gap = 1e-5;

        struct Layout
        {
            std::vector<arma::uword> offset; // start of each block in the stacked s / z vectors
            arma::uword total = 0;
        };

        Layout make_layout(const ConeProgram &p)
        {
            Layout l;
            for (const auto &c : p.cones)
            {
                l.offset.push_back(l.total);
                l.total += c.h.n_elem;
            }
            return l;
        }

        arma::vec gather(const arma::vec &x, const std::vector<arma::uword> &support)
        {
            arma::vec r(support.size());
            for (std::size_t i = 0; i < support.size(); ++i)
                r(i) = x(support[i]);
            return r;
        }

        // G x, stacked over blocks.
        arma::vec apply_g(const ConeProgram &p, const Layout &l, const arma::vec &x)
        {
            arma::vec r(l.total);
            for (std::size_t k = 0; k < p.cones.size(); ++k)
                r.subvec(l.offset[k], arma::size(p.cones[k].h)) = p.cones[k].g * gather(x, p.cones[k].support);
            return r;
        }

        // G' z
        arma::vec apply_gt(const ConeProgram &p, const Layout &l, const arma::vec &z)
        {
            arma::vec r(p.n_vars, arma::fill::zeros);
            for (std::size_t k = 0; k < p.cones.size(); ++k)
            {
                const auto &c = p.cones[k];
                arma::vec part = c.g.t() * z.subvec(l.offset[k], arma::size(c.h));
                for (std::size_t i = 0; i < c.support.size(); ++i)
                    r(c.support[i]) += part(i);
            }
            return r;
        }

        arma::vec block(const arma::vec &u, const Layout &l, std::size_t k, arma::uword dim)
        {
            return u.subvec(l.offset[k], l.offset[k] + dim - 1);
        }

        class NewtonSystem
        {
        public:
            NewtonSystem(const ConeProgram &p, const Layout &l, const std::vector<arma::mat> &gram)
                : p_(p), l_(l), gram_(gram) {}

            // Builds and factors H = G' W^{-2} G (plus the equality Schur complement).
            bool factor(const std::vector<soc::Scaling> &w)
            {
                w_ = &w;
                arma::mat h(p_.n_vars, p_.n_vars, arma::fill::zeros);
                for (std::size_t k = 0; k < p_.cones.size(); ++k)
                {
                    const auto &c = p_.cones[k];
                    const auto &sc = w[k];
                    arma::vec vt = sc.v;
                    for (arma::uword i = 1; i < vt.n_elem; ++i)
                        vt(i) = -vt(i);
                    const arma::vec a = c.g.t() * vt;
                    const arma::vec b = c.g.t() * sc.v;
                    const double vv = arma::dot(sc.v, sc.v);
                    arma::mat blk = gram_[k] + 4.0 * vv * (a * a.t()) - 2.0 * (a * b.t() + b * a.t());
                    blk /= sc.beta * sc.beta;
                    const auto &s = c.support;
                    for (std::size_t j = 0; j < s.size(); ++j)
                        for (std::size_t i = 0; i < s.size(); ++i)
                            h(s[i], s[j]) += blk(i, j);
                }
                h = arma::symmatu(h);
                h_ = h;
                if (!h.is_finite())
                    return false;

                for (double reg : {1e-14, 1e-11, 1e-8})
                {
                    arma::mat hr = h;
                    hr.diag() += reg * arma::max(h.diag(), arma::vec(h.n_rows, arma::fill::value(1e-300)));
                    if (arma::chol(chol_, hr, "lower"))
                    {
                        if (p_.a.n_rows == 0)
                            return true;
                        arma::mat hinv_at = chol_solve(p_.a.t());
                        arma::mat schur = p_.a * hinv_at;
                        schur = arma::symmatu(schur);
                        if (!schur.is_finite())
                            return false;
                        if (arma::chol(schur_chol_, schur, "lower"))
                            return true;
                    }
                }
                return false;
            }

            // Solves  G' dz + A' dy = bx,  A dx = by,  G dx - W^2 dz = bz.
            void solve(const arma::vec &bx, const arma::vec &by, const arma::vec &bz,
                       arma::vec &dx, arma::vec &dy, arma::vec &dz) const
            {
                const auto &w = *w_;
                arma::vec winv2_bz(l_.total);
                for (std::size_t k = 0; k < p_.cones.size(); ++k)
                {
                    const arma::uword dim = p_.cones[k].h.n_elem;
                    winv2_bz.subvec(l_.offset[k], l_.offset[k] + dim - 1) =
                        w[k].apply_inverse(w[k].apply_inverse(block(bz, l_, k, dim)));
                }
                arma::vec r1 = bx + apply_gt(p_, l_, winv2_bz);

                reduced_solve(r1, by, dx, dy);
                // One step of iterative refinement on the reduced system.
                arma::vec e1 = r1 - h_ * dx;
                if (p_.a.n_rows > 0)
                    e1 -= p_.a.t() * dy;
                arma::vec e2 = p_.a.n_rows > 0 ? arma::vec(by - p_.a * dx) : arma::vec();
                arma::vec cx, cy;
                reduced_solve(e1, e2, cx, cy);
                dx += cx;
                if (p_.a.n_rows > 0)
                    dy += cy;

                arma::vec gdx = apply_g(p_, l_, dx) - bz;
                dz.set_size(l_.total);
                for (std::size_t k = 0; k < p_.cones.size(); ++k)
                {
                    const arma::uword dim = p_.cones[k].h.n_elem;
                    dz.subvec(l_.offset[k], l_.offset[k] + dim - 1) =
                        w[k].apply_inverse(w[k].apply_inverse(block(gdx, l_, k, dim)));
                }
            }

        private:
            arma::mat chol_solve(const arma::mat &rhs) const
            {
                arma::mat t = arma::solve(arma::trimatl(chol_), rhs, arma::solve_opts::fast);
                return arma::solve(arma::trimatu(chol_.t()), t, arma::solve_opts::fast);
            }

            void reduced_solve(const arma::vec &r1, const arma::vec &r2, arma::vec &dx, arma::vec &dy) const
            {
                if (p_.a.n_rows == 0)
                {
                    dx = chol_solve(r1);
                    dy.reset();
                    return;
                }
                arma::vec hr1 = chol_solve(r1);
                arma::vec rhs = p_.a * hr1 - r2;
                arma::vec t = arma::solve(arma::trimatl(schur_chol_), rhs, arma::solve_opts::fast);
                dy = arma::solve(arma::trimatu(schur_chol_.t()), t, arma::solve_opts::fast);
                dx = chol_solve(r1 - p_.a.t() * dy);
            }

            const ConeProgram &p_;
            const Layout &l_;
            const std::vector<arma::mat> &gram_;
            const std::vector<soc::Scaling> *w_ = nullptr;
            arma::mat h_;
            arma::mat chol_;
            arma::mat schur_chol_;
        };

        double max_step_all(const ConeProgram &p, const Layout &l, const arma::vec &u, const arma::vec &d)
        {
            double alpha = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < p.cones.size(); ++k)
            {
                const arma::uword dim = p.cones[k].h.n_elem;
                alpha = std::min(alpha, soc::max_step(block(u, l, k, dim), block(d, l, k, dim)));
            }
            return alpha;
        }
    }

    IpmResult solve_cone_program(const ConeProgram &p, const arma::vec &x0, const IpmOptions &opt,
                                 const IpmMonitor &monitor)
    {
        if (x0.n_elem != p.n_vars || p.c.n_elem != p.n_vars)
            throw std::invalid_argument("solve_cone_program: dimension mismatch");
        if (p.a.n_rows > 0 && (p.a.n_cols != p.n_vars || p.b.n_elem != p.a.n_rows))
            throw std::invalid_argument("solve_cone_program: equality dimensions disagree");
        for (const auto &c : p.cones)
            if (c.g.n_rows != c.h.n_elem || c.g.n_cols != c.support.size())
                throw std::invalid_argument("solve_cone_program: cone block dimensions disagree");

        const Layout l = make_layout(p);
        const double nu = double(p.cones.size());

        std::vector<arma::mat> gram;
        gram.reserve(p.cones.size());
        for (const auto &c : p.cones)
            gram.push_back(c.g.t() * c.g);

        arma::vec h(l.total);
        for (std::size_t k = 0; k < p.cones.size(); ++k)
            h.subvec(l.offset[k], arma::size(p.cones[k].h)) = p.cones[k].h;

        IpmResult res;
        arma::vec x = x0;
        arma::vec s = h - apply_g(p, l, x);
        arma::vec z(l.total, arma::fill::zeros);
        arma::vec y(p.a.n_rows, arma::fill::zeros);
        for (std::size_t k = 0; k < p.cones.size(); ++k)
        {
            const arma::uword dim = p.cones[k].h.n_elem;
            if (!(soc::margin(block(s, l, k, dim)) > 0.0))
                throw std::invalid_argument("solve_cone_program: starting point is not strictly feasible");
            z(l.offset[k]) = 1.0;
        }

        const double cnorm = std::max(1.0, arma::norm(p.c));
        const double hnorm = std::max(1.0, arma::norm(h));
        const double bnorm = std::max(1.0, p.b.n_elem ? arma::norm(p.b) : 0.0);

        struct Snapshot
        {
            double merit = std::numeric_limits<double>::infinity();
            arma::vec x, s, z, y;
            int iteration = 0;
            double pcost = 0.0, dcost = 0.0, gap = 0.0, pres = 0.0, dres = 0.0, gap_measure = 0.0;
        } best;

        NewtonSystem newton(p, l, gram);
        std::vector<soc::Scaling> w(p.cones.size());
        int stalls = 0;

        for (int it = 0;; ++it)
        {
            const arma::vec gtz = apply_gt(p, l, z);
            arma::vec rx = p.c + gtz;
            if (p.a.n_rows > 0)
                rx += p.a.t() * y;
            arma::vec ry = p.a.n_rows > 0 ? arma::vec(p.a * x - p.b) : arma::vec();
            arma::vec rz = s + apply_g(p, l, x) - h;

            const double gap = arma::dot(s, z);
            const double mu = gap / nu;
            const double pcost = arma::dot(p.c, x);
            double dcost = -arma::dot(h, z);
            if (p.a.n_rows > 0)
                dcost -= arma::dot(p.b, y);
            const double pres = std::max(arma::norm(rz) / hnorm, ry.n_elem ? arma::norm(ry) / bnorm : 0.0);
            const double dres = arma::norm(rx) / std::max(cnorm, arma::norm(gtz));

            res.iterations = it;
            res.primal_objective = pcost;
            res.dual_objective = dcost;
            res.gap = gap;
            res.primal_residual = pres;
            res.dual_residual = dres;

            if (monitor && monitor(IpmProgress{it, x, z, pcost, dcost, gap, pres, dres}))
            {
                res.status = IpmStatus::stopped;
                break;
            }

            double relgap = std::numeric_limits<double>::infinity();
            if (pcost < 0.0)
                relgap = gap / -pcost;
            else if (dcost > 0.0)
                relgap = gap / dcost;

            const double merit = std::max({pres, dres, std::min(gap, relgap)});
            if (x.is_finite() && z.is_finite() && merit < best.merit)
                best = {merit, x, s, z, y, it, pcost, dcost, gap, pres, dres, std::min(gap, relgap)};
            if (pres <= opt.feasibility_tol && dres <= opt.feasibility_tol &&
                (gap <= opt.abs_gap_tol || relgap <= opt.rel_gap_tol))
            {
                res.status = IpmStatus::optimal;
                break;
            }
            if (it >= opt.max_iterations)
            {
                res.status = IpmStatus::iteration_limit;
                res.message = "iteration cap reached";
                break;
            }

            arma::vec lambda(l.total);
            for (std::size_t k = 0; k < p.cones.size(); ++k)
            {
                const arma::uword dim = p.cones[k].h.n_elem;
                w[k] = soc::nt_scaling(block(s, l, k, dim), block(z, l, k, dim));
                lambda.subvec(l.offset[k], l.offset[k] + dim - 1) = w[k].apply(block(z, l, k, dim));
            }
            if (!newton.factor(w))
            {
                res.status = IpmStatus::numerical_error;
                res.message = "Newton system is not positive definite";
                break;
            }

            // Solves the linearized system for a given complementarity target ds; returns (dx, dy, dz, dsv).
            auto direction = [&](const arma::vec &ds, arma::vec &dx, arma::vec &dy, arma::vec &dz, arma::vec &dsv)
            {
                arma::vec q(l.total), wq(l.total);
                for (std::size_t k = 0; k < p.cones.size(); ++k)
                {
                    const arma::uword dim = p.cones[k].h.n_elem;
                    arma::vec qk = soc::jordan_divide(block(lambda, l, k, dim), block(ds, l, k, dim));
                    q.subvec(l.offset[k], l.offset[k] + dim - 1) = qk;
                    wq.subvec(l.offset[k], l.offset[k] + dim - 1) = w[k].apply(qk);
                }
                arma::vec by = p.a.n_rows > 0 ? arma::vec(-ry) : arma::vec();
                newton.solve(-rx, by, -rz - wq, dx, dy, dz);
                dsv.set_size(l.total);
                for (std::size_t k = 0; k < p.cones.size(); ++k)
                {
                    const arma::uword dim = p.cones[k].h.n_elem;
                    arma::vec t = block(q, l, k, dim) - w[k].apply(block(dz, l, k, dim));
                    dsv.subvec(l.offset[k], l.offset[k] + dim - 1) = w[k].apply(t);
                }
            };

            arma::vec lsq(l.total);
            for (std::size_t k = 0; k < p.cones.size(); ++k)
            {
                const arma::uword dim = p.cones[k].h.n_elem;
                arma::vec lk = block(lambda, l, k, dim);
                lsq.subvec(l.offset[k], l.offset[k] + dim - 1) = soc::jordan_product(lk, lk);
            }

            arma::vec dxa, dya, dza, dsa;
            direction(-lsq, dxa, dya, dza, dsa);
            const double alpha_aff =
                std::min(1.0, std::min(max_step_all(p, l, s, dsa), max_step_all(p, l, z, dza)));
            const double sigma = std::pow(1.0 - alpha_aff, 3.0);

            arma::vec ds = -lsq;
            for (std::size_t k = 0; k < p.cones.size(); ++k)
            {
                const arma::uword dim = p.cones[k].h.n_elem;
                const arma::vec ws = w[k].apply_inverse(block(dsa, l, k, dim));
                const arma::vec wz = w[k].apply(block(dza, l, k, dim));
                arma::vec corr = soc::jordan_product(ws, wz);
                corr(0) -= sigma * mu;
                ds.subvec(l.offset[k], l.offset[k] + dim - 1) -= corr;
            }

            arma::vec dx, dy, dz, dsv;
            direction(ds, dx, dy, dz, dsv);
            const double amax = std::min(max_step_all(p, l, s, dsv), max_step_all(p, l, z, dz));
            const double alpha = std::min(1.0, opt.step_fraction * amax);
            if (!(alpha > 1e-12) || !dx.is_finite())
            {
                if (++stalls >= 5 || !dx.is_finite())
                {
                    res.status = IpmStatus::numerical_error;
                    res.message = "step length collapsed";
                    break;
                }
            }
            else
                stalls = 0;

            x += alpha * dx;
            s += alpha * dsv;
            z += alpha * dz;
            if (p.a.n_rows > 0)
                y += alpha * dy;
        }

        if ((res.status == IpmStatus::numerical_error || res.status == IpmStatus::iteration_limit) &&
            std::isfinite(best.merit))
        {
            // Fall back to the most accurate iterate seen.
            x = best.x;
            s = best.s;
            z = best.z;
            y = best.y;
            res.primal_objective = best.pcost;
            res.dual_objective = best.dcost;
            res.gap = best.gap;
            res.primal_residual = best.pres;
            res.dual_residual = best.dres;
            if (best.pres <= near_optimal_feasibility && best.dres <= near_optimal_feasibility &&
                best.gap_measure <= near_optimal_gap)
                res.status = IpmStatus::near_optimal;
        }

        res.x = std::move(x);
        res.s = std::move(s);
        res.z = std::move(z);
        res.y = std::move(y);
        return res;
    }
}
