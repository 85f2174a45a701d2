// SPDX-License-Identifier: Apache-2.0
//
// mdcmap: position-indexed multi-dimensional constellation maps for OAM/WDM links
// Copyright (C) 2026 The mdcmap authors
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
#include "mdcmap/convex_core.hpp"

#include "mdcmap/common.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mdcmap {

double AffineBound::evaluate(std::span<const double> x) const
{
    double v = offset;
    for (std::size_t k = 0; k < index.size(); ++k)
        v += value[k] * x[index[k]];
    return v;
}

bool AffineBound::is_zero() const
{
    return std::all_of(value.begin(), value.end(), [](double v) { return v == 0.0; });
}

void SubproblemSpec::validate() const
{
    if (dimension == 0)
        throw ValidationError("subproblem dimension must be positive");
    for (const auto &b : bounds)
    {
        if (b.index.size() != b.value.size())
            throw ValidationError("affine bound index/value size mismatch");
        for (std::size_t i : b.index)
            if (i >= dimension)
                throw ValidationError("affine bound index out of range");
        if (!std::isfinite(b.offset))
            throw ValidationError("affine bound offset must be finite");
    }
    if (ball_bound && !(*ball_bound >= 0.0))
        throw ValidationError("ball bound must be nonnegative");
    for (const auto &cap : caps)
    {
        if (!(cap.bound >= 0.0))
            throw ValidationError("group caps must be nonnegative");
        for (std::size_t i : cap.indices)
            if (i >= dimension)
                throw ValidationError("group cap index out of range");
    }
    if (!ball_bound && caps.empty())
        throw ValidationError("subproblem needs a ball bound or group caps");
}

std::string to_string(SolveStatus status)
{
    switch (status)
    {
    case SolveStatus::optimal:
        return "optimal";
    case SolveStatus::max_iter:
        return "max_iter";
    case SolveStatus::infeasible:
        return "infeasible";
    }
    return "unknown";
}

namespace {

// Fixed centering weight sigma. Aggressive values (Mehrotra-style) let the iterates drift off
// the central path on these ball-constrained problems and stall the primal step.
constexpr double kCentering = 0.4;

struct Row
{
    std::vector<int> index; // reduced coordinates
    std::vector<double> value;
    double offset = 0.0;
};

struct Group
{
    std::vector<int> index;
    double bound = 0.0;
};

// Epigraph program over z = (x, s):  minimize -s  s.t.  f_k = s - a_k.x - c_k <= 0,
// q_j = (|x_Sj|^2 - b_j) / 2 <= 0.
class InteriorPoint
{
public:
    InteriorPoint(std::vector<Row> rows, std::vector<Group> groups, int free_dim, const SolverSettings &settings)
        : rows_(std::move(rows)), groups_(std::move(groups)), nf_(free_dim), n_(free_dim + 1), settings_(settings),
          hessian_(n_, n_), x_(free_dim), f_(rows_.size()), q_(groups_.size()), lambda_(rows_.size()),
          nu_(groups_.size())
    {
    }

    void start(const std::vector<double> &x0)
    {
        x_ = Eigen::Map<const Eigen::VectorXd>(x0.data(), nf_);
        // Project onto caps, then onto the remaining (overlapping) groups, then into the interior.
        for (int pass = 0; pass < 2; ++pass)
            for (const auto &g : groups_)
            {
                double n2 = 0.0;
                for (int i : g.index)
                    n2 += x_[i] * x_[i];
                if (n2 > g.bound)
                {
                    const double scale = std::sqrt(g.bound / n2);
                    for (int i : g.index)
                        x_[i] *= scale;
                }
            }
        x_ *= 0.95;

        double vmin = std::numeric_limits<double>::infinity();
        double vmax = -vmin;
        a_scale_ = 0.0;
        double c_scale = 0.0;
        for (const auto &r : rows_)
        {
            const double v = affine(r, x_);
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
            double an = 0.0;
            for (double a : r.value)
                an += a * a;
            a_scale_ = std::max(a_scale_, std::sqrt(an));
            c_scale = std::max(c_scale, std::abs(r.offset));
        }
        double radius = 0.0;
        for (const auto &g : groups_)
            radius = std::max(radius, std::sqrt(g.bound));
        value_scale_ = std::max(c_scale + a_scale_ * radius, std::numeric_limits<double>::min());
        s_ = vmin - std::max({0.1 * (vmax - vmin), 1e-3 * value_scale_, 1e-300});

        evaluate_constraints(x_, s_, f_, q_);
        double inv_sum = 0.0;
        for (double f : f_)
            inv_sum += 1.0 / -f;
        const double mu0 = 1.0 / inv_sum;
        for (std::size_t k = 0; k < rows_.size(); ++k)
            lambda_[k] = mu0 / -f_[k];
        // Cap multipliers: least-squares fit of the x-part of the dual residual, floored by centrality.
        Eigen::VectorXd pull = Eigen::VectorXd::Zero(nf_);
        for (std::size_t k = 0; k < rows_.size(); ++k)
            for (std::size_t e = 0; e < rows_[k].index.size(); ++e)
                pull[rows_[k].index[e]] += lambda_[k] * rows_[k].value[e];
        for (std::size_t j = 0; j < groups_.size(); ++j)
        {
            double xg = 0.0, xx = 0.0;
            for (int i : groups_[j].index)
            {
                xg += x_[i] * pull[i];
                xx += x_[i] * x_[i];
            }
            nu_[j] = std::max(mu0 / -q_[j], xx > 0.0 ? xg / xx : 0.0);
        }
    }

    SolveStatus run(std::size_t &iterations, double &residual, double &gap)
    {
        const double m = static_cast<double>(rows_.size() + groups_.size());
        Eigen::VectorXd dz(n_), rhs(n_), rdual(n_);
        std::vector<double> dlambda(rows_.size()), dnu(groups_.size());
        std::vector<double> grad_dot_f(rows_.size()), grad_dot_q(groups_.size());

        for (iterations = 0; iterations < settings_.max_iterations; ++iterations)
        {
            evaluate_constraints(x_, s_, f_, q_);
            dual_residual(x_, lambda_, nu_, rdual);
            gap = surrogate_gap();
            residual = rdual.norm();
            const double gap_tol = settings_.relative_tolerance * std::max(std::abs(s_), 1e-3 * value_scale_);
            const double feas_tol = settings_.feasibility_tolerance * (1.0 + a_scale_);
            if (residual <= feas_tol && gap <= gap_tol)
                return SolveStatus::optimal;

            factor();

            const double inv_t = kCentering * gap / m;

            // Newton step toward the central point with 1/t = sigma * gap / m.
            rhs.setZero();
            rhs[nf_] = 1.0;
            for (std::size_t k = 0; k < rows_.size(); ++k)
            {
                const double w = inv_t / -f_[k];
                const auto &r = rows_[k];
                for (std::size_t e = 0; e < r.index.size(); ++e)
                    rhs[r.index[e]] += w * r.value[e];
                rhs[nf_] -= w;
            }
            for (std::size_t j = 0; j < groups_.size(); ++j)
            {
                const double w = inv_t / -q_[j];
                for (int i : groups_[j].index)
                    rhs[i] -= w * x_[i];
            }
            dz = llt_.solve(rhs);
            directional(dz, grad_dot_f, grad_dot_q);
            for (std::size_t k = 0; k < rows_.size(); ++k)
                dlambda[k] = -lambda_[k] - inv_t / f_[k] - lambda_[k] * grad_dot_f[k] / f_[k];
            for (std::size_t j = 0; j < groups_.size(); ++j)
                dnu[j] = -nu_[j] - inv_t / q_[j] - nu_[j] * grad_dot_q[j] / q_[j];

            if (!line_search(dz, grad_dot_f, dlambda, dnu, inv_t))
            {
                // Step collapsed at machine precision; the current iterate is as good as it gets.
                evaluate_constraints(x_, s_, f_, q_);
                dual_residual(x_, lambda_, nu_, rdual);
                residual = rdual.norm();
                gap = surrogate_gap();
                const bool close = gap <= 1e2 * gap_tol && residual <= 1e2 * feas_tol;
                return close ? SolveStatus::optimal : SolveStatus::max_iter;
            }
        }
        return SolveStatus::max_iter;
    }

    const Eigen::VectorXd &x() const { return x_; }

private:
    static double affine(const Row &r, const Eigen::VectorXd &x)
    {
        double v = r.offset;
        for (std::size_t e = 0; e < r.index.size(); ++e)
            v += r.value[e] * x[r.index[e]];
        return v;
    }

    void evaluate_constraints(const Eigen::VectorXd &x, double s, std::vector<double> &f, std::vector<double> &q) const
    {
        for (std::size_t k = 0; k < rows_.size(); ++k)
            f[k] = s - affine(rows_[k], x);
        for (std::size_t j = 0; j < groups_.size(); ++j)
        {
            double n2 = 0.0;
            for (int i : groups_[j].index)
                n2 += x[i] * x[i];
            q[j] = 0.5 * (n2 - groups_[j].bound);
        }
    }

    void dual_residual(const Eigen::VectorXd &x, const std::vector<double> &lambda, const std::vector<double> &nu,
                       Eigen::VectorXd &r) const
    {
        r.setZero();
        r[nf_] = -1.0;
        for (std::size_t k = 0; k < rows_.size(); ++k)
        {
            const auto &row = rows_[k];
            for (std::size_t e = 0; e < row.index.size(); ++e)
                r[row.index[e]] -= lambda[k] * row.value[e];
            r[nf_] += lambda[k];
        }
        for (std::size_t j = 0; j < groups_.size(); ++j)
            for (int i : groups_[j].index)
                r[i] += nu[j] * x[i];
    }

    double surrogate_gap() const
    {
        double gap = 0.0;
        for (std::size_t k = 0; k < rows_.size(); ++k)
            gap -= lambda_[k] * f_[k];
        for (std::size_t j = 0; j < groups_.size(); ++j)
            gap -= nu_[j] * q_[j];
        return gap;
    }

    // Gradients dotted with a primal direction.
    void directional(const Eigen::VectorXd &dz, std::vector<double> &df, std::vector<double> &dq) const
    {
        for (std::size_t k = 0; k < rows_.size(); ++k)
        {
            const auto &r = rows_[k];
            double v = dz[nf_];
            for (std::size_t e = 0; e < r.index.size(); ++e)
                v -= r.value[e] * dz[r.index[e]];
            df[k] = v;
        }
        for (std::size_t j = 0; j < groups_.size(); ++j)
        {
            double v = 0.0;
            for (int i : groups_[j].index)
                v += x_[i] * dz[i];
            dq[j] = v;
        }
    }

    // Lower triangle of  sum nu_j I_Sj + sum (nu_j / -q_j) x_Sj x_Sj^T + sum (lambda_k / -f_k) grad f_k grad f_k^T.
    void factor()
    {
        hessian_.setZero();
        for (std::size_t k = 0; k < rows_.size(); ++k)
        {
            const double w = lambda_[k] / -f_[k];
            const auto &r = rows_[k];
            const std::size_t nnz = r.index.size();
            for (std::size_t a = 0; a < nnz; ++a)
            {
                const int ia = r.index[a];
                const double wa = w * r.value[a];
                for (std::size_t b = 0; b < nnz; ++b)
                {
                    const int ib = r.index[b];
                    if (ib <= ia)
                        hessian_(ia, ib) += wa * r.value[b];
                }
                hessian_(nf_, ia) -= wa;
            }
            hessian_(nf_, nf_) += w;
        }
        for (std::size_t j = 0; j < groups_.size(); ++j)
        {
            const double w = nu_[j] / -q_[j];
            const auto &idx = groups_[j].index;
            for (std::size_t a = 0; a < idx.size(); ++a)
            {
                const int ia = idx[a];
                hessian_(ia, ia) += nu_[j];
                const double wa = w * x_[ia];
                for (std::size_t b = 0; b < idx.size(); ++b)
                {
                    const int ib = idx[b];
                    if (ib <= ia)
                        hessian_(ia, ib) += wa * x_[ib];
                }
            }
        }
        llt_.compute(hessian_);
        double shift = 1e-14 * std::max(hessian_.diagonal().maxCoeff(), 1e-300);
        while (llt_.info() != Eigen::Success && shift < 1e300)
        {
            Eigen::MatrixXd shifted = hessian_;
            shifted.diagonal().array() += shift;
            llt_.compute(shifted);
            shift *= 100.0;
        }
    }

    double residual_norm(const Eigen::VectorXd &x, double s, const std::vector<double> &lambda,
                         const std::vector<double> &nu, double inv_t, std::vector<double> &f, std::vector<double> &q,
                         Eigen::VectorXd &rdual) const
    {
        evaluate_constraints(x, s, f, q);
        dual_residual(x, lambda, nu, rdual);
        double total = rdual.squaredNorm();
        for (std::size_t k = 0; k < rows_.size(); ++k)
        {
            const double c = -lambda[k] * f[k] - inv_t;
            total += c * c;
        }
        for (std::size_t j = 0; j < groups_.size(); ++j)
        {
            const double c = -nu[j] * q[j] - inv_t;
            total += c * c;
        }
        return std::sqrt(total);
    }

    bool line_search(const Eigen::VectorXd &dz, const std::vector<double> &df, const std::vector<double> &dlambda,
                     const std::vector<double> &dnu, double inv_t)
    {
        double alpha = 1.0;
        for (std::size_t k = 0; k < rows_.size(); ++k)
            if (dlambda[k] < 0.0)
                alpha = std::min(alpha, -lambda_[k] / dlambda[k]);
        for (std::size_t j = 0; j < groups_.size(); ++j)
            if (dnu[j] < 0.0)
                alpha = std::min(alpha, -nu_[j] / dnu[j]);
        // Largest primal step keeping every constraint strictly satisfied.
        for (std::size_t k = 0; k < rows_.size(); ++k)
            if (df[k] > 0.0)
                alpha = std::min(alpha, -f_[k] / df[k]);
        for (std::size_t j = 0; j < groups_.size(); ++j)
        {
            double b = 0.0, a = 0.0;
            for (int i : groups_[j].index)
            {
                b += x_[i] * dz[i];
                a += dz[i] * dz[i];
            }
            // q + b t + a t^2 / 2 = 0, positive root
            const double disc = std::sqrt(b * b - 2.0 * a * q_[j]);
            if (b + disc > 0.0)
                alpha = std::min(alpha, -2.0 * q_[j] / (b + disc));
        }
        alpha = std::min(1.0, 0.99 * alpha);

        std::vector<double> f_try(rows_.size()), q_try(groups_.size());
        std::vector<double> l_try(rows_.size()), n_try(groups_.size());
        Eigen::VectorXd rd(n_);
        const double r0 = residual_norm(x_, s_, lambda_, nu_, inv_t, f_try, q_try, rd);

        const auto dx = dz.head(nf_);
        while (alpha > 1e-14)
        {
            const Eigen::VectorXd x_try = x_ + alpha * dx;
            const double s_try = s_ + alpha * dz[nf_];
            evaluate_constraints(x_try, s_try, f_try, q_try);
            const bool strictly_feasible =
                std::all_of(f_try.begin(), f_try.end(), [](double v) { return v < 0.0; }) &&
                std::all_of(q_try.begin(), q_try.end(), [](double v) { return v < 0.0; });
            if (strictly_feasible)
            {
                for (std::size_t k = 0; k < rows_.size(); ++k)
                    l_try[k] = lambda_[k] + alpha * dlambda[k];
                for (std::size_t j = 0; j < groups_.size(); ++j)
                    n_try[j] = nu_[j] + alpha * dnu[j];
                const double r1 = residual_norm(x_try, s_try, l_try, n_try, inv_t, f_try, q_try, rd);
                if (r1 <= (1.0 - 0.01 * alpha) * r0)
                {
                    x_ = x_try;
                    s_ = s_try;
                    lambda_ = l_try;
                    nu_ = n_try;
                    return true;
                }
            }
            alpha *= 0.5;
        }
        return false;
    }

    std::vector<Row> rows_;
    std::vector<Group> groups_;
    int nf_;
    int n_;
    SolverSettings settings_;
    Eigen::MatrixXd hessian_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd x_;
    double s_ = 0.0;
    std::vector<double> f_, q_, lambda_, nu_;
    double a_scale_ = 0.0;
    double value_scale_ = 1.0;
};

} // namespace

SubproblemSolution solve_subproblem(const SubproblemSpec &spec, std::span<const double> warm_start,
                                    const SolverSettings &settings)
{
    spec.validate();
    const std::size_t n = spec.dimension;
    if (warm_start.size() != n)
        throw ValidationError("warm start has the wrong dimension");

    std::vector<char> pinned(n, 0);
    if (spec.ball_bound && *spec.ball_bound <= 0.0)
        std::fill(pinned.begin(), pinned.end(), 1);
    for (const auto &cap : spec.caps)
        if (cap.bound <= 0.0)
            for (std::size_t i : cap.indices)
                pinned[i] = 1;

    std::vector<int> reduced(n, -1);
    int nf = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (!pinned[i])
            reduced[i] = nf++;

    SubproblemSolution solution;
    solution.x.assign(n, 0.0);

    std::vector<Row> rows;
    rows.reserve(spec.bounds.size());
    for (const auto &b : spec.bounds)
    {
        if (b.is_zero())
        {
            ++solution.dropped_bounds;
            continue;
        }
        Row r;
        r.offset = b.offset;
        for (std::size_t e = 0; e < b.index.size(); ++e)
        {
            const int ri = reduced[b.index[e]];
            if (ri >= 0 && b.value[e] != 0.0)
            {
                r.index.push_back(ri);
                r.value.push_back(b.value[e]);
            }
        }
        rows.push_back(std::move(r));
    }

    auto min_value = [&](std::span<const double> x) {
        double s = std::numeric_limits<double>::infinity();
        for (const auto &b : spec.bounds)
            if (!b.is_zero())
                s = std::min(s, b.evaluate(x));
        return s;
    };

    if (nf == 0)
    {
        solution.status = SolveStatus::infeasible;
        solution.s = rows.empty() ? 0.0 : min_value(solution.x);
        return solution;
    }
    if (rows.empty())
        throw ValidationError("subproblem has no nondegenerate affine bounds");

    std::vector<Group> groups;
    if (spec.ball_bound)
    {
        Group g;
        g.bound = *spec.ball_bound;
        for (std::size_t i = 0; i < n; ++i)
            if (reduced[i] >= 0)
                g.index.push_back(reduced[i]);
        groups.push_back(std::move(g));
    }
    for (const auto &cap : spec.caps)
    {
        if (cap.bound <= 0.0)
            continue;
        Group g;
        g.bound = cap.bound;
        for (std::size_t i : cap.indices)
            if (reduced[i] >= 0)
                g.index.push_back(reduced[i]);
        if (!g.index.empty())
            groups.push_back(std::move(g));
    }
    // Free coordinates outside every group are unbounded; the subproblem would be unbounded
    // along any row touching them.
    {
        std::vector<char> covered(static_cast<std::size_t>(nf), 0);
        for (const auto &g : groups)
            for (int i : g.index)
                covered[static_cast<std::size_t>(i)] = 1;
        if (std::find(covered.begin(), covered.end(), 0) != covered.end())
            throw ValidationError("every free coordinate must belong to the ball or a group cap");
    }

    std::vector<double> x0(static_cast<std::size_t>(nf));
    for (std::size_t i = 0; i < n; ++i)
        if (reduced[i] >= 0)
            x0[static_cast<std::size_t>(reduced[i])] = warm_start[i];

    InteriorPoint ipm(std::move(rows), std::move(groups), nf, settings);
    ipm.start(x0);
    solution.status = ipm.run(solution.iterations, solution.kkt_residual, solution.duality_gap);
    for (std::size_t i = 0; i < n; ++i)
        if (reduced[i] >= 0)
            solution.x[i] = ipm.x()[reduced[i]];
    solution.s = min_value(solution.x);
    return solution;
}

} // namespace mdcmap
