#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "secbeam/conic/program.hpp"
#include "secbeam/conic/solver.hpp"

namespace secbeam::conic {

// Independent re-audit of a reported optimum.  Everything is recomputed from
// the raw program data and the returned primal/dual vectors — no solver
// internals are reused.  All residuals are scale-invariant:
//   - equality rows are normalized by max(1, |rhs|, largest term magnitude),
//   - cone margins by the slice norm (squared norm for the quadratic part of
//     rotated cones),
//   - stationarity rows by max(1, |objective coef|, largest term magnitude),
//   - the duality gap by max(1, |primal|, |dual|).
struct CertifyReport {
    bool pass = false;
    double equality_residual = 0.0;      // max over equality rows
    double primal_cone_violation = 0.0;  // max over cone slices
    double dual_cone_violation = 0.0;    // max over dual blocks
    double stationarity_residual = 0.0;  // max over variables
    double duality_gap = 0.0;            // relative
    std::vector<std::string> failures;   // human-readable breakdown
};

namespace detail {

inline double nonneg_violation(const Eigen::VectorXd& v) {
    if (v.size() == 0) return 0.0;
    const double scale = std::max(1.0, v.lpNorm<Eigen::Infinity>());
    return std::max(0.0, -v.minCoeff()) / scale;
}

inline double soc_violation(const Eigen::VectorXd& v) {
    const double scale = std::max(1.0, v.norm());
    return std::max(0.0, v.tail(v.size() - 1).norm() - v(0)) / scale;
}

inline double rsoc_violation(const Eigen::VectorXd& v) {
    const double a = v(0);
    const double b = v(1);
    const double wsq = v.size() > 2 ? v.tail(v.size() - 2).squaredNorm() : 0.0;
    const double scale = std::max(1.0, v.norm());
    const double lin = std::max(0.0, std::max(-a, -b)) / scale;
    const double quad = std::max(0.0, wsq - a * b) / (scale * scale);
    return std::max(lin, quad);
}

} // namespace detail

inline CertifyReport certify(const ConicProgram& p, const SolveResult& res, double tol) {
    CertifyReport rep;
    const std::size_t n = p.variable_count();
    const std::size_t m = p.equality_count();

    if (res.status != SolveStatus::Optimal) {
        rep.failures.push_back("result status is not optimal");
        return rep;
    }
    if (static_cast<std::size_t>(res.z.size()) != n ||
        static_cast<std::size_t>(res.eq_dual.size()) != m) {
        rep.failures.push_back("primal/dual vector sizes do not match the program");
        return rep;
    }

    const Eigen::VectorXd& x = res.z;
    const Eigen::VectorXd& y = res.eq_dual;

    // Equality feasibility, row by row.
    {
        std::vector<double> acc(m, 0.0), mag(m, 0.0);
        for (const EqualityTerm& t : p.terms) {
            const double term = t.coef * x(static_cast<long>(t.var));
            acc[t.row] += term;
            mag[t.row] = std::max(mag[t.row], std::fabs(term));
        }
        for (std::size_t i = 0; i < m; ++i) {
            const double scale = std::max({1.0, std::fabs(p.rhs[i]), mag[i]});
            const double r = std::fabs(acc[i] - p.rhs[i]) / scale;
            if (r > rep.equality_residual) rep.equality_residual = r;
            if (r > tol) {
                rep.failures.push_back("equality row " + std::to_string(i) +
                                       " violated by " + std::to_string(r));
            }
        }
    }

    // Primal cone membership per slice.
    for (std::size_t ci = 0; ci < p.cones.size(); ++ci) {
        const ConeSlice& s = p.cones[ci];
        const Eigen::VectorXd v =
            x.segment(static_cast<long>(s.start), static_cast<long>(s.dim));
        double viol = 0.0;
        switch (s.type) {
        case ConeType::NonNegative: viol = detail::nonneg_violation(v); break;
        case ConeType::SecondOrder: viol = detail::soc_violation(v); break;
        case ConeType::RotatedSecondOrder: viol = detail::rsoc_violation(v); break;
        }
        if (viol > rep.primal_cone_violation) rep.primal_cone_violation = viol;
        if (viol > tol) {
            rep.failures.push_back("primal cone " + std::to_string(ci) + " (" +
                                   cone_type_name(s.type) + ") violated by " +
                                   std::to_string(viol));
        }
    }

    // Dual block layout: one coordinate per nonnegative entry (slices in
    // program order), then one second-order block per remaining slice.
    // Rotated slices were solved in rotated coordinates, so their dual block
    // lives in a plain second-order cone.
    std::size_t n_lc = 0;
    for (const ConeSlice& s : p.cones) {
        if (s.type == ConeType::NonNegative) n_lc += s.dim;
    }
    std::size_t n_rows = n_lc;
    for (const ConeSlice& s : p.cones) {
        if (s.type != ConeType::NonNegative) n_rows += s.dim;
    }
    if (static_cast<std::size_t>(res.cone_dual.size()) != n_rows) {
        rep.failures.push_back("cone dual size does not match the cone layout");
        return rep;
    }
    const Eigen::VectorXd& zd = res.cone_dual;
    {
        if (n_lc > 0) {
            const double viol = detail::nonneg_violation(zd.head(static_cast<long>(n_lc)));
            rep.dual_cone_violation = viol;
            if (viol > tol) {
                rep.failures.push_back("dual nonnegative block violated by " +
                                       std::to_string(viol));
            }
        }
        std::size_t off = n_lc;
        for (std::size_t ci = 0; ci < p.cones.size(); ++ci) {
            const ConeSlice& s = p.cones[ci];
            if (s.type == ConeType::NonNegative) continue;
            const double viol = detail::soc_violation(
                zd.segment(static_cast<long>(off), static_cast<long>(s.dim)));
            if (viol > rep.dual_cone_violation) rep.dual_cone_violation = viol;
            if (viol > tol) {
                rep.failures.push_back("dual block of cone " + std::to_string(ci) +
                                       " violated by " + std::to_string(viol));
            }
            off += s.dim;
        }
    }

    // Dual stationarity: A' y - E' z = objective, where E maps variables to
    // cone-block coordinates (a rotation for rotated slices).
    {
        std::vector<double> acc(n, 0.0), mag(n, 0.0);
        auto put = [&](std::size_t var, double term) {
            acc[var] += term;
            mag[var] = std::max(mag[var], std::fabs(term));
        };
        for (const EqualityTerm& t : p.terms) {
            put(t.var, t.coef * y(static_cast<long>(t.row)));
        }
        std::size_t lp_off = 0;
        std::size_t soc_off = n_lc;
        const double rs2 = 1.0 / std::sqrt(2.0);
        for (const ConeSlice& s : p.cones) {
            if (s.type == ConeType::NonNegative) {
                for (std::size_t i = 0; i < s.dim; ++i) {
                    put(s.start + i, -zd(static_cast<long>(lp_off++)));
                }
            }
        }
        for (const ConeSlice& s : p.cones) {
            if (s.type == ConeType::NonNegative) continue;
            if (s.type == ConeType::SecondOrder) {
                for (std::size_t i = 0; i < s.dim; ++i) {
                    put(s.start + i, -zd(static_cast<long>(soc_off + i)));
                }
            } else {
                const double z0 = zd(static_cast<long>(soc_off));
                const double z1 = zd(static_cast<long>(soc_off + 1));
                put(s.start, -rs2 * (z0 + z1));
                put(s.start + 1, -rs2 * (z0 - z1));
                for (std::size_t i = 2; i < s.dim; ++i) {
                    put(s.start + i, -std::sqrt(2.0) * zd(static_cast<long>(soc_off + i)));
                }
            }
            soc_off += s.dim;
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double scale = std::max({1.0, std::fabs(p.objective[j]), mag[j]});
            const double r = std::fabs(acc[j] - p.objective[j]) / scale;
            if (r > rep.stationarity_residual) rep.stationarity_residual = r;
            if (r > tol) {
                rep.failures.push_back("stationarity violated at variable " +
                                       std::to_string(j) + " (" + p.names[j] + ") by " +
                                       std::to_string(r));
            }
        }
    }

    // Duality gap: maximize objective' z has dual value rhs' y.
    {
        const double pval = objective_value(p, x);
        double dval = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            dval += p.rhs[i] * y(static_cast<long>(i));
        }
        rep.duality_gap =
            std::fabs(pval - dval) / std::max({1.0, std::fabs(pval), std::fabs(dval)});
        if (rep.duality_gap > tol) {
            rep.failures.push_back("duality gap " + std::to_string(rep.duality_gap));
        }
    }

    rep.pass = rep.failures.empty();
    return rep;
}

} // namespace secbeam::conic
