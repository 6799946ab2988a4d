#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "secbeam/conic/program.hpp"

namespace secbeam::conic {

enum class SolveStatus {
    Optimal,        // residuals certified below tolerance
    Infeasible,     // primal infeasibility certificate found
    Unbounded,      // objective unbounded above (dual infeasibility certificate)
    NumericFailure, // no certificate within the iteration/step limits
};

inline const char* solve_status_name(SolveStatus s) {
    switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericFailure: return "numeric-failure";
    }
    return "unknown";
}

struct SolverSettings {
    double feastol = 1e-8;         // primal/dual residual tolerance
    double abstol = 1e-8;          // absolute complementarity gap tolerance
    double reltol = 1e-8;          // relative complementarity gap tolerance
    double feastol_reduced = 1e-4; // fallback tolerances when progress stalls
    double abstol_reduced = 5e-5;
    double reltol_reduced = 5e-5;
    std::size_t max_iterations = 200;
    double gamma = 0.99;           // step-length damping
    double deltastat = 7e-8;       // static KKT regularization
    std::size_t refine_steps = 9;  // max iterative-refinement steps per solve
    double refine_stop_ratio = 6.; // stop refining once error shrinks slower
    double linsys_accuracy = 1e-14;
    double step_min = 1e-6;
    double step_max = 0.999;
    double sigma_min = 1e-4;       // always center a little
    double sigma_max = 1.0;
    std::size_t equil_iters = 3;   // Ruiz-style scaling passes
    double safeguard = 500.;       // primal-residual blowup factor that
                                   // triggers rollback to the best iterate
};

// Primal/dual answer in canonical variable order.  The cone dual and slack
// vectors follow the solver's block layout: one coordinate per nonnegative
// slice entry (slices in program order), then one block per second-order or
// rotated slice (in program order).  Rotated slices appear in rotated
// coordinates [(a+b)/sqrt2, (a-b)/sqrt2, sqrt2*w], which live in a plain
// second-order cone.
struct SolveResult {
    SolveStatus status = SolveStatus::NumericFailure;
    Eigen::VectorXd z;           // primal values (canonical order)
    double objective = 0.0;      // objective' z (maximization)
    double primal_residual = std::numeric_limits<double>::infinity();
    double dual_residual = std::numeric_limits<double>::infinity();
    double gap = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
    Eigen::VectorXd eq_dual;     // multipliers of the equality rows
    Eigen::VectorXd cone_dual;   // cone multipliers (block layout above)
    Eigen::VectorXd cone_slack;  // cone slacks (same layout)
};

namespace detail {

// ---------------------------------------------------------------------------
// Conversion of the canonical program into homogeneous-embedding solver form:
//
//     minimize    c' x
//     subject to  A x = b
//                 G x + s = h,  s in (R+)^n_lc x SOC(dim_1) x ... x SOC(dim_m)
//
// with h = 0 and G stacking -I rows for nonnegative/second-order slices and
// the negative rotation rows for rotated slices.  Maximization flips c.
// ---------------------------------------------------------------------------
struct SolverForm {
    Eigen::SparseMatrix<double> G;
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd c;
    Eigen::VectorXd h;
    Eigen::VectorXd b;
    std::size_t n_lc = 0;              // leading nonnegative rows of G
    std::vector<std::size_t> soc_dims; // second-order block sizes after that
};

inline SolverForm to_solver_form(const ConicProgram& p) {
    const std::size_t n = p.variable_count();
    SolverForm f;
    f.c = -objective_vector(p);
    f.b = rhs_vector(p);
    f.A = equality_matrix(p);

    std::size_t rows = 0;
    for (const ConeSlice& s : p.cones) {
        rows += s.dim;
        if (s.type != ConeType::NonNegative) f.soc_dims.push_back(s.dim);
    }

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(rows + p.cones.size());
    std::size_t r = 0;
    for (const ConeSlice& s : p.cones) { // nonnegative slices first
        if (s.type != ConeType::NonNegative) continue;
        for (std::size_t i = 0; i < s.dim; ++i) {
            trips.emplace_back(static_cast<int>(r++), static_cast<int>(s.start + i), -1.0);
        }
    }
    f.n_lc = r;
    const double rs2 = 1.0 / std::sqrt(2.0);
    for (const ConeSlice& s : p.cones) {
        if (s.type == ConeType::NonNegative) continue;
        if (s.type == ConeType::SecondOrder) {
            for (std::size_t i = 0; i < s.dim; ++i) {
                trips.emplace_back(static_cast<int>(r++), static_cast<int>(s.start + i), -1.0);
            }
        } else { // rotated: s = [(a+b)/sqrt2, (a-b)/sqrt2, sqrt2*w]
            trips.emplace_back(static_cast<int>(r), static_cast<int>(s.start), -rs2);
            trips.emplace_back(static_cast<int>(r), static_cast<int>(s.start + 1), -rs2);
            ++r;
            trips.emplace_back(static_cast<int>(r), static_cast<int>(s.start), -rs2);
            trips.emplace_back(static_cast<int>(r), static_cast<int>(s.start + 1), rs2);
            ++r;
            for (std::size_t i = 2; i < s.dim; ++i) {
                trips.emplace_back(static_cast<int>(r++), static_cast<int>(s.start + i),
                                   -std::sqrt(2.0));
            }
        }
    }
    f.G.resize(static_cast<int>(rows), static_cast<int>(n));
    f.G.setFromTriplets(trips.begin(), trips.end());
    f.h = Eigen::VectorXd::Zero(static_cast<int>(rows));
    return f;
}

// ---------------------------------------------------------------------------
// Homogeneous self-dual embedding interior-point method with Nesterov-Todd
// scaling, Mehrotra predictor-corrector steps, sparse quasi-definite KKT
// factorization (static regularization + iterative refinement), and a
// best-iterate safeguard.
// ---------------------------------------------------------------------------
enum class ExitCode {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIterations,
    Numerics,
    Fatal,
    CloseToOptimal,
    CloseToPrimalInfeasible,
    CloseToDualInfeasible,
    NotConvergedYet,
};

struct IterInfo {
    double pcost = 0., dcost = 0., pres = 0., dres = 0., gap = 0.;
    double kapovert = 0., mu = 0., step = 0., step_aff = 0., sigma = 0.;
    std::optional<double> relgap, pinfres, dinfres;
    std::size_t iter = 0;

    // Preference order used by the safeguard when deciding whether the
    // current iterate supersedes the best one seen so far.
    bool better_than(const IterInfo& other) const {
        if (pinfres.has_value() && kapovert > 1.) {
            if (other.pinfres.has_value()) {
                return gap > 0. && other.gap > 0. && gap < other.gap &&
                       *pinfres > 0. && *pinfres < other.pres &&
                       mu > 0. && mu < other.mu;
            }
            return gap > 0. && other.gap > 0. && gap < other.gap &&
                   mu > 0. && mu < other.mu;
        }
        return gap > 0. && other.gap > 0. && gap < other.gap &&
               pres > 0. && pres < other.pres &&
               dres > 0. && dres < other.dres &&
               kapovert > 0. && kapovert < other.kapovert &&
               mu > 0. && mu < other.mu;
    }
};

struct Work {
    Eigen::VectorXd x, y, z, s, lambda;
    double kap = 0., tau = 0.;
    double cx = 0., by = 0., hz = 0.;
    IterInfo i;

    void allocate(std::size_t n_var, std::size_t n_eq, std::size_t n_ineq) {
        x.resize(static_cast<long>(n_var));
        y.resize(static_cast<long>(n_eq));
        z.resize(static_cast<long>(n_ineq));
        s.resize(static_cast<long>(n_ineq));
        lambda.resize(static_cast<long>(n_ineq));
    }
};

struct LpCone {
    Eigen::VectorXd v; // squared scaling (s ./ z)
    Eigen::VectorXd w; // scaling (sqrt of v)
};

struct SoCone {
    std::size_t dim = 0;
    Eigen::VectorXd skbar, zkbar, q;
    double a = 0., d1 = 0., w = 0., eta = 0., eta_square = 0.;
    double u0 = 0., u1 = 0., v1 = 0.;
};

class HsdeSolver {
public:
    HsdeSolver(const SolverForm& f, const SolverSettings& settings)
        : settings_(settings), G_(f.G), A_(f.A), c_(f.c), h_(f.h), b_(f.b) {
        n_var_ = static_cast<std::size_t>(std::max(A_.cols(), G_.cols()));
        n_eq_ = static_cast<std::size_t>(A_.rows());
        n_ineq_ = static_cast<std::size_t>(G_.rows());
        std::size_t soc_total = 0;
        for (std::size_t d : f.soc_dims) soc_total += d;
        n_lc_ = n_ineq_ - soc_total;
        n_sc_ = f.soc_dims.size();
        dim_K_ = n_var_ + n_eq_ + n_ineq_ + 2 * n_sc_;

        so_cones_.resize(n_sc_);
        for (std::size_t i = 0; i < n_sc_; ++i) {
            so_cones_[i].dim = f.soc_dims[i];
            so_cones_[i].q.resize(static_cast<long>(f.soc_dims[i] - 1));
            so_cones_[i].skbar.resize(static_cast<long>(f.soc_dims[i]));
            so_cones_[i].zkbar.resize(static_cast<long>(f.soc_dims[i]));
        }
        lp_cone_.v.resize(static_cast<long>(n_lc_));
        lp_cone_.w.resize(static_cast<long>(n_lc_));

        w_.allocate(n_var_, n_eq_, n_ineq_);
        W_times_dzaff_.resize(static_cast<long>(n_ineq_));
        dsaff_by_W_.resize(static_cast<long>(n_ineq_));
        dsaff_.resize(static_cast<long>(n_ineq_));
        rx_.resize(static_cast<long>(n_var_));
        ry_.resize(static_cast<long>(n_eq_));
        rz_.resize(static_cast<long>(n_ineq_));
        rhs1_.resize(static_cast<long>(dim_K_));
        rhs2_.resize(static_cast<long>(dim_K_));

        setEquilibration();
        Gt_ = G_.transpose();
        At_ = A_.transpose();
        setupKKT();
    }

    ExitCode solve() {
        ExitCode code = ExitCode::Fatal;

        resetKKTScalings();

        // First right-hand side [0; b; h] (h segments padded by the two
        // expansion slots per second-order cone).
        rhs1_.setZero();
        rhs1_.segment(static_cast<long>(n_var_), static_cast<long>(n_eq_)) = b_;
        rhs1_.segment(static_cast<long>(n_var_ + n_eq_), static_cast<long>(n_lc_)) =
            h_.head(static_cast<long>(n_lc_));
        {
            std::size_t h_index = n_lc_;
            std::size_t rhs1_index = n_var_ + n_eq_ + n_lc_;
            for (const SoCone& sc : so_cones_) {
                rhs1_.segment(static_cast<long>(rhs1_index), static_cast<long>(sc.dim)) =
                    h_.segment(static_cast<long>(h_index), static_cast<long>(sc.dim));
                h_index += sc.dim;
                rhs1_index += sc.dim + 2;
            }
        }

        // Second right-hand side [-c; 0; 0].
        rhs2_.setZero();
        rhs2_.head(static_cast<long>(n_var_)) = -c_;

        resx0_ = std::max(1., c_.norm());
        resy0_ = std::max(1., b_.norm());
        resz0_ = std::max(1., h_.norm());

        ldlt_.analyzePattern(K_);
        ldlt_.factorize(K_);
        if (ldlt_.info() != Eigen::Success) {
            return ExitCode::Fatal;
        }

        // Initialization: x from the primal least-squares system, s from the
        // slack residual pushed into the cone, y/z from the dual system.
        Eigen::VectorXd dx1(static_cast<long>(n_var_));
        Eigen::VectorXd dy1(static_cast<long>(n_eq_));
        Eigen::VectorXd dz1(static_cast<long>(n_ineq_));
        solveKKT(rhs1_, dx1, dy1, dz1, true);
        w_.x = dx1;
        bringToCone(-dz1, w_.s);

        Eigen::VectorXd dx2(static_cast<long>(n_var_));
        Eigen::VectorXd dy2(static_cast<long>(n_eq_));
        Eigen::VectorXd dz2(static_cast<long>(n_ineq_));
        solveKKT(rhs2_, dx2, dy2, dz2, true);
        w_.y = dy2;
        bringToCone(dz2, w_.z);

        // From here on rhs1 is [-c; b; h].
        rhs1_.head(static_cast<long>(n_var_)) = -c_;

        w_.kap = 1.;
        w_.tau = 1.;
        w_.i.step = 0.;
        w_.i.step_aff = 0.;

        double pres_prev = std::numeric_limits<double>::max();

        for (w_.i.iter = 0; w_.i.iter <= settings_.max_iterations; ++w_.i.iter) {
            computeResiduals();
            updateStatistics();

            // Roll back to the best iterate when the step blew up the primal
            // residual or produced a negative gap, then settle for reduced
            // accuracy if available.
            if (w_.i.iter > 0 &&
                (w_.i.pres > settings_.safeguard * pres_prev || w_.i.gap < 0.)) {
                w_ = w_best_;
                code = checkExitConditions(true);
                if (code == ExitCode::NotConvergedYet) code = ExitCode::Numerics;
                break;
            }
            pres_prev = w_.i.pres;

            code = checkExitConditions(false);
            if (code != ExitCode::NotConvergedYet) {
                break;
            }

            // Stalled line search: no further progress possible.
            if (w_.i.iter > 0 && w_.i.step == settings_.step_min * settings_.gamma) {
                w_ = w_best_;
                code = checkExitConditions(true);
                if (code == ExitCode::NotConvergedYet) code = ExitCode::Numerics;
                break;
            }
            if (w_.i.iter == settings_.max_iterations) {
                if (w_.i.iter > 0 && !w_.i.better_than(w_best_.i)) {
                    w_ = w_best_;
                }
                code = checkExitConditions(true);
                if (code == ExitCode::NotConvergedYet) code = ExitCode::MaxIterations;
                break;
            }
            if (std::isnan(w_.i.pcost)) {
                if (!(w_.i.iter == 0 || w_.i.better_than(w_best_.i))) {
                    w_ = w_best_;
                    code = checkExitConditions(true);
                    if (code == ExitCode::NotConvergedYet) code = ExitCode::Numerics;
                } else {
                    code = ExitCode::Numerics;
                }
                break;
            }

            if (w_.i.iter == 0 || w_.i.better_than(w_best_.i)) {
                w_best_ = w_;
            }

            if (!updateScalings(w_.s, w_.z, w_.lambda)) {
                // A slack or multiplier left the cone: numerical dead end.
                if (w_.i.iter > 0) {
                    w_ = w_best_;
                }
                code = checkExitConditions(true);
                if (code == ExitCode::NotConvergedYet) code = ExitCode::Numerics;
                break;
            }
            updateKKTScalings();
            ldlt_.factorize(K_);
            if (ldlt_.info() != Eigen::Success) {
                return ExitCode::Fatal;
            }

            solveKKT(rhs1_, dx1, dy1, dz1, false);

            // Affine (predictor) direction.
            RHSaffine();
            solveKKT(rhs2_, dx2, dy2, dz2, false);

            const double dtau_denom =
                w_.kap / w_.tau - c_.dot(dx1) - b_.dot(dy1) - h_.dot(dz1);
            const double dtauaff =
                (rt_ - w_.kap + c_.dot(dx2) + b_.dot(dy2) + h_.dot(dz2)) / dtau_denom;

            dz2 += dtauaff * dz1;
            scale(dz2, W_times_dzaff_);
            dsaff_by_W_ = -W_times_dzaff_ - w_.lambda;
            const double dkapaff = -w_.kap - w_.kap / w_.tau * dtauaff;

            w_.i.step_aff = lineSearch(w_.lambda, dsaff_by_W_, W_times_dzaff_, w_.tau,
                                       dtauaff, w_.kap, dkapaff);

            const double sigma = std::clamp(std::pow(1. - w_.i.step_aff, 3),
                                            settings_.sigma_min, settings_.sigma_max);
            w_.i.sigma = sigma;

            // Combined (corrector) direction.
            RHScombined();
            solveKKT(rhs2_, dx2, dy2, dz2, false);

            const double bkap = w_.kap * w_.tau + dkapaff * dtauaff - sigma * w_.i.mu;
            const double dtau = ((1. - sigma) * rt_ - bkap / w_.tau + c_.dot(dx2) +
                                 b_.dot(dy2) + h_.dot(dz2)) /
                                dtau_denom;

            dx2 += dtau * dx1;
            dy2 += dtau * dy1;
            dz2 += dtau * dz1;

            // dsaff_by_W currently holds lambda \ ds; fold in W*dz.
            scale(dz2, W_times_dzaff_);
            dsaff_by_W_ = -(dsaff_by_W_ + W_times_dzaff_);
            const double dkap = -(bkap + w_.kap * dtau) / w_.tau;

            w_.i.step = settings_.gamma * lineSearch(w_.lambda, dsaff_by_W_,
                                                     W_times_dzaff_, w_.tau, dtau,
                                                     w_.kap, dkap);

            scale(dsaff_by_W_, dsaff_);

            w_.x += w_.i.step * dx2;
            w_.y += w_.i.step * dy2;
            w_.z += w_.i.step * dz2;
            w_.s += w_.i.step * dsaff_;
            w_.kap += w_.i.step * dkap;
            w_.tau += w_.i.step * dtau;
        }

        backscale();
        return code;
    }

    const Work& work() const { return w_; }

private:
    static void maxRows(Eigen::VectorXd& e, const Eigen::SparseMatrix<double>& m) {
        for (int j = 0; j < m.outerSize(); ++j) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(m, j); it; ++it) {
                e(it.row()) = std::max(std::fabs(it.value()), e(it.row()));
            }
        }
    }

    static void maxCols(Eigen::VectorXd& e, const Eigen::SparseMatrix<double>& m) {
        for (int j = 0; j < m.outerSize(); ++j) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(m, j); it; ++it) {
                e(j) = std::max(std::fabs(it.value()), e(j));
            }
        }
    }

    static void equilibrateRows(const Eigen::VectorXd& e, Eigen::SparseMatrix<double>& m) {
        for (int j = 0; j < m.outerSize(); ++j) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(m, j); it; ++it) {
                it.valueRef() /= e(it.row());
            }
        }
    }

    static void equilibrateCols(const Eigen::VectorXd& e, Eigen::SparseMatrix<double>& m) {
        for (int j = 0; j < m.outerSize(); ++j) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(m, j); it; ++it) {
                it.valueRef() /= e(j);
            }
        }
    }

    // Iterative max-norm scaling of rows and columns; rows of one
    // second-order block share a common factor so the cone geometry survives.
    void setEquilibration() {
        x_equil_.setOnes(static_cast<long>(n_var_));
        A_equil_.setOnes(static_cast<long>(n_eq_));
        G_equil_.setOnes(static_cast<long>(n_ineq_));

        Eigen::VectorXd x_tmp(static_cast<long>(n_var_));
        Eigen::VectorXd A_tmp(static_cast<long>(n_eq_));
        Eigen::VectorXd G_tmp(static_cast<long>(n_ineq_));

        for (std::size_t iter = 0; iter < settings_.equil_iters; ++iter) {
            x_tmp.setZero();
            A_tmp.setZero();
            G_tmp.setZero();

            maxCols(x_tmp, A_);
            maxCols(x_tmp, G_);
            maxRows(A_tmp, A_);
            maxRows(G_tmp, G_);

            std::size_t ind = n_lc_;
            for (const SoCone& sc : so_cones_) {
                const double total =
                    G_tmp.segment(static_cast<long>(ind), static_cast<long>(sc.dim)).sum();
                G_tmp.segment(static_cast<long>(ind), static_cast<long>(sc.dim))
                    .setConstant(total);
                ind += sc.dim;
            }

            auto sqrt_op = [](double a) { return std::fabs(a) < 1e-6 ? 1. : std::sqrt(a); };
            x_tmp = x_tmp.unaryExpr(sqrt_op);
            A_tmp = A_tmp.unaryExpr(sqrt_op);
            G_tmp = G_tmp.unaryExpr(sqrt_op);

            equilibrateRows(A_tmp, A_);
            equilibrateRows(G_tmp, G_);
            equilibrateCols(x_tmp, A_);
            equilibrateCols(x_tmp, G_);

            x_equil_ = x_equil_.cwiseProduct(x_tmp);
            A_equil_ = A_equil_.cwiseProduct(A_tmp);
            G_equil_ = G_equil_.cwiseProduct(G_tmp);
        }

        c_ = c_.cwiseQuotient(x_equil_);
        b_ = b_.cwiseQuotient(A_equil_);
        h_ = h_.cwiseQuotient(G_equil_);
    }

    void backscale() {
        w_.x = w_.x.cwiseQuotient(x_equil_ * w_.tau);
        w_.y = w_.y.cwiseQuotient(A_equil_ * w_.tau);
        w_.z = w_.z.cwiseQuotient(G_equil_ * w_.tau);
        w_.s = w_.s.cwiseProduct(G_equil_ / w_.tau);
    }

    // Nesterov-Todd scaling point for each cone; false when an iterate has
    // left its cone and the scaling no longer exists.
    bool updateScalings(const Eigen::VectorXd& s, const Eigen::VectorXd& z,
                        Eigen::VectorXd& lambda) {
        lp_cone_.v = s.head(static_cast<long>(n_lc_))
                         .cwiseQuotient(z.head(static_cast<long>(n_lc_)));
        lp_cone_.w = lp_cone_.v.cwiseSqrt();

        std::size_t cone_start = n_lc_;
        for (SoCone& sc : so_cones_) {
            const long cs = static_cast<long>(cone_start);
            const long d1len = static_cast<long>(sc.dim - 1);
            const double sres =
                s(cs) * s(cs) - s.segment(cs + 1, d1len).squaredNorm();
            const double zres =
                z(cs) * z(cs) - z.segment(cs + 1, d1len).squaredNorm();
            if (sres <= 0. || zres <= 0.) {
                return false;
            }
            const double snorm = std::sqrt(sres);
            const double znorm = std::sqrt(zres);
            sc.skbar = s.segment(cs, static_cast<long>(sc.dim)) / snorm;
            sc.zkbar = z.segment(cs, static_cast<long>(sc.dim)) / znorm;
            sc.eta_square = snorm / znorm;
            sc.eta = std::sqrt(sc.eta_square);

            double gamma = 1. + sc.skbar.dot(sc.zkbar);
            gamma = std::sqrt(0.5 * gamma);
            const double a = (0.5 / gamma) * (sc.skbar(0) + sc.zkbar(0));
            sc.q = (0.5 / gamma) * (sc.skbar.tail(d1len) - sc.zkbar.tail(d1len));
            const double w = sc.q.squaredNorm();

            const double c = (1. + a) + w / (1. + a);
            const double d = 1. + 2. / (1. + a) + w / std::pow(1. + a, 2);
            const double d1 =
                std::max(0., 0.5 * (a * a + w * (1. - c * c / (1. + w * d))));
            const double u0_square = a * a + w - d1;
            const double c2byu02 = (c * c) / u0_square;
            if (c2byu02 - d <= 0.) {
                return false;
            }
            sc.d1 = d1;
            sc.u0 = std::sqrt(u0_square);
            sc.u1 = std::sqrt(c2byu02);
            sc.v1 = std::sqrt(c2byu02 - d);
            sc.a = a;
            sc.w = w;
            cone_start += sc.dim;
        }
        scale(z, lambda);
        return true;
    }

    // lambda = W z without forming W.
    void scale(const Eigen::VectorXd& z, Eigen::VectorXd& lambda) const {
        lambda.head(static_cast<long>(n_lc_)) =
            lp_cone_.w.cwiseProduct(z.head(static_cast<long>(n_lc_)));

        std::size_t cone_start = n_lc_;
        for (const SoCone& sc : so_cones_) {
            const long cs = static_cast<long>(cone_start);
            const long d1len = static_cast<long>(sc.dim - 1);
            const double zeta = sc.q.dot(z.segment(cs + 1, d1len));
            const double factor = z(cs) + zeta / (1. + sc.a);
            lambda(cs) = sc.eta * (sc.a * z(cs) + zeta);
            lambda.segment(cs + 1, d1len) =
                sc.eta * (z.segment(cs + 1, d1len) + factor * sc.q);
            cone_start += sc.dim;
        }
    }

    // y += W^2 x in the expanded sparse representation of the scaling.
    void scale2add(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
        y.head(static_cast<long>(n_lc_)) +=
            lp_cone_.v.cwiseProduct(x.head(static_cast<long>(n_lc_)));

        std::size_t cone_start = n_lc_;
        for (const SoCone& sc : so_cones_) {
            const long i1 = static_cast<long>(cone_start);
            const long i2 = i1 + 1;
            const long i3 = i2 + static_cast<long>(sc.dim) - 1;
            const long i4 = i3 + 1;
            const long d1len = static_cast<long>(sc.dim - 1);

            y(i1) += sc.eta_square * (sc.d1 * x(i1) + sc.u0 * x(i4));
            const double v1x3_plus_u1x4 = sc.v1 * x(i3) + sc.u1 * x(i4);
            y.segment(i2, d1len) +=
                sc.eta_square * (x.segment(i2, d1len) + v1x3_plus_u1x4 * sc.q);
            const double qtx2 = sc.q.dot(x.segment(i2, d1len));
            y(i3) += sc.eta_square * (sc.v1 * qtx2 + x(i3));
            y(i4) = sc.eta_square * (sc.u0 * x(i1) + sc.u1 * qtx2 - x(i4));

            cone_start += sc.dim + 2;
        }
    }

    void computeResiduals() {
        rx_ = -Gt_ * w_.z;
        if (n_eq_ > 0) rx_ -= At_ * w_.y;
        hresx_ = rx_.norm();
        rx_ -= w_.tau * c_;

        if (n_eq_ > 0) {
            ry_ = A_ * w_.x;
            hresy_ = ry_.norm();
            ry_ -= w_.tau * b_;
        } else {
            hresy_ = 0.;
        }

        rz_ = w_.s + G_ * w_.x;
        hresz_ = rz_.norm();
        rz_ -= w_.tau * h_;

        w_.cx = c_.dot(w_.x);
        w_.by = n_eq_ > 0 ? b_.dot(w_.y) : 0.;
        w_.hz = h_.dot(w_.z);
        rt_ = w_.kap + w_.cx + w_.by + w_.hz;

        nx_ = w_.x.norm();
        ny_ = w_.y.norm();
        nz_ = w_.z.norm();
        ns_ = w_.s.norm();
    }

    void updateStatistics() {
        w_.i.gap = w_.s.dot(w_.z);
        w_.i.mu = (w_.i.gap + w_.kap * w_.tau) / static_cast<double>(n_lc_ + n_sc_ + 1);
        w_.i.kapovert = w_.kap / w_.tau;
        w_.i.pcost = w_.cx / w_.tau;
        w_.i.dcost = -(w_.hz + w_.by) / w_.tau;

        if (w_.i.pcost < 0.) {
            w_.i.relgap = w_.i.gap / (-w_.i.pcost);
        } else if (w_.i.dcost > 0.) {
            w_.i.relgap = w_.i.gap / w_.i.dcost;
        } else {
            w_.i.relgap = std::nullopt;
        }

        const double nry = n_eq_ > 0 ? ry_.norm() / std::max(resy0_ + nx_, 1.) : 0.;
        const double nrz = rz_.norm() / std::max(resz0_ + nx_ + ns_, 1.);
        w_.i.pres = std::max(nry, nrz) / w_.tau;
        w_.i.dres = rx_.norm() / std::max(resx0_ + ny_ + nz_, 1.) / w_.tau;

        if ((w_.hz + w_.by) / std::max(ny_ + nz_, 1.) < -settings_.reltol) {
            w_.i.pinfres = hresx_ / std::max(ny_ + nz_, 1.);
        }
        if (w_.cx / std::max(nx_, 1.) < -settings_.reltol) {
            w_.i.dinfres =
                std::max(hresy_ / std::max(nx_, 1.), hresz_ / std::max(nx_ + ns_, 1.));
        }
    }

    ExitCode checkExitConditions(bool reduced_accuracy) {
        const double feastol =
            reduced_accuracy ? settings_.feastol_reduced : settings_.feastol;
        const double abstol =
            reduced_accuracy ? settings_.abstol_reduced : settings_.abstol;
        const double reltol =
            reduced_accuracy ? settings_.reltol_reduced : settings_.reltol;

        if ((-w_.cx > 0. || -w_.by - w_.hz >= -abstol) &&
            (w_.i.pres < feastol && w_.i.dres < feastol) &&
            (w_.i.gap < abstol ||
             (w_.i.relgap.has_value() && *w_.i.relgap < reltol))) {
            return reduced_accuracy ? ExitCode::CloseToOptimal : ExitCode::Optimal;
        }
        if (w_.i.dinfres.has_value() && *w_.i.dinfres < feastol && w_.tau < w_.kap) {
            return reduced_accuracy ? ExitCode::CloseToDualInfeasible
                                    : ExitCode::DualInfeasible;
        }
        if (w_.i.pinfres.has_value() && *w_.i.pinfres < feastol &&
            (w_.tau < w_.kap || (w_.tau < feastol && w_.kap < feastol))) {
            return reduced_accuracy ? ExitCode::CloseToPrimalInfeasible
                                    : ExitCode::PrimalInfeasible;
        }
        return ExitCode::NotConvergedYet;
    }

    // Shift a vector to lie strictly inside the cone.
    void bringToCone(const Eigen::VectorXd& r, Eigen::VectorXd& s) const {
        double alpha = -settings_.gamma;

        for (std::size_t i = 0; i < n_lc_; ++i) {
            if (r(static_cast<long>(i)) <= 0. && -r(static_cast<long>(i)) > alpha) {
                alpha = -r(static_cast<long>(i));
            }
        }
        std::size_t cone_start = n_lc_;
        for (const SoCone& sc : so_cones_) {
            const long cs = static_cast<long>(cone_start);
            const double cres =
                r(cs) - r.segment(cs + 1, static_cast<long>(sc.dim - 1)).norm();
            cone_start += sc.dim;
            if (cres <= 0. && -cres > alpha) {
                alpha = -cres;
            }
        }

        alpha += 1.;
        s = r;
        s.head(static_cast<long>(n_lc_)).array() += alpha;
        cone_start = n_lc_;
        for (const SoCone& sc : so_cones_) {
            s(static_cast<long>(cone_start)) += alpha;
            cone_start += sc.dim;
        }
    }

    // v = u \ w in the cone algebra.
    void conicDivision(const Eigen::VectorXd& u, const Eigen::VectorXd& w,
                       Eigen::VectorXd& v) const {
        v.head(static_cast<long>(n_lc_)) = w.head(static_cast<long>(n_lc_))
                                               .cwiseQuotient(u.head(static_cast<long>(n_lc_)));
        std::size_t cone_start = n_lc_;
        for (const SoCone& sc : so_cones_) {
            const long cs = static_cast<long>(cone_start);
            const long d1len = static_cast<long>(sc.dim - 1);
            const double u0 = u(cs);
            const double w0 = w(cs);
            const double rho = u0 * u0 - u.segment(cs + 1, d1len).squaredNorm();
            const double zeta = u.segment(cs + 1, d1len).dot(w.segment(cs + 1, d1len));
            const double factor = (zeta / u0 - w0) / rho;
            v(cs) = (u0 * w0 - zeta) / rho;
            v.segment(cs + 1, d1len) =
                factor * u.segment(cs + 1, d1len) + w.segment(cs + 1, d1len) / u0;
            cone_start += sc.dim;
        }
    }

    // w = u o v in the cone algebra; returns e' w.
    double conicProduct(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                        Eigen::VectorXd& w) const {
        w.head(static_cast<long>(n_lc_)) =
            u.head(static_cast<long>(n_lc_)).cwiseProduct(v.head(static_cast<long>(n_lc_)));
        double mu = w.head(static_cast<long>(n_lc_)).lpNorm<1>();
        std::size_t cone_start = n_lc_;
        for (const SoCone& sc : so_cones_) {
            const long cs = static_cast<long>(cone_start);
            const long d1len = static_cast<long>(sc.dim - 1);
            const double u0 = u(cs);
            const double v0 = v(cs);
            w(cs) = u.segment(cs, static_cast<long>(sc.dim))
                        .dot(v.segment(cs, static_cast<long>(sc.dim)));
            mu += std::abs(w(cs));
            w.segment(cs + 1, d1len) =
                u0 * v.segment(cs + 1, d1len) + v0 * u.segment(cs + 1, d1len);
            cone_start += sc.dim;
        }
        return mu;
    }

    double lineSearch(const Eigen::VectorXd& lambda, const Eigen::VectorXd& ds,
                      const Eigen::VectorXd& dz, double tau, double dtau, double kap,
                      double dkap) const {
        double alpha;
        if (n_lc_ > 0) {
            const double rhomin = (ds.head(static_cast<long>(n_lc_))
                                       .cwiseQuotient(lambda.head(static_cast<long>(n_lc_))))
                                      .minCoeff();
            const double sigmamin = (dz.head(static_cast<long>(n_lc_))
                                         .cwiseQuotient(lambda.head(static_cast<long>(n_lc_))))
                                        .minCoeff();
            const double eps = 1e-13;
            if (-sigmamin > -rhomin) {
                alpha = sigmamin < 0. ? 1. / (-sigmamin) : 1. / eps;
            } else {
                alpha = rhomin < 0. ? 1. / (-rhomin) : 1. / eps;
            }
        } else {
            alpha = 10.;
        }

        const double minus_tau_by_dtau = -tau / dtau;
        const double minus_kap_by_dkap = -kap / dkap;
        if (minus_tau_by_dtau > 0. && minus_tau_by_dtau < alpha) {
            alpha = minus_tau_by_dtau;
        }
        if (minus_kap_by_dkap > 0. && minus_kap_by_dkap < alpha) {
            alpha = minus_kap_by_dkap;
        }

        std::size_t cone_start = n_lc_;
        for (const SoCone& sc : so_cones_) {
            const long cs = static_cast<long>(cone_start);
            const long d1len = static_cast<long>(sc.dim - 1);
            const double lknorm2 =
                lambda(cs) * lambda(cs) - lambda.segment(cs + 1, d1len).squaredNorm();
            if (lknorm2 <= 0.) {
                cone_start += sc.dim;
                continue;
            }
            const double lknorm = std::sqrt(lknorm2);
            const Eigen::VectorXd lkbar =
                lambda.segment(cs, static_cast<long>(sc.dim)) / lknorm;
            const double lknorminv = 1. / lknorm;

            const double lkbar_times_dsk =
                lkbar(0) * ds(cs) - lkbar.segment(1, d1len).dot(ds.segment(cs + 1, d1len));
            const double lkbar_times_dzk =
                lkbar(0) * dz(cs) - lkbar.segment(1, d1len).dot(dz.segment(cs + 1, d1len));

            Eigen::VectorXd rho(static_cast<long>(sc.dim));
            rho(0) = lknorminv * lkbar_times_dsk;
            double factor = (lkbar_times_dsk + ds(cs)) / (lkbar(0) + 1.);
            rho.tail(d1len) =
                lknorminv * (ds.segment(cs + 1, d1len) - factor * lkbar.segment(1, d1len));
            const double rhonorm = rho.tail(d1len).norm() - rho(0);

            Eigen::VectorXd sigma(static_cast<long>(sc.dim));
            sigma(0) = lknorminv * lkbar_times_dzk;
            factor = (lkbar_times_dzk + dz(cs)) / (lkbar(0) + 1.);
            sigma.tail(d1len) =
                lknorminv * (dz.segment(cs + 1, d1len) - factor * lkbar.segment(1, d1len));
            const double sigmanorm = sigma.tail(d1len).norm() - sigma(0);

            const double conic_step = std::max({0., sigmanorm, rhonorm});
            if (conic_step != 0.) {
                alpha = std::min(1. / conic_step, alpha);
            }
            cone_start += sc.dim;
        }

        return std::clamp(alpha, settings_.step_min, settings_.step_max);
    }

    // Solves the regularized KKT system and polishes with iterative
    // refinement against the unregularized operator.
    std::size_t solveKKT(const Eigen::VectorXd& rhs, Eigen::VectorXd& dx,
                         Eigen::VectorXd& dy, Eigen::VectorXd& dz, bool initialize) {
        Eigen::VectorXd x = ldlt_.solve(rhs);

        const double error_threshold =
            (1. + rhs.lpNorm<Eigen::Infinity>()) * settings_.linsys_accuracy;
        double nerr_prev = std::numeric_limits<double>::max();
        Eigen::VectorXd dx_ref(static_cast<long>(dim_K_));

        const std::size_t mtilde = n_ineq_ + 2 * so_cones_.size();
        const Eigen::VectorXd bx = rhs.head(static_cast<long>(n_var_));
        const Eigen::VectorXd by = rhs.segment(static_cast<long>(n_var_),
                                               static_cast<long>(n_eq_));
        const Eigen::VectorXd bz = rhs.tail(static_cast<long>(mtilde));

        std::size_t k_ref;
        for (k_ref = 0; k_ref <= settings_.refine_steps; ++k_ref) {
            const Eigen::VectorXd dxk = x.head(static_cast<long>(n_var_));
            const Eigen::VectorXd dyk =
                x.segment(static_cast<long>(n_var_), static_cast<long>(n_eq_));
            dz.head(static_cast<long>(n_lc_)) =
                x.segment(static_cast<long>(n_var_ + n_eq_), static_cast<long>(n_lc_));
            std::size_t dz_index = n_lc_;
            std::size_t x_index = n_var_ + n_eq_ + n_lc_;
            for (const SoCone& sc : so_cones_) {
                dz.segment(static_cast<long>(dz_index), static_cast<long>(sc.dim)) =
                    x.segment(static_cast<long>(x_index), static_cast<long>(sc.dim));
                dz_index += sc.dim;
                x_index += sc.dim + 2;
            }

            Eigen::VectorXd ex = bx - Gt_ * dz;
            if (n_eq_ > 0) ex -= At_ * dyk;
            ex -= settings_.deltastat * dxk;
            const double nex = ex.lpNorm<Eigen::Infinity>();

            Eigen::VectorXd ey = by;
            if (n_eq_ > 0) ey -= A_ * dxk;
            ey += settings_.deltastat * dyk;
            const double ney = ey.lpNorm<Eigen::Infinity>();

            Eigen::VectorXd Gdx = G_ * dxk;
            Eigen::VectorXd ez(static_cast<long>(mtilde));
            ez.head(static_cast<long>(n_lc_)) =
                bz.head(static_cast<long>(n_lc_)) - Gdx.head(static_cast<long>(n_lc_)) +
                settings_.deltastat * dz.head(static_cast<long>(n_lc_));
            std::size_t ez_index = n_lc_;
            dz_index = n_lc_;
            for (const SoCone& sc : so_cones_) {
                ez.segment(static_cast<long>(ez_index), static_cast<long>(sc.dim)) =
                    bz.segment(static_cast<long>(ez_index), static_cast<long>(sc.dim)) -
                    Gdx.segment(static_cast<long>(dz_index), static_cast<long>(sc.dim));
                ez.segment(static_cast<long>(ez_index), static_cast<long>(sc.dim - 1)) +=
                    settings_.deltastat *
                    dz.segment(static_cast<long>(dz_index), static_cast<long>(sc.dim - 1));
                dz_index += sc.dim;
                ez_index += sc.dim;
                ez(static_cast<long>(ez_index - 1)) -=
                    settings_.deltastat * dz(static_cast<long>(dz_index - 1));
                ez(static_cast<long>(ez_index++)) = 0.;
                ez(static_cast<long>(ez_index++)) = 0.;
            }

            const Eigen::VectorXd dz_true = x.tail(static_cast<long>(mtilde));
            if (initialize) {
                ez += dz_true;
            } else {
                scale2add(dz_true, ez);
            }
            const double nez = ez.lpNorm<Eigen::Infinity>();

            double nerr = std::max(nex, nez);
            if (n_eq_ > 0) nerr = std::max(nerr, ney);

            if (k_ref > 0 && nerr > nerr_prev) {
                x -= dx_ref;
                --k_ref;
                break;
            }
            if (k_ref == settings_.refine_steps || nerr < error_threshold ||
                (k_ref > 0 && nerr_prev < settings_.refine_stop_ratio * nerr)) {
                break;
            }
            nerr_prev = nerr;

            Eigen::VectorXd e(static_cast<long>(dim_K_));
            e << ex, ey, ez;
            dx_ref = ldlt_.solve(e);
            x += dx_ref;
        }

        dx = x.head(static_cast<long>(n_var_));
        dy = x.segment(static_cast<long>(n_var_), static_cast<long>(n_eq_));
        dz.head(static_cast<long>(n_lc_)) =
            x.segment(static_cast<long>(n_var_ + n_eq_), static_cast<long>(n_lc_));
        std::size_t dz_index = n_lc_;
        std::size_t x_index = n_var_ + n_eq_ + n_lc_;
        for (const SoCone& sc : so_cones_) {
            dz.segment(static_cast<long>(dz_index), static_cast<long>(sc.dim)) =
                x.segment(static_cast<long>(x_index), static_cast<long>(sc.dim));
            dz_index += sc.dim;
            x_index += sc.dim + 2;
        }
        return k_ref;
    }

    // RHS for the affine direction: [rx; -ry; s - rz] with zero padding in
    // the expansion slots.
    void RHSaffine() {
        rhs2_.head(static_cast<long>(n_var_)) = rx_;
        rhs2_.segment(static_cast<long>(n_var_), static_cast<long>(n_eq_)) = -ry_;
        rhs2_.segment(static_cast<long>(n_var_ + n_eq_), static_cast<long>(n_lc_)) =
            w_.s.head(static_cast<long>(n_lc_)) - rz_.head(static_cast<long>(n_lc_));
        std::size_t rhs_index = n_var_ + n_eq_ + n_lc_;
        std::size_t rz_index = n_lc_;
        for (const SoCone& sc : so_cones_) {
            rhs2_.segment(static_cast<long>(rhs_index), static_cast<long>(sc.dim)) =
                w_.s.segment(static_cast<long>(rz_index), static_cast<long>(sc.dim)) -
                rz_.segment(static_cast<long>(rz_index), static_cast<long>(sc.dim));
            rz_index += sc.dim;
            rhs_index += sc.dim;
            rhs2_.segment(static_cast<long>(rhs_index), 2).setZero();
            rhs_index += 2;
        }
    }

    // RHS for the combined direction (reuses rhs2 from the affine solve).
    void RHScombined() {
        Eigen::VectorXd ds1(static_cast<long>(n_ineq_));
        Eigen::VectorXd ds2(static_cast<long>(n_ineq_));

        conicProduct(w_.lambda, w_.lambda, ds1);
        conicProduct(dsaff_by_W_, W_times_dzaff_, ds2);

        const double sigmamu = w_.i.sigma * w_.i.mu;
        ds1.head(static_cast<long>(n_lc_)) += ds2.head(static_cast<long>(n_lc_));
        ds1.head(static_cast<long>(n_lc_)).array() -= sigmamu;

        std::size_t k = n_lc_;
        for (const SoCone& sc : so_cones_) {
            ds1(static_cast<long>(k)) -= sigmamu;
            ds1.segment(static_cast<long>(k), static_cast<long>(sc.dim)) +=
                ds2.segment(static_cast<long>(k), static_cast<long>(sc.dim));
            k += sc.dim;
        }

        conicDivision(w_.lambda, ds1, dsaff_by_W_);
        scale(dsaff_by_W_, ds1);

        const double one_minus_sigma = 1. - w_.i.sigma;
        rhs2_.head(static_cast<long>(n_var_ + n_eq_)) *= one_minus_sigma;
        rhs2_.segment(static_cast<long>(n_var_ + n_eq_), static_cast<long>(n_lc_)) =
            -one_minus_sigma * rz_.head(static_cast<long>(n_lc_)) +
            ds1.head(static_cast<long>(n_lc_));
        std::size_t rhs_index = n_var_ + n_eq_ + n_lc_;
        k = n_lc_;
        for (const SoCone& sc : so_cones_) {
            rhs2_.segment(static_cast<long>(rhs_index), static_cast<long>(sc.dim)) =
                -one_minus_sigma *
                    rz_.segment(static_cast<long>(k), static_cast<long>(sc.dim)) +
                ds1.segment(static_cast<long>(k), static_cast<long>(sc.dim));
            k += sc.dim;
            rhs_index += sc.dim;
            rhs2_(static_cast<long>(rhs_index++)) = 0.;
            rhs2_(static_cast<long>(rhs_index++)) = 0.;
        }
    }

    // ------------------------------------------------------------------
    // KKT matrix:
    //     [ dI  A'  G' ]
    // K = [ A  -dI  0  ]    (upper triangle stored; d = static regularization)
    //     [ G   0  -V  ]
    // where V holds the expanded sparse representation of W^2 per cone.
    // ------------------------------------------------------------------
    void setupKKT() {
        K_.resize(static_cast<long>(dim_K_), static_cast<long>(dim_K_));

        std::size_t K_nonzeros = static_cast<std::size_t>(At_.nonZeros() + Gt_.nonZeros());
        K_nonzeros += n_var_ + n_eq_; // static regularization
        K_nonzeros += n_lc_;          // linear part of V
        for (const SoCone& sc : so_cones_) {
            K_nonzeros += 3 * sc.dim + 1;
        }

        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(K_nonzeros);

        for (std::size_t k = 0; k < n_var_; ++k) {
            trips.emplace_back(static_cast<int>(k), static_cast<int>(k),
                               settings_.deltastat);
        }
        for (std::size_t k = n_var_; k < n_var_ + n_eq_; ++k) {
            trips.emplace_back(static_cast<int>(k), static_cast<int>(k),
                               -settings_.deltastat);
        }

        // A' block.
        for (int col = 0; col < At_.cols(); ++col) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(At_, col); it; ++it) {
                trips.emplace_back(static_cast<int>(it.row()),
                                   static_cast<int>(n_var_) + col, it.value());
            }
        }

        // G' block; columns skip the two expansion slots after each
        // second-order cone.
        {
            std::size_t col_K = n_var_ + n_eq_;
            std::size_t col_Gt = 0;
            for (std::size_t col = 0; col < n_lc_; ++col) {
                for (Eigen::SparseMatrix<double>::InnerIterator it(
                         Gt_, static_cast<int>(col_Gt));
                     it; ++it) {
                    trips.emplace_back(static_cast<int>(it.row()),
                                       static_cast<int>(col_K), it.value());
                }
                ++col_Gt;
                ++col_K;
            }
            for (const SoCone& sc : so_cones_) {
                for (std::size_t col = 0; col < sc.dim; ++col) {
                    for (Eigen::SparseMatrix<double>::InnerIterator it(
                             Gt_, static_cast<int>(col_Gt));
                         it; ++it) {
                        trips.emplace_back(static_cast<int>(it.row()),
                                           static_cast<int>(col_K), it.value());
                    }
                    ++col_Gt;
                    ++col_K;
                }
                col_K += 2;
            }
        }

        // -V block (upper triangle).  Per second-order cone the scaling
        // expands to [D v u; v' 1 0; u' 0 -1] with two extra rows/columns.
        {
            std::size_t diag_idx = n_var_ + n_eq_;
            for (std::size_t k = 0; k < n_lc_; ++k) {
                trips.emplace_back(static_cast<int>(diag_idx), static_cast<int>(diag_idx),
                                   -1.);
                ++diag_idx;
            }
            for (const SoCone& sc : so_cones_) {
                for (std::size_t k = 0; k < sc.dim; ++k) {
                    trips.emplace_back(static_cast<int>(diag_idx),
                                       static_cast<int>(diag_idx), -1.);
                    ++diag_idx;
                }
                trips.emplace_back(static_cast<int>(diag_idx), static_cast<int>(diag_idx),
                                   -1.);
                for (std::size_t k = 1; k < sc.dim; ++k) {
                    trips.emplace_back(static_cast<int>(diag_idx - sc.dim + k),
                                       static_cast<int>(diag_idx), 0.);
                }
                ++diag_idx;
                trips.emplace_back(static_cast<int>(diag_idx), static_cast<int>(diag_idx),
                                   1.);
                for (std::size_t k = 0; k < sc.dim; ++k) {
                    trips.emplace_back(static_cast<int>(diag_idx - sc.dim - 1 + k),
                                       static_cast<int>(diag_idx), 0.);
                }
                ++diag_idx;
            }
        }

        K_.setFromTriplets(trips.begin(), trips.end());
        cacheIndices();
    }

    // Bind pointers into the compressed value array for the entries updated
    // every iteration; the pattern never changes after setup.
    void cacheIndices() {
        KKT_AG_ptr_.clear();
        KKT_V_ptr_.clear();

        std::size_t col_K = n_var_;
        for (int col = 0; col < At_.cols(); ++col) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(At_, col); it; ++it) {
                KKT_AG_ptr_.push_back(&K_.coeffRef(it.row(), static_cast<long>(col_K)));
            }
            ++col_K;
        }
        {
            std::size_t col_Gt = 0;
            for (std::size_t col = 0; col < n_lc_; ++col) {
                for (Eigen::SparseMatrix<double>::InnerIterator it(
                         Gt_, static_cast<int>(col_Gt));
                     it; ++it) {
                    KKT_AG_ptr_.push_back(
                        &K_.coeffRef(it.row(), static_cast<long>(col_K)));
                }
                ++col_Gt;
                ++col_K;
            }
            for (const SoCone& sc : so_cones_) {
                for (std::size_t col = 0; col < sc.dim; ++col) {
                    for (Eigen::SparseMatrix<double>::InnerIterator it(
                             Gt_, static_cast<int>(col_Gt));
                         it; ++it) {
                        KKT_AG_ptr_.push_back(
                            &K_.coeffRef(it.row(), static_cast<long>(col_K)));
                    }
                    ++col_Gt;
                    ++col_K;
                }
                col_K += 2;
            }
        }

        std::size_t diag_idx = n_var_ + n_eq_;
        for (std::size_t k = 0; k < n_lc_; ++k) {
            KKT_V_ptr_.push_back(&K_.coeffRef(static_cast<long>(diag_idx),
                                              static_cast<long>(diag_idx)));
            ++diag_idx;
        }
        for (const SoCone& sc : so_cones_) {
            for (std::size_t k = 0; k < sc.dim; ++k) {
                KKT_V_ptr_.push_back(&K_.coeffRef(static_cast<long>(diag_idx),
                                                  static_cast<long>(diag_idx)));
                ++diag_idx;
            }
            KKT_V_ptr_.push_back(&K_.coeffRef(static_cast<long>(diag_idx),
                                              static_cast<long>(diag_idx)));
            for (std::size_t k = 1; k < sc.dim; ++k) {
                KKT_V_ptr_.push_back(&K_.coeffRef(static_cast<long>(diag_idx - sc.dim + k),
                                                  static_cast<long>(diag_idx)));
            }
            ++diag_idx;
            KKT_V_ptr_.push_back(&K_.coeffRef(static_cast<long>(diag_idx),
                                              static_cast<long>(diag_idx)));
            KKT_V_ptr_.push_back(&K_.coeffRef(static_cast<long>(diag_idx - sc.dim - 1),
                                              static_cast<long>(diag_idx)));
            for (std::size_t k = 1; k < sc.dim; ++k) {
                KKT_V_ptr_.push_back(
                    &K_.coeffRef(static_cast<long>(diag_idx - sc.dim - 1 + k),
                                 static_cast<long>(diag_idx)));
            }
            ++diag_idx;
        }
    }

    void resetKKTScalings() {
        std::size_t ptr_i = 0;
        for (std::size_t k = 0; k < n_lc_; ++k) {
            *KKT_V_ptr_[ptr_i++] = -1.;
        }
        for (const SoCone& sc : so_cones_) {
            for (std::size_t k = 0; k < sc.dim; ++k) {
                *KKT_V_ptr_[ptr_i++] = -1.;
            }
            *KKT_V_ptr_[ptr_i++] = -1.;
            for (std::size_t k = 1; k < sc.dim; ++k) {
                *KKT_V_ptr_[ptr_i++] = 0.;
            }
            *KKT_V_ptr_[ptr_i++] = 1.;
            *KKT_V_ptr_[ptr_i++] = 0.;
            for (std::size_t k = 1; k < sc.dim; ++k) {
                *KKT_V_ptr_[ptr_i++] = 0.;
            }
        }
    }

    void updateKKTScalings() {
        std::size_t ptr_i = 0;
        for (std::size_t k = 0; k < n_lc_; ++k) {
            *KKT_V_ptr_[ptr_i++] = -lp_cone_.v(static_cast<long>(k)) - settings_.deltastat;
        }
        for (const SoCone& sc : so_cones_) {
            *KKT_V_ptr_[ptr_i++] = -sc.eta_square * sc.d1 - settings_.deltastat;
            for (std::size_t k = 1; k < sc.dim; ++k) {
                *KKT_V_ptr_[ptr_i++] = -sc.eta_square - settings_.deltastat;
            }
            *KKT_V_ptr_[ptr_i++] = -sc.eta_square;
            for (std::size_t k = 1; k < sc.dim; ++k) {
                *KKT_V_ptr_[ptr_i++] =
                    -sc.eta_square * sc.v1 * sc.q(static_cast<long>(k - 1));
            }
            *KKT_V_ptr_[ptr_i++] = sc.eta_square + settings_.deltastat;
            *KKT_V_ptr_[ptr_i++] = -sc.eta_square * sc.u0;
            for (std::size_t k = 1; k < sc.dim; ++k) {
                *KKT_V_ptr_[ptr_i++] =
                    -sc.eta_square * sc.u1 * sc.q(static_cast<long>(k - 1));
            }
        }
    }

    SolverSettings settings_;
    Eigen::SparseMatrix<double> G_, A_, Gt_, At_;
    Eigen::VectorXd c_, h_, b_;
    std::size_t n_var_ = 0, n_eq_ = 0, n_ineq_ = 0, n_lc_ = 0, n_sc_ = 0, dim_K_ = 0;

    LpCone lp_cone_;
    std::vector<SoCone> so_cones_;

    Eigen::VectorXd x_equil_, A_equil_, G_equil_;
    Eigen::SparseMatrix<double> K_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Upper> ldlt_;
    std::vector<double*> KKT_V_ptr_;
    std::vector<double*> KKT_AG_ptr_;

    Work w_, w_best_;
    Eigen::VectorXd rhs1_, rhs2_;
    Eigen::VectorXd rx_, ry_, rz_;
    Eigen::VectorXd W_times_dzaff_, dsaff_by_W_, dsaff_;
    double hresx_ = 0., hresy_ = 0., hresz_ = 0., rt_ = 0.;
    double resx0_ = 1., resy0_ = 1., resz0_ = 1.;
    double nx_ = 0., ny_ = 0., nz_ = 0., ns_ = 0.;
};

// Unconstrained programs reduce to linear algebra: feasibility of A z = b and
// boundedness of the objective over the affine solution set.
inline SolveResult solve_equality_only(const ConicProgram& p, double tol) {
    SolveResult res;
    const std::size_t n = p.variable_count();
    const Eigen::VectorXd c = objective_vector(p);
    if (p.equality_count() == 0) {
        if (c.norm() == 0.) {
            res.status = SolveStatus::Optimal;
            res.z = Eigen::VectorXd::Zero(static_cast<long>(n));
            res.objective = 0.;
            res.primal_residual = res.dual_residual = res.gap = 0.;
        } else {
            res.status = SolveStatus::Unbounded;
            res.z = Eigen::VectorXd::Zero(static_cast<long>(n));
        }
        res.eq_dual = Eigen::VectorXd::Zero(0);
        res.cone_dual = Eigen::VectorXd::Zero(0);
        res.cone_slack = Eigen::VectorXd::Zero(0);
        return res;
    }

    const Eigen::MatrixXd A = Eigen::MatrixXd(equality_matrix(p));
    const Eigen::VectorXd b = rhs_vector(p);
    const auto qr = A.colPivHouseholderQr();
    const Eigen::VectorXd z = qr.solve(b);
    const double scale_b = std::max(1., b.lpNorm<Eigen::Infinity>());
    if ((A * z - b).lpNorm<Eigen::Infinity>() > tol * scale_b) {
        res.status = SolveStatus::Infeasible;
        res.z = z;
        return res;
    }
    // Objective bounded iff c lies in the row space of A: c = A' y.
    const auto qrt = Eigen::MatrixXd(A.transpose()).colPivHouseholderQr();
    const Eigen::VectorXd y = qrt.solve(c);
    const double scale_c = std::max(1., c.lpNorm<Eigen::Infinity>());
    if ((A.transpose() * y - c).lpNorm<Eigen::Infinity>() > tol * scale_c) {
        res.status = SolveStatus::Unbounded;
        res.z = z;
        return res;
    }
    res.status = SolveStatus::Optimal;
    res.z = z;
    res.objective = c.dot(z);
    res.primal_residual = res.dual_residual = res.gap = 0.;
    res.eq_dual = y;
    res.cone_dual = Eigen::VectorXd::Zero(0);
    res.cone_slack = Eigen::VectorXd::Zero(0);
    return res;
}

} // namespace detail

inline SolveResult solve(const ConicProgram& p, double tol, const SolverSettings& base) {
    validate_program(p);

    if (p.cones.empty()) {
        return detail::solve_equality_only(p, tol);
    }

    SolverSettings settings = base;
    settings.feastol = tol;
    settings.abstol = tol;
    settings.reltol = tol;

    const detail::SolverForm form = detail::to_solver_form(p);
    detail::HsdeSolver solver(form, settings);
    const detail::ExitCode code = solver.solve();
    const detail::Work& w = solver.work();

    SolveResult res;
    res.z = w.x;
    res.objective = objective_value(p, w.x);
    res.primal_residual = w.i.pres;
    res.dual_residual = w.i.dres;
    res.gap = w.i.relgap.has_value() ? std::min(w.i.gap, *w.i.relgap) : w.i.gap;
    res.iterations = w.i.iter;
    res.eq_dual = w.y;
    res.cone_dual = w.z;
    res.cone_slack = w.s;

    switch (code) {
    case detail::ExitCode::Optimal:
        res.status = SolveStatus::Optimal;
        break;
    case detail::ExitCode::PrimalInfeasible:
    case detail::ExitCode::CloseToPrimalInfeasible:
        res.status = SolveStatus::Infeasible;
        break;
    case detail::ExitCode::DualInfeasible:
    case detail::ExitCode::CloseToDualInfeasible:
        res.status = SolveStatus::Unbounded;
        break;
    default:
        // Close-to-optimal and all failure modes: the strict residual
        // contract for "optimal" was not met.
        res.status = SolveStatus::NumericFailure;
        break;
    }
    return res;
}

inline SolveResult solve(const ConicProgram& p, double tol = 1e-8) {
    return solve(p, tol, SolverSettings{});
}

} // namespace secbeam::conic
