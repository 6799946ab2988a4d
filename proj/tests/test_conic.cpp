#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "secbeam/conic/certify.hpp"
#include "secbeam/conic/program.hpp"
#include "secbeam/conic/solver.hpp"

using namespace secbeam::conic;

namespace {

constexpr double kTol = 1e-8;

// Projection of a point onto a box, phrased as distance-epigraph
// minimization: the optimum is the clamped point and its distance, both
// known in closed form.
struct BoxProjection {
    ConicProgram p;
    Eigen::Vector3d point;
    Eigen::Vector3d lo{0.0, 0.0, 0.0};
    Eigen::Vector3d hi{1.0, 1.0, 1.0};
    std::size_t x0 = 0, u0 = 0, v0 = 0, t = 0, d0 = 0;

    explicit BoxProjection(const Eigen::Vector3d& pt = {1.3, -2.0, 1.7}) : point(pt) {
        x0 = p.add_variables(3, "x");
        u0 = p.add_variables(3, "x_minus_lo");
        v0 = p.add_variables(3, "hi_minus_x");
        t = p.add_variable("distance", -1.0); // maximize -distance
        d0 = p.add_variables(3, "offset");
        for (int i = 0; i < 3; ++i) {
            std::size_t r = p.add_equality(lo(i)); // x - u = lo
            p.add_term(r, x0 + i, 1.0);
            p.add_term(r, u0 + i, -1.0);
            r = p.add_equality(hi(i)); // x + v = hi
            p.add_term(r, x0 + i, 1.0);
            p.add_term(r, v0 + i, 1.0);
            r = p.add_equality(-point(i)); // d - x = -point
            p.add_term(r, d0 + i, 1.0);
            p.add_term(r, x0 + i, -1.0);
        }
        p.add_cone(ConeType::NonNegative, u0, 6); // u and v are adjacent
        p.add_cone(ConeType::SecondOrder, t, 4);
    }

    Eigen::Vector3d clamped() const {
        return point.cwiseMax(lo).cwiseMin(hi);
    }
    double distance() const { return (clamped() - point).norm(); }
};

} // namespace

TEST_CASE("program validation rejects malformed input", "[conic]") {
    ConicProgram p;
    p.add_variables(4, "z");

    SECTION("valid program passes") {
        p.add_cone(ConeType::SecondOrder, 0, 2);
        REQUIRE_NOTHROW(validate_program(p));
    }
    SECTION("cone out of range") {
        p.add_cone(ConeType::SecondOrder, 3, 2);
        REQUIRE_THROWS_AS(validate_program(p), ProgramError);
    }
    SECTION("overlapping cone slices") {
        p.add_cone(ConeType::NonNegative, 0, 2);
        p.add_cone(ConeType::SecondOrder, 1, 3);
        REQUIRE_THROWS_AS(validate_program(p), ProgramError);
    }
    SECTION("second-order cone below minimum dimension") {
        p.add_cone(ConeType::SecondOrder, 0, 1);
        REQUIRE_THROWS_AS(validate_program(p), ProgramError);
    }
    SECTION("rotated cone below minimum dimension") {
        p.add_cone(ConeType::RotatedSecondOrder, 0, 2);
        REQUIRE_THROWS_AS(validate_program(p), ProgramError);
    }
    SECTION("equality term out of range") {
        const std::size_t r = p.add_equality(1.0);
        p.add_term(r, 7, 1.0);
        REQUIRE_THROWS_AS(validate_program(p), ProgramError);
    }
    SECTION("term referencing missing row") {
        p.terms.push_back({2, 0, 1.0});
        REQUIRE_THROWS_AS(validate_program(p), ProgramError);
    }
}

TEST_CASE("box projection reaches the analytic optimum", "[conic]") {
    SECTION("every bound active: coordinates pinned to solver tolerance") {
        BoxProjection bp({1.3, -2.0, 1.7}); // clamps to (1, 0, 1)
        validate_program(bp.p);
        const SolveResult res = solve(bp.p, kTol);

        REQUIRE(res.status == SolveStatus::Optimal);
        const Eigen::Vector3d want = bp.clamped();
        for (int i = 0; i < 3; ++i) {
            REQUIRE(res.z(static_cast<long>(bp.x0) + i) ==
                    Catch::Approx(want(i)).margin(1e-8));
        }
        REQUIRE(res.z(static_cast<long>(bp.t)) ==
                Catch::Approx(bp.distance()).margin(1e-8));
        REQUIRE(res.objective == Catch::Approx(-bp.distance()).margin(1e-8));

        // Status invariant: optimal implies certified residuals.
        REQUIRE(res.primal_residual <= kTol);
        REQUIRE(res.dual_residual <= kTol);
        REQUIRE(res.gap <= kTol);
    }
    SECTION("interior coordinate: objective tight, flat direction bounded") {
        BoxProjection bp({0.3, -2.0, 1.7}); // clamps to (0.3, 0, 1)
        const SolveResult res = solve(bp.p, kTol);

        REQUIRE(res.status == SolveStatus::Optimal);
        REQUIRE(res.objective == Catch::Approx(-bp.distance()).margin(1e-8));
        REQUIRE(res.z(static_cast<long>(bp.t)) ==
                Catch::Approx(bp.distance()).margin(1e-8));
        // Around the optimum the distance is quadratically flat in the
        // unclamped coordinate, so a gap of g only pins it to ~sqrt(2*d*g).
        const double flat = std::sqrt(4.0 * bp.distance() * kTol *
                                      std::max(1.0, bp.distance()));
        const Eigen::Vector3d want = bp.clamped();
        for (int i = 0; i < 3; ++i) {
            REQUIRE(res.z(static_cast<long>(bp.x0) + i) ==
                    Catch::Approx(want(i)).margin(flat));
        }
    }
}

TEST_CASE("infeasible bounds are detected", "[conic]") {
    ConicProgram p;
    const std::size_t z = p.add_variable("z");
    const std::size_t a = p.add_variable("z_minus_one");
    const std::size_t b = p.add_variable("minus_z");
    std::size_t r = p.add_equality(1.0); // z - a = 1  (z >= 1)
    p.add_term(r, z, 1.0);
    p.add_term(r, a, -1.0);
    r = p.add_equality(0.0); // z + b = 0  (z <= 0)
    p.add_term(r, z, 1.0);
    p.add_term(r, b, 1.0);
    p.add_cone(ConeType::NonNegative, a, 2);

    const SolveResult res = solve(p, kTol);
    REQUIRE(res.status == SolveStatus::Infeasible);
}

TEST_CASE("rotated cone is tight at the optimum", "[conic]") {
    // minimize t subject to t * 1 >= w^2 with w = 2: the bound binds at 4.
    ConicProgram p;
    const std::size_t t = p.add_variable("t", -1.0);
    const std::size_t one = p.add_variable("one");
    const std::size_t w = p.add_variable("w");
    p.add_term(p.add_equality(1.0), one, 1.0);
    p.add_term(p.add_equality(2.0), w, 1.0);
    p.add_cone(ConeType::RotatedSecondOrder, t, 3);

    const SolveResult res = solve(p, kTol);
    REQUIRE(res.status == SolveStatus::Optimal);
    REQUIRE(res.z(static_cast<long>(t)) == Catch::Approx(4.0).margin(1e-7));
    REQUIRE(res.objective == Catch::Approx(-4.0).margin(1e-7));

    const CertifyReport rep = certify(p, res, 10 * kTol);
    CAPTURE(rep.failures);
    REQUIRE(rep.pass);
}

TEST_CASE("quadratic-over-linear epigraph via rotated cone", "[conic]") {
    // minimize t with t * y >= x^2, y = 2, x = 3: t = 4.5.
    ConicProgram p;
    const std::size_t t = p.add_variable("t", -1.0);
    const std::size_t y = p.add_variable("y");
    const std::size_t x = p.add_variable("x");
    p.add_term(p.add_equality(2.0), y, 1.0);
    p.add_term(p.add_equality(3.0), x, 1.0);
    p.add_cone(ConeType::RotatedSecondOrder, t, 3);

    const SolveResult res = solve(p, kTol);
    REQUIRE(res.status == SolveStatus::Optimal);
    REQUIRE(res.z(static_cast<long>(t)) == Catch::Approx(4.5).margin(1e-7));
}

TEST_CASE("norm-ball linear maximization", "[conic]") {
    // maximize c'x over ||x|| <= 1: optimum c/||c|| with value ||c||.
    ConicProgram p;
    const std::size_t t = p.add_variable("radius");
    const std::size_t x = p.add_variables(3, "x");
    p.objective[x + 0] = 1.0;
    p.objective[x + 1] = 2.0;
    p.objective[x + 2] = -2.0;
    p.add_term(p.add_equality(1.0), t, 1.0);
    p.add_cone(ConeType::SecondOrder, t, 4);

    const SolveResult res = solve(p, kTol);
    REQUIRE(res.status == SolveStatus::Optimal);
    REQUIRE(res.objective == Catch::Approx(3.0).margin(1e-7));
    REQUIRE(res.z(static_cast<long>(x) + 0) == Catch::Approx(1.0 / 3.0).margin(1e-7));
    REQUIRE(res.z(static_cast<long>(x) + 1) == Catch::Approx(2.0 / 3.0).margin(1e-7));
    REQUIRE(res.z(static_cast<long>(x) + 2) == Catch::Approx(-2.0 / 3.0).margin(1e-7));

    const CertifyReport rep = certify(p, res, 10 * kTol);
    CAPTURE(rep.failures);
    REQUIRE(rep.pass);
}

TEST_CASE("simple budget linear program", "[conic]") {
    // maximize x0 + x1 with x0 + x1 + slack = 1, all nonnegative.
    ConicProgram p;
    const std::size_t x = p.add_variables(2, "x");
    p.objective[x + 0] = 1.0;
    p.objective[x + 1] = 1.0;
    const std::size_t s = p.add_variable("slack");
    const std::size_t r = p.add_equality(1.0);
    p.add_term(r, x + 0, 1.0);
    p.add_term(r, x + 1, 1.0);
    p.add_term(r, s, 1.0);
    p.add_cone(ConeType::NonNegative, 0, 3);

    const SolveResult res = solve(p, kTol);
    REQUIRE(res.status == SolveStatus::Optimal);
    REQUIRE(res.objective == Catch::Approx(1.0).margin(1e-7));

    const CertifyReport rep = certify(p, res, 10 * kTol);
    CAPTURE(rep.failures);
    REQUIRE(rep.pass);
}

TEST_CASE("unbounded ray is reported", "[conic]") {
    ConicProgram p;
    p.add_variable("z", 1.0);
    p.add_cone(ConeType::NonNegative, 0, 1);
    const SolveResult res = solve(p, kTol);
    REQUIRE(res.status == SolveStatus::Unbounded);
}

TEST_CASE("programs without cones fall back to linear algebra", "[conic]") {
    SECTION("zero program is optimal") {
        ConicProgram p;
        const SolveResult res = solve(p, kTol);
        REQUIRE(res.status == SolveStatus::Optimal);
        REQUIRE(certify(p, res, kTol).pass);
    }
    SECTION("pinned variable") {
        ConicProgram p;
        const std::size_t x = p.add_variable("x", 2.0);
        p.add_term(p.add_equality(3.0), x, 1.0);
        const SolveResult res = solve(p, kTol);
        REQUIRE(res.status == SolveStatus::Optimal);
        REQUIRE(res.objective == Catch::Approx(6.0));
        REQUIRE(certify(p, res, kTol).pass);
    }
    SECTION("free objective direction is unbounded") {
        ConicProgram p;
        p.add_variable("x");
        p.add_variable("free", 1.0);
        p.add_term(p.add_equality(3.0), 0, 1.0);
        REQUIRE(solve(p, kTol).status == SolveStatus::Unbounded);
    }
    SECTION("inconsistent equalities are infeasible") {
        ConicProgram p;
        const std::size_t x = p.add_variable("x");
        p.add_term(p.add_equality(1.0), x, 1.0);
        p.add_term(p.add_equality(2.0), x, 1.0);
        REQUIRE(solve(p, kTol).status == SolveStatus::Infeasible);
    }
}

TEST_CASE("certification audits the reported optimum", "[conic]") {
    BoxProjection bp;
    const SolveResult res = solve(bp.p, kTol);
    REQUIRE(res.status == SolveStatus::Optimal);

    SECTION("honest result passes at ten times solver tolerance") {
        const CertifyReport rep = certify(bp.p, res, 10 * kTol);
        CAPTURE(rep.failures);
        REQUIRE(rep.pass);
        REQUIRE(rep.equality_residual <= 10 * kTol);
        REQUIRE(rep.primal_cone_violation <= 10 * kTol);
        REQUIRE(rep.dual_cone_violation <= 10 * kTol);
        REQUIRE(rep.stationarity_residual <= 10 * kTol);
        REQUIRE(rep.duality_gap <= 10 * kTol);
    }
    SECTION("perturbing one primal value fails the audit") {
        SolveResult bad = res;
        bad.z(0) += 1e-3;
        const CertifyReport rep = certify(bp.p, bad, 10 * kTol);
        REQUIRE_FALSE(rep.pass);
        REQUIRE_FALSE(rep.failures.empty());
    }
    SECTION("non-optimal status does not certify") {
        SolveResult bad = res;
        bad.status = SolveStatus::NumericFailure;
        REQUIRE_FALSE(certify(bp.p, bad, 10 * kTol).pass);
    }
}

TEST_CASE("JSON interchange round-trips programs exactly", "[conic]") {
    BoxProjection bp;
    const nlohmann::json j = program_to_json(bp.p);

    // Through the in-memory representation.
    const ConicProgram q = program_from_json(j);
    REQUIRE(q.variable_count() == bp.p.variable_count());
    REQUIRE(q.objective == bp.p.objective);
    REQUIRE(q.names == bp.p.names);
    REQUIRE(q.rhs == bp.p.rhs);
    REQUIRE(q.terms.size() == bp.p.terms.size());
    for (std::size_t i = 0; i < q.terms.size(); ++i) {
        REQUIRE(q.terms[i].row == bp.p.terms[i].row);
        REQUIRE(q.terms[i].var == bp.p.terms[i].var);
        REQUIRE(q.terms[i].coef == bp.p.terms[i].coef);
    }
    REQUIRE(q.cones.size() == bp.p.cones.size());
    for (std::size_t i = 0; i < q.cones.size(); ++i) {
        REQUIRE(q.cones[i].type == bp.p.cones[i].type);
        REQUIRE(q.cones[i].start == bp.p.cones[i].start);
        REQUIRE(q.cones[i].dim == bp.p.cones[i].dim);
    }

    // Through text, as an external tool would consume it.
    std::stringstream ss;
    ss << j.dump();
    const ConicProgram q2 = program_from_json(nlohmann::json::parse(ss.str()));
    const SolveResult a = solve(bp.p, kTol);
    const SolveResult b = solve(q2, kTol);
    REQUIRE(a.status == b.status);
    REQUIRE(a.z == b.z); // bitwise: same program, same arithmetic
}

TEST_CASE("solver is deterministic", "[conic]") {
    BoxProjection bp;
    const SolveResult a = solve(bp.p, kTol);
    const SolveResult b = solve(bp.p, kTol);
    REQUIRE(a.status == b.status);
    REQUIRE(a.iterations == b.iterations);
    REQUIRE(a.z == b.z);
    REQUIRE(a.eq_dual == b.eq_dual);
    REQUIRE(a.cone_dual == b.cone_dual);
}
