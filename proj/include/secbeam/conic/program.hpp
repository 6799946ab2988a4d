#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "json.hpp"

namespace secbeam::conic {

// Canonical cone program over real variables z:
//
//     maximize    objective' z
//     subject to  sum_j A(i,j) z(j) = rhs(i)        for every equality row i
//                 z[slice] in cone                  for every cone slice
//
// Each cone slice covers a contiguous, disjoint index range; variables
// outside every slice are free.  Complex model quantities enter as
// interleaved (re, im) pairs; the per-variable name table records the
// mapping for audit traceability.
enum class ConeType {
    NonNegative,        // every coordinate >= 0
    SecondOrder,        // (t, u): t >= ||u||
    RotatedSecondOrder, // (a, b, w): a >= 0, b >= 0, a*b >= ||w||^2
};

inline const char* cone_type_name(ConeType t) {
    switch (t) {
    case ConeType::NonNegative: return "nonnegative";
    case ConeType::SecondOrder: return "second_order";
    case ConeType::RotatedSecondOrder: return "rotated_second_order";
    }
    return "unknown";
}

inline ConeType cone_type_from_name(const std::string& name) {
    if (name == "nonnegative") return ConeType::NonNegative;
    if (name == "second_order") return ConeType::SecondOrder;
    if (name == "rotated_second_order") return ConeType::RotatedSecondOrder;
    throw std::runtime_error("unknown cone type: " + name);
}

struct ConeSlice {
    ConeType type = ConeType::NonNegative;
    std::size_t start = 0;
    std::size_t dim = 0;
};

struct EqualityTerm {
    std::size_t row = 0;
    std::size_t var = 0;
    double coef = 0.0;
};

struct ConicProgram {
    std::vector<double> objective;        // maximize objective' z
    std::vector<std::string> names;       // one label per variable
    std::vector<EqualityTerm> terms;      // coefficients of A (duplicates add)
    std::vector<double> rhs;              // equality right-hand sides
    std::vector<ConeSlice> cones;

    std::size_t variable_count() const { return objective.size(); }
    std::size_t equality_count() const { return rhs.size(); }

    // Builder helpers used by subproblem assembly.  Variables are appended,
    // so a cone over freshly added variables is always a contiguous slice.
    std::size_t add_variable(std::string name, double obj_coef = 0.0) {
        objective.push_back(obj_coef);
        names.push_back(std::move(name));
        return objective.size() - 1;
    }

    std::size_t add_variables(std::size_t count, const std::string& stem) {
        const std::size_t first = objective.size();
        for (std::size_t i = 0; i < count; ++i) {
            add_variable(stem + "[" + std::to_string(i) + "]");
        }
        return first;
    }

    std::size_t add_equality(double value) {
        rhs.push_back(value);
        return rhs.size() - 1;
    }

    void add_term(std::size_t row, std::size_t var, double coef) {
        if (coef != 0.0) terms.push_back({row, var, coef});
    }

    void add_cone(ConeType type, std::size_t start, std::size_t dim) {
        cones.push_back({type, start, dim});
    }
};

// Throws on malformed programs; the message names the first offending piece.
class ProgramError : public std::runtime_error {
public:
    explicit ProgramError(const std::string& what) : std::runtime_error(what) {}
};

inline void validate_program(const ConicProgram& p) {
    const std::size_t n = p.variable_count();
    if (p.names.size() != n) {
        throw ProgramError("name table size does not match variable count");
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(p.objective[j])) {
            throw ProgramError("objective coefficient not finite at variable " +
                               std::to_string(j));
        }
    }
    for (const EqualityTerm& t : p.terms) {
        if (t.row >= p.rhs.size()) {
            throw ProgramError("equality term references row " +
                               std::to_string(t.row) + " out of range");
        }
        if (t.var >= n) {
            throw ProgramError("equality term references variable " +
                               std::to_string(t.var) + " out of range");
        }
        if (!std::isfinite(t.coef)) {
            throw ProgramError("equality coefficient not finite at row " +
                               std::to_string(t.row));
        }
    }
    for (double v : p.rhs) {
        if (!std::isfinite(v)) {
            throw ProgramError("equality right-hand side not finite");
        }
    }
    std::vector<bool> used(n, false);
    for (std::size_t ci = 0; ci < p.cones.size(); ++ci) {
        const ConeSlice& s = p.cones[ci];
        const std::size_t min_dim =
            s.type == ConeType::SecondOrder ? 2 : s.type == ConeType::RotatedSecondOrder ? 3 : 1;
        if (s.dim < min_dim) {
            throw ProgramError("cone " + std::to_string(ci) + " (" +
                               cone_type_name(s.type) + ") has dimension " +
                               std::to_string(s.dim) + " below the minimum " +
                               std::to_string(min_dim));
        }
        if (s.start + s.dim > n) {
            throw ProgramError("cone " + std::to_string(ci) + " exceeds variable range");
        }
        for (std::size_t j = s.start; j < s.start + s.dim; ++j) {
            if (used[j]) {
                throw ProgramError("variable " + std::to_string(j) +
                                   " belongs to more than one cone slice");
            }
            used[j] = true;
        }
    }
}

inline Eigen::SparseMatrix<double> equality_matrix(const ConicProgram& p) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(p.terms.size());
    for (const EqualityTerm& t : p.terms) {
        trips.emplace_back(static_cast<int>(t.row), static_cast<int>(t.var), t.coef);
    }
    Eigen::SparseMatrix<double> A(static_cast<int>(p.equality_count()),
                                  static_cast<int>(p.variable_count()));
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

inline Eigen::VectorXd objective_vector(const ConicProgram& p) {
    return Eigen::Map<const Eigen::VectorXd>(p.objective.data(),
                                             static_cast<long>(p.objective.size()));
}

inline Eigen::VectorXd rhs_vector(const ConicProgram& p) {
    return Eigen::Map<const Eigen::VectorXd>(p.rhs.data(), static_cast<long>(p.rhs.size()));
}

inline double objective_value(const ConicProgram& p, const Eigen::VectorXd& z) {
    return objective_vector(p).dot(z);
}

// JSON interchange: {"variables", "names", "objective",
// "equalities": {"rhs", "triplets": [[row, col, value], ...]},
// "cones": [{"type", "start", "dim"}, ...]}.  Numbers round-trip exactly.
inline nlohmann::json program_to_json(const ConicProgram& p) {
    nlohmann::json j;
    j["variables"] = p.variable_count();
    j["names"] = p.names;
    j["objective"] = p.objective;
    nlohmann::json trips = nlohmann::json::array();
    for (const EqualityTerm& t : p.terms) {
        trips.push_back({t.row, t.var, t.coef});
    }
    j["equalities"] = {{"rhs", p.rhs}, {"triplets", std::move(trips)}};
    nlohmann::json cones = nlohmann::json::array();
    for (const ConeSlice& s : p.cones) {
        cones.push_back({{"type", cone_type_name(s.type)}, {"start", s.start}, {"dim", s.dim}});
    }
    j["cones"] = std::move(cones);
    return j;
}

inline ConicProgram program_from_json(const nlohmann::json& j) {
    ConicProgram p;
    p.objective = j.at("objective").get<std::vector<double>>();
    p.names = j.at("names").get<std::vector<std::string>>();
    if (j.at("variables").get<std::size_t>() != p.objective.size()) {
        throw ProgramError("variable count does not match objective length");
    }
    const nlohmann::json& eq = j.at("equalities");
    p.rhs = eq.at("rhs").get<std::vector<double>>();
    for (const nlohmann::json& t : eq.at("triplets")) {
        p.terms.push_back({t.at(0).get<std::size_t>(), t.at(1).get<std::size_t>(),
                           t.at(2).get<double>()});
    }
    for (const nlohmann::json& c : j.at("cones")) {
        p.cones.push_back({cone_type_from_name(c.at("type").get<std::string>()),
                           c.at("start").get<std::size_t>(), c.at("dim").get<std::size_t>()});
    }
    validate_program(p);
    return p;
}

} // namespace secbeam::conic
