#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfcr/costs.hpp"

namespace sfcr {

struct MilpVar {
    enum class Kind { Binary, Continuous, Integer };
    std::string name;
    Kind kind = Kind::Continuous;
    double lb = 0.0;
    double ub = 1.0; // +inf encoded as std::numeric_limits<double>::infinity()
};

struct LinTerm {
    int var = -1;
    double coef = 0.0;
};

struct LinExpr {
    std::vector<LinTerm> terms;
    double constant = 0.0;
    LinExpr& add(int var, double coef) {
        terms.push_back({var, coef});
        return *this;
    }
};

struct MilpConstraint {
    std::string name;
    LinExpr expr;
    char sense = '<'; // '<' (<=), '=' (==), '>' (>=)
    double rhs = 0.0;
};

/// Immutable once built. The registry maps every variable name back to its
/// semantics (placement, path choice, routing entry, or auxiliary).
struct MilpModel {
    std::vector<MilpVar> vars;
    std::vector<MilpConstraint> constraints;
    LinExpr objective; // minimized
    std::map<std::string, int> var_index;
    nlohmann::json registry = nlohmann::json::object();

    int find_var(const std::string& name) const {
        auto it = var_index.find(name);
        return it == var_index.end() ? -1 : it->second;
    }
};

/// Single-use construction helper providing the standard reductions:
/// absolute differences against constants, binary products, and big-M
/// gated maxima.
class MilpBuilder {
public:
    int add_var(const std::string& name, MilpVar::Kind kind, double lb, double ub,
                nlohmann::json semantics);
    void add_constraint(const std::string& name, LinExpr expr, char sense, double rhs);

    // |a - b| with b a known bit: "a" when b = 0, "1 - a" when b = 1.
    LinExpr lin_abs_diff(int a, int b_constant) const;

    // Auxiliary z with z <= a, z <= b, z >= a + b - 1, so z == a*b for all
    // binary assignments.
    int lin_product(int a, int b, const std::string& name);

    // Continuous t >= 0 with t >= term (or t >= term - M*(1 - activation)
    // when the term has an activation bit). Every activated term needs a
    // finite big-M; a missing or non-finite one is a build error.
    int lin_max(const std::string& name, const std::vector<LinExpr>& terms,
                const std::vector<int>& activations, const std::vector<double>& big_m,
                double upper_bound);

    MilpModel take() { return std::move(model_); }
    MilpModel& model() { return model_; }

private:
    MilpModel model_;
};

// The full linear model over (placement W, per-segment path choices p,
// derived routing R) with the joint objective's normalization constants
// folded into the coefficients.
MilpModel build_milp(const EvalContext& ctx, double alpha);
MilpModel build_milp(const Instance& inst, const NetworkState& state, double alpha, int k = 4);

struct MilpEvalResult {
    double objective = 0.0;
    bool satisfied = false;
    std::string first_violation;
};

// Exact linear evaluation of a complete assignment; missing variables are
// invalid arguments.
MilpEvalResult evaluate_assignment(const MilpModel& model,
                                   const std::map<std::string, double>& assignment);

// Model assignment implied by a placement and candidate-path choice: primal
// variables plus every auxiliary at its tight value. Routing choices must
// use candidate paths (keep-current routes are resolved to the matching
// candidates first).
std::map<std::string, double> assignment_from_solution(const MilpModel& model,
                                                       const EvalContext& ctx,
                                                       const std::vector<int>& hosts,
                                                       const RoutingChoice& routing);

std::string export_lp(const MilpModel& model);
MilpModel parse_lp(const std::string& text);

} // namespace sfcr
