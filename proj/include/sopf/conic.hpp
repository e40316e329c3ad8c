#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace sopf::conic {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// What a decision variable measures. Names follow the dispatch domain;
/// Aux covers internal variables such as epigraph slots.
enum class Quantity : std::uint8_t {
  DgP,
  DgQ,
  PvP,
  PvQ,
  InjP,
  InjQ,
  FlowP,
  FlowQ,
  CurrentSq,
  VoltSq,
  DgPCopy,
  DgQCopy,
  RedispPUp,
  RedispPDn,
  RedispQUp,
  RedispQDn,
  Aux,
};

const char* quantity_name(Quantity q);

/// Structured variable name: (quantity, entity id, time step, scenario, stage).
/// scenario = -1 for first-stage / scenario-free variables; stage is 1 or 2
/// (0 for variables that belong to neither stage, e.g. epigraph auxiliaries).
struct VarLabel {
  Quantity quantity = Quantity::Aux;
  int entity = 0;
  int t = 0;
  int scenario = -1;
  int stage = 0;

  bool operator==(const VarLabel&) const = default;
};

struct VarLabelHash {
  std::size_t operator()(const VarLabel& l) const noexcept {
    std::size_t h = static_cast<std::size_t>(l.quantity);
    auto mix = [&h](std::size_t v) {
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    mix(static_cast<std::size_t>(l.entity));
    mix(static_cast<std::size_t>(l.t));
    mix(static_cast<std::size_t>(l.scenario + 1));
    mix(static_cast<std::size_t>(l.stage));
    return h;
  }
};

std::string to_string(const VarLabel& label);

struct VariableHandle {
  int index = -1;
  VarLabel label;
};

/// One sparse linear expression a·x (+ constant when used as a cone row).
struct LinearTerm {
  std::vector<int> idx;
  std::vector<double> coef;

  void add(int var, double c) {
    idx.push_back(var);
    coef.push_back(c);
  }
  double eval(std::span<const double> x) const;
};

struct LinearRow {
  LinearTerm lhs;
  double rhs = 0.0;  // a·x = rhs  or  a·x <= rhs
};

/// Second-order cone constraint  ||A·x + b||_2 <= c·x + d.
/// `rows` holds the rows of A with b folded in as per-row constants.
struct SocConstraint {
  std::vector<LinearTerm> rows;
  std::vector<double> row_const;  // b
  LinearTerm edge;                // c
  double edge_const = 0.0;        // d
};

struct Objective {
  std::vector<double> linear;     // per-variable linear coefficient
  std::vector<double> quadratic;  // per-variable coefficient of x^2, >= 0
  double constant = 0.0;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericFailure };

const char* status_name(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::NumericFailure;
  std::vector<double> x;  // present iff status == Optimal
  double objective = 0.0;
  double solve_time = 0.0;
  int iterations = 0;
  std::string message;
};

/// Solver-agnostic convex program: box bounds, linear equalities and
/// inequalities, second-order cones, and a linear + diagonal-quadratic
/// objective. Immutable once frozen; frozen programs are safe to share
/// across threads.
class ConicProgram {
 public:
  VariableHandle add_variable(const VarLabel& label, double lo, double hi);

  void add_linear_eq(LinearTerm lhs, double rhs);
  void add_linear_ineq(LinearTerm lhs, double rhs);
  int add_soc(std::vector<LinearTerm> rows, std::vector<double> row_const,
              LinearTerm edge, double edge_const);

  void add_objective_linear(int var, double coef);
  void add_objective_quadratic(int var, double coef);
  void add_objective_constant(double c);

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  int n_vars() const { return static_cast<int>(lo_.size()); }
  int n_eqs() const { return static_cast<int>(eqs_.size()); }
  int n_ineqs() const { return static_cast<int>(ineqs_.size()); }
  int n_socs() const { return static_cast<int>(socs_.size()); }

  double lower(int var) const { return lo_[var]; }
  double upper(int var) const { return hi_[var]; }
  const VarLabel& label(int var) const { return labels_[var]; }
  const std::vector<LinearRow>& eqs() const { return eqs_; }
  const std::vector<LinearRow>& ineqs() const { return ineqs_; }
  const std::vector<SocConstraint>& socs() const { return socs_; }
  const Objective& objective() const { return obj_; }

  std::optional<VariableHandle> find(const VarLabel& label) const;

  bool has_quadratic_objective() const;
  double eval_objective(std::span<const double> x) const;

  /// ||A·x+b|| - (c·x+d) for one cone; <= 0 means feasible.
  double soc_residual(const Solution& sol, int soc_id) const;
  /// Residual normalized by max(1, c·x+d); the relaxation-tightness metric.
  double soc_relative_residual(std::span<const double> x, int soc_id) const;
  double max_soc_relative_residual(std::span<const double> x) const;

  /// Worst absolute violation over bounds, equalities, inequalities and
  /// cones, recomputed from x.
  double max_constraint_violation(std::span<const double> x) const;

  void dump(std::ostream& os) const;

 private:
  void check_mutable() const;
  void check_term(const LinearTerm& t) const;

  std::vector<double> lo_, hi_;
  std::vector<VarLabel> labels_;
  std::unordered_map<VarLabel, int, VarLabelHash> by_label_;
  std::vector<LinearRow> eqs_, ineqs_;
  std::vector<SocConstraint> socs_;
  Objective obj_;
  bool frozen_ = false;
};

struct BackendCapabilities {
  bool native_quadratic = false;
};

/// Contract every solver backend must satisfy: on feasible bounded input,
/// status Optimal with primal feasibility residual <= 1e-7 and relative
/// duality gap <= 1e-7. A backend instance need not be reentrant, but
/// distinct instances may run concurrently.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual BackendCapabilities capabilities() const = 0;
  virtual std::string name() const = 0;

  /// Solve a frozen program. When capabilities().native_quadratic is false
  /// the caller guarantees a purely linear objective.
  virtual Solution solve(const ConicProgram& program) const = 0;
};

/// Rewrite the diagonal-quadratic objective as a linear objective plus one
/// epigraph variable constrained by a second-order cone.
ConicProgram to_epigraph_form(const ConicProgram& program);

/// Solve through a backend, applying the epigraph reformulation when the
/// backend lacks native quadratic support. The reported objective is always
/// evaluated on the original program.
Solution solve(const ConicProgram& program, const SolverBackend& backend);

}  // namespace sopf::conic
