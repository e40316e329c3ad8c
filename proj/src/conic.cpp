#include "sopf/conic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sopf::conic {

const char* quantity_name(Quantity q) {
  switch (q) {
    case Quantity::DgP: return "dg_p";
    case Quantity::DgQ: return "dg_q";
    case Quantity::PvP: return "pv_p";
    case Quantity::PvQ: return "pv_q";
    case Quantity::InjP: return "inj_p";
    case Quantity::InjQ: return "inj_q";
    case Quantity::FlowP: return "flow_p";
    case Quantity::FlowQ: return "flow_q";
    case Quantity::CurrentSq: return "current_sq";
    case Quantity::VoltSq: return "volt_sq";
    case Quantity::DgPCopy: return "dg_p_copy";
    case Quantity::DgQCopy: return "dg_q_copy";
    case Quantity::RedispPUp: return "redisp_p_up";
    case Quantity::RedispPDn: return "redisp_p_dn";
    case Quantity::RedispQUp: return "redisp_q_up";
    case Quantity::RedispQDn: return "redisp_q_dn";
    case Quantity::Aux: return "aux";
  }
  return "?";
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericFailure: return "numeric-failure";
  }
  return "?";
}

std::string to_string(const VarLabel& l) {
  std::ostringstream os;
  os << quantity_name(l.quantity) << "[e" << l.entity << ",t" << l.t;
  if (l.scenario >= 0) os << ",s" << l.scenario;
  os << ",stage" << l.stage << "]";
  return os.str();
}

double LinearTerm::eval(std::span<const double> x) const {
  double v = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) v += coef[k] * x[idx[k]];
  return v;
}

void ConicProgram::check_mutable() const {
  if (frozen_) throw std::logic_error("conic program is frozen");
}

void ConicProgram::check_term(const LinearTerm& t) const {
  if (t.idx.size() != t.coef.size())
    throw std::invalid_argument("linear term index/coefficient size mismatch");
  for (int i : t.idx)
    if (i < 0 || i >= n_vars())
      throw std::out_of_range("linear term references variable " +
                              std::to_string(i) + " out of " +
                              std::to_string(n_vars()));
}

VariableHandle ConicProgram::add_variable(const VarLabel& label, double lo,
                                          double hi) {
  check_mutable();
  if (lo > hi)
    throw std::invalid_argument("inverted bounds for " + to_string(label));
  int index = n_vars();
  lo_.push_back(lo);
  hi_.push_back(hi);
  labels_.push_back(label);
  obj_.linear.push_back(0.0);
  obj_.quadratic.push_back(0.0);
  by_label_.emplace(label, index);
  return {index, label};
}

void ConicProgram::add_linear_eq(LinearTerm lhs, double rhs) {
  check_mutable();
  check_term(lhs);
  eqs_.push_back({std::move(lhs), rhs});
}

void ConicProgram::add_linear_ineq(LinearTerm lhs, double rhs) {
  check_mutable();
  check_term(lhs);
  ineqs_.push_back({std::move(lhs), rhs});
}

int ConicProgram::add_soc(std::vector<LinearTerm> rows,
                          std::vector<double> row_const, LinearTerm edge,
                          double edge_const) {
  check_mutable();
  if (rows.size() != row_const.size())
    throw std::invalid_argument("soc rows/constants size mismatch");
  for (const auto& r : rows) check_term(r);
  check_term(edge);
  socs_.push_back({std::move(rows), std::move(row_const), std::move(edge),
                   edge_const});
  return n_socs() - 1;
}

void ConicProgram::add_objective_linear(int var, double coef) {
  check_mutable();
  if (var < 0 || var >= n_vars()) throw std::out_of_range("objective variable");
  obj_.linear[var] += coef;
}

void ConicProgram::add_objective_quadratic(int var, double coef) {
  check_mutable();
  if (var < 0 || var >= n_vars()) throw std::out_of_range("objective variable");
  if (coef < 0.0)
    throw std::invalid_argument("negative quadratic coefficient breaks convexity");
  obj_.quadratic[var] += coef;
}

void ConicProgram::add_objective_constant(double c) {
  check_mutable();
  obj_.constant += c;
}

std::optional<VariableHandle> ConicProgram::find(const VarLabel& label) const {
  auto it = by_label_.find(label);
  if (it == by_label_.end()) return std::nullopt;
  return VariableHandle{it->second, label};
}

bool ConicProgram::has_quadratic_objective() const {
  return std::any_of(obj_.quadratic.begin(), obj_.quadratic.end(),
                     [](double q) { return q != 0.0; });
}

double ConicProgram::eval_objective(std::span<const double> x) const {
  double v = obj_.constant;
  for (int i = 0; i < n_vars(); ++i)
    v += obj_.linear[i] * x[i] + obj_.quadratic[i] * x[i] * x[i];
  return v;
}

double ConicProgram::soc_residual(const Solution& sol, int soc_id) const {
  if (sol.status != SolveStatus::Optimal)
    throw std::logic_error("soc_residual requires an optimal solution");
  if (soc_id < 0 || soc_id >= n_socs()) throw std::out_of_range("soc id");
  const SocConstraint& c = socs_[soc_id];
  std::span<const double> x(sol.x);
  double norm_sq = 0.0;
  for (std::size_t r = 0; r < c.rows.size(); ++r) {
    double v = c.rows[r].eval(x) + c.row_const[r];
    norm_sq += v * v;
  }
  return std::sqrt(norm_sq) - (c.edge.eval(x) + c.edge_const);
}

double ConicProgram::soc_relative_residual(std::span<const double> x,
                                           int soc_id) const {
  const SocConstraint& c = socs_[soc_id];
  double norm_sq = 0.0;
  for (std::size_t r = 0; r < c.rows.size(); ++r) {
    double v = c.rows[r].eval(x) + c.row_const[r];
    norm_sq += v * v;
  }
  double edge = c.edge.eval(x) + c.edge_const;
  return (std::sqrt(norm_sq) - edge) / std::max(1.0, std::abs(edge));
}

double ConicProgram::max_soc_relative_residual(std::span<const double> x) const {
  double worst = 0.0;
  for (int i = 0; i < n_socs(); ++i)
    worst = std::max(worst, std::abs(soc_relative_residual(x, i)));
  return worst;
}

double ConicProgram::max_constraint_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (int i = 0; i < n_vars(); ++i) {
    if (std::isfinite(lo_[i])) worst = std::max(worst, lo_[i] - x[i]);
    if (std::isfinite(hi_[i])) worst = std::max(worst, x[i] - hi_[i]);
  }
  for (const auto& row : eqs_)
    worst = std::max(worst, std::abs(row.lhs.eval(x) - row.rhs));
  for (const auto& row : ineqs_)
    worst = std::max(worst, row.lhs.eval(x) - row.rhs);
  for (int i = 0; i < n_socs(); ++i) {
    const SocConstraint& c = socs_[i];
    double norm_sq = 0.0;
    for (std::size_t r = 0; r < c.rows.size(); ++r) {
      double v = c.rows[r].eval(x) + c.row_const[r];
      norm_sq += v * v;
    }
    worst = std::max(worst, std::sqrt(norm_sq) - (c.edge.eval(x) + c.edge_const));
  }
  return worst;
}

namespace {
void dump_term(std::ostream& os, const LinearTerm& t, double cst) {
  bool first = true;
  for (std::size_t k = 0; k < t.idx.size(); ++k) {
    if (!first) os << " + ";
    os << t.coef[k] << "*x" << t.idx[k];
    first = false;
  }
  if (cst != 0.0 || first) {
    if (!first) os << " + ";
    os << cst;
  }
}
}  // namespace

void ConicProgram::dump(std::ostream& os) const {
  os << "vars " << n_vars() << "\n";
  for (int i = 0; i < n_vars(); ++i)
    os << "  x" << i << " in [" << lo_[i] << ", " << hi_[i] << "]  "
       << to_string(labels_[i]) << "\n";
  os << "minimize ";
  bool first = true;
  for (int i = 0; i < n_vars(); ++i) {
    if (obj_.quadratic[i] != 0.0) {
      os << (first ? "" : " + ") << obj_.quadratic[i] << "*x" << i << "^2";
      first = false;
    }
    if (obj_.linear[i] != 0.0) {
      os << (first ? "" : " + ") << obj_.linear[i] << "*x" << i;
      first = false;
    }
  }
  if (obj_.constant != 0.0 || first) os << (first ? "" : " + ") << obj_.constant;
  os << "\n";
  for (const auto& row : eqs_) {
    os << "eq: ";
    dump_term(os, row.lhs, 0.0);
    os << " = " << row.rhs << "\n";
  }
  for (const auto& row : ineqs_) {
    os << "le: ";
    dump_term(os, row.lhs, 0.0);
    os << " <= " << row.rhs << "\n";
  }
  for (const auto& c : socs_) {
    os << "soc: ||";
    for (std::size_t r = 0; r < c.rows.size(); ++r) {
      if (r) os << "; ";
      dump_term(os, c.rows[r], c.row_const[r]);
    }
    os << "|| <= ";
    dump_term(os, c.edge, c.edge_const);
    os << "\n";
  }
}

ConicProgram to_epigraph_form(const ConicProgram& p) {
  ConicProgram out;
  for (int i = 0; i < p.n_vars(); ++i)
    out.add_variable(p.label(i), p.lower(i), p.upper(i));
  for (const auto& row : p.eqs()) out.add_linear_eq(row.lhs, row.rhs);
  for (const auto& row : p.ineqs()) out.add_linear_ineq(row.lhs, row.rhs);
  for (const auto& c : p.socs())
    out.add_soc(c.rows, c.row_const, c.edge, c.edge_const);

  const Objective& obj = p.objective();
  for (int i = 0; i < p.n_vars(); ++i)
    if (obj.linear[i] != 0.0) out.add_objective_linear(i, obj.linear[i]);
  out.add_objective_constant(obj.constant);

  if (p.has_quadratic_objective()) {
    // sum_i q_i x_i^2 <= u  as  ||(2 sqrt(q_i) x_i ..., u - 1)|| <= u + 1
    VariableHandle u = out.add_variable({Quantity::Aux, 0, 0, -1, 0}, 0.0, kInf);
    std::vector<LinearTerm> rows;
    std::vector<double> consts;
    for (int i = 0; i < p.n_vars(); ++i) {
      if (obj.quadratic[i] == 0.0) continue;
      LinearTerm r;
      r.add(i, 2.0 * std::sqrt(obj.quadratic[i]));
      rows.push_back(std::move(r));
      consts.push_back(0.0);
    }
    LinearTerm u_minus;
    u_minus.add(u.index, 1.0);
    rows.push_back(std::move(u_minus));
    consts.push_back(-1.0);
    LinearTerm edge;
    edge.add(u.index, 1.0);
    out.add_soc(std::move(rows), std::move(consts), std::move(edge), 1.0);
    out.add_objective_linear(u.index, 1.0);
  }
  out.freeze();
  return out;
}

Solution solve(const ConicProgram& program, const SolverBackend& backend) {
  if (!program.frozen())
    throw std::logic_error("solve requires a frozen program");
  if (program.has_quadratic_objective() &&
      !backend.capabilities().native_quadratic) {
    ConicProgram epi = to_epigraph_form(program);
    Solution sol = backend.solve(epi);
    if (sol.status == SolveStatus::Optimal) {
      sol.x.resize(program.n_vars());
      sol.objective = program.eval_objective(sol.x);
    }
    return sol;
  }
  return backend.solve(program);
}

}  // namespace sopf::conic
