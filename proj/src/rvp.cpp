#include "purelax/rvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "purelax/errors.hpp"

namespace purelax {

void RvpInstance::validate(double density_tol) const {
  base.validate();
  if (base.n != budgets.size() + 1)
    throw DimensionMismatch("integrand must stack utility and " + std::to_string(budgets.size()) +
                            " costs (n = m + 1)");
  for (double a : budgets)
    if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("budgets must be positive and finite");
  const auto report = validate_densities(base.space, densities, density_tol);
  if (!report.ok) throw InvalidDensity(report.failures.front());
  for (std::size_t i = 0; i < base.num_cells(); ++i) {
    const Matrix& g = base.g[i];
    for (std::size_t a = 0; a < g.rows(); ++a) {
      for (std::size_t k = 1; k < base.n; ++k)
        if (g(a, k) < 0.0) throw ValidationError("cell " + std::to_string(i) + ": negative cost");
      if (utility_bound && std::abs(g(a, 0)) > *utility_bound)
        throw ValidationError("cell " + std::to_string(i) + ": |u| exceeds the utility bound");
    }
  }
}

namespace {

Evaluation evaluate_moments(const RvpInstance& inst, const Matrix& moments, std::size_t param) {
  if (param >= inst.num_params()) throw UnknownParameter("parameter index " + std::to_string(param) + " out of range");
  Evaluation e;
  e.costs.assign(inst.num_costs(), 0.0);
  for (std::size_t i = 0; i < inst.base.num_cells(); ++i) {
    const double scale = inst.base.space.cells[i].weight * inst.densities.values(i, param);
    if (scale == 0.0) continue;
    e.objective += scale * moments(i, 0);
    for (std::size_t k = 0; k < inst.num_costs(); ++k) e.costs[k] += scale * moments(i, k + 1);
  }
  return e;
}

}  // namespace

Evaluation evaluate(const RvpInstance& inst, const RandomizedDecision& phi, std::size_t param) {
  validate_decision(inst.base, phi);
  return evaluate_moments(inst, moment(inst.base, phi), param);
}

Evaluation evaluate(const RvpInstance& inst, const PureDecision& f, std::size_t param) {
  validate_decision(inst.base, f);
  return evaluate_moments(inst, moment_pure(inst.base, f), param);
}

Evaluation evaluate(const RvpInstance& inst, const RandomizedDecision& phi, const std::string& param) {
  return evaluate(inst, phi, inst.densities.param_index(param));
}

lp::LinearProgram build_crvp(const RvpInstance& inst) { return build_crvp(inst, inst.budgets); }

lp::LinearProgram build_crvp(const RvpInstance& inst, const Vector& budgets) {
  const auto& base = inst.base;
  const std::size_t np = inst.num_params();
  const std::size_t m = inst.num_costs();
  lp::LinearProgram lp;
  lp.sense = lp::Sense::Maximize;

  std::vector<lp::Constraint> objective_rows(np), cost_rows(m * np), cell_rows(base.num_cells());
  for (std::size_t p = 0; p < np; ++p) objective_rows[p].relation = lp::Relation::GreaterEqual;
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t p = 0; p < np; ++p) {
      cost_rows[k * np + p].relation = lp::Relation::LessEqual;
      cost_rows[k * np + p].rhs = budgets.at(k);
    }

  for (std::size_t i = 0; i < base.num_cells(); ++i) {
    cell_rows[i].relation = lp::Relation::Equal;
    cell_rows[i].rhs = 1.0;
    const double w = base.space.cells[i].weight;
    for (std::size_t a = 0; a < base.num_actions(i); ++a) {
      const std::size_t var = lp.add_variable(0.0, {0.0, lp::kInfinity});
      cell_rows[i].terms.push_back({var, 1.0});
      const auto g = base.point(i, a);
      for (std::size_t p = 0; p < np; ++p) {
        const double scale = w * inst.densities.values(i, p);
        if (scale == 0.0) continue;
        if (g[0] != 0.0) objective_rows[p].terms.push_back({var, scale * g[0]});
        for (std::size_t k = 0; k < m; ++k)
          if (g[k + 1] != 0.0) cost_rows[k * np + p].terms.push_back({var, scale * g[k + 1]});
      }
    }
  }
  const std::size_t t = lp.add_variable(1.0, {-lp::kInfinity, lp::kInfinity});
  for (auto& row : objective_rows) row.terms.push_back({t, -1.0});

  for (auto& r : objective_rows) lp.add_constraint(std::move(r));
  for (auto& r : cost_rows) lp.add_constraint(std::move(r));
  for (auto& r : cell_rows) lp.add_constraint(std::move(r));
  return lp;
}

const char* to_string(CrvpMethod m) noexcept {
  switch (m) {
    case CrvpMethod::Auto: return "auto";
    case CrvpMethod::Direct: return "direct";
    case CrvpMethod::ColumnGeneration: return "column-generation";
  }
  return "?";
}

namespace {

double worst_objective(const RvpInstance& inst, const RandomizedDecision& phi) {
  const Matrix mom = moment(inst.base, phi);
  double v = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < inst.num_params(); ++p) v = std::min(v, evaluate_moments(inst, mom, p).objective);
  return v;
}

void normalize(RandomizedDecision& phi) {
  for (auto& probs : phi.probabilities) {
    double total = 0.0;
    for (double& v : probs) {
      v = std::max(v, 0.0);
      total += v;
    }
    for (double& v : probs) v /= total;
  }
}

CrvpSolution solve_direct(const RvpInstance& inst, const Vector& budgets) {
  const auto lp = build_crvp(inst, budgets);
  const auto sol = lp::solve(lp);
  if (sol.status == lp::Status::Infeasible)
    throw InfeasibleConstraints("no randomized decision meets every budget");
  if (sol.status == lp::Status::Unbounded) throw UnboundedProblem("relaxed problem is unbounded");

  CrvpSolution out;
  out.method = CrvpMethod::Direct;
  out.iterations = sol.iterations;
  out.optimality_gap = std::max(0.0, sol.duality_gap);
  std::size_t var = 0;
  for (std::size_t i = 0; i < inst.base.num_cells(); ++i) {
    Vector probs(inst.base.num_actions(i));
    for (double& v : probs) v = sol.values[var++];
    out.phi.probabilities.push_back(std::move(probs));
  }
  normalize(out.phi);
  out.value = worst_objective(inst, out.phi);
  return out;
}

/// Dantzig-Wolfe decomposition over the product of per-cell simplices: its
/// extreme points are the pure decisions, so the master keeps only the
/// parameter rows, the budget rows and a single convexity row.
class ColumnGeneration {
 public:
  ColumnGeneration(const RvpInstance& inst, const Vector& budgets, const CrvpOptions& options)
      : inst_(inst), budgets_(budgets), options_(options), np_(inst.num_params()), m_(inst.num_costs()) {}

  CrvpSolution run() {
    seed_columns();
    if (m_ > 0) phase_one();
    return phase_two();
  }

 private:
  struct Column {
    PureDecision f;
    Vector objective;  // per parameter
    Vector costs;      // cost-major, per (k, p)
  };

  Column make_column(PureDecision f) const {
    Column c;
    c.objective.assign(np_, 0.0);
    c.costs.assign(m_ * np_, 0.0);
    for (std::size_t i = 0; i < inst_.base.num_cells(); ++i) {
      const auto g = inst_.base.point(i, f.choice[i]);
      for (std::size_t p = 0; p < np_; ++p) {
        const double scale = inst_.base.space.cells[i].weight * inst_.densities.values(i, p);
        c.objective[p] += scale * g[0];
        for (std::size_t k = 0; k < m_; ++k) c.costs[k * np_ + p] += scale * g[k + 1];
      }
    }
    c.f = std::move(f);
    return c;
  }

  /// Pure decision minimising sum_p wo[p] objective_p + sum wc[k,p] cost_{k,p}.
  std::pair<PureDecision, double> price(const Vector& wo, const Vector& wc) const {
    PureDecision f;
    f.choice.resize(inst_.base.num_cells());
    double total = 0.0;
    for (std::size_t i = 0; i < inst_.base.num_cells(); ++i) {
      const double w = inst_.base.space.cells[i].weight;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < inst_.base.num_actions(i); ++a) {
        const auto g = inst_.base.point(i, a);
        double score = 0.0;
        for (std::size_t p = 0; p < np_; ++p) {
          const double rho = inst_.densities.values(i, p);
          if (rho == 0.0) continue;
          double s = wo[p] * g[0];
          for (std::size_t k = 0; k < m_; ++k) s += wc[k * np_ + p] * g[k + 1];
          score += w * rho * s;
        }
        if (score < best) {
          best = score;
          f.choice[i] = a;
        }
      }
      total += best;
    }
    return {std::move(f), total};
  }

  bool add_column(PureDecision f) {
    for (const auto& c : columns_)
      if (c.f == f) return false;
    if (columns_.size() >= options_.max_columns) throw IterationLimit("column generation exceeded its column budget");
    columns_.push_back(make_column(std::move(f)));
    return true;
  }

  void seed_columns() {
    Vector wo(np_, -1.0), wc(m_ * np_, 0.0);
    add_column(price(wo, wc).first);  // best worst-case utility proxy
    if (m_ > 0) {
      Vector zero(np_, 0.0), cheap(m_ * np_);
      for (std::size_t k = 0; k < m_; ++k)
        for (std::size_t p = 0; p < np_; ++p) cheap[k * np_ + p] = 1.0 / budgets_[k];
      add_column(price(zero, cheap).first);  // cheapest decision
    }
  }

  double scale() const {
    double s = 1.0;
    for (const auto& c : columns_) s = std::max({s, max_abs(c.objective), max_abs(c.costs)});
    return s;
  }

  void phase_one() {
    // min sum of budget overruns s_{k,p}
    for (std::size_t round = 0;; ++round) {
      lp::LinearProgram master;
      master.sense = lp::Sense::Minimize;
      std::vector<lp::Constraint> rows(m_ * np_);
      lp::Constraint convexity;
      convexity.relation = lp::Relation::Equal;
      convexity.rhs = 1.0;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        rows[r].relation = lp::Relation::LessEqual;
        rows[r].rhs = budgets_[r / np_];
      }
      for (const auto& c : columns_) {
        const std::size_t var = master.add_variable(0.0);
        for (std::size_t r = 0; r < rows.size(); ++r)
          if (c.costs[r] != 0.0) rows[r].terms.push_back({var, c.costs[r]});
        convexity.terms.push_back({var, 1.0});
      }
      for (std::size_t r = 0; r < rows.size(); ++r) rows[r].terms.push_back({master.add_variable(1.0), -1.0});
      for (auto& r : rows) master.add_constraint(std::move(r));
      master.add_constraint(std::move(convexity));

      const auto sol = lp::solve(master);
      iterations_ += sol.iterations;
      if (sol.status != lp::Status::Optimal) throw SolverFailure("phase-one master failed");
      const double tol = 1e-9 * scale();
      if (sol.objective_value <= tol) return;

      // improving column iff duals . a > 0 (minimisation, zero cost)
      Vector wc(m_ * np_);
      for (std::size_t r = 0; r < wc.size(); ++r) wc[r] = -sol.duals[r];
      auto [f, score] = price(Vector(np_, 0.0), wc);
      const double reduced = -score + sol.duals.back();
      if (reduced <= tol || !add_column(std::move(f)))
        throw InfeasibleConstraints("no randomized decision meets every budget (minimal overrun " +
                                    std::to_string(sol.objective_value) + ")");
    }
  }

  CrvpSolution phase_two() {
    for (;;) {
      lp::LinearProgram master;
      master.sense = lp::Sense::Maximize;
      std::vector<lp::Constraint> obj_rows(np_), cost_rows(m_ * np_);
      lp::Constraint convexity;
      convexity.relation = lp::Relation::Equal;
      convexity.rhs = 1.0;
      for (auto& r : obj_rows) r.relation = lp::Relation::GreaterEqual;
      for (std::size_t r = 0; r < cost_rows.size(); ++r) {
        cost_rows[r].relation = lp::Relation::LessEqual;
        cost_rows[r].rhs = budgets_[r / np_];
      }
      for (const auto& c : columns_) {
        const std::size_t var = master.add_variable(0.0);
        for (std::size_t p = 0; p < np_; ++p)
          if (c.objective[p] != 0.0) obj_rows[p].terms.push_back({var, c.objective[p]});
        for (std::size_t r = 0; r < cost_rows.size(); ++r)
          if (c.costs[r] != 0.0) cost_rows[r].terms.push_back({var, c.costs[r]});
        convexity.terms.push_back({var, 1.0});
      }
      const std::size_t t = master.add_variable(1.0, {-lp::kInfinity, lp::kInfinity});
      for (auto& r : obj_rows) r.terms.push_back({t, -1.0});
      for (auto& r : obj_rows) master.add_constraint(std::move(r));
      for (auto& r : cost_rows) master.add_constraint(std::move(r));
      master.add_constraint(std::move(convexity));

      const auto sol = lp::solve(master);
      iterations_ += sol.iterations;
      if (sol.status == lp::Status::Infeasible) throw InfeasibleConstraints("no randomized decision meets every budget");
      if (sol.status == lp::Status::Unbounded) throw UnboundedProblem("relaxed problem is unbounded");

      // improving column iff duals . a < 0 (maximisation, zero cost)
      Vector wo(sol.duals.begin(), sol.duals.begin() + static_cast<std::ptrdiff_t>(np_));
      Vector wc(sol.duals.begin() + static_cast<std::ptrdiff_t>(np_),
                sol.duals.begin() + static_cast<std::ptrdiff_t>(np_ + m_ * np_));
      auto [f, score] = price(wo, wc);
      const double reduced = score + sol.duals.back();
      const double tol = 1e-10 * scale();
      if (reduced >= -tol || !add_column(std::move(f))) return extract(sol, std::max(0.0, -reduced));
    }
  }

  CrvpSolution extract(const lp::BasicSolution& sol, double gap) const {
    CrvpSolution out;
    out.method = CrvpMethod::ColumnGeneration;
    out.iterations = iterations_;
    out.optimality_gap = gap;
    for (std::size_t i = 0; i < inst_.base.num_cells(); ++i)
      out.phi.probabilities.emplace_back(inst_.base.num_actions(i), 0.0);
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      const double theta = sol.values[c];
      if (theta <= 0.0) continue;
      for (std::size_t i = 0; i < inst_.base.num_cells(); ++i) out.phi.probabilities[i][columns_[c].f.choice[i]] += theta;
    }
    normalize(out.phi);
    out.value = worst_objective(inst_, out.phi);
    return out;
  }

  const RvpInstance& inst_;
  const Vector& budgets_;
  CrvpOptions options_;
  std::size_t np_, m_;
  std::vector<Column> columns_;
  std::size_t iterations_ = 0;
};

}  // namespace

CrvpSolution solve_crvp(const RvpInstance& inst, const CrvpOptions& options) {
  return solve_crvp(inst, inst.budgets, options);
}

CrvpSolution solve_crvp(const RvpInstance& inst, const Vector& budgets, const CrvpOptions& options) {
  if (budgets.size() != inst.num_costs()) throw DimensionMismatch("one budget per cost expected");
  CrvpMethod method = options.method;
  if (method == CrvpMethod::Auto) {
    const std::size_t rows = inst.num_params() * (1 + inst.num_costs()) + inst.base.num_cells();
    method = rows <= options.direct_row_limit ? CrvpMethod::Direct : CrvpMethod::ColumnGeneration;
  }
  if (method == CrvpMethod::Direct) return solve_direct(inst, budgets);
  return ColumnGeneration(inst, budgets, options).run();
}

bool RvpSolution::chain_verified() const {
  return std::all_of(audit.begin(), audit.end(), [](const ParamAudit& a) { return a.within_epsilon; });
}

bool RvpSolution::feasible_within_epsilon(const Vector& budgets, double tol) const {
  if (pure_value < relaxed_value - epsilon - tol) return false;
  for (std::size_t k = 0; k < budgets.size(); ++k)
    if (constraint_values[k] > budgets[k] + epsilon + tol) return false;
  return true;
}

namespace {

RvpSolution purify_relaxed(const RvpInstance& inst, const CrvpSolution& crvp, const BlockPartition& blocks) {
  const std::size_t np = inst.num_params();
  const std::size_t m = inst.num_costs();
  RvpSolution out;
  out.relaxed = crvp.phi;
  out.method = crvp.method;
  out.crvp_gap = crvp.optimality_gap;
  out.blocks = blocks;

  auto purified = purify(inst.base, crvp.phi, blocks);
  out.pure = std::move(purified.f);
  out.report = std::move(purified.report);

  // epsilon = max rho * (sum of block mass bounds) + within-block density
  // variation * sum_w spread; the second term vanishes for block-constant rho.
  double max_rho = 0.0;
  double variation = 0.0;
  double spread_mass = 0.0;
  for (const auto& block : blocks) {
    for (std::size_t p = 0; p < np; ++p) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (std::size_t id : block) {
        lo = std::min(lo, inst.densities.values(id, p));
        hi = std::max(hi, inst.densities.values(id, p));
      }
      max_rho = std::max(max_rho, hi);
      variation = std::max(variation, hi - lo);
    }
  }
  for (std::size_t i = 0; i < inst.base.num_cells(); ++i)
    spread_mass += inst.base.space.cells[i].weight * out.report.cell_spread[i];
  out.epsilon = max_rho * out.report.global_bound + variation * spread_mass;

  const Matrix mixed = moment(inst.base, out.relaxed);
  const Matrix pure = moment_pure(inst.base, out.pure);
  out.relaxed_value = std::numeric_limits<double>::infinity();
  out.pure_value = std::numeric_limits<double>::infinity();
  out.constraint_values.assign(m, -std::numeric_limits<double>::infinity());
  out.relaxed_constraint_values.assign(m, -std::numeric_limits<double>::infinity());
  out.worst_constraint_params.assign(m, 0);
  const double slack = out.report.slack * std::max(1.0, max_rho);
  for (std::size_t p = 0; p < np; ++p) {
    ParamAudit a;
    a.param = p;
    a.relaxed = evaluate_moments(inst, mixed, p);
    a.pure = evaluate_moments(inst, pure, p);
    Vector chain(inst.base.n, 0.0);
    for (std::size_t i = 0; i < inst.base.num_cells(); ++i) {
      const double scale = inst.base.space.cells[i].weight * inst.densities.values(i, p);
      for (std::size_t k = 0; k < inst.base.n; ++k) chain[k] += scale * (mixed(i, k) - pure(i, k));
    }
    a.chain_residual = max_abs(chain);
    a.within_epsilon = a.chain_residual <= out.epsilon + slack;

    out.relaxed_value = std::min(out.relaxed_value, a.relaxed.objective);
    if (a.pure.objective < out.pure_value) {
      out.pure_value = a.pure.objective;
      out.worst_objective_param = p;
    }
    for (std::size_t k = 0; k < m; ++k) {
      out.relaxed_constraint_values[k] = std::max(out.relaxed_constraint_values[k], a.relaxed.costs[k]);
      if (a.pure.costs[k] > out.constraint_values[k]) {
        out.constraint_values[k] = a.pure.costs[k];
        out.worst_constraint_params[k] = p;
      }
    }
    out.audit.push_back(std::move(a));
  }
  return out;
}

}  // namespace

RvpSolution solve_rvp(const RvpInstance& inst, const RvpOptions& options) {
  inst.validate(options.density_tol);
  const BlockPartition blocks = blocks_from_densities(inst.base.space, inst.densities, options.group_tol);

  Vector budgets = inst.budgets;
  RvpSolution out = purify_relaxed(inst, solve_crvp(inst, budgets, options.crvp), blocks);
  out.solved_budgets = budgets;
  if (!options.strict) return out;

  // Tighten by the largest observed overrun until the pure decision complies.
  for (int attempt = 0; attempt < 16; ++attempt) {
    double overrun = 0.0;
    for (std::size_t k = 0; k < inst.num_costs(); ++k)
      overrun = std::max(overrun, out.constraint_values[k] - inst.budgets[k]);
    if (overrun <= 0.0) return out;
    const double shrink = std::max(overrun, out.epsilon) * (attempt + 1);
    for (std::size_t k = 0; k < inst.num_costs(); ++k) {
      budgets[k] = std::min(budgets[k], inst.budgets[k] - shrink);
      if (!(budgets[k] > 0.0)) throw InfeasibleConstraints("strict mode: tightened budget is no longer positive");
    }
    out = purify_relaxed(inst, solve_crvp(inst, budgets, options.crvp), blocks);
    out.solved_budgets = budgets;
  }
  throw InfeasibleConstraints("strict mode could not certify the budgets");
}

BruteForceResult brute_force_rvp(const RvpInstance& inst, std::size_t limit) {
  const auto& base = inst.base;
  double count = 1.0;
  for (std::size_t i = 0; i < base.num_cells(); ++i) count *= static_cast<double>(base.num_actions(i));
  if (count > static_cast<double>(limit))
    throw TooLarge("brute force would visit " + std::to_string(count) + " pure decisions");

  BruteForceResult out;
  out.value = -std::numeric_limits<double>::infinity();
  PureDecision f;
  f.choice.assign(base.num_cells(), 0);
  for (;;) {
    ++out.visited;
    const Matrix mom = moment_pure(base, f);
    double worst = std::numeric_limits<double>::infinity();
    bool feasible = true;
    for (std::size_t p = 0; p < inst.num_params() && feasible; ++p) {
      const auto e = evaluate_moments(inst, mom, p);
      worst = std::min(worst, e.objective);
      for (std::size_t k = 0; k < inst.num_costs(); ++k)
        if (e.costs[k] > inst.budgets[k] * (1.0 + 1e-12) + 1e-12) feasible = false;
    }
    if (feasible && worst > out.value) {
      out.value = worst;
      out.best = f;
    }
    std::size_t i = 0;
    while (i < base.num_cells() && ++f.choice[i] == base.num_actions(i)) f.choice[i++] = 0;
    if (i == base.num_cells()) break;
  }
  return out;
}

RvpInstance split_instance(const RvpInstance& inst, std::size_t copies) {
  RvpInstance out;
  out.base = split_instance(inst.base, copies);
  out.budgets = inst.budgets;
  out.utility_bound = inst.utility_bound;
  out.densities.params = inst.densities.params;
  out.densities.values = Matrix(inst.base.num_cells() * copies, inst.num_params());
  for (std::size_t i = 0; i < inst.base.num_cells(); ++i)
    for (std::size_t c = 0; c < copies; ++c)
      for (std::size_t p = 0; p < inst.num_params(); ++p)
        out.densities.values(i * copies + c, p) = inst.densities.values(i, p);
  return out;
}

}  // namespace purelax
