#include "purelax/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "purelax/errors.hpp"

namespace purelax::lp {

Constraint Constraint::dense(std::span<const double> coefficients, Relation relation, double rhs) {
  Constraint c;
  c.relation = relation;
  c.rhs = rhs;
  for (std::size_t j = 0; j < coefficients.size(); ++j)
    if (coefficients[j] != 0.0) c.terms.push_back({j, coefficients[j]});
  return c;
}

double Constraint::activity(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& t : terms) s += t.coef * x[t.var];
  return s;
}

std::size_t LinearProgram::add_variable(double cost, Bounds b) {
  objective.push_back(cost);
  bounds.push_back(b);
  return objective.size() - 1;
}

void LinearProgram::validate() const {
  const std::size_t v = num_variables();
  if (bounds.size() != v) throw DimensionMismatch("bounds size differs from variable count");
  for (std::size_t j = 0; j < v; ++j) {
    if (std::isnan(objective[j])) throw ValidationError("NaN objective coefficient");
    if (std::isnan(bounds[j].lo) || std::isnan(bounds[j].hi) || bounds[j].lo > bounds[j].hi)
      throw ValidationError("variable " + std::to_string(j) + " has lo > hi");
    if (bounds[j].lo == kInfinity || bounds[j].hi == -kInfinity)
      throw ValidationError("variable " + std::to_string(j) + " has an empty domain");
  }
  for (std::size_t r = 0; r < constraints.size(); ++r) {
    const auto& c = constraints[r];
    if (!std::isfinite(c.rhs)) throw ValidationError("row " + std::to_string(r) + " has a non-finite rhs");
    for (const auto& t : c.terms) {
      if (t.var >= v) throw DimensionMismatch("row " + std::to_string(r) + " references variable out of range");
      if (!std::isfinite(t.coef)) throw ValidationError("row " + std::to_string(r) + " has a non-finite coefficient");
    }
  }
}

double LinearProgram::evaluate(std::span<const double> x) const { return dot(objective, x); }

double LinearProgram::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < num_variables(); ++j) {
    worst = std::max(worst, bounds[j].lo - x[j]);
    worst = std::max(worst, x[j] - bounds[j].hi);
  }
  for (const auto& c : constraints) {
    const double a = c.activity(x);
    switch (c.relation) {
      case Relation::LessEqual: worst = std::max(worst, a - c.rhs); break;
      case Relation::GreaterEqual: worst = std::max(worst, c.rhs - a); break;
      case Relation::Equal: worst = std::max(worst, std::abs(a - c.rhs)); break;
    }
  }
  return worst;
}

const char* to_string(Status s) noexcept {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "?";
}

std::size_t count_between_bounds(const LinearProgram& lp, std::span<const double> x, double tol) {
  std::size_t count = 0;
  for (std::size_t j = 0; j < lp.num_variables(); ++j)
    if (x[j] > lp.bounds[j].lo + tol && x[j] < lp.bounds[j].hi - tol) ++count;
  return count;
}

std::string to_text(const LinearProgram& lp) {
  std::ostringstream os;
  os.precision(17);
  os << (lp.sense == Sense::Maximize ? "max" : "min");
  for (std::size_t j = 0; j < lp.num_variables(); ++j)
    if (lp.objective[j] != 0.0) os << ' ' << lp.objective[j] << "*x" << j;
  os << '\n';
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    const auto& c = lp.constraints[r];
    os << "r" << r << ':';
    for (const auto& t : c.terms) os << ' ' << t.coef << "*x" << t.var;
    os << (c.relation == Relation::LessEqual ? " <= " : c.relation == Relation::Equal ? " = " : " >= ") << c.rhs
       << '\n';
  }
  for (std::size_t j = 0; j < lp.num_variables(); ++j)
    os << "x" << j << " in [" << lp.bounds[j].lo << ", " << lp.bounds[j].hi << "]\n";
  return os.str();
}

namespace {

using SparseColumn = std::vector<std::pair<std::size_t, double>>;

/// Standard form A x = b with bounds: structural columns first, then one
/// slack per inequality row (+1 for <=, -1 for >=).
struct StandardForm {
  std::size_t rows = 0;
  std::size_t structural = 0;
  std::vector<SparseColumn> columns;
  Vector lo, hi, cost, b;

  explicit StandardForm(const LinearProgram& lp) : rows(lp.num_rows()), structural(lp.num_variables()) {
    columns.resize(structural);
    for (std::size_t r = 0; r < rows; ++r) {
      const auto& c = lp.constraints[r];
      for (const auto& t : c.terms) columns[t.var].emplace_back(r, t.coef);
    }
    for (auto& col : columns) {
      // merge duplicate (row, var) terms
      std::stable_sort(col.begin(), col.end(), [](auto& a, auto& b) { return a.first < b.first; });
      SparseColumn merged;
      for (const auto& e : col) {
        if (!merged.empty() && merged.back().first == e.first) merged.back().second += e.second;
        else merged.push_back(e);
      }
      col = std::move(merged);
    }
    const double sign = lp.sense == Sense::Maximize ? -1.0 : 1.0;
    for (std::size_t j = 0; j < structural; ++j) {
      lo.push_back(lp.bounds[j].lo);
      hi.push_back(lp.bounds[j].hi);
      cost.push_back(sign * lp.objective[j]);
    }
    for (std::size_t r = 0; r < rows; ++r) {
      const auto& c = lp.constraints[r];
      b.push_back(c.rhs);
      if (c.relation == Relation::Equal) continue;
      columns.push_back({{r, c.relation == Relation::LessEqual ? 1.0 : -1.0}});
      lo.push_back(0.0);
      hi.push_back(kInfinity);
      cost.push_back(0.0);
    }
  }

  std::size_t size() const noexcept { return columns.size(); }
};

double nonbasic_start(double lo, double hi) {
  if (std::isfinite(lo)) return lo;
  if (std::isfinite(hi)) return hi;
  return 0.0;
}

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SolverOptions& options)
      : lp_(lp), opt_(options), form_(lp), m_(form_.rows) {
    // Artificial columns, one per row; sign chosen so the start is feasible.
    x_.resize(form_.size());
    for (std::size_t j = 0; j < form_.size(); ++j) x_[j] = nonbasic_start(form_.lo[j], form_.hi[j]);
    Vector residual = form_.b;
    for (std::size_t j = 0; j < form_.size(); ++j)
      for (const auto& [r, v] : form_.columns[j]) residual[r] -= v * x_[j];
    first_artificial_ = form_.size();
    basis_.resize(m_);
    binv_ = Matrix(m_, m_);
    for (std::size_t r = 0; r < m_; ++r) {
      const double s = residual[r] >= 0.0 ? 1.0 : -1.0;
      form_.columns.push_back({{r, s}});
      form_.lo.push_back(0.0);
      form_.hi.push_back(kInfinity);
      form_.cost.push_back(0.0);
      x_.push_back(std::abs(residual[r]));
      basis_[r] = first_artificial_ + r;
      binv_(r, r) = s;
    }
    position_.assign(form_.size(), npos);
    for (std::size_t r = 0; r < m_; ++r) position_[basis_[r]] = r;
    const std::size_t total = form_.size() + m_;
    limit_ = opt_.max_iterations ? opt_.max_iterations : 50 * total + 1000;
    bland_after_ = 2 * (lp.num_variables() + m_);
    b_scale_ = std::max(1.0, max_abs(form_.b));
  }

  BasicSolution run(bool phase_one_only) {
    // Phase one: minimise the sum of artificials.
    Vector phase_one(form_.size(), 0.0);
    for (std::size_t r = 0; r < m_; ++r) phase_one[first_artificial_ + r] = 1.0;
    cost_ = phase_one;
    if (iterate() == Status::Unbounded) throw SolverFailure("phase one reported an unbounded ray");
    double infeasibility = 0.0;
    for (std::size_t r = 0; r < m_; ++r) infeasibility += x_[first_artificial_ + r];
    if (infeasibility > opt_.feasibility_tol * b_scale_) return finish(Status::Infeasible);

    for (std::size_t r = 0; r < m_; ++r) form_.hi[first_artificial_ + r] = 0.0;
    drive_out_artificials();
    if (phase_one_only) {
      phase_one_only_ = true;
      return finish(Status::Optimal);
    }

    cost_ = form_.cost;
    Status status = Status::Optimal;
    for (int attempt = 0; attempt < 3; ++attempt) {
      status = iterate();
      if (status != Status::Optimal) break;
      refactor();
      if (primal_violation() <= opt_.feasibility_tol * b_scale_ && !has_eligible()) break;
    }
    return finish(status);
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  static constexpr double kPivotTol = 1e-9;

  bool is_basic(std::size_t j) const { return position_[j] != npos; }

  Vector duals() const {
    Vector y(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double c = cost_[basis_[i]];
      if (c == 0.0) continue;
      for (std::size_t r = 0; r < m_; ++r) y[r] += c * binv_(i, r);
    }
    return y;
  }

  double reduced_cost(std::size_t j, const Vector& y) const {
    double d = cost_[j];
    for (const auto& [r, v] : form_.columns[j]) d -= y[r] * v;
    return d;
  }

  /// +1 to increase, -1 to decrease, 0 when not eligible.
  int direction(std::size_t j, double d, double tol) const {
    if (is_basic(j) || form_.lo[j] == form_.hi[j]) return 0;
    const bool at_lo = std::isfinite(form_.lo[j]) && x_[j] <= form_.lo[j];
    const bool at_hi = std::isfinite(form_.hi[j]) && x_[j] >= form_.hi[j];
    if (d < -tol && !at_hi) return +1;
    if (d > tol && !at_lo) return -1;
    return 0;
  }

  double optimality_tol() const { return opt_.optimality_tol * std::max(1.0, max_abs(cost_)); }

  bool has_eligible() const {
    const Vector y = duals();
    const double tol = optimality_tol();
    for (std::size_t j = 0; j < form_.size(); ++j)
      if (direction(j, reduced_cost(j, y), tol) != 0) return true;
    return false;
  }

  Vector column_image(std::size_t q) const {
    Vector alpha(m_, 0.0);
    for (const auto& [r, v] : form_.columns[q])
      for (std::size_t i = 0; i < m_; ++i) alpha[i] += binv_(i, r) * v;
    return alpha;
  }

  Status iterate() {
    std::size_t since_refactor = 0;
    std::size_t phase_iterations = 0;
    for (;;) {
      if (since_refactor >= opt_.refactor_interval) {
        refactor();
        since_refactor = 0;
      }
      const bool bland = phase_iterations >= bland_after_;
      const Vector y = duals();
      const double tol = optimality_tol();

      std::size_t q = npos;
      int dir = 0;
      double best = 0.0;
      for (std::size_t j = 0; j < form_.size(); ++j) {
        const double d = reduced_cost(j, y);
        const int dj = direction(j, d, tol);
        if (dj == 0) continue;
        if (bland) {
          q = j;
          dir = dj;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = j;
          dir = dj;
        }
      }
      if (q == npos) return Status::Optimal;

      if (++iterations_ > limit_) throw IterationLimit("simplex exceeded " + std::to_string(limit_) + " iterations");
      ++phase_iterations;
      ++since_refactor;

      const Vector alpha = column_image(q);
      // Harris pass one: largest step keeping every basic variable within
      // its bounds relaxed by the feasibility tolerance.
      const double ftol = opt_.feasibility_tol;
      double relaxed = kInfinity;
      for (std::size_t i = 0; i < m_; ++i) {
        if (std::abs(alpha[i]) <= kPivotTol) continue;
        const std::size_t bj = basis_[i];
        const double rate = -dir * alpha[i];
        if (rate < 0.0 && std::isfinite(form_.lo[bj]))
          relaxed = std::min(relaxed, (x_[bj] - form_.lo[bj] + ftol) / -rate);
        else if (rate > 0.0 && std::isfinite(form_.hi[bj]))
          relaxed = std::min(relaxed, (form_.hi[bj] - x_[bj] + ftol) / rate);
      }
      std::size_t leave = npos;
      double step = kInfinity;
      double leave_pivot = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (std::abs(alpha[i]) <= kPivotTol) continue;
        const std::size_t bj = basis_[i];
        const double rate = -dir * alpha[i];
        double lim = kInfinity;
        if (rate < 0.0 && std::isfinite(form_.lo[bj])) lim = (x_[bj] - form_.lo[bj]) / -rate;
        else if (rate > 0.0 && std::isfinite(form_.hi[bj])) lim = (form_.hi[bj] - x_[bj]) / rate;
        if (!std::isfinite(lim)) continue;
        lim = std::max(lim, 0.0);
        if (bland) {
          if (lim < step - 1e-12 || (lim <= step + 1e-12 && leave != npos && bj < basis_[leave])) {
            step = lim;
            leave = i;
          }
        } else if (lim <= relaxed && std::abs(alpha[i]) > leave_pivot) {
          leave_pivot = std::abs(alpha[i]);
          step = lim;
          leave = i;
        }
      }
      const double range = form_.hi[q] - form_.lo[q];
      if (std::isfinite(range) && range <= step) {
        // bound flip, basis unchanged
        const double delta = dir * range;
        x_[q] += delta;
        for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] -= alpha[i] * delta;
        x_[q] = dir > 0 ? form_.hi[q] : form_.lo[q];
        continue;
      }
      if (leave == npos) return Status::Unbounded;

      const double delta = dir * step;
      x_[q] += delta;
      for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] -= alpha[i] * delta;
      const std::size_t out = basis_[leave];
      const double rate = -dir * alpha[leave];
      x_[out] = rate < 0.0 ? form_.lo[out] : form_.hi[out];
      pivot(leave, q, alpha);
    }
  }

  void pivot(std::size_t row, std::size_t entering, const Vector& alpha) {
    const double p = alpha[row];
    auto pr = binv_.row(row);
    for (double& v : pr) v /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row || alpha[i] == 0.0) continue;
      const double f = alpha[i];
      auto ri = binv_.row(i);
      for (std::size_t k = 0; k < m_; ++k) ri[k] -= f * pr[k];
    }
    position_[basis_[row]] = npos;
    basis_[row] = entering;
    position_[entering] = row;
  }

  void refactor() {
    if (m_ == 0) return;
    Matrix basis_matrix(m_, m_);
    for (std::size_t i = 0; i < m_; ++i)
      for (const auto& [r, v] : form_.columns[basis_[i]]) basis_matrix(r, i) = v;
    auto inv = invert(basis_matrix, 1e-14);
    if (!inv) throw SolverFailure("basis became singular");
    binv_ = std::move(*inv);
    Vector rhs = form_.b;
    for (std::size_t j = 0; j < form_.size(); ++j) {
      if (is_basic(j) || x_[j] == 0.0) continue;
      for (const auto& [r, v] : form_.columns[j]) rhs[r] -= v * x_[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      double s = 0.0;
      for (std::size_t r = 0; r < m_; ++r) s += binv_(i, r) * rhs[r];
      x_[basis_[i]] = s;
    }
  }

  double primal_violation() const {
    double worst = 0.0;
    for (std::size_t j = 0; j < form_.size(); ++j) {
      worst = std::max(worst, form_.lo[j] - x_[j]);
      worst = std::max(worst, x_[j] - form_.hi[j]);
    }
    return worst;
  }

  /// Replaces basic artificials (now fixed at zero) by real columns where a
  /// nonzero pivot exists. Rows with no such column are redundant.
  void drive_out_artificials() {
    for (std::size_t row = 0; row < m_; ++row) {
      if (basis_[row] < first_artificial_) continue;
      std::size_t best = npos;
      double best_val = 1e-7;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        if (is_basic(j)) continue;
        double a = 0.0;
        for (const auto& [r, v] : form_.columns[j]) a += binv_(row, r) * v;
        if (std::abs(a) > best_val) {
          best_val = std::abs(a);
          best = j;
        }
      }
      if (best == npos) continue;
      const Vector alpha = column_image(best);
      // degenerate pivot: the artificial sits at (numerically) zero
      const double delta = x_[basis_[row]] / alpha[row];
      x_[best] += delta;
      for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] -= alpha[i] * delta;
      x_[basis_[row]] = 0.0;
      pivot(row, best, alpha);
    }
    refactor();
  }

  BasicSolution finish(Status status) {
    BasicSolution sol;
    sol.status = status;
    sol.iterations = iterations_;
    const std::size_t v = form_.structural;
    sol.values.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(v));
    for (std::size_t j = 0; j < v; ++j) {
      // clean rounding noise against the bounds
      sol.values[j] = std::clamp(sol.values[j], lp_.bounds[j].lo, lp_.bounds[j].hi);
      if (is_basic(j)) sol.basis.push_back(j);
    }
    sol.objective_value = lp_.evaluate(sol.values);
    if (status != Status::Optimal || phase_one_only_) return sol;

    const Vector y = duals();
    const double flip = lp_.sense == Sense::Maximize ? -1.0 : 1.0;
    sol.duals.resize(m_);
    for (std::size_t r = 0; r < m_; ++r) sol.duals[r] = flip * y[r];

    // Lagrangian dual bound for the internal minimisation.
    double primal = 0.0;
    double dual = dot(y, form_.b);
    const double tol = optimality_tol();
    for (std::size_t j = 0; j < first_artificial_; ++j) {
      primal += cost_[j] * x_[j];
      const double d = reduced_cost(j, y);
      const double bound = d > 0.0 ? form_.lo[j] : form_.hi[j];
      if (std::isfinite(bound)) dual += d * bound;
      else if (std::abs(d) <= tol) dual += d * x_[j];
      else dual = -kInfinity;
    }
    sol.duality_gap = primal - dual;
    return sol;
  }

  const LinearProgram& lp_;
  SolverOptions opt_;
  StandardForm form_;
  std::size_t m_;
  std::size_t first_artificial_ = 0;
  Vector x_, cost_;
  std::vector<std::size_t> basis_, position_;
  Matrix binv_;
  std::size_t iterations_ = 0, limit_ = 0, bland_after_ = 0;
  double b_scale_ = 1.0;
  bool phase_one_only_ = false;
};

}  // namespace

BasicSolution solve(const LinearProgram& lp, const SolverOptions& options) {
  lp.validate();
  Simplex simplex(lp, options);
  BasicSolution sol = simplex.run(false);
  if (sol.status == Status::Optimal) {
    const double scale = 1.0 + std::abs(sol.objective_value);
    if (!(sol.duality_gap <= kGapTol * scale))
      throw SolverFailure("duality gap " + std::to_string(sol.duality_gap) + " exceeds tolerance");
  }
  return sol;
}

BasicSolution feasibility(const LinearProgram& lp, const SolverOptions& options) {
  lp.validate();
  Simplex simplex(lp, options);
  return simplex.run(true);
}

BasicSolution crossover(const LinearProgram& lp, std::span<const double> start, double tol) {
  lp.validate();
  if (start.size() != lp.num_variables()) throw DimensionMismatch("crossover start has the wrong length");
  if (lp.max_violation(start) > tol)
    throw ValidationError("crossover start violates the LP by " + std::to_string(lp.max_violation(start)));

  StandardForm form(lp);
  const std::size_t total = form.size();
  Vector x(total);
  std::copy(start.begin(), start.end(), x.begin());
  {
    std::size_t slack = lp.num_variables();
    for (std::size_t r = 0; r < lp.num_rows(); ++r) {
      const auto& c = lp.constraints[r];
      if (c.relation == Relation::Equal) continue;
      const double a = c.activity(start);
      x[slack++] = std::max(0.0, c.relation == Relation::LessEqual ? c.rhs - a : a - c.rhs);
    }
  }

  const double snap = 1e-12;
  auto snap_to_bound = [&](std::size_t j) {
    if (std::isfinite(form.lo[j]) && x[j] <= form.lo[j] + snap * (1.0 + std::abs(form.lo[j]))) {
      x[j] = form.lo[j];
      return true;
    }
    if (std::isfinite(form.hi[j]) && x[j] >= form.hi[j] - snap * (1.0 + std::abs(form.hi[j]))) {
      x[j] = form.hi[j];
      return true;
    }
    return false;
  };

  std::vector<std::size_t> interior;
  for (std::size_t j = 0; j < total; ++j)
    if (!snap_to_bound(j)) interior.push_back(j);

  std::vector<char> alive(total, 0);
  for (std::size_t j : interior) alive[j] = 1;
  std::vector<int> row_seen(form.rows, 0);
  std::vector<std::size_t> row_slot(form.rows, 0);
  int stamp = 0;
  std::size_t steps = 0;
  std::size_t dead = 0;
  bool unbounded = false;

  for (;;) {
    if (2 * dead > interior.size()) {
      std::erase_if(interior, [&](std::size_t j) { return !alive[j]; });
      dead = 0;
    }
    if (dead == interior.size()) break;

    // Greedy: collect interior columns until they outnumber the rows they touch.
    ++stamp;
    std::vector<std::size_t> subset;
    std::vector<std::size_t> touched;
    for (std::size_t j : interior) {
      if (!alive[j]) continue;
      subset.push_back(j);
      for (const auto& [r, v] : form.columns[j]) {
        if (row_seen[r] != stamp) {
          row_seen[r] = stamp;
          touched.push_back(r);
        }
      }
      if (subset.size() > touched.size()) break;
    }

    for (std::size_t k = 0; k < touched.size(); ++k) row_slot[touched[k]] = k;
    Matrix a(touched.size(), subset.size());
    for (std::size_t s = 0; s < subset.size(); ++s)
      for (const auto& [r, v] : form.columns[subset[s]]) a(row_slot[r], s) += v;
    auto d = null_vector(a);
    if (!d) break;  // interior columns independent: vertex reached

    double slope = 0.0;
    for (std::size_t s = 0; s < subset.size(); ++s) slope += form.cost[subset[s]] * (*d)[s];
    const double slope_tol = 1e-12 * std::max(1.0, max_abs(form.cost));
    if (slope > slope_tol)
      for (double& v : *d) v = -v;  // internal costs are minimised

    auto max_step = [&](const Vector& dir, std::size_t& blocking) {
      double step = kInfinity;
      blocking = subset.size();
      for (std::size_t s = 0; s < subset.size(); ++s) {
        const std::size_t j = subset[s];
        const double dj = dir[s];
        if (std::abs(dj) < 1e-13) continue;
        const double lim = dj > 0.0 ? (form.hi[j] - x[j]) / dj : (x[j] - form.lo[j]) / -dj;
        if (lim < step) {
          step = lim;
          blocking = s;
        }
      }
      return std::max(step, 0.0);
    };

    std::size_t blocking = 0;
    double step = max_step(*d, blocking);
    if (!std::isfinite(step)) {
      if (std::abs(slope) > slope_tol) {
        unbounded = true;
        break;
      }
      for (double& v : *d) v = -v;
      step = max_step(*d, blocking);
      if (!std::isfinite(step)) throw SolverFailure("crossover: feasible set contains a line, no vertex exists");
    }

    for (std::size_t s = 0; s < subset.size(); ++s) x[subset[s]] += step * (*d)[s];
    const std::size_t hit = subset[blocking];
    x[hit] = (*d)[blocking] > 0.0 ? form.hi[hit] : form.lo[hit];
    for (std::size_t j : subset) {
      if (j != hit && !snap_to_bound(j)) continue;
      alive[j] = 0;
      ++dead;
    }
    if (++steps > 4 * total + 16) throw SolverFailure("crossover did not terminate");
  }

  BasicSolution sol;
  sol.status = unbounded ? Status::Unbounded : Status::Optimal;
  sol.iterations = steps;
  sol.values.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(lp.num_variables()));
  for (std::size_t j = 0; j < lp.num_variables(); ++j)
    sol.values[j] = std::clamp(sol.values[j], lp.bounds[j].lo, lp.bounds[j].hi);
  for (std::size_t j : interior)
    if (alive[j] && j < lp.num_variables()) sol.basis.push_back(j);
  std::sort(sol.basis.begin(), sol.basis.end());
  sol.objective_value = lp.evaluate(sol.values);
  return sol;
}

}  // namespace purelax::lp
