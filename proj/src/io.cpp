#include "purelax/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "purelax/errors.hpp"

namespace purelax::io {

namespace {

const Json& required(const Json& j, const char* key) {
  if (!j.is_object()) throw ParseError(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing key '") + key + "'");
  return *it;
}

template <class T>
T get(const Json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad value for '") + what + "': " + e.what());
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : get<T>(*it, key);
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    rows.push_back(Vector(row.begin(), row.end()));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const char* what, std::size_t cols = 0) {
  auto rows = get<std::vector<Vector>>(j, what);
  if (rows.empty()) return Matrix(0, cols);
  for (const auto& r : rows)
    if (r.size() != rows.front().size()) throw ParseError(std::string("ragged rows in '") + what + "'");
  return Matrix::from_rows(rows);
}

std::string label_of(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return j.dump();
  throw ParseError("parameter labels must be strings or numbers");
}

}  // namespace

Json parse(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ParseError(source + ":" + std::to_string(line) + ": " + e.what());
  }
}

Json read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const DiscreteSpace& space) {
  Json cells = Json::array();
  for (const auto& c : space.cells) cells.push_back({{"w", c.weight}, {"block", c.block}});
  return {{"cells", cells}, {"blocks", space.blocks}};
}

DiscreteSpace space_from_json(const Json& j) {
  const Json& cells = required(j, "cells");
  if (!cells.is_array()) throw ParseError("'cells' must be an array");
  Vector weights;
  std::vector<std::size_t> block_of;
  for (const auto& c : cells) {
    weights.push_back(get<double>(required(c, "w"), "w"));
    block_of.push_back(get_or<std::size_t>(c, "block", 0));
  }
  DiscreteSpace space = DiscreteSpace::from_block_ids(weights, block_of);
  if (auto it = j.find("blocks"); it != j.end() && !it->is_null()) {
    auto blocks = get<BlockPartition>(*it, "blocks");
    for (const auto& b : blocks)
      for (std::size_t id : b)
        if (id >= weights.size()) throw ParseError("block member " + std::to_string(id) + " out of range");
    space.set_blocks(std::move(blocks));
  }
  return space;
}

Json to_json(const DensityFamily& fam) { return {{"params", fam.params}, {"rows", matrix_json(fam.values)}}; }

DensityFamily densities_from_json(const Json& j) {
  DensityFamily fam;
  const Json& params = required(j, "params");
  if (!params.is_array()) throw ParseError("'params' must be an array");
  for (const auto& p : params) fam.params.push_back(label_of(p));
  fam.values = matrix_from_json(required(j, "rows"), "rows", fam.params.size());
  if (fam.values.rows() > 0 && fam.values.cols() != fam.params.size())
    throw ParseError("density rows must have one entry per parameter");
  return fam;
}

Json to_json(const RvpInstance& inst) {
  Json g = Json::array();
  for (const auto& m : inst.base.g) g.push_back(matrix_json(m));
  Json j = {{"space", to_json(inst.base.space)},
            {"actions", inst.base.actions},
            {"g", g},
            {"n", inst.base.n},
            {"budgets", inst.budgets},
            {"densities", to_json(inst.densities)}};
  if (inst.utility_bound) j["lambda"] = *inst.utility_bound;
  return j;
}

RvpInstance instance_from_json(const Json& j) {
  RvpInstance inst;
  inst.base.space = space_from_json(required(j, "space"));
  inst.base.actions = get<std::vector<std::vector<long long>>>(required(j, "actions"), "actions");
  inst.base.n = get<std::size_t>(required(j, "n"), "n");
  const Json& g = required(j, "g");
  if (!g.is_array()) throw ParseError("'g' must be an array");
  for (const auto& m : g) inst.base.g.push_back(matrix_from_json(m, "g", inst.base.n));
  inst.budgets = get_or<Vector>(j, "budgets", {});
  if (auto it = j.find("densities"); it != j.end()) {
    inst.densities = densities_from_json(*it);
  } else {
    inst.densities.params = {"1"};
    inst.densities.values = Matrix(inst.base.num_cells(), 1);
    for (std::size_t i = 0; i < inst.base.num_cells(); ++i) inst.densities.values(i, 0) = 1.0;
  }
  if (auto it = j.find("lambda"); it != j.end() && !it->is_null()) inst.utility_bound = get<double>(*it, "lambda");
  return inst;
}

Json to_json(const RandomizedDecision& phi) { return {{"phi", phi.probabilities}}; }
Json to_json(const PureDecision& f) { return {{"f", f.choice}}; }

Decision decision_from_json(const Json& j) {
  if (j.is_object() && j.contains("phi")) return RandomizedDecision{get<std::vector<Vector>>(j["phi"], "phi")};
  if (j.is_object() && j.contains("f")) return PureDecision{get<std::vector<std::size_t>>(j["f"], "f")};
  throw ParseError("decision must hold 'phi' or 'f'");
}

Json to_json(const PurifyReport& report) {
  Json blocks = Json::array();
  for (const auto& b : report.blocks) {
    blocks.push_back({{"block", b.block},
                      {"weight", b.weight},
                      {"residual", b.residual},
                      {"residual_norm", b.residual_norm},
                      {"bound", b.bound},
                      {"mass_bound", b.mass_bound},
                      {"max_cell_weight", b.max_cell_weight},
                      {"max_spread", b.max_spread},
                      {"fractional_cells", b.fractional_cells},
                      {"within_bound", b.within_bound(report.slack)}});
  }
  return {{"blocks", blocks},
          {"global_residual", report.global_residual},
          {"global_bound", report.global_bound},
          {"slack", report.slack},
          {"within_bounds", report.within_bounds()}};
}

Json to_json(const CaratheodoryCertificate& cert) {
  Json cells = Json::array();
  for (const auto& c : cert.cells) cells.push_back({{"indices", c.indices}, {"weights", c.weights}});
  return {{"n", cert.n}, {"cells", cells}};
}

Json to_json(const RvpSolution& sol, const RvpInstance& inst) {
  Json audit = Json::array();
  for (const auto& a : sol.audit) {
    audit.push_back({{"param", inst.densities.params.at(a.param)},
                     {"relaxed_objective", a.relaxed.objective},
                     {"relaxed_costs", a.relaxed.costs},
                     {"pure_objective", a.pure.objective},
                     {"pure_costs", a.pure.costs},
                     {"chain_residual", a.chain_residual},
                     {"within_epsilon", a.within_epsilon}});
  }
  Json worst_constraints = Json::array();
  for (std::size_t p : sol.worst_constraint_params) worst_constraints.push_back(inst.densities.params.at(p));
  return {{"phi", sol.relaxed.probabilities},
          {"f", sol.pure.choice},
          {"relaxed_value", sol.relaxed_value},
          {"pure_value", sol.pure_value},
          {"epsilon", sol.epsilon},
          {"worst_objective_param", inst.densities.params.at(sol.worst_objective_param)},
          {"worst_constraint_params", worst_constraints},
          {"constraint_values", sol.constraint_values},
          {"relaxed_constraint_values", sol.relaxed_constraint_values},
          {"budgets", inst.budgets},
          {"solved_budgets", sol.solved_budgets},
          {"method", to_string(sol.method)},
          {"crvp_gap", sol.crvp_gap},
          {"chain_verified", sol.chain_verified()},
          {"feasible_within_epsilon", sol.feasible_within_epsilon(inst.budgets)},
          {"audit", audit},
          {"blocks", sol.blocks},
          {"report", to_json(sol.report)}};
}

Json to_json(const ScenarioSpec& spec) {
  Json j = {{"kind", to_string(spec.kind)},
            {"seed", spec.seed},
            {"min_actions", spec.min_actions},
            {"max_actions", spec.max_actions},
            {"m", spec.m}};
  switch (spec.kind) {
    case ScenarioKind::Example1:
      j["n1"] = spec.n1;
      j["n2"] = spec.n2;
      j["p_grid"] = spec.p_grid;
      break;
    case ScenarioKind::Example2:
      j["block_weights"] = spec.block_weights;
      j["density_vectors"] = spec.density_vectors;
      j["subdivisions"] = spec.subdivisions;
      break;
    case ScenarioKind::Example3:
      j["nq"] = spec.nq;
      j["nr"] = spec.nr;
      j["marginals"] = matrix_json(spec.marginals);
      break;
    case ScenarioKind::Random:
      j["cells"] = spec.cells;
      j["blocks"] = spec.blocks;
      j["params"] = spec.params;
      break;
  }
  return j;
}

ScenarioSpec scenario_from_json(const Json& j) {
  ScenarioSpec s;
  s.kind = scenario_kind_from_string(get<std::string>(required(j, "kind"), "kind"));
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
  s.min_actions = get_or<std::size_t>(j, "min_actions", s.min_actions);
  s.max_actions = get_or<std::size_t>(j, "max_actions", std::max(s.max_actions, s.min_actions));
  s.m = get_or<std::size_t>(j, "m", s.m);
  s.n1 = get_or<std::size_t>(j, "n1", s.n1);
  s.n2 = get_or<std::size_t>(j, "n2", s.n2);
  s.p_grid = get_or<Vector>(j, "p_grid", {});
  s.block_weights = get_or<Vector>(j, "block_weights", {});
  s.density_vectors = get_or<std::vector<Vector>>(j, "density_vectors", {});
  s.subdivisions = get_or<std::size_t>(j, "subdivisions", s.subdivisions);
  s.nq = get_or<std::size_t>(j, "nq", s.nq);
  s.nr = get_or<std::size_t>(j, "nr", s.nr);
  if (auto it = j.find("marginals"); it != j.end()) s.marginals = matrix_from_json(*it, "marginals");
  s.cells = get_or<std::size_t>(j, "cells", s.cells);
  s.blocks = get_or<std::size_t>(j, "blocks", s.blocks);
  s.params = get_or<std::size_t>(j, "params", s.params);
  return s;
}

}  // namespace purelax::io
