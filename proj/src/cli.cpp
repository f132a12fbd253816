#include "purelax/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "purelax/errors.hpp"
#include "purelax/io.hpp"
#include "purelax/purify.hpp"
#include "purelax/rvp.hpp"
#include "purelax/scenarios.hpp"

namespace purelax::cli {

namespace {

inline constexpr double kVerifyTol = 1e-12;

struct RunConfig {
  std::string input;
  std::string phi;
  std::string report;
  std::string output;
  std::string certificate;
  std::optional<std::uint64_t> seed;
  double tol_density = kDensityTol;
  double tol_group = 1e-9;
  std::size_t levels = 3;
  bool strict = false;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

void check_distinct(const RunConfig& cfg) {
  std::vector<std::string> paths;
  for (const auto* p : {&cfg.input, &cfg.phi, &cfg.report, &cfg.output, &cfg.certificate})
    if (!p->empty()) paths.push_back(std::filesystem::weakly_canonical(*p).string());
  for (std::size_t i = 0; i < paths.size(); ++i)
    for (std::size_t j = i + 1; j < paths.size(); ++j)
      if (paths[i] == paths[j]) throw UsageError("input and output paths must be distinct: " + paths[i]);
}

void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.output.empty())
    out << text;
  else
    io::write_file(cfg.output, text);
}

RvpInstance load_instance(const RunConfig& cfg) {
  RvpInstance inst = io::instance_from_json(io::read_file(cfg.input));
  inst.base.validate();
  const auto check = validate_densities(inst.base.space, inst.densities, cfg.tol_density);
  if (!check.ok) throw InvalidDensity(check.failures.front());
  return inst;
}

RandomizedDecision load_phi(const DecisionInstance& inst, const std::string& path) {
  auto decision = io::decision_from_json(io::read_file(path));
  if (auto* f = std::get_if<PureDecision>(&decision)) {
    validate_decision(inst, *f);
    return as_randomized(inst, *f);
  }
  auto phi = std::get<RandomizedDecision>(std::move(decision));
  validate_decision(inst, phi);
  return phi;
}

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  ScenarioSpec spec = io::scenario_from_json(io::read_file(cfg.input));
  if (cfg.seed) spec.seed = *cfg.seed;
  emit(cfg, out, io::dump(io::to_json(generate(spec))));
  return kOk;
}

int cmd_purify(const RunConfig& cfg, std::ostream& out) {
  const RvpInstance inst = load_instance(cfg);
  const RandomizedDecision phi = load_phi(inst.base, cfg.phi);
  const PurifyResult res = purify(inst.base, phi);
  io::Json j = io::to_json(res.f);
  j["report"] = io::to_json(res.report);
  emit(cfg, out, io::dump(j));
  if (!cfg.certificate.empty()) io::write_file(cfg.certificate, io::dump(io::to_json(res.certificate)));
  return res.report.within_bounds() ? kOk : kInternal;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const RvpInstance inst = load_instance(cfg);
  RvpOptions options;
  options.density_tol = cfg.tol_density;
  options.group_tol = cfg.tol_group;
  options.strict = cfg.strict;
  const RvpSolution sol = solve_rvp(inst, options);
  emit(cfg, out, io::dump(io::to_json(sol, inst)));
  return sol.chain_verified() && sol.feasible_within_epsilon(inst.budgets) ? kOk : kInternal;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  if (cfg.report.empty()) throw UsageError("verify needs --report");
  const RvpInstance inst = load_instance(cfg);
  const RandomizedDecision phi = load_phi(inst.base, cfg.phi);
  const io::Json claimed = io::read_file(cfg.report);
  auto decision = io::decision_from_json(claimed);
  const auto* f = std::get_if<PureDecision>(&decision);
  if (!f) throw ParseError("report must carry the pure decision 'f'");
  const PurifyReport fresh = residual_report(inst.base, phi, *f, inst.base.space.blocks);

  const io::Json& blocks = claimed.at("report").at("blocks");
  if (blocks.size() != fresh.blocks.size()) throw DimensionMismatch("report has a different block count");
  double discrepancy = 0.0;
  bool within = true;
  for (std::size_t b = 0; b < fresh.blocks.size(); ++b) {
    const auto claimed_residual = blocks[b].at("residual").get<Vector>();
    if (claimed_residual.size() != fresh.blocks[b].residual.size())
      throw DimensionMismatch("report residual has the wrong dimension");
    discrepancy = std::max(discrepancy, max_abs_diff(claimed_residual, fresh.blocks[b].residual));
    const double mass_bound = blocks[b].at("mass_bound").get<double>();
    within = within && fresh.blocks[b].residual_norm * fresh.blocks[b].weight <=
                           mass_bound + claimed.at("report").at("slack").get<double>();
  }
  const bool agrees = discrepancy <= kVerifyTol;
  io::Json j = {{"agrees", agrees}, {"max_discrepancy", discrepancy}, {"within_bounds", within},
                {"residuals", io::to_json(fresh)["blocks"]}};
  emit(cfg, out, io::dump(j));
  return agrees && within ? kOk : kInternal;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int cmd_refine_study(const RunConfig& cfg, std::ostream& out) {
  if (cfg.levels < 2) throw UsageError("refine-study needs --levels >= 2");
  const RvpInstance inst = load_instance(cfg);
  RandomizedDecision phi;
  if (!cfg.phi.empty()) {
    phi = load_phi(inst.base, cfg.phi);
  } else {
    inst.validate(cfg.tol_density);
    phi = solve_crvp(inst).phi;
  }

  // The decision is held fixed and every cell split into 2^(level-1) equal
  // children, so the supports and spreads do not change between levels.
  std::ostringstream csv;
  csv << "level,max_cell_weight,max_block_residual,bound,gap\n";
  for (std::size_t level = 1; level <= cfg.levels; ++level) {
    const std::size_t copies = std::size_t{1} << (level - 1);
    const RvpInstance refined = split_instance(inst, copies);
    const RandomizedDecision split_phi = split_decision(phi, copies);
    const auto blocks = blocks_from_densities(refined.base.space, refined.densities, cfg.tol_group);
    const PurifyResult res = purify(refined.base, split_phi, blocks);

    double max_weight = 0.0;
    for (const auto& c : refined.base.space.cells) max_weight = std::max(max_weight, c.weight);
    double relaxed = INFINITY, pure = INFINITY;
    for (std::size_t p = 0; p < refined.num_params(); ++p) {
      relaxed = std::min(relaxed, evaluate(refined, split_phi, p).objective);
      pure = std::min(pure, evaluate(refined, res.f, p).objective);
    }
    csv << level << ',' << format_number(max_weight) << ',' << format_number(res.report.max_residual()) << ','
        << format_number(res.report.max_bound()) << ',' << format_number(relaxed - pure) << '\n';
  }
  emit(cfg, out, csv.str());
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite purification of randomized decisions and robust variational problems", "purelax"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* generate = app.add_subcommand("generate", "Write a scenario instance");
  generate->add_option("--input", cfg.input, "Scenario description JSON")->required();
  generate->add_option("--output", cfg.output, "Instance JSON (default stdout)");
  generate->add_option("--seed", cfg.seed, "Override the scenario seed");

  auto* purify_cmd = app.add_subcommand("purify", "Purify a randomized decision");
  purify_cmd->add_option("--input", cfg.input, "Instance JSON")->required();
  purify_cmd->add_option("--phi", cfg.phi, "Decision JSON")->required();
  purify_cmd->add_option("--output", cfg.output, "Report JSON (default stdout)");
  purify_cmd->add_option("--dump-certificate", cfg.certificate, "Write the Caratheodory certificate here");
  purify_cmd->add_option("--tol-density", cfg.tol_density, "Density normalization tolerance")->check(CLI::PositiveNumber);

  auto* solve = app.add_subcommand("solve", "Solve and purify a robust instance");
  solve->add_option("--input", cfg.input, "Instance JSON with budgets and densities")->required();
  solve->add_option("--output", cfg.output, "Solution JSON (default stdout)");
  solve->add_option("--tol-density", cfg.tol_density, "Density normalization tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--tol-group", cfg.tol_group, "Tolerance for grouping cells with equal densities into blocks")->check(CLI::PositiveNumber);
  solve->add_flag("--strict", cfg.strict, "Re-solve with tightened budgets until the pure decision complies");

  auto* verify = app.add_subcommand("verify", "Recompute the residuals of a purify report");
  verify->add_option("--input", cfg.input, "Instance JSON")->required();
  verify->add_option("--phi", cfg.phi, "Decision JSON")->required();
  verify->add_option("--report", cfg.report, "Output of purify")->required();
  verify->add_option("--output", cfg.output, "Verification JSON (default stdout)");
  verify->add_option("--tol-density", cfg.tol_density, "Density normalization tolerance")->check(CLI::PositiveNumber);

  auto* refine = app.add_subcommand("refine-study", "Residuals and bounds under repeated cell splitting");
  refine->add_option("--input", cfg.input, "Instance JSON")->required();
  refine->add_option("--phi", cfg.phi, "Decision JSON (default: the relaxed optimum)");
  refine->add_option("--levels", cfg.levels, "Number of levels, >= 2");
  refine->add_option("--output", cfg.output, "CSV (default stdout)");
  refine->add_option("--tol-density", cfg.tol_density, "Density normalization tolerance")->check(CLI::PositiveNumber);
  refine->add_option("--tol-group", cfg.tol_group, "Tolerance for grouping cells with equal densities into blocks")->check(CLI::PositiveNumber);

  std::vector<const char*> argv{"purelax"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    check_distinct(cfg);
    if (generate->parsed()) return cmd_generate(cfg, out);
    if (purify_cmd->parsed()) return cmd_purify(cfg, out);
    if (solve->parsed()) return cmd_solve(cfg, out);
    if (verify->parsed()) return cmd_verify(cfg, out);
    return cmd_refine_study(cfg, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kUsage;
  } catch (const InfeasibleConstraints& e) {
    err << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const UnknownParameter& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const DegenerateBlock& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const nlohmann::json::exception& e) {
    err << "parse error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace purelax::cli
