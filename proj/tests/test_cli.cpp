#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "purelax/cli.hpp"
#include "purelax/io.hpp"

namespace fs = std::filesystem;
using namespace purelax;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("purelax_cli_" + std::to_string(std::rand()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) const {
    std::ofstream(path / name) << content;
    return (path / name).string();
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kShowcase = R"({"space":{"cells":[{"w":0.5},{"w":0.5}]},"actions":[[0,1],[0,1]],
  "g":[[[1,2],[0,0]],[[1,2],[0,0]]],"n":2,"budgets":[1]})";

}  // namespace

TEST_CASE("generate writes deterministic instances") {
  TempDir dir;
  auto spec = dir.file("spec.json", R"({"kind":"example1","n1":4,"n2":4,"seed":1})");
  REQUIRE(run({"generate", "--input", spec, "--output", dir / "a.json"}).code == cli::kOk);
  REQUIRE(run({"generate", "--input", spec, "--output", dir / "b.json"}).code == cli::kOk);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  auto inst = io::instance_from_json(io::read_file(dir / "a.json"));
  CHECK(inst.base.num_cells() == 16);

  REQUIRE(run({"generate", "--input", spec, "--seed", "2", "--output", dir / "c.json"}).code == cli::kOk);
  CHECK(slurp(dir / "a.json") != slurp(dir / "c.json"));
}

TEST_CASE("bad JSON is a parse error with line info") {
  TempDir dir;
  auto spec = dir.file("spec.json", "{\n\"kind\": \"example1\",\n,}\n");
  auto r = run({"generate", "--input", spec});
  CHECK(r.code == cli::kInvalidInput);
  CHECK(r.err.find("spec.json:3:") != std::string::npos);
  CHECK(run({"generate", "--input", dir / "missing.json"}).code == cli::kUsage);
}

TEST_CASE("purify and verify") {
  TempDir dir;
  auto spec = dir.file("spec.json", R"({"kind":"random","cells":40,"blocks":4,"m":2,"max_actions":4,"seed":9})");
  REQUIRE(run({"generate", "--input", spec, "--output", dir / "inst.json"}).code == cli::kOk);
  auto inst = io::instance_from_json(io::read_file(dir / "inst.json"));
  Rng rng(5);
  auto phi = dir.file("phi.json", io::dump(io::to_json(random_decision(inst.base, rng))));

  auto r = run({"purify", "--input", dir / "inst.json", "--phi", phi, "--output", dir / "report.json",
                "--dump-certificate", dir / "cert.json"});
  REQUIRE(r.code == cli::kOk);
  auto report = io::read_file(dir / "report.json");
  CHECK(report["report"]["within_bounds"] == true);
  CHECK(io::read_file(dir / "cert.json")["cells"].size() == 40);

  r = run({"verify", "--input", dir / "inst.json", "--phi", phi, "--report", dir / "report.json"});
  CHECK(r.code == cli::kOk);
  auto v = io::parse(r.out);
  CHECK(v["agrees"] == true);
  CHECK(v["max_discrepancy"].get<double>() <= 1e-12);

  // a tampered report no longer verifies
  report["report"]["blocks"][0]["residual"][0] = report["report"]["blocks"][0]["residual"][0].get<double>() + 1e-6;
  auto tampered = dir.file("tampered.json", io::dump(report));
  CHECK(run({"verify", "--input", dir / "inst.json", "--phi", phi, "--report", tampered}).code == cli::kInternal);
}

TEST_CASE("purify of a pure decision has zero residual") {
  TempDir dir;
  auto inst = dir.file("inst.json", kShowcase);
  auto f = dir.file("f.json", R"({"f":[0,1]})");
  auto r = run({"purify", "--input", inst, "--phi", f});
  REQUIRE(r.code == cli::kOk);
  auto j = io::parse(r.out);
  CHECK(j["f"] == io::Json::array({0, 1}));
  for (const auto& b : j["report"]["blocks"]) CHECK(b["residual_norm"] == 0.0);
}

TEST_CASE("mismatched cell counts exit 3") {
  TempDir dir;
  auto inst = dir.file("inst.json", kShowcase);
  auto phi = dir.file("phi.json", R"({"phi":[[0.5,0.5]]})");
  CHECK(run({"purify", "--input", inst, "--phi", phi}).code == cli::kInvalidInput);
  auto bad_density = dir.file("bad.json", R"({"space":{"cells":[{"w":1}]},"actions":[[0]],"g":[[[1,1]]],"n":2,
    "budgets":[2],"densities":{"params":["a"],"rows":[[3]]}})");
  CHECK(run({"solve", "--input", bad_density}).code == cli::kInvalidInput);
}

TEST_CASE("solve") {
  TempDir dir;
  auto inst = dir.file("inst.json", kShowcase);
  auto r = run({"solve", "--input", inst, "--output", dir / "sol.json"});
  REQUIRE(r.code == cli::kOk);
  auto sol = io::read_file(dir / "sol.json");
  CHECK(sol["pure_value"] == 0.5);
  CHECK(std::abs(sol["relaxed_value"].get<double>() - 0.5) <= 1e-9);
  CHECK(sol["chain_verified"] == true);
  CHECK(sol["audit"].size() == 1);

  REQUIRE(run({"solve", "--input", inst, "--output", dir / "again.json"}).code == cli::kOk);
  CHECK(slurp(dir / "sol.json") == slurp(dir / "again.json"));

  auto infeasible = dir.file("inf.json", R"({"space":{"cells":[{"w":1}]},"actions":[[0,1]],
    "g":[[[1,2],[0,1]]],"n":2,"budgets":[0.5]})");
  CHECK(run({"solve", "--input", infeasible}).code == cli::kInfeasible);

  auto strict = run({"solve", "--input", inst, "--strict"});
  CHECK(strict.code == cli::kOk);
}

TEST_CASE("single-parameter solve is within epsilon of the plain LP") {
  TempDir dir;
  auto spec = dir.file("spec.json", R"({"kind":"random","cells":30,"blocks":3,"params":1,"m":1,"seed":4})");
  REQUIRE(run({"generate", "--input", spec, "--output", dir / "inst.json"}).code == cli::kOk);
  auto inst = io::instance_from_json(io::read_file(dir / "inst.json"));
  auto r = run({"solve", "--input", dir / "inst.json"});
  REQUIRE(r.code == cli::kOk);
  auto sol = io::parse(r.out);
  // plain LP: max E u subject to E c <= a, no epigraph variable
  lp::LinearProgram plain;
  lp::Constraint cost{{}, lp::Relation::LessEqual, inst.budgets[0]};
  for (std::size_t i = 0; i < inst.base.num_cells(); ++i) {
    lp::Constraint conv{{}, lp::Relation::Equal, 1.0};
    const double w = inst.base.space.cells[i].weight * inst.densities.values(i, 0);
    for (std::size_t a = 0; a < inst.base.num_actions(i); ++a) {
      const auto var = plain.add_variable(w * inst.base.g[i](a, 0));
      conv.terms.push_back({var, 1.0});
      cost.terms.push_back({var, w * inst.base.g[i](a, 1)});
    }
    plain.add_constraint(conv);
  }
  plain.add_constraint(cost);
  auto ref = lp::solve(plain);
  REQUIRE(ref.status == lp::Status::Optimal);
  CHECK(std::abs(sol["relaxed_value"].get<double>() - ref.objective_value) <= 1e-8);
  CHECK(std::abs(sol["pure_value"].get<double>() - ref.objective_value) <= sol["epsilon"].get<double>() + 1e-8);
}

TEST_CASE("refine-study") {
  TempDir dir;
  auto spec = dir.file("spec.json", R"({"kind":"example1","n1":4,"n2":4,"min_actions":3,"max_actions":3,"seed":7})");
  REQUIRE(run({"generate", "--input", spec, "--output", dir / "inst.json"}).code == cli::kOk);
  auto r = run({"refine-study", "--input", dir / "inst.json", "--levels", "3"});
  REQUIRE(r.code == cli::kOk);
  std::istringstream csv(r.out);
  std::string line;
  std::getline(csv, line);
  CHECK(line == "level,max_cell_weight,max_block_residual,bound,gap");
  std::vector<std::vector<double>> rows;
  while (std::getline(csv, line)) {
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      std::size_t used = 0;
      row.push_back(std::stod(field, &used));
      CHECK(used == field.size());
    }
    CHECK(row.size() == 5);
    rows.push_back(row);
  }
  REQUIRE(rows.size() == 3);
  for (std::size_t l = 1; l < 3; ++l) {
    CHECK(rows[l][3] / rows[0][3] == doctest::Approx(1.0 / (1 << l)).epsilon(1e-12));
    CHECK(rows[l][1] == rows[l - 1][1] / 2);
  }

  CHECK(run({"refine-study", "--input", dir / "inst.json", "--levels", "1"}).code == cli::kUsage);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
  CHECK(run({"solve"}).code == cli::kUsage);
  CHECK(run({"--help"}).code == cli::kOk);
  TempDir dir;
  auto inst = dir.file("inst.json", kShowcase);
  CHECK(run({"solve", "--input", inst, "--output", inst}).code == cli::kUsage);
  CHECK(run({"solve", "--input", inst, "--tol-group", "0"}).code == cli::kUsage);
}

TEST_CASE("the executable forwards exit codes") {
  TempDir dir;
  auto infeasible = dir.file("inf.json", R"({"space":{"cells":[{"w":1}]},"actions":[[0]],"g":[[[1,2]]],"n":2,
    "budgets":[1]})");
  const std::string cmd = std::string(PURELAX_BINARY) + " solve --input " + infeasible + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == cli::kInfeasible);
}
