#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bulksurf/cli.hpp"
#include "bulksurf/energy.hpp"

namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::StartsWith;
using Catch::Matchers::WithinRel;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "bulksurf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = bulksurf::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) : path_(fs::temp_directory_path() / ("bulksurf_cli_" + tag)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string data(const std::string& name) { return std::string(BULKSURF_TEST_DATA_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

// Exports a preset and rewrites selected [sim] keys.
std::string export_with(const TempDir& dir, const std::string& name, const std::string& sim_overrides) {
  std::string path = dir.file(name + ".model");
  Result r = run({"models", "export", name, "--out", path});
  REQUIRE(r.code == 0);
  std::string text = slurp(path);
  std::istringstream in(sim_overrides);
  std::string kv;
  while (std::getline(in, kv)) {
    std::string key = kv.substr(0, kv.find('='));
    auto pos = text.find("\n" + key);
    REQUIRE(pos != std::string::npos);
    auto end = text.find('\n', pos + 1);
    text.replace(pos + 1, end - pos - 1, kv);
  }
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("models list names every preset", "[cli][models]") {
  Result r = run({"models", "list"});
  CHECK(r.code == 0);
  for (const char* name : {"membrane", "cdc42", "cubic", "remark24", "blowup_toy", "linear_decay"}) {
    CHECK_THAT(r.out, ContainsSubstring(name));
  }
  Result bad = run({"models", "export", "nope"});
  CHECK(bad.code == 2);
}

TEST_CASE("check on the membrane export classifies as uniform in time", "[cli][check]") {
  TempDir dir("check_membrane");
  std::string path = dir.file("membrane.model");
  REQUIRE(run({"models", "export", "membrane", "--out", path}).code == 0);
  CHECK_THAT(slurp(path), StartsWith("# membrane:"));
  std::string kv = dir.file("report.txt");
  Result r = run({"check", "--config", path, "--out", kv});
  CHECK(r.code == 0);
  CHECK_THAT(r.out, ContainsSubstring("theorem=1.1 uniform_in_time=true"));
  CHECK_THAT(slurp(kv), ContainsSubstring("theorem=1.1 uniform_in_time=true"));
}

TEST_CASE("check on the cubic export falls back to the exponent classification", "[cli][check]") {
  TempDir dir("check_cubic");
  std::string path = dir.file("cubic.model");
  REQUIRE(run({"models", "export", "cubic", "--out", path}).code == 0);
  Result r = run({"check", "--config", path});
  CHECK(r.code == 1);
  CHECK_THAT(r.out, ContainsSubstring("theorem_1_1=fail theorem_1_3=pass(a=4,b=6)"));
}

TEST_CASE("check warns when verdicts rest on sampling", "[cli][check]") {
  TempDir dir("check_cdc42");
  std::string path = dir.file("cdc42.model");
  REQUIRE(run({"models", "export", "cdc42", "--out", path}).code == 0);
  Result r = run({"check", "--config", path, "--samples", "2000", "--seed", "7"});
  CHECK(r.code == 0);
  CHECK_THAT(r.out, ContainsSubstring("warning: some verdicts rest on sampling only"));
  Result again = run({"check", "--config", path, "--samples", "2000", "--seed", "7"});
  CHECK(again.out == r.out);
}

TEST_CASE("unknown identifier is an input error naming it", "[cli][errors]") {
  Result r = run({"check", "--config", data("unknown_identifier.model")});
  CHECK(r.code == 2);
  CHECK_THAT(r.err, ContainsSubstring("v9"));
  CHECK_THAT(r.err, ContainsSubstring("unknown_identifier.model:11"));
  CHECK(run({"check", "--config", data("missing.model")}).code == 2);
  CHECK(run({"check"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("simulate with zero horizon writes one record", "[cli][simulate]") {
  TempDir dir("sim_zero");
  std::string model = export_with(dir, "linear_decay", "t_end = 0");
  std::string csv = dir.file("out.csv");
  Result r = run({"simulate", "--config", model, "--out", csv});
  CHECK(r.code == 0);
  auto rows = lines(slurp(csv));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "t,mass,l1_u1,lp2_u1,sup_u1,bint_u1,energy_p2,halvings,posviol");
  CHECK_THAT(rows[1], StartsWith("0,"));
}

TEST_CASE("simulate reports blow-up with exit 3", "[cli][simulate]") {
  TempDir dir("sim_blowup");
  std::string model = export_with(dir, "blowup_toy", "nr = 6\nntheta = 16");
  std::string csv = dir.file("out.csv");
  Result r = run({"simulate", "--config", model, "--out", csv});
  CHECK(r.code == 3);
  CHECK_THAT(r.err, ContainsSubstring("blow-up detected at t="));
  auto rows = lines(slurp(csv));
  REQUIRE(rows.size() >= 2);
  double t_last = std::stod(rows.back().substr(0, rows.back().find(',')));
  CHECK(t_last < 5.0);
  CHECK(t_last > 0.0);
}

TEST_CASE("simulate then energy on constant snapshots", "[cli][energy]") {
  TempDir dir("energy");
  std::string csv = dir.file("out.csv"), snaps = dir.file("snaps");
  Result sim = run({"simulate", "--config", data("constant_state.model"), "--out", csv, "--snapshots", snaps});
  REQUIRE(sim.code == 0);
  CHECK(fs::exists(fs::path(snaps) / "snap_000000.txt"));
  CHECK(fs::exists(fs::path(snaps) / "snap_000005.txt"));

  Result e = run({"energy", "--config", data("constant_state.model"), "--traj", snaps, "--p", "2,3"});
  REQUIRE(e.code == 0);
  auto rows = lines(e.out);
  REQUIRE(rows.size() == 3 + 6);
  CHECK_THAT(rows[0], StartsWith("# theta_p2="));
  CHECK(rows[2] == "t,energy_p2,energy_p3");
  const double pi = std::acos(-1.0);
  const std::vector<double> c = {0.5, 2.0};
  // theta for A = [[1,0],[1,1]], d = (1,1): theta_2 = 1.01, theta_1 = 1.01^4.
  const std::vector<double> theta = {std::pow(1.01, 4), 1.01};
  for (std::size_t k = 3; k < rows.size(); ++k) {
    std::istringstream row(rows[k]);
    std::string t, e2, e3;
    std::getline(row, t, ',');
    std::getline(row, e2, ',');
    std::getline(row, e3, ',');
    CHECK_THAT(std::stod(e2), WithinRel(pi * bulksurf::eval_Hp(c, {2, theta}), 1e-12));
  }

  Result too_big = run({"energy", "--config", data("constant_state.model"), "--traj", snaps, "--p", "21"});
  CHECK(too_big.code == 2);
  CHECK_THAT(too_big.err, ContainsSubstring("p=21"));
  Result empty = run({"energy", "--config", data("constant_state.model"), "--traj", dir.file("nowhere")});
  CHECK(empty.code == 2);
}

TEST_CASE("verify suites", "[cli][verify]") {
  Result r = run({"verify", "--suite", "multinomial", "--cases", "200"});
  CHECK(r.code == 0);
  CHECK_THAT(r.out, ContainsSubstring("suite=multinomial"));
  CHECK_THAT(r.out, ContainsSubstring("PASS"));
  Result a2 = run({"verify", "--suite", "a2", "--cases", "50", "--seed", "3"});
  CHECK(a2.code == 0);
  CHECK(run({"verify", "--suite", "bogus"}).code == 2);
}
