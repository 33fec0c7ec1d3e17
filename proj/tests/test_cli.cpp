// Runs the command-line tool as a subprocess: exit codes, report contents,
// byte stability and independence from --jobs.

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + "'" MEASURE_LAB_CLI "' " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string fixture(const std::string& name) { return std::string(MEASURE_LAB_FIXTURE_DIR) + "/" + name; }

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("measure_lab_cli_" + name + "_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, ClassifyFibonacci) {
  auto r = run("classify " + fixture("fibonacci.json") + " --height 2");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["kind"], "continuous");
  EXPECT_EQ(j["evidence"], "inconclusive");
  EXPECT_LT(j["evidence_data"]["max_abs"].get<double>(), 1e-6);
  EXPECT_TRUE(j["witness"].contains("edge"));
}

TEST(Cli, AtomsOfSevenEdgeFixture) {
  auto r = run("atoms " + fixture("example1-7edge.json"));
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["count"], 5);
  EXPECT_NEAR(j["mass_sum"].get<double>(), 1.0, 1e-10);
  double sum = 0;
  for (const auto& a : j["atoms"]) sum += a["mass"].get<double>();
  EXPECT_NEAR(sum, 1.0, 1e-10);
}

TEST(Cli, ClassifyDimension) {
  auto dir = scratch_dir("dimension");
  std::ofstream(dir / "shift2.json") << R"({"beta": {"minpoly": [-3, 1]}, "alphabet": [0, 1], "states": ["s"],
    "edges": [{"from": "s", "to": "s", "label": 0}, {"from": "s", "to": "s", "label": 1}]})";
  auto r = run("classify " + (dir / "shift2.json").string());
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["evidence"], "singular_by_dimension");
  fs::remove_all(dir);
}

TEST(Cli, CylinderAndFourier) {
  auto r = run("cylinder " + fixture("fibonacci.json") + " --word 1,0,1 --word 0");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_NEAR(j["words"][1]["measure"].get<double>(), 0.7236067977499789, 1e-12);
  EXPECT_NEAR(j["lambda"].get<double>(), 1.6180339887498949, 1e-12);

  auto dir = scratch_dir("fourier");
  auto csv = (dir / "f.csv").string();
  r = run("fourier " + fixture("fullshift4.json") + " --t 0.25,1 --csv " + csv);
  ASSERT_EQ(r.code, 0);
  std::istringstream lines(read(csv));
  std::string header, row;
  std::getline(lines, header);
  EXPECT_EQ(header, "t_or_z,re,im,abs,bound");
  std::getline(lines, row);
  EXPECT_EQ(row.rfind("0.25,", 0), 0u);
  fs::remove_all(dir);
}

TEST(Cli, CloudCsvIsSortedByValue) {
  auto dir = scratch_dir("cloud");
  auto csv = (dir / "cloud.csv").string();
  auto r = run("cloud " + fixture("fibonacci.json") + " --depth 8 --csv " + csv);
  ASSERT_EQ(r.code, 0);
  std::istringstream lines(read(csv));
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "word,value,mass,lo,hi");
  double prev = -1e300, mass = 0;
  int rows = 0;
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string word, value, m;
    std::getline(cells, word, ',');
    std::getline(cells, value, ',');
    std::getline(cells, m, ',');
    EXPECT_GE(std::stod(value), prev);
    prev = std::stod(value);
    mass += std::stod(m);
    ++rows;
  }
  EXPECT_EQ(rows, 55);  // Fibonacci words of length 8
  EXPECT_NEAR(mass, 1.0, 1e-10);
  fs::remove_all(dir);
}

TEST(Cli, ZeroAutomatonOutputIsAnAutomatonFile) {
  auto dir = scratch_dir("zero");
  auto out = (dir / "za.json").string();
  auto r = run("zero-automaton --minpoly -1,-1,1 --alphabet -1,0,1 --trim both --out " + out);
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(read(out));
  EXPECT_EQ(j["states"].size(), 5u);
  EXPECT_EQ(j["edges"].size(), 9u);
  // the output is accepted by the tool again
  r = run("atoms " + out);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["count"], 5);
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  auto dir = scratch_dir("exit");
  std::ofstream(dir / "bad.json") << R"({"alphabet": [0], "states": ["a"], "edges": [{"from": "a", "to": "b", "label": 0}]})";
  EXPECT_EQ(run("validate " + (dir / "bad.json").string()).code, 2);
  EXPECT_EQ(run("validate " + (dir / "missing.json").string()).code, 2);
  EXPECT_EQ(run("classify " + fixture("fibonacci.json") + " --minpoly 1,1").code, 2);
  EXPECT_EQ(run("zero-automaton --minpoly 1,-1,1").code, 2);  // not Pisot
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("validate " + fixture("fig3.json")).code, 0);
  EXPECT_EQ(run("limit " + fixture("fibonacci.json") + " --z 123456789,987654321 --tol 1e-12",
                "MEASURE_LAB_PRECISION_CAP=64")
                .code,
            3);
  fs::remove_all(dir);
}

TEST(Cli, ReportsAreByteStableAndIndependentOfJobs) {
  for (const std::string& args : {"scan " + fixture("example1-9edge.json") + " --height 2",
                                 "classify " + fixture("fig3.json") + " --height 2",
                                 "cloud " + fixture("example1-7edge.json") + " --depth 9"}) {
    auto a = run(args + " --jobs 1");
    auto b = run(args + " --jobs 1");
    auto c = run(args + " --jobs 3");
    ASSERT_EQ(a.code, 0) << args;
    EXPECT_EQ(a.out, b.out) << args;
    EXPECT_EQ(a.out, c.out) << args;
  }
}

TEST(Cli, ExamplesMaterializesFixturesAndPasses) {
  auto dir = scratch_dir("examples");
  auto r = run("examples --samples 20000 --dir " + (dir / "fx").string());
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_TRUE(j["all_checks_passed"].get<bool>());
  EXPECT_EQ(j["fixtures"].size(), 5u);
  for (const auto* name : {"fibonacci.json", "example1-7edge.json", "example1-9edge.json", "fullshift4.json", "fig3.json"})
    EXPECT_EQ(read(dir / "fx" / name), read(fixture(name))) << name;
  fs::remove_all(dir);
}
