// Runs the installed command-line tool as a subprocess.

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "semclique/scene_io.h"
#include "semclique/scene_synth.h"

namespace semclique {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
};

// Runs the tool with `args`; stderr is folded into stdout when `merge`.
Result RunCli(const std::string& args, bool merge = false) {
  const std::string cmd = std::string(SEMCLIQUE_CLI_PATH) + " " + args +
                          (merge ? " 2>&1" : " 2>/dev/null");
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("semclique_cli_" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const {
    return (dir_ / name).string();
  }

  std::string Gen(const std::string& kind, int seed) {
    const std::string path = Path(kind + "_" + std::to_string(seed) + ".json");
    EXPECT_EQ(RunCli("gen --kind " + kind + " --seed " + std::to_string(seed) +
                  " -o " + path)
                  .code,
              0);
    return path;
  }

  fs::path dir_;
};

TEST_F(CliTest, GenIsDeterministicAndMatchesLibrary) {
  const Result a = RunCli("gen --kind lane-merge --seed 5");
  const Result b = RunCli("gen --kind lane-merge --seed 5");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, SerializeScene(*GenScenario(ScenarioKind::kLaneMerge, 5)));
  EXPECT_TRUE(ParseScene(a.out).ok());
}

TEST_F(CliTest, UnknownKindListsValidKinds) {
  const Result r = RunCli("gen --kind roundabout", true);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("diverging, distance-ring, divided-road"),
            std::string::npos)
      << r.out;
}

TEST_F(CliTest, UsageAndDataErrors) {
  EXPECT_EQ(RunCli("").code, 1);
  EXPECT_EQ(RunCli("cliques").code, 1);
  EXPECT_EQ(RunCli("eval --bogus-flag x.json").code, 1);
  const Result missing = RunCli("cliques " + Path("nope.json"), true);
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.out.find("cannot open"), std::string::npos);

  std::ofstream(Path("bad.json")) << R"({"agents": []})";
  const Result bad = RunCli("eval " + Path("bad.json"), true);
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.out.find("field 'dt'"), std::string::npos) << bad.out;

  const std::string scene = Gen("diverging", 1);
  EXPECT_EQ(RunCli("eval " + scene + " -n 5").code, 1);
  EXPECT_EQ(RunCli("eval " + scene + " --predictor lstm").code, 1);
  EXPECT_EQ(RunCli("eval " + scene + " --stamps 9").code, 2);
}

TEST_F(CliTest, DistanceRingOutsiderIsSingleton) {
  const std::string scene = Gen("distance-ring", 3);
  const Result r = RunCli("cliques " + scene + " --format csv --final-only");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find(",1,E,0,0\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, NoDirectionAddsEdgesOnDiverging) {
  const std::string scene = Gen("diverging", 2);
  const Result on = RunCli("cliques " + scene + " --final-only");
  const Result off = RunCli("cliques " + scene + " --final-only --no-direction");
  ASSERT_EQ(on.code, 0);
  ASSERT_EQ(off.code, 0);
  EXPECT_NE(on.out.find("1 edges above 1, 3 cliques"), std::string::npos)
      << on.out;
  EXPECT_NE(off.out.find(", 1 cliques"), std::string::npos) << off.out;
}

TEST_F(CliTest, EvalCsvIsByteIdenticalAcrossRuns) {
  const std::string scene = Gen("mixed", 7);
  ASSERT_EQ(RunCli("eval " + scene + " --csv " + Path("a.csv")).code, 0);
  ASSERT_EQ(RunCli("eval " + scene + " --csv " + Path("b.csv")).code, 0);
  const std::string a = Slurp(Path("a.csv"));
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, Slurp(Path("b.csv")));
  // With '-' the CSV owns stdout and the summary goes to stderr.
  EXPECT_EQ(RunCli("eval " + scene + " --csv -").out, a);
}

TEST_F(CliTest, AblateIsByteIdenticalAcrossThreadCounts) {
  fs::create_directories(dir_ / "suite");
  for (int s = 1; s <= 3; ++s) {
    ASSERT_EQ(RunCli("gen --kind crossing --seed " + std::to_string(s) + " -o " +
                  (dir_ / "suite" / ("c" + std::to_string(s) + ".json")).string())
                  .code,
              0);
  }
  const std::string suite = (dir_ / "suite").string();
  ASSERT_EQ(RunCli("ablate " + suite + " --threads 1 -o " + Path("t1.csv")).code,
            0);
  ASSERT_EQ(RunCli("ablate " + suite + " --threads 8 -o " + Path("t8.csv")).code,
            0);
  const std::string t1 = Slurp(Path("t1.csv"));
  EXPECT_NE(t1.find("\nmean,collision_rate,"), std::string::npos);
  EXPECT_EQ(t1, Slurp(Path("t8.csv")));
  EXPECT_EQ(RunCli("ablate " + Path("empty_missing")).code, 2);
}

TEST_F(CliTest, ConfigFileSetsFlagsAndCommandLineWins) {
  const std::string scene = Gen("diverging", 1);
  std::ofstream(Path("run.toml")) << "[cliques]\ndistance-only=true\n"
                                     "alpha-threshold=1.0\n";
  const Result from_file =
      RunCli("--config " + Path("run.toml") + " cliques " + scene +
          " --final-only");
  ASSERT_EQ(from_file.code, 0);
  EXPECT_NE(from_file.out.find(", 1 cliques"), std::string::npos)
      << from_file.out;
  const Result overridden =
      RunCli("--config " + Path("run.toml") + " cliques " + scene +
          " --final-only --alpha-threshold 1e9");
  EXPECT_NE(overridden.out.find(", 4 cliques"), std::string::npos)
      << overridden.out;
}

TEST_F(CliTest, PredictBatchesAndSvg) {
  const std::string scene = Gen("divided-road", 1);
  const Result p = RunCli("predict " + scene + " --modes 2");
  ASSERT_EQ(p.code, 0);
  EXPECT_EQ(p.out.rfind("agent_id,mode,confidence,fallback,t,", 0), 0u);
  EXPECT_EQ(std::count(p.out.begin(), p.out.end(), '\n'), 1 + 4 * 2 * 8);

  const Result b = RunCli("batches " + scene + " --raster-size 16");
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(std::count(b.out.begin(), b.out.end(), '\n'), 5);

  ASSERT_EQ(RunCli("eval " + scene + " --svg " + Path("plot.svg")).code, 0);
  const std::string svg = Slurp(Path("plot.svg"));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

}  // namespace
}  // namespace semclique
