#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bubbles/cluster_io.hpp"
#include "bubbles/seeds.hpp"

using namespace bubbles;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status = -1;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("bubbles_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::string& args) const {
    const fs::path captured = dir_ / "stdout.txt";
    const std::string cmd = std::string(BUBBLES_CLI) + " " + args + " > " + captured.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    Outcome o;
    o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    o.out = slurp(captured);
    return o;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    write_text_file(p.string(), text);
    return p.string();
  }

  fs::path dir_;
};

Cluster exact_double() { return standard_double_bubble({1.0, 0.7, 256}, DoublePlacement::center_at_origin, {}); }

std::string summary(const std::string& name, double perimeter, double p = 2.0) {
  std::ostringstream s;
  s << "{\"name\": \"" << name << "\", \"p\": " << p << ", \"perimeter\": " << perimeter
    << ", \"target_areas\": [1, 2]}";
  return s.str();
}

}  // namespace

TEST_F(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help").status, 0);
  EXPECT_EQ(run("").status, 1);
  EXPECT_EQ(run("frobnicate").status, 1);
  EXPECT_EQ(run("check").status, 1);
}

TEST_F(Cli, CheckPassesOnExactDoubleBubble) {
  const auto o = run("check " + write("good.json", save_cluster(exact_double())));
  EXPECT_EQ(o.status, 0) << o.out;
  EXPECT_NE(o.out.find("regularity: pass"), std::string::npos);
}

TEST_F(Cli, CheckFlagsBentJunction) {
  Cluster c = exact_double();
  const auto inc = incidence(c);
  int junction = 0;
  for (const auto& [vid, e] : inc)
    if (e.size() == 3) junction = vid;
  const ClusterIndex idx(c);
  const int nb = other_end(c.edges[idx.e(inc.at(junction)[0])], junction);
  c.vertices[idx.v(nb)].pos += Point{0.01, -0.01};
  const auto o = run("check " + write("bent.json", save_cluster(c)));
  EXPECT_EQ(o.status, 2) << o.out;
  EXPECT_NE(o.out.find("VIOLATION junction " + std::to_string(junction)), std::string::npos) << o.out;
}

TEST_F(Cli, CheckErrors) {
  EXPECT_EQ(run("check " + (dir_ / "missing.json").string()).status, 1);
  EXPECT_EQ(run("check " + write("junk.json", "{ not json")).status, 1);
  Cluster c = exact_double();
  c.edges[0].left_region = c.edges[0].right_region;
  const auto o = run("check " + write("invalid.json", save_cluster(c)));
  EXPECT_EQ(o.status, 1);
  EXPECT_NE(o.out.find("invalid cluster"), std::string::npos);
}

TEST_F(Cli, RenderIsDeterministic) {
  const std::string in = write("c.json", save_cluster(triple_seed({3, 2, 1}, {2.0})));
  const fs::path a = dir_ / "a.svg", b = dir_ / "b.svg";
  ASSERT_EQ(run("render " + in + " -o " + a.string()).status, 0);
  ASSERT_EQ(run("render " + in + " -o " + b.string()).status, 0);
  const std::string sa = slurp(a), sb = slurp(b);
  EXPECT_EQ(sa, sb);
  EXPECT_EQ(sa.rfind("<?xml", 0), 0u);
  EXPECT_NE(sa.find("id=\"origin\""), std::string::npos);
  ASSERT_EQ(run("render " + in + " --no-origin-marker -o " + a.string()).status, 0);
  EXPECT_EQ(slurp(a).find("id=\"origin\""), std::string::npos);
  EXPECT_EQ(run("render " + (dir_ / "none.json").string()).status, 1);
}

TEST_F(Cli, Compare) {
  const std::string a = write("a.json", summary("alpha", 10.5)), b = write("b.json", summary("beta", 10.25));
  auto o = run("compare " + a + " " + b);
  EXPECT_EQ(o.status, 0) << o.out;
  EXPECT_NE(o.out.find("winner: beta"), std::string::npos) << o.out;
  EXPECT_EQ(run("compare " + a).status, 1);
  EXPECT_EQ(run("compare " + a + " " + write("c.json", summary("gamma", 9.0, 1.0))).status, 1);
}

TEST_F(Cli, EvolveWritesArtifacts) {
  const std::string cfg = write("cfg.json", R"({
  "experiments": [
    {"name": "disk", "seed": {"kind": "circle", "areas": [1.0], "center": [3, 0], "segments_per_arc": 16},
     "schedule": {"p_path": [0]}, "config": {"refinement_divisors": [8]},
     "checks": [{"check": "regularity"}, {"check": "perimeter", "min": 3.5, "max": 3.6}],
     "render": {"frame_every": 5}},
    {"name": "strict", "seed": {"kind": "circle", "areas": [1.0], "center": [3, 0]},
     "schedule": {"p_path": []},
     "checks": [{"check": "perimeter", "max": 1.0}]}
  ]
})");
  const fs::path out = dir_ / "out";
  auto o = run("evolve -c " + cfg + " -e disk -o " + out.string());
  ASSERT_EQ(o.status, 0) << o.out;
  for (const char* f : {"summary.json", "cluster.json", "log.jsonl", "final.svg"})
    EXPECT_TRUE(fs::exists(out / "disk" / f)) << f;
  EXPECT_FALSE(fs::is_empty(out / "disk" / "frames"));
  const Cluster c = read_cluster_file((out / "disk" / "cluster.json").string());
  EXPECT_NEAR(weighted_areas(c)[0], 1.0, 1e-8);

  const fs::path frames = dir_ / "frames";
  EXPECT_EQ(run("render " + (out / "disk" / "log.jsonl").string() + " -o " + frames.string()).status, 0);
  EXPECT_FALSE(fs::is_empty(frames));

  EXPECT_EQ(run("evolve -c " + cfg + " -e strict -o " + out.string()).status, 2);
  EXPECT_EQ(run("evolve -c " + cfg + " -e nosuch -o " + out.string()).status, 1);
  EXPECT_EQ(run("evolve -c " + cfg + " -o " + out.string()).status, 1);
  EXPECT_EQ(run("evolve -c " + write("bad.json", "{\"experiments\": [{\"name\": 1}]}") + " --all").status, 1);
}
