#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("biovss_test_cli_" + std::to_string(getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

class ScratchCleanup : public ::testing::Environment {
 public:
  void TearDown() override { fs::remove_all(workdir()); }
};
const auto* const kCleanup = ::testing::AddGlobalTestEnvironment(new ScratchCleanup);

std::string at(const std::string& name) { return (workdir() / name).string(); }

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(BIOVSS_CLI) + " " + args + " 2>" + at("stderr.txt");
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  ADD_FAILURE() << "missing column " << name;
  return 0;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ASSERT_EQ(run("synth --out " + at("d.bvss") + " --sets 400 --dim 16 --seed 3").code, 0);
    ASSERT_EQ(run("synth --out " + at("q.bvss") + " --sets 5 --dim 16 --seed 4").code, 0);
    ASSERT_EQ(run("build --dataset " + at("d.bvss") + " --out " + at("i.bvix") + " --bloom-size 256 --wta 16").code,
              0);
  }
};

}  // namespace

TEST_F(Cli, SynthIsReproducible) {
  ASSERT_EQ(run("synth --out " + at("d2.bvss") + " --sets 400 --dim 16 --seed 3").code, 0);
  EXPECT_EQ(slurp(at("d.bvss")), slurp(at("d2.bvss")));
  ASSERT_EQ(run("synth --out " + at("d3.bvss") + " --sets 400 --dim 16 --seed 5").code, 0);
  EXPECT_NE(slurp(at("d.bvss")), slurp(at("d3.bvss")));
}

TEST_F(Cli, BuildIsDeterministicAndReportsStages) {
  const auto r = run("build --dataset " + at("d.bvss") + " --out " + at("i2.bvix") + " --bloom-size 256 --wta 16");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(slurp(at("i.bvix")), slurp(at("i2.bvix")));
  for (const char* stage : {"hashing,", "count_bloom,", "single_bloom,", "inverted_index,"})
    EXPECT_NE(r.out.find(stage), std::string::npos) << stage;
  EXPECT_NE(slurp(at("stderr.txt")).find("bloom-size=256"), std::string::npos);
}

TEST_F(Cli, BuildRejectsWtaAboveBloomSize) {
  EXPECT_EQ(run("build --dataset " + at("d.bvss") + " --out " + at("x.bvix") + " --bloom-size 32 --wta 64").code, 3);
}

TEST_F(Cli, ExactMatchesOpenCascade) {
  const std::string base = "query --dataset " + at("d.bvss") + " --index " + at("i.bvix") + " --queries " +
                           at("q.bvss") + " --topk 5 ";
  const auto exact = run(base + "--mode exact");
  const auto open = run(base + "--mode biovss++ --access 256 --min-count 0 --candidates 400");
  const auto linear = run(base + "--mode biovss --candidates 400");
  ASSERT_EQ(exact.code, 0);
  ASSERT_EQ(open.code, 0);
  ASSERT_EQ(linear.code, 0);
  EXPECT_EQ(exact.out, open.out);
  EXPECT_EQ(exact.out, linear.out);
  const auto rows = csv(exact.out);
  ASSERT_EQ(rows.size(), 1u + 5 * 5);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"query_id", "rank", "set_id", "distance"}));
}

TEST_F(Cli, MeanMinMetricIsRouted) {
  const std::string base = "query --dataset " + at("d.bvss") + " --index " + at("i.bvix") + " --queries " +
                           at("q.bvss") + " --metric meanmin ";
  const auto exact = run(base + "--mode exact");
  const auto open = run(base + "--access 256 --min-count 0 --candidates 400");
  ASSERT_EQ(exact.code, 0);
  EXPECT_EQ(exact.out, open.out);
  const auto haus = run("query --dataset " + at("d.bvss") + " --queries " + at("q.bvss") + " --mode exact");
  EXPECT_NE(exact.out, haus.out);
}

TEST_F(Cli, TextFormat) {
  const auto r = run("query --dataset " + at("d.bvss") + " --index " + at("i.bvix") + " --queries " + at("q.bvss") +
                     " --format text");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("stage1="), std::string::npos);
  EXPECT_NE(r.out.find("distance"), std::string::npos);
}

TEST_F(Cli, ExitCodes) {
  const std::string q = "query --dataset " + at("d.bvss") + " --index " + at("i.bvix") + " --queries " + at("q.bvss");
  EXPECT_EQ(run(q + " --metric chebyshev").code, 2);
  EXPECT_EQ(run(q + " --mode turbo").code, 2);
  EXPECT_EQ(run(q + " --no-such-flag").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run(q + " --wta 32").code, 3);
  EXPECT_NE(slurp(at("stderr.txt")).find("wta"), std::string::npos);
  EXPECT_EQ(run(q + " --bloom-size 512").code, 3);
  EXPECT_NE(slurp(at("stderr.txt")).find("bloom-size"), std::string::npos);
  EXPECT_EQ(run(q + " --wta 16 --bloom-size 256").code, 0);
  EXPECT_EQ(run("query --dataset " + at("missing.bvss") + " --queries " + at("q.bvss") + " --mode exact").code, 4);
  auto bytes = slurp(at("i.bvix"));
  bytes[bytes.size() / 3] ^= 0x10;
  std::ofstream(at("bad.bvix"), std::ios::binary) << bytes;
  EXPECT_EQ(run("query --dataset " + at("d.bvss") + " --index " + at("bad.bvix") + " --queries " + at("q.bvss")).code,
            5);
}

TEST_F(Cli, GroundTruthThenOpenBenchHasPerfectRecall) {
  ASSERT_EQ(run("gt --dataset " + at("d.bvss") + " --out " + at("gt.csv") + " --num-queries 30 --seed 2").code, 0);
  const auto gt = csv(slurp(at("gt.csv")));
  ASSERT_EQ(gt.size(), 1u + 30 * 5);
  ASSERT_EQ(run("bench --dataset " + at("d.bvss") + " --gt " + at("gt.csv") + " --out " + at("bench.csv") +
                " --bloom-size 256 --wta 16 --access 256 --min-count 0 --candidates 400 --mode exact,biovss,biovss++")
                .code,
            0);
  const auto rows = csv(slurp(at("bench.csv")));
  ASSERT_EQ(rows.size(), 4u);
  const auto r3 = column(rows[0], "recall_at_3"), r5 = column(rows[0], "recall_at_5");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(std::stod(rows[i][r3]), 1.0);
    EXPECT_EQ(std::stod(rows[i][r5]), 1.0);
  }
}

TEST_F(Cli, HeldOutQueries) {
  ASSERT_EQ(run("gt --dataset " + at("d.bvss") + " --queries " + at("q.bvss") + " --out " + at("gtq.csv")).code, 0);
  ASSERT_EQ(run("bench --dataset " + at("d.bvss") + " --queries " + at("q.bvss") + " --gt " + at("gtq.csv") +
                " --out " + at("benchq.csv") + " --bloom-size 256 --wta 16 --candidates 50")
                .code,
            0);
  EXPECT_EQ(csv(slurp(at("benchq.csv"))).size(), 2u);
}

// Calibrated corpus: 10000 sets, 20 clusters, spread 0.2.
TEST(CliSweep, RecallRisesWithActiveBits) {
  ASSERT_EQ(run("synth --out " + at("cal.bvss") + " --sets 10000 --seed 1").code, 0);
  ASSERT_EQ(run("gt --dataset " + at("cal.bvss") + " --out " + at("cal_gt.csv") + " --num-queries 100 --seed 1").code,
            0);
  ASSERT_EQ(run("bench --dataset " + at("cal.bvss") + " --gt " + at("cal_gt.csv") + " --out " + at("sweep.csv") +
                " --wta 16,32,48,64 --candidates 1000")
                .code,
            0);
  const auto rows = csv(slurp(at("sweep.csv")));
  ASSERT_EQ(rows.size(), 5u);
  const auto wta = column(rows[0], "wta"), r3 = column(rows[0], "recall_at_3");
  std::vector<double> recall;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(std::stoul(rows[i][wta]), 16u * i);
    recall.push_back(std::stod(rows[i][r3]));
  }
  EXPECT_LE(recall[0], recall[1]);
  EXPECT_LE(recall[1], recall[2]);
  EXPECT_LT(recall[0], recall[2]);
}
