#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Proc {
  int rc = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("anosovlab_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Proc run(const std::string& args) const {
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string(ANOSOVLAB_CLI_PATH) + " " + args + " 2>" + err.string();
    Proc r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = ::pclose(pipe);
    r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    fs::remove(err);
    return r;
  }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

std::string strip_first_comment(const std::string& svg) {
  const auto a = svg.find("<!--"), b = svg.find("-->\n");
  return svg.substr(0, a) + svg.substr(b + 4);
}

}  // namespace

TEST_F(Cli, HilbertDistBallCenter) {
  const auto dom = write("ball.json", R"({"type":"ball","dim":2})");
  const auto r = run("hilbert dist --domain " + dom.string() + " --p 0,0 --q 0.5,0");
  ASSERT_EQ(r.rc, 0) << r.err;
  char expect[64];
  std::snprintf(expect, sizeof expect, "%.12f\n", 0.5 * std::log(1.5 / 0.5));
  EXPECT_EQ(r.out, expect);
  EXPECT_EQ(r.out, "0.549306144334\n");
}

TEST_F(Cli, TauEigenvalues) {
  const auto r = run("reps tau-eig --d 5 --lambda1 2");
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(r.out, "16,4,1,0.25,0.0625\n");
}

TEST_F(Cli, PappusOrbitCount) {
  const auto r = run("pappus orbit --maxlen 2");
  ASSERT_EQ(r.rc, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j.at("tool"), "anosovlab");
  EXPECT_EQ(j.at("config").at("command"), "pappus orbit");
  EXPECT_EQ(j.at("config").at("maxlen"), "2");
  EXPECT_EQ(j.at("count"), 8);
  EXPECT_EQ(j.at("count_by_length"), json::array({1, 3, 4}));
  EXPECT_EQ(j.at("orbit").size(), 8u);
}

TEST_F(Cli, HoroballDist) {
  const auto r = run("horoball dist --base z --from 0,1 --to 1024,1");
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(json::parse(r.out).at("distance"), 20);
  const auto b = run("horoball dist --base z --from 0,1 --to 100,1 --bfs");
  ASSERT_EQ(b.rc, 0) << b.err;
  const auto j = json::parse(b.out);
  EXPECT_EQ(j.at("distance"), j.at("bfs_distance"));
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("").rc, 2);
  EXPECT_EQ(run("no-such-command").rc, 2);
  EXPECT_EQ(run("hilbert dist --p 0,0").rc, 2);
  EXPECT_EQ(run("reps tau-eig --d notanumber").rc, 2);

  const auto missing = run("hilbert dist --domain " + (dir_ / "absent.json").string() + " --p 0,0 --q 0.5,0");
  EXPECT_EQ(missing.rc, 1);
  EXPECT_TRUE(missing.out.empty());
  const auto e = json::parse(missing.err);
  EXPECT_EQ(e.at("error"), "IoError");

  const auto dom = write("ball.json", R"({"type":"ball","dim":2})");
  const auto outside = run("hilbert dist --domain " + dom.string() + " --p 0,0 --q 2,0");
  EXPECT_EQ(outside.rc, 1);
  EXPECT_TRUE(json::parse(outside.err).contains("error"));
}

TEST_F(Cli, OutFileIsAtomicAndMatchesStdout) {
  const auto out = dir_ / "nc.csv";
  const auto r = run("reps norm-contraction --d 3 --t 1 --out " + out.string());
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const std::string file = slurp(out);
  // same bytes apart from the config echo, which records --out
  auto body = [](const std::string& t) { return t.substr(t.find("\r\nk,")); };
  EXPECT_EQ(body(file), body(run("reps norm-contraction --d 3 --t 1").out));
  // only the target remains, no temp file
  std::size_t entries = 0;
  for (const auto& e : fs::directory_iterator(dir_)) {
    (void)e;
    ++entries;
  }
  EXPECT_EQ(entries, 1u);

  // CSV: comment lines, header, CRLF everywhere
  EXPECT_EQ(file.rfind("# anosovlab ", 0), 0u);
  EXPECT_NE(file.find("\r\nk,t,ratio,bound,ok\r\n"), std::string::npos);
  for (std::size_t i = 0; i < file.size(); ++i)
    if (file[i] == '\n') ASSERT_TRUE(i > 0 && file[i - 1] == '\r') << i;

  // unwritable target: domain error, nothing on stdout
  const auto bad = run("reps tau-eig --out " + (dir_ / "no" / "such" / "dir.txt").string());
  EXPECT_EQ(bad.rc, 1);
}

TEST_F(Cli, DeterministicAndGolden) {
  const auto a = run("pappus render --depth 3");
  const auto b = run("pappus render --depth 3");
  ASSERT_EQ(a.rc, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(strip_first_comment(a.out), strip_first_comment(slurp(std::string(ANOSOVLAB_TEST_DATA) + "/std_depth3.svg")));
  // config echo in the comment, no double hyphen inside it
  const auto c0 = a.out.find("<!--") + 4, c1 = a.out.find("-->");
  EXPECT_EQ(a.out.substr(c0, c1 - c0).find("--"), std::string::npos);

  const auto x = run("experiment tau-law");
  const auto y = run("experiment tau-law");
  ASSERT_EQ(x.rc, 0) << x.err;
  EXPECT_EQ(x.out, y.out);
  EXPECT_FALSE(json::parse(x.out).at("config").contains("seconds"));
}

TEST_F(Cli, ConfigEchoAndTiming) {
  const auto r = run("experiment pingpong");
  ASSERT_EQ(r.rc, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j.at("config").at("timing"), false);
  EXPECT_EQ(j.at("config").at("seed"), "1");
  EXPECT_FALSE(j.dump().find("\"seconds\"") != std::string::npos);
  const auto t = json::parse(run("experiment pingpong --timing").out);
  EXPECT_TRUE(t.dump().find("\"seconds\"") != std::string::npos);
}
