#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "test_support.hpp"
#include "whitekit/whitekit.hpp"

namespace whitekit {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string("\"") + WHITEKIT_CLI + "\" " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[512];
  while (p && std::fgets(buf, sizeof buf, p)) out += buf;
  const int status = p ? pclose(p) : -1;
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) {
    if (!l.empty()) out.push_back(l);
  }
  return out;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::fresh_dir(std::string("cli_") +
                              ::testing::UnitTest::GetInstance()->current_test_info()->name());
    ASSERT_EQ(cli("synth --n 400 --d 8 --anisotropy 6 --separation 1 --seed 3 --splits "
                  "--name toy --model-name M --out " + q(dir_ / "toy")).code,
              0);
  }
  fs::path dir_;
};

TEST_F(Cli, WhitenThenIsoScoreIsNearOne) {
  for (const char* kind : {"pca", "zca", "chol", "zca-cor", "pca-cor"}) {
    const fs::path out = dir_ / (std::string("w_") + kind);
    const auto w = cli("whiten --manifest " + q(dir_ / "toy") + " --kind " + kind + " --out " + q(out));
    ASSERT_EQ(w.code, 0) << w.out;
    const auto ds = load_dataset(out / "manifest.json");
    EXPECT_GE(isoscore(ds.labeled().embeddings).score, 0.99) << kind;
    ASSERT_TRUE(ds.manifest.whitening.has_value());
    EXPECT_EQ(ds.manifest.whitening->at("kind"), kind);
    EXPECT_EQ(ds.manifest.whitening->at("fit_scope"), "all");
  }
}

TEST_F(Cli, ZcaModelIsSymmetricOnReload) {
  ASSERT_EQ(cli("whiten --manifest " + q(dir_ / "toy") + " --kind zca --out " + q(dir_ / "w")).code, 0);
  const auto model = load_whitening_model(dir_ / "w" / "model" / "model.json");
  EXPECT_EQ(model.w, model.w.transpose());
  EXPECT_EQ(model.fit_rows, 400);
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli("whiten --manifest " + q(dir_ / "toy") + " --kind bogus --out x").code, 2);
  EXPECT_EQ(cli("whiten --manifest " + q(dir_ / "toy")).code, 2);
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("project --manifest " + q(dir_ / "toy") + " --k 9 --csv " + q(dir_ / "p.csv")).code, 2);
  EXPECT_EQ(cli("eval-cls --manifest " + q(dir_ / "toy") + " --against a --against b").code, 2);
  EXPECT_EQ(cli("--help").code, 0);
}

TEST_F(Cli, DataErrorsExitOne) {
  EXPECT_EQ(cli("eval-cls --manifest " + q(dir_ / "missing")).code, 1);
  std::ofstream(dir_ / "toy" / "labels.txt", std::ios::app) << "1\n";
  EXPECT_EQ(cli("eval-cls --manifest " + q(dir_ / "toy")).code, 1);
}

TEST_F(Cli, EvalClsPrintsDeltaRow) {
  const auto r = cli("eval-cls --manifest " + q(dir_ / "toy") + " --kind zca --folds 5 --csv " +
                     q(dir_ / "t.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("Delta"), std::string::npos);
  EXPECT_NE(r.out.find("M_W(zca)"), std::string::npos);
  const auto csv = lines(detail::read_file(dir_ / "t.csv"));
  ASSERT_EQ(csv.size(), 3u);
  EXPECT_EQ(csv[0], "model,toy,avg,delta");
}

TEST_F(Cli, AgainstMatchesOnTheFlyWhitening) {
  ASSERT_EQ(cli("whiten --manifest " + q(dir_ / "toy") + " --kind zca --out " + q(dir_ / "w")).code, 0);
  const auto a = cli("eval-cls --manifest " + q(dir_ / "toy") + " --kind zca --folds 5 --csv " +
                     q(dir_ / "a.csv"));
  const auto b = cli("eval-cls --manifest " + q(dir_ / "toy") + " --against " + q(dir_ / "w") +
                     " --folds 5 --csv " + q(dir_ / "b.csv"));
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0) << b.out;
  EXPECT_EQ(detail::read_file(dir_ / "a.csv"), detail::read_file(dir_ / "b.csv"));
}

TEST_F(Cli, KindAllAddsMeanRowWithRange) {
  const auto r = cli("eval-cls --manifest " + q(dir_ / "toy") + " --kind all --folds 5 --csv " +
                     q(dir_ / "t.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto csv = lines(detail::read_file(dir_ / "t.csv"));
  ASSERT_EQ(csv.size(), 8u);
  EXPECT_EQ(csv[0], "model,toy,avg,delta,avg_min,avg_max");
  EXPECT_EQ(csv[7].rfind("M_W(mean),", 0), 0u);
}

TEST_F(Cli, EvalStsWithoutWhiteningIsSingleRow) {
  ASSERT_EQ(cli("synth --task sts --n 200 --d 8 --anisotropy 10 --out " + q(dir_ / "sts")).code, 0);
  const auto r = cli("eval-sts --manifest " + q(dir_ / "sts") + " --csv " + q(dir_ / "s.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("Delta"), std::string::npos);
  EXPECT_EQ(lines(detail::read_file(dir_ / "s.csv")).size(), 2u);
  EXPECT_EQ(cli("eval-sts --manifest " + q(dir_ / "sts") + " --kind zca --fit-scope train").code, 2);
}

TEST_F(Cli, IsoScorePairedModeEmitsTwoRows) {
  ASSERT_EQ(cli("whiten --manifest " + q(dir_ / "toy") + " --kind pca --out " + q(dir_ / "w")).code, 0);
  const auto r = cli("isoscore --manifest " + q(dir_ / "toy") + " --against " + q(dir_ / "w") +
                     " --csv " + q(dir_ / "iso.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto csv = lines(detail::read_file(dir_ / "iso.csv"));
  ASSERT_EQ(csv.size(), 3u);
  EXPECT_EQ(csv[1].rfind("M,raw,none,", 0), 0u);
  EXPECT_EQ(csv[2].rfind("M,whitened,pca,", 0), 0u);
  const double whitened = std::stod(csv[2].substr(csv[2].find("pca,") + 4));
  EXPECT_GE(whitened, 0.99);
}

TEST_F(Cli, ProjectWritesKColumnsPlusLabel) {
  const auto r = cli("project --manifest " + q(dir_ / "toy") + " --k 2 --csv " + q(dir_ / "p.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto csv = lines(detail::read_file(dir_ / "p.csv"));
  ASSERT_EQ(csv.size(), 401u);
  EXPECT_EQ(csv[0], "pc1,pc2,label");
  EXPECT_EQ(std::count(csv[1].begin(), csv[1].end(), ','), 2);
}

TEST_F(Cli, RecordsAreDeterministicApartFromTimestamp) {
  for (const char* log : {"a.jsonl", "b.jsonl"}) {
    ASSERT_EQ(cli("eval-cls --manifest " + q(dir_ / "toy") + " --kind chol --folds 5 --seed 9 "
                  "--records " + q(dir_ / log)).code,
              0);
  }
  const auto a = read_records(dir_ / "a.jsonl");
  const auto b = read_records(dir_ / "b.jsonl");
  ASSERT_EQ(a.size(), 2u);
  ASSERT_EQ(b.size(), 2u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].value, b[i].value);
    EXPECT_EQ(a[i].whitening, b[i].whitening);
    EXPECT_EQ(a[i].config, b[i].config);
  }
  EXPECT_EQ(a[1].whitening, "chol");
  EXPECT_EQ(a[1].fit_scope, "all");
  const auto rep = cli("report --records " + q(dir_ / "a.jsonl"));
  ASSERT_EQ(rep.code, 0) << rep.out;
  EXPECT_NE(rep.out.find("M_W(chol)"), std::string::npos);
}

TEST_F(Cli, ImportCsvRoundTrip) {
  std::ofstream(dir_ / "x.csv") << "1,2,0\n2,1,1\n0.5,0.25,0\n3,3,1\n";
  const auto r = cli("import --embeddings-csv " + q(dir_ / "x.csv") + " --label-column --name csv "
                     "--out " + q(dir_ / "imp"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto ds = load_dataset(dir_ / "imp" / "manifest.json");
  EXPECT_EQ(ds.labeled().embeddings.rows(), 4);
  EXPECT_EQ(ds.labeled().embeddings(2, 1), 0.25);
  EXPECT_EQ(ds.labeled().labels, (std::vector<int>{0, 1, 0, 1}));
}

TEST_F(Cli, DataDirFallback) {
  const std::string cmd = std::string("cd / && WHITEKIT_DATA_DIR=") + q(dir_) + " \"" +
                          WHITEKIT_CLI + "\" isoscore --manifest toy > /dev/null 2>&1";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
}

}  // namespace
}  // namespace whitekit
