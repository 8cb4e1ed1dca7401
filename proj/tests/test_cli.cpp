#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "ctsn_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(CTSN_BIN) + " " + args + " >" + (kRoot / "stdout").string() +
                          " 2>" + (kRoot / "stderr").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string out_dir(const std::string& name) { return (kRoot / name).string(); }

const std::string kQuick = " --train.epochs 2 --data.n_train 200 --data.n_test 100";

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);
  }
};

}  // namespace

TEST_F(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("train --no-such-flag"), 2);
  EXPECT_EQ(run("train --tmpr.lambda -3 --out " + out_dir("badlambda")), 2);
  EXPECT_NE(slurp(kRoot / "stderr").find("tmpr.lambda"), std::string::npos);
}

TEST_F(Cli, MissingIdxPathsLeaveNoOutput) {
  EXPECT_EQ(run("train --data.source idx --out " + out_dir("noidx")), 2);
  EXPECT_FALSE(fs::exists(out_dir("noidx")));
  EXPECT_EQ(run("train --data.source idx --data.train_images /nonexistent/a --data.train_labels "
                "/nonexistent/b --data.test_images /nonexistent/c --data.test_labels /nonexistent/d"
                " --out " + out_dir("badidx")),
            2);
  EXPECT_FALSE(fs::exists(fs::path(out_dir("badidx")) / "metrics.csv"));
}

TEST_F(Cli, TrainEvalHist) {
  const std::string out = out_dir("run");
  ASSERT_EQ(run("train --neuron ctsn_static" + kQuick + " --out " + out), 0);
  for (const char* f : {"config.txt", "data_manifest.txt", "metrics.csv", "model.bin"})
    EXPECT_TRUE(fs::exists(fs::path(out) / f)) << f;
  const std::string metrics = slurp(fs::path(out) / "metrics.csv");
  EXPECT_EQ(metrics.substr(0, metrics.find('\n')), "epoch,lr,ce_loss,tmpr_loss,train_acc,eval_acc");
  EXPECT_EQ(std::count(metrics.begin(), metrics.end(), '\n'), 3);

  EXPECT_EQ(run("eval --config " + out + "/config.txt"), 0);
  EXPECT_TRUE(fs::exists(fs::path(out) / "eval.csv"));
  EXPECT_EQ(run("hist --config " + out + "/config.txt --hist.layer 2"), 0);
  EXPECT_TRUE(fs::exists(fs::path(out) / "hist.csv"));
  EXPECT_NE(slurp(fs::path(out) / "hist.meta").find("v_th=0.5"), std::string::npos);

  EXPECT_EQ(run("eval --config " + out + "/config.txt --model.T 6"), 2);
  EXPECT_EQ(run("eval --config " + out + "/config.txt --neuron ternary"), 2);
}

TEST_F(Cli, ConfigFileEnvAndFlagPrecedence) {
  const fs::path cfg = kRoot / "prec.cfg";
  std::ofstream(cfg) << "train.epochs = 1\nmodel.T = 3\n";
  const std::string base = " --data.n_train 100 --data.n_test 50 --config " + cfg.string();
  ASSERT_EQ(run("train" + base + " --out " + out_dir("file")), 0);
  EXPECT_NE(slurp(fs::path(out_dir("file")) / "config.txt").find("model.T = 3"), std::string::npos);

  ::setenv("CTSN_MODEL_T", "5", 1);
  ASSERT_EQ(run("train" + base + " --out " + out_dir("env")), 0);
  EXPECT_NE(slurp(fs::path(out_dir("env")) / "config.txt").find("model.T = 5"), std::string::npos);
  ASSERT_EQ(run("train" + base + " --model.T 2 --out " + out_dir("flag")), 0);
  ::unsetenv("CTSN_MODEL_T");
  EXPECT_NE(slurp(fs::path(out_dir("flag")) / "config.txt").find("model.T = 2"), std::string::npos);
}

TEST_F(Cli, ZeroLambdaMatchesNoTmpr) {
  ASSERT_EQ(run("train --neuron ctsn_static --tmpr.lambda 0" + kQuick + " --out " + out_dir("l0")), 0);
  ASSERT_EQ(run("train --neuron ctsn_static --no-tmpr" + kQuick + " --out " + out_dir("off")), 0);
  EXPECT_EQ(slurp(fs::path(out_dir("l0")) / "metrics.csv"),
            slurp(fs::path(out_dir("off")) / "metrics.csv"));
}

TEST_F(Cli, DivergenceIsNumericExit) {
  EXPECT_EQ(run("train --train.lr0 1e12 --neuron ctsn_static" + kQuick + " --out " + out_dir("nan")), 3);
}

TEST_F(Cli, GradcheckExitCodes) {
  EXPECT_EQ(run("gradcheck --networks 5 --out " + out_dir("gc")), 0);
  EXPECT_TRUE(fs::exists(fs::path(out_dir("gc")) / "gradcheck.csv"));
  const std::string table = slurp(kRoot / "stdout");
  EXPECT_NE(table.find("PASS"), std::string::npos);
  EXPECT_EQ(run("gradcheck --mode ternary --networks 5 --fd-step 1e-3 --out " + out_dir("gcadv")), 0);
  EXPECT_NE(slurp(kRoot / "stdout").find("ADVISORY"), std::string::npos);
}

TEST_F(Cli, Ablate) {
  ASSERT_EQ(run("ablate --train.epochs 1 --data.n_train 100 --data.n_test 50 --ablate.seeds 1,2"
                " --out " + out_dir("abl")),
            0);
  const std::string csv = slurp(fs::path(out_dir("abl")) / "ablation.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,T,seeds,mean_acc,sd_acc,mean_sq_potential_t1");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}
