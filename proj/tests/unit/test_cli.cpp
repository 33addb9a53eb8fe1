#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "cli.hpp"
#include "test_util.hpp"

using namespace blw;

namespace {

cli::CommandPlan plan(std::vector<const char*> args) {
  args.insert(args.begin(), "blwbench");
  return cli::parse_args(static_cast<int>(args.size()), args.data());
}

int exit_code_of(const std::string& args) {
  const std::string cmd = std::string(BLWBENCH_EXE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t line_count(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::size_t n = 0;
  for (std::string l; std::getline(f, l);) ++n;
  return n;
}

}  // namespace

TEST(CliParse, BenchPlan) {
  const auto p = plan({"bench", "--spec", "specs/table3.json", "--jobs", "4", "--format", "json,md"});
  EXPECT_EQ(p.subcommand, "bench");
  EXPECT_EQ(p.spec, "specs/table3.json");
  EXPECT_EQ(p.out, "results");
  EXPECT_EQ(p.jobs, 4u);
  EXPECT_EQ(p.formats, (std::vector<ReportFormat>{ReportFormat::Json, ReportFormat::Markdown}));
  EXPECT_FALSE(p.seed_given);
}

TEST(CliParse, DenoisePlan) {
  const auto p = plan({"--seed", "9", "denoise", "--method", "WT", "--in", "x.csv", "--fs", "360", "--out", "y.csv",
                       "--cutoff", "0.5", "--set", "wavelet_name=db4"});
  EXPECT_EQ(p.method, Method::Wavelet);
  EXPECT_EQ(p.config.cutoff_hz, 0.5);
  EXPECT_EQ(p.config.wavelet_name, "db4");
  EXPECT_EQ(p.config.ica_seed, 9u);
  EXPECT_TRUE(p.seed_given);
  EXPECT_EQ(plan({"denoise", "--method", "fir", "--in", "x", "--fs", "360", "--out", "y"}).config.cutoff_hz, 0.67);
}

TEST(CliParse, UsageErrors) {
  try {
    plan({"denoise", "--method", "bogus", "--in", "x", "--fs", "360", "--out", "y"});
    FAIL();
  } catch (const cli::UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("valid methods: spline, fir"), std::string::npos);
  }
  EXPECT_THROW(plan({"denoise", "--method", "fir", "--in", "x", "--fs", "360", "--out", "y", "--set", "nope=1"}),
               cli::UsageError);
  EXPECT_THROW(plan({"denoise", "--method", "fir", "--in", "x", "--fs", "360"}), cli::UsageError);
  EXPECT_THROW(plan({"bench", "--spec", "s", "--format", "xml"}), cli::UsageError);
  EXPECT_THROW(plan({"frobnicate"}), cli::UsageError);
  EXPECT_THROW(plan({"blw", "--kind", "composite", "--fs", "250", "--out", "x"}), cli::UsageError);
  EXPECT_THROW(plan({"--help"}), cli::HelpRequested);
}

TEST(CliRun, InProcessDenoiseWithReference) {
  const auto dir = test::temp_dir("cli_inproc");
  EcgSynthSpec spec;
  spec.duration = 20.0;
  const auto clean = synth_ecg(spec);
  const auto noisy = contaminate(clean, synth_sine_blw(0.6, 360.0, 20.0, 1.0), ContaminationSpec{}).noisy;
  write_csv(clean, dir / "clean.csv");
  write_csv(noisy, dir / "noisy.csv");
  const std::string in = (dir / "noisy.csv").string(), ref = (dir / "clean.csv").string(),
                    out_path = (dir / "out.csv").string();
  std::vector<const char*> args{"blwbench", "denoise", "--method", "iir", "--in", in.c_str(), "--fs", "360",
                                "--ref", ref.c_str(), "--out", out_path.c_str()};
  std::ostringstream out, err;
  ASSERT_EQ(cli::run(static_cast<int>(args.size()), args.data(), out, err), cli::kExitOk) << err.str();
  const auto y = read_csv(out_path, 360.0);
  const auto expected = evaluate(clean, y);
  EXPECT_NE(out.str().find("MAD=" + format_sample(expected.mad)), std::string::npos) << out.str();
  EXPECT_EQ(y, denoise(Method::Iir, noisy, MethodConfig{}).relabeled(y.label()));
}

TEST(CliExit, Codes) {
  const auto dir = test::temp_dir("cli_exit");
  const auto d = dir.string();
  EXPECT_EQ(exit_code_of("--help"), 0);
  EXPECT_EQ(exit_code_of("denoise --help"), 0);
  EXPECT_EQ(exit_code_of("--no-such-flag"), 1);
  EXPECT_EQ(exit_code_of("denoise --method kalman --in x --fs 360 --out y"), 1);
  EXPECT_EQ(exit_code_of("detect --in " + d + "/missing.csv --fs 360 --out " + d + "/a.csv"), 1);
  EXPECT_EQ(exit_code_of("blw --fs 360 --duration -1 --out " + d + "/neg.csv"), 1);
  // allocation failure is not a user error
  EXPECT_EQ(exit_code_of("blw --fs 360 --duration 1e15 --out " + d + "/huge.csv"), 2);
}

TEST(CliExit, SynthWritesFullRecord) {
  const auto dir = test::temp_dir("cli_synth");
  EXPECT_EQ(exit_code_of("synth --out " + (dir / "ecg.csv").string() + " --events " + (dir / "r.csv").string()), 0);
  EXPECT_EQ(line_count(dir / "ecg.csv"), 108000u);
  EXPECT_NEAR(static_cast<double>(line_count(dir / "r.csv")), 600.0, 2.0);
}

TEST(CliExit, BenchMalformedSpecIsUserError) {
  const auto dir = test::temp_dir("cli_spec");
  std::ofstream(dir / "bad.json") << R"({"signal": {}, "noise": {}, "methods": ["fir"], "metrics": [1]})";
  EXPECT_EQ(exit_code_of("bench --spec " + (dir / "bad.json").string() + " --out " + (dir / "o").string()), 1);
}
