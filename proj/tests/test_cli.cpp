#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "gapspec/series_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int status = -1;
    std::string err;
    std::string out;
};

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               (std::string("gapspec_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        const gapspec::GappySeries x({3, 1, -1, 4, 1, 5, -1, 9, 2, 6, 5, 3, 5, 8, 9, 7},
                                     {1, 1, 0, 1, 1, 1, 0, 1, 1, 1, 1, 1, 1, 1, 0, 1});
        const gapspec::GappySeries y({2, 7, 1, 8, 2, 8, 1, 8, 2, 8, 4, 5, 9, 0, 4, 5},
                                     {1, 1, 1, 1, 0, 1, 1, 1, 1, 0, 1, 1, 1, 1, 1, 1});
        gapspec::write_series_csv(dir_ / "x.csv", x);
        gapspec::write_series_csv(dir_ / "y.csv", y);
    }
    void TearDown() override { fs::remove_all(dir_); }

    Outcome run(const std::string& args) const {
        const auto out = dir_ / "stdout.txt";
        const auto err = dir_ / "stderr.txt";
        const std::string cmd = std::string("\"") + GAPSPEC_CLI_PATH + "\" " + args + " >\"" + out.string() +
                                "\" 2>\"" + err.string() + "\"";
        const int raw = std::system(cmd.c_str());
        Outcome o;
        o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
        o.out = gapspec::read_text_file(out);
        o.err = gapspec::read_text_file(err);
        return o;
    }

    std::string path(const char* name) const { return (dir_ / name).string(); }

    static std::string first_line(const fs::path& p) {
        const auto text = gapspec::read_text_file(p);
        return text.substr(0, text.find('\n'));
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, EstimateWritesCovarianceAndSpectrum) {
    const auto o = run("estimate --input " + path("x.csv") + " --window -3:3 --correct --out " + path("est"));
    ASSERT_EQ(o.status, 0) << o.err;
    EXPECT_NE(o.out.find("condition_estimate"), std::string::npos);
    EXPECT_EQ(first_line(dir_ / "est/covariance.csv"), "lag_index,lag_time,value,pair_weight");
    EXPECT_EQ(first_line(dir_ / "est/spectrum.csv"), "freq,real,imag,magnitude");
}

TEST_F(CliTest, CrossEstimate) {
    const auto o = run("estimate --input " + path("x.csv") + " --input-y " + path("y.csv") +
                       " --window -2:4 --correct --out " + path("cross"));
    ASSERT_EQ(o.status, 0) << o.err;
    EXPECT_TRUE(fs::exists(dir_ / "cross/covariance.csv"));
}

TEST_F(CliTest, MatrixDump) {
    const auto o = run("matrix --weights " + path("x.csv") + " --window -2:2 --out " + path("m/matrix.csv"));
    ASSERT_EQ(o.status, 0) << o.err;
    EXPECT_EQ(first_line(dir_ / "m/matrix.csv"), "k,-2,-1,0,1,2");
}

TEST_F(CliTest, Baselines) {
    auto o = run("baseline --input " + path("x.csv") + " --method sample_and_hold --window -3:3 --out " + path("sh"));
    ASSERT_EQ(o.status, 0) << o.err;
    EXPECT_EQ(first_line(dir_ / "sh/covariance.csv"), "method,lag_index,lag_time,value,pair_weight");
    o = run("baseline --input " + path("x.csv") + " --method lomb_scargle --offset-correct --window -4:3 --out " +
            path("ls"));
    ASSERT_EQ(o.status, 0) << o.err;
    const auto text = gapspec::read_text_file(dir_ / "ls/lomb_scargle.csv");
    EXPECT_NE(text.find("lomb_scargle_corrected"), std::string::npos);
}

TEST_F(CliTest, Simulate) {
    const auto o = run(std::string("simulate --config ") + GAPSPEC_CONFIG_DIR +
                       "/long_gaps.json --seed 5 --threads 2 --out " + path("sim"));
    ASSERT_EQ(o.status, 0) << o.err;
    EXPECT_TRUE(fs::exists(dir_ / "sim/manifest.json"));
    EXPECT_TRUE(fs::exists(dir_ / "sim/n100/auto_spectrum_mean.csv"));
}

TEST_F(CliTest, StructuredErrors) {
    auto o = run("estimate --input " + path("missing.csv") + " --window -1:1");
    EXPECT_EQ(o.status, 17);
    EXPECT_NE(o.err.find("error: code=IO_ERROR message="), std::string::npos) << o.err;

    o = run("estimate --input " + path("x.csv") + " --window 3");
    EXPECT_EQ(o.status, 1);
    EXPECT_NE(o.err.find("code=INVALID_ARGUMENT"), std::string::npos) << o.err;

    o = run("estimate --input " + path("x.csv") + " --window -15:0 --correct --out " + path("bad"));
    EXPECT_NE(o.status, 0);
    EXPECT_NE(o.err.find("code="), std::string::npos);

    gapspec::write_text_file(dir_ / "broken.csv", "0,1,1\n1,oops,1\n");
    o = run("estimate --input " + path("broken.csv") + " --window 0:0");
    EXPECT_EQ(o.status, 7);
    EXPECT_NE(o.err.find("code=PARSE_ERROR"), std::string::npos);
    EXPECT_NE(o.err.find("line 2"), std::string::npos);

    o = run("frobnicate");
    EXPECT_EQ(o.status, 64);
    EXPECT_NE(o.err.find("code=USAGE"), std::string::npos);
}
