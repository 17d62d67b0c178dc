// Run configuration: key parsing, typo rejection, file loading, canonical
// text output, and validation ranges.
#include "doctest.h"

#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "causalts/errors.hpp"
#include "causalts/runconfig.hpp"

using namespace causalts;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("causalts_cfg_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write_file(const TempDir& dir, const std::string& name,
                       const std::string& content) {
    const std::string p = dir.file(name);
    std::ofstream out(p);
    out << content;
    return p;
}

}  // namespace

TEST_SUITE("runconfig") {

TEST_CASE("set_key covers every documented key") {
    RunConfig cfg;
    cfg.set_key("data.path", "series.csv");
    cfg.set_key("split.train", "0.7");
    cfg.set_key("split.val", "0.15");
    cfg.set_key("split.test", "0.15");
    cfg.set_key("window.lookback", "12");
    cfg.set_key("window.horizon", "3");
    cfg.set_key("window.stride", "2");
    cfg.set_key("pc.alpha", "0.01");
    cfg.set_key("granger.lag", "6");
    cfg.set_key("adapter.alpha", "2");
    cfg.set_key("adapter.beta", "3");
    cfg.set_key("train.lr", "5e-4");
    cfg.set_key("train.batch", "64");
    cfg.set_key("train.epochs", "40");
    cfg.set_key("train.patience", "7");
    cfg.set_key("train.lambda", "0.05");
    cfg.set_key("train.seed", "18446744073709551615");  // full uint64 range
    cfg.set_key("train.backbone", "mlp");
    cfg.set_key("out.dir", "results");
    cfg.set_key("model.dim", "32");
    cfg.set_key("model.enc_width", "24");
    cfg.set_key("model.layers", "2");
    cfg.set_key("model.heads", "4");
    cfg.set_key("exp.seeds", "3");
    cfg.set_key("exp.rows", "600");
    cfg.set_key("exp.obs_noise", "0.5");

    CHECK(cfg.data_path == "series.csv");
    CHECK(cfg.split.train == 0.7);
    CHECK(cfg.split.val == 0.15);
    CHECK(cfg.split.test == 0.15);
    CHECK(cfg.lookback == 12);
    CHECK(cfg.horizon == 3);
    CHECK(cfg.stride == 2);
    CHECK(cfg.pc_alpha == 0.01);
    CHECK(cfg.granger_lag == 6);
    CHECK(cfg.adapter_alpha == 2.0);
    CHECK(cfg.adapter_beta == 3.0);
    CHECK(cfg.lr == 5e-4);
    CHECK(cfg.batch == 64);
    CHECK(cfg.epochs == 40);
    CHECK(cfg.patience == 7);
    CHECK(cfg.lambda == 0.05);
    CHECK(cfg.seed == 18446744073709551615ULL);
    CHECK(cfg.backbone == "mlp");
    CHECK(cfg.out_dir == "results");
    CHECK(cfg.model_dim == 32);
    CHECK(cfg.enc_width == 24);
    CHECK(cfg.layers == 2);
    CHECK(cfg.heads == 4);
    CHECK(cfg.exp_seeds == 3);
    CHECK(cfg.exp_rows == 600);
    CHECK(cfg.exp_obs_noise == 0.5);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("unknown keys and unparsable values are rejected") {
    RunConfig cfg;
    CHECK_THROWS_AS(cfg.set_key("window.lokback", "8"), ConfigError);  // typo
    CHECK_THROWS_AS(cfg.set_key("", "8"), ConfigError);
    CHECK_THROWS_AS(cfg.set_key("window.lookback", "eight"), ConfigError);
    CHECK_THROWS_AS(cfg.set_key("window.lookback", "8.5"), ConfigError);
    CHECK_THROWS_AS(cfg.set_key("window.lookback", ""), ConfigError);
    CHECK_THROWS_AS(cfg.set_key("train.lr", "fast"), ConfigError);
    CHECK_THROWS_AS(cfg.set_key("train.lr", "1e999"), ConfigError);  // not finite
    CHECK_THROWS_AS(cfg.set_key("train.lr", "0.1x"), ConfigError);   // trailing junk
    CHECK_THROWS_AS(cfg.set_key("train.seed", "-1"), ConfigError);
    CHECK_THROWS_AS(cfg.set_key("train.seed", "12d"), ConfigError);
}

TEST_CASE("file loading skips comments and blank lines, reports line numbers") {
    TempDir dir;
    const std::string path = write_file(dir, "run.cfg",
                                        "# experiment configuration\n"
                                        "\n"
                                        "  window.lookback = 16\n"
                                        "\ttrain.lr=2e-3\n"
                                        "   # indented comment\n"
                                        "out.dir = runs/exp1\n");
    RunConfig cfg = RunConfig::from_file(path);
    CHECK(cfg.lookback == 16);
    CHECK(cfg.lr == 2e-3);
    CHECK(cfg.out_dir == "runs/exp1");
    // Untouched keys keep their defaults.
    CHECK(cfg.horizon == RunConfig{}.horizon);

    CHECK_THROWS_AS(RunConfig::from_file(dir.file("missing.cfg")), ConfigError);

    const std::string bad1 = write_file(dir, "bad1.cfg", "window.lookback 16\n");
    CHECK_THROWS_AS(RunConfig::from_file(bad1), ConfigError);
    const std::string bad2 = write_file(dir, "bad2.cfg", "= 16\n");
    CHECK_THROWS_AS(RunConfig::from_file(bad2), ConfigError);
    const std::string bad3 = write_file(dir, "bad3.cfg", "nope.key = 1\n");
    CHECK_THROWS_AS(RunConfig::from_file(bad3), ConfigError);

    // Line numbers in diagnostics point at the offending line.
    const std::string bad4 = write_file(dir, "bad4.cfg", "# one\n\nbroken line\n");
    try {
        RunConfig::from_file(bad4);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("canonical text is sorted, complete, and round trips") {
    RunConfig cfg;
    cfg.set_key("data.path", "d.csv");
    cfg.set_key("train.lr", "0.002");
    cfg.set_key("train.seed", "42");
    cfg.set_key("exp.obs_noise", "0.5");
    const std::string text = cfg.to_text();

    // One line per key, keys sorted.
    std::istringstream in(text);
    std::vector<std::string> keys;
    for (std::string line; std::getline(in, line);) {
        const std::size_t eq = line.find(" = ");
        REQUIRE(eq != std::string::npos);
        keys.push_back(line.substr(0, eq));
    }
    CHECK(keys.size() == 26);
    CHECK(std::is_sorted(keys.begin(), keys.end()));
    CHECK(text.back() == '\n');

    // Loading the emitted text reproduces the emitted text.
    TempDir dir;
    const std::string path = dir.file("resolved.cfg");
    cfg.write(path);
    RunConfig reloaded = RunConfig::from_file(path);
    CHECK(reloaded.to_text() == text);
}

TEST_CASE("validation ranges") {
    auto bad = [](auto mutate) {
        RunConfig cfg;
        mutate(cfg);
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    };
    CHECK_NOTHROW(RunConfig{}.validate());
    bad([](RunConfig& c) { c.split.train = 0.9; });  // fractions no longer sum to 1
    bad([](RunConfig& c) { c.lookback = 0; });
    bad([](RunConfig& c) { c.horizon = 0; });
    bad([](RunConfig& c) { c.stride = 0; });
    bad([](RunConfig& c) { c.pc_alpha = 0.0; });
    bad([](RunConfig& c) { c.pc_alpha = 1.0; });
    bad([](RunConfig& c) { c.granger_lag = 0; });
    bad([](RunConfig& c) { c.lr = 0.0; });
    bad([](RunConfig& c) { c.batch = 0; });
    bad([](RunConfig& c) { c.epochs = 0; });
    bad([](RunConfig& c) { c.patience = 0; });
    bad([](RunConfig& c) { c.lambda = -0.5; });
    bad([](RunConfig& c) { c.backbone = "lstm"; });
    bad([](RunConfig& c) { c.out_dir = ""; });
    bad([](RunConfig& c) { c.model_dim = 0; });
    bad([](RunConfig& c) { c.enc_width = 0; });
    bad([](RunConfig& c) { c.layers = 0; });
    bad([](RunConfig& c) { c.model_dim = 16; c.heads = 3; });
    bad([](RunConfig& c) { c.exp_seeds = 0; });
    bad([](RunConfig& c) { c.exp_rows = 12; });  // too small for the window shape
    bad([](RunConfig& c) { c.exp_obs_noise = -0.1; });
}

}  // TEST_SUITE
