#include <doctest.h>

#include <sstream>

#include "core/error.hpp"
#include "experiment/config.hpp"
#include "support/tempdir.hpp"

using namespace mdne;

namespace {

// Every config needs the encoder widths; tests prepend them unless given.
ExperimentConfig parse(const std::string& text, const std::filesystem::path& base = "/base") {
    std::istringstream in(text.find("[model]") == std::string::npos ? "[model]\npreprocess = off\nhidden_dims = 8\n" + text : text);
    return parse_experiment_config(in, base);
}

}  // namespace

TEST_CASE("a full config maps onto the training and evaluation settings") {
    const ExperimentConfig c = parse(
        "[data]\nformat = cora\nname = toy\ncontent = a.content\ncites = /abs/a.cites\n"
        "[model]\npreprocess = off\nhidden_dims = 50, 8\n"
        "[loss]\nlambda = 0.1\nalpha = 0.2\nupsilon = 0.001\ngamma1 = 4\ngamma2 = 6\n"
        "[train]\nlr = 0.05\nmax_iters = 7\nbatch = 32\nconvergence_tol = 1e-3\nseed = 99\nthreads = 2\n"
        "[pretrain]\nenabled = no\nlr = 0.2\nepochs = 3\nbatch = 5\n"
        "[eval]\nks = 1, 2\nlink_ratios = 0.1\nattr_ratios = 0.2, 0.3\ntest_ratios = 0.5\nrepeats = 4\n"
        "[output]\ndir = results\n");
    CHECK(c.data.name == "toy");
    CHECK(c.data.format == DataFormat::cora);
    CHECK(c.data.content == std::filesystem::path("/base/a.content"));
    CHECK(c.data.cites == std::filesystem::path("/abs/a.cites"));
    CHECK_FALSE(c.train.spec.preprocess);
    CHECK(c.train.spec.hidden_dims == std::vector<std::size_t>{50, 8});
    CHECK(c.train.weights.lambda == 0.1);
    CHECK(c.train.weights.alpha == 0.2);
    CHECK(c.train.weights.upsilon == 0.001);
    CHECK(c.train.penalties.gamma1 == 4.0);
    CHECK(c.train.penalties.gamma2 == 6.0);
    CHECK(c.train.lr == 0.05);
    CHECK(c.train.max_iters == 7);
    CHECK(c.train.batch_size == 32);
    CHECK(c.train.convergence_tol == 1e-3);
    CHECK(c.train.seed == 99);
    CHECK(c.train.threads == 2);
    CHECK_FALSE(c.train.pretrain);
    CHECK(c.train.rbm.lr == 0.2);
    CHECK(c.train.rbm.epochs == 3);
    CHECK(c.train.rbm.batch == 5);
    CHECK(c.eval.ks == std::vector<std::size_t>{1, 2});
    CHECK(c.eval.attr_ratios == std::vector<double>{0.2, 0.3});
    CHECK(c.eval.repeats == 4);
    CHECK(c.output_dir == std::filesystem::path("/base/results"));
}

TEST_CASE("defaults apply when sections are omitted") {
    const ExperimentConfig c = parse("[data]\nformat = canonical\npath = net.txt\n");
    CHECK(c.data.format == DataFormat::canonical);
    CHECK(c.data.path == std::filesystem::path("/base/net.txt"));
    CHECK(c.train.lr == 0.01);
    CHECK(c.train.max_iters == 400);
    CHECK(c.train.batch_size == 0);
    CHECK(c.train.weights.lambda == 0.03);
    CHECK(c.train.pretrain);
    CHECK(c.eval.ks == std::vector<std::size_t>{1000, 3000, 5000});
    CHECK(c.output_dir == std::filesystem::path("/base/out"));
}

TEST_CASE("batch accepts auto and full") {
    CHECK(parse("[data]\ncontent = a\ncites = b\n[train]\nbatch = auto\n").train.batch_size == 0);
    CHECK(parse("[data]\ncontent = a\ncites = b\n[train]\nbatch = full\n").train.full_batch);
}

TEST_CASE("unknown keys and sections are rejected") {
    CHECK_THROWS_AS(parse("[train]\nlearning_rate = 0.1\n"), ValidationError);
    CHECK_THROWS_AS(parse("[optimizer]\nkind = adam\n"), ValidationError);
    CHECK_THROWS_AS(parse("[data]\nformat = xml\n"), ValidationError);
}

TEST_CASE("malformed values are parse errors") {
    CHECK_THROWS_AS(parse("[train]\nlr = fast\n"), ParseError);
    CHECK_THROWS_AS(parse("[train]\nmax_iters = -3\n"), ParseError);
    CHECK_THROWS_AS(parse("[pretrain]\nenabled = maybe\n"), ParseError);
    CHECK_THROWS_AS(parse("[eval]\nks = 10, x\n"), ParseError);
    CHECK_THROWS_AS(parse("[train\nlr = 1\n"), ParseError);
    CHECK_THROWS_AS(parse("lr = 1\n[model]\npreprocess = off\nhidden_dims = 8\n"), ValidationError);
    CHECK_THROWS_AS(parse("[model]\npreprocess = on\n"), ValidationError);  // hidden_dims missing
}

TEST_CASE("config files resolve paths against their own directory") {
    testing::TempDir dir;
    const auto path = dir.write("exp.ini", "[model]\npreprocess = off\nhidden_dims = 8\n[data]\ncontent = x.content\ncites = x.cites\n");
    const ExperimentConfig c = load_experiment_config(path);
    CHECK(c.data.content == dir.path() / "x.content");
    CHECK(c.output_dir == dir.path() / "out");
    CHECK_THROWS_AS(load_experiment_config(dir / "missing.ini"), IoError);
}

TEST_CASE("grid files") {
    std::istringstream good("[grid]\nlambda = 0, 0.01, 0.02\nalpha = 0.5\n");
    const Grid g = parse_grid(good);
    REQUIRE(g.size() == 2);
    CHECK(g[0].first == "lambda");
    CHECK(g[0].second == std::vector<double>{0.0, 0.01, 0.02});
    CHECK(g[1].second == std::vector<double>{0.5});
    std::istringstream other("[grid]\nlambda = 0\n[train]\nlr = 1\n");
    CHECK_THROWS_AS(parse_grid(other), ValidationError);
    std::istringstream bad("[grid]\nlambda = a\n");
    CHECK_THROWS_AS(parse_grid(bad), ParseError);
}
