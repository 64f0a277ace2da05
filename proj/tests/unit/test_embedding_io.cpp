#include <doctest.h>

#include <sstream>

#include "core/error.hpp"
#include "experiment/embedding_io.hpp"
#include "support/generators.hpp"
#include "support/tempdir.hpp"

using namespace mdne;

TEST_CASE("embeddings round-trip exactly") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        testing::Rng rng(seed);
        const std::size_t n = testing::pick(rng, 1, 20), d = testing::pick(rng, 1, 6);
        Matrix values = testing::random_matrix(rng, n, d, -1e3, 1e3);
        values(0, 0) = 1e-300;
        std::ostringstream out;
        write_embeddings(out, testing::numbered_ids(n), values);
        std::istringstream in(out.str());
        const EmbeddingTable t = read_embeddings(in);
        CHECK(t.node_ids == testing::numbered_ids(n));
        CHECK(t.values == values);
    }
}

TEST_CASE("embedding file layout") {
    std::ostringstream out;
    write_embeddings(out, {"a", "b"}, Matrix::from_rows({{0.5, 1}, {0, 0.25}}));
    CHECK(out.str() == "#mdne v1 n=2 d=2\na\t0.5\t1\nb\t0\t0.25\n");
    testing::TempDir dir;
    save_embeddings(dir / "e.tsv", {"a"}, Matrix::from_rows({{2}}));
    CHECK(load_embeddings(dir / "e.tsv").values == Matrix::from_rows({{2}}));
}

TEST_CASE("malformed embedding files") {
    auto read = [](const std::string& text) {
        std::istringstream in(text);
        return read_embeddings(in);
    };
    CHECK_THROWS_AS(read("#mdne v1 n=1 d=2\na\t1\n"), ValidationError);
    CHECK_THROWS_AS(read("#mdne v1 n=1 d=2\na\t1\t2\t3\n"), ValidationError);
    CHECK_THROWS_AS(read("#mdne v1 n=2 d=1\na\t1\n"), ValidationError);
    CHECK_THROWS_AS(read("#mdne v1 n=1 d=1\na\tx\n"), ParseError);
    CHECK_THROWS_AS(read("hello\n"), ParseError);
    try {
        read("#mdne v1 n=2 d=2\na\t1\t2\nb\t1\n");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}
