#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "tdabands/diagram.hpp"
#include "tdabands/random.hpp"

#include "support/generators.hpp"

using namespace tdabands;

TEST_CASE("parse keeps matching rows and maps fields directly") {
    const Diagram d = parse_diagram(std::string("1,0.5,1.2\n"), 2.0, 1);
    REQUIRE(d.pairs.size() == 1);
    REQUIRE(d.pairs[0].birth == 0.5);
    REQUIRE(d.pairs[0].death == 1.2);
    REQUIRE(d.t_bound == 2.0);
    REQUIRE(d.dim == 1);
}

TEST_CASE("zero-persistence rows are dropped") {
    const Diagram d = parse_diagram(std::string("1,0.7,0.7\n"), 2.0, 1);
    REQUIRE(d.pairs.empty());
}

TEST_CASE("death before birth is a validation error") {
    REQUIRE_THROWS_AS(parse_diagram(std::string("1,1.5,1.0\n"), 2.0, 1), ValidationError);
}

TEST_CASE("death beyond t_bound names the offending row") {
    try {
        parse_diagram(std::string("1,0.1,0.5\n1,0.2,3.0\n"), 2.0, 1);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("malformed rows raise parse errors with line numbers") {
    try {
        parse_diagram(std::string("1,0.1,0.5\nnot,a\n"), 2.0, 1);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
    }
    REQUIRE_THROWS_AS(parse_diagram(std::string("1,zap,0.5\n"), 2.0, 1), ParseError);
}

TEST_CASE("header and comments are skipped, other dims filtered") {
    const std::string text = "# produced elsewhere\ndim,birth,death\n0,0,1\n1,0.25,0.75\n";
    const Diagram d = parse_diagram(text, 1.0, 1);
    REQUIRE(d.pairs.size() == 1);
    REQUIRE(d.pairs[0].birth == 0.25);
}

TEST_CASE("essential deaths honour the policy") {
    const std::string text = "1,0.5,inf\n";
    REQUIRE_THROWS_AS(parse_diagram(text, 2.0, 1, EssentialPolicy::reject), ValidationError);
    const Diagram d = parse_diagram(text, 2.0, 1, EssentialPolicy::truncate);
    REQUIRE(d.pairs.size() == 1);
    REQUIRE(d.pairs[0].death == 2.0);
}

TEST_CASE("write emits header plus one row per pair") {
    Diagram d = make_diagram({{0.5, 1.2}}, 2.0, 1);
    REQUIRE(write_diagram(d) == "dim,birth,death\n1,0.5,1.2\n");
    const Diagram empty = make_diagram({}, 2.0, 1);
    REQUIRE(write_diagram(empty) == "dim,birth,death\n");
}

TEST_CASE("parse after write is the identity on random diagrams") {
    Rng rng(20240817);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<PersistencePair> pairs;
        for (int i = 0; i < 100; ++i) {
            const double birth = rng.uniform(0.0, 1.5);
            const double death = rng.uniform(birth, 2.0);
            if (death > birth) pairs.push_back({birth, death});
        }
        const Diagram original = make_diagram(pairs, 2.0, 1);
        const Diagram round = parse_diagram(write_diagram(original), 2.0, 1);
        REQUIRE(round.pairs.size() == original.pairs.size());
        auto key = [](const PersistencePair& p) { return std::make_pair(p.birth, p.death); };
        auto a = original.pairs;
        auto b = round.pairs;
        std::sort(a.begin(), a.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
        std::sort(b.begin(), b.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
        REQUIRE(a == b);
    }
}

TEST_CASE("canonical diagrams respect the bound invariants") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Diagram d = tdabands::testing::random_diagram(rng, 50, 3.0);
        for (const auto& p : d.pairs) {
            REQUIRE(p.birth >= 0.0);
            REQUIRE(p.birth < p.death);
            REQUIRE(p.death <= d.t_bound);
            REQUIRE(p.height() >= 0.0);
        }
    }
}

TEST_CASE("negative birth rejected") {
    REQUIRE_THROWS_AS(make_diagram({{-0.1, 0.5}}, 1.0, 0), ValidationError);
}
