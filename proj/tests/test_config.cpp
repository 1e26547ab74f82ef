#include <cstdio>
#include <fstream>

#include <doctest.h>

#include "mmci/config.hpp"

using namespace mmci;

TEST_CASE("parse key-value lines with comments and blank lines") {
    auto cfg = KeyValueConfig::parse_string(
        "# generator settings\n"
        "seed = 42\n"
        "\n"
        "rho=0.9   # inline comment\n"
        "  name =  spurious demo  \n");
    CHECK(cfg.get_int("seed", 0) == 42);
    CHECK(cfg.get_double("rho", 0.0) == doctest::Approx(0.9));
    CHECK(cfg.get_string("name", "") == "spurious demo");
    CHECK(cfg.has("rho"));
    CHECK(!cfg.has("missing"));
}

TEST_CASE("fallbacks apply for missing keys") {
    auto cfg = KeyValueConfig::parse_string("a = 1\n");
    CHECK(cfg.get_double("b", 2.5) == doctest::Approx(2.5));
    CHECK(cfg.get_int("b", 7) == 7);
    CHECK(cfg.get_string("b", "x") == "x");
}

TEST_CASE("malformed numbers raise config_error") {
    auto cfg = KeyValueConfig::parse_string("lr = fast\nk = 3.5\n");
    CHECK_THROWS_AS((void)cfg.get_double("lr", 0.0), config_error);
    CHECK_THROWS_AS((void)cfg.get_int("k", 0), config_error);
}

TEST_CASE("line without separator raises config_error") {
    CHECK_THROWS_AS((void)KeyValueConfig::parse_string("just some words\n"),
                    config_error);
}

TEST_CASE("serialization round-trips through parse_string") {
    KeyValueConfig cfg;
    cfg.set("alpha", "0.125");
    cfg.set("label", "ood-split");
    cfg.set("n", "200");
    auto again = KeyValueConfig::parse_string(cfg.to_string());
    CHECK(again.values() == cfg.values());
    // map storage makes serialization order-stable
    CHECK(again.to_string() == cfg.to_string());
}

TEST_CASE("file round trip and missing file error") {
    const char* path = "cfg_roundtrip_test.cfg";
    {
        std::ofstream out(path);
        out << "x = 1\ny = two\n";
    }
    auto cfg = KeyValueConfig::parse_file(path);
    CHECK(cfg.get_int("x", 0) == 1);
    CHECK(cfg.get_string("y", "") == "two");
    std::remove(path);
    CHECK_THROWS_AS((void)KeyValueConfig::parse_file("definitely_missing.cfg"),
                    io_error);
}
