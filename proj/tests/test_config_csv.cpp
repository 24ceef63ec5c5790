#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gyrolat/config.hpp>
#include <gyrolat/csv.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

using namespace gyrolat;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("config parsing with sections and comments") {
    const auto cfg = parse_config_text(
        "# leading comment\n"
        "top = 1\n"
        "\n"
        "[lattice]\n"
        "c = 2.5\n"
        "; another comment style\n"
        "m1 = 1\n"
        "[source]\n"
        "path = out=dir\n");
    CHECK(cfg.has("top"));
    CHECK(cfg.has("lattice.c"));
    CHECK(cfg.has("lattice.m1"));
    CHECK(cfg.get("source.path", "") == "out=dir");  // only the first '=' splits
    CHECK(cfg.get_double("lattice.c", 0.0) == 2.5);
    CHECK(cfg.line_of("lattice.m1") == 7);
    CHECK(cfg.line_of("absent") == -1);
    CHECK(!cfg.has("lattice.absent"));
}

TEST_CASE("config parse errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_config_text("a = 1\n[broken\n"),
                         doctest::Contains("config line 2"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_config_text("[]\n"), doctest::Contains("empty section"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_config_text("just some words\n"),
                         doctest::Contains("expected key = value"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_config_text("= 5\n"), doctest::Contains("empty key"),
                         std::runtime_error);
}

TEST_CASE("duplicate keys are rejected with both locations") {
    try {
        parse_config_text("a = 1\nb = 2\na = 3\n");
        FAIL("expected duplicate-key error");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("duplicate key 'a'") != std::string::npos);
        CHECK(msg.find("1") != std::string::npos);
        CHECK(msg.find("3") != std::string::npos);
    }
    // The same bare key under different sections is two distinct keys.
    CHECK_NOTHROW(parse_config_text("[x]\nn = 1\n[y]\nn = 2\n"));
}

TEST_CASE("typed getters") {
    const auto cfg = parse_config_text(
        "d = 1e-3\n"
        "i = -42\n"
        "t = yes\n"
        "f = 0\n"
        "bad = 12q\n"
        "word = hello\n");
    CHECK(cfg.get_double("d", 0.0) == 1e-3);
    CHECK(cfg.get_double("missing", 7.5) == 7.5);
    CHECK(cfg.get_int("i", 0) == -42);
    CHECK(cfg.get_int("missing", 9) == 9);
    CHECK(cfg.get_bool("t", false) == true);
    CHECK(cfg.get_bool("f", true) == false);
    CHECK(cfg.get_bool("missing", true) == true);
    CHECK(cfg.get("word", "") == "hello");
    CHECK_THROWS_WITH_AS(cfg.get_double("bad", 0.0), doctest::Contains("bad"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(cfg.get_int("bad", 0), doctest::Contains("not an integer"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(cfg.get_bool("word", false), doctest::Contains("not a boolean"),
                         std::runtime_error);
}

TEST_CASE("unconsumed keys are reported") {
    const auto cfg = parse_config_text("used = 1\nghost = 2\n");
    cfg.get_int("used", 0);
    try {
        cfg.require_all_consumed();
        FAIL("expected unknown-key error");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("ghost") != std::string::npos);
        CHECK(msg.find("line 2") != std::string::npos);
        CHECK(msg.find("used") == std::string::npos);
    }
    cfg.get("ghost", "");
    CHECK_NOTHROW(cfg.require_all_consumed());

    // has() counts as consumption: probing for optional keys is fine.
    const auto cfg2 = parse_config_text("opt = 3\n");
    cfg2.has("opt");
    CHECK_NOTHROW(cfg2.require_all_consumed());
}

TEST_CASE("serialize and reparse preserves every entry") {
    const auto cfg = parse_config_text(
        "free = x\n"
        "[b]\n"
        "one = 1\n"
        "[a]\n"
        "two = 2.5\n"
        "[b]\n"
        "three = yes\n");
    const auto again = parse_config_text(serialize_config(cfg));
    REQUIRE(again.keys().size() == cfg.keys().size());
    for (const auto& key : cfg.keys()) CHECK(again.get(key, "\x01") == cfg.get(key, "\x02"));
}

TEST_CASE("float formatting round-trips exactly") {
    for (const double v : {0.0, 0.1, -2.5, 1.0 / 3.0, 6.02214076e23, 1e-300, 3.14159265358979}) {
        const std::string s = format_float(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(format_float(0.1) == "0.10000000000000001");
    CHECK(format_float(1.0) == "1");
}

TEST_CASE("csv escaping") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("with,comma") == "\"with,comma\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
    CHECK(csv_escape("") == "");
}

TEST_CASE("csv writing pads ragged rows") {
    Table t;
    t.header = {"k1", "k2", "omega"};
    t.add_row({"1", "2", "3"});
    t.add_row({"4", "5"});
    t.add_row({"6", "7", "8", "9"});
    std::ostringstream os;
    write_csv(os, t);
    CHECK(os.str() ==
          "k1,k2,omega\n"
          "1,2,3\n"
          "4,5,\n"
          "6,7,8,9\n");
}

TEST_CASE("plotdata writing marks missing fields") {
    Table t;
    t.header = {"x", "y", "z"};
    t.add_row({"1", "2", "3"});
    t.add_row({"4", "", "6"});
    t.add_row({"7"});
    std::ostringstream os;
    write_plotdata(os, t);
    CHECK(os.str() ==
          "# x y z\n"
          "1 2 3\n"
          "4 nan 6\n"
          "7 nan nan\n");
}

TEST_CASE("file writers create readable output") {
    Table t;
    t.header = {"a"};
    t.add_row({"1.5"});
    const std::string path = "/tmp/gyrolat_csv_test.csv";
    write_csv_file(path, t);
    CHECK(slurp(path) == "a\n1.5\n");
    CHECK_THROWS_WITH_AS(write_csv_file("/nonexistent-dir/x.csv", t),
                         doctest::Contains("cannot open"), std::runtime_error);
    CHECK_THROWS_AS(parse_config_file("/nonexistent-dir/x.cfg"), std::runtime_error);
    std::remove(path.c_str());
}
