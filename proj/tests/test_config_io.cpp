#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hlslab/config.hpp"
#include "hlslab/io.hpp"
#include "hlslab/minitoml.hpp"

using namespace hlslab;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

}  // namespace

TEST_CASE("toml subset parses scalars, strings, arrays and sections") {
    const auto doc = toml_parse(
        "# comment\n"
        "kind = \"lane-emden\"\n"
        "n = 3\n"
        "p = 2.0\n"
        "flag = true\n"
        "vals = [1, 2, 3]\n"
        "[shot]\n"
        "rtol = 1e-10  # inline comment\n");
    CHECK(doc.at("kind").str == "lane-emden");
    CHECK(doc.at("n").integer == 3);
    CHECK(doc.at("p").real == 2.0);
    CHECK(doc.at("flag").boolean == true);
    CHECK(doc.at("vals").array.size() == 3);
    CHECK(doc.at("shot.rtol").real == 1e-10);
}

TEST_CASE("toml syntax errors carry the line number") {
    try {
        toml_parse("n = 3\np = = 2\n");
        FAIL("expected toml_error");
    } catch (const toml_error& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(toml_parse("x = \"abc\n"), toml_error);
    CHECK_THROWS_AS(toml_parse("[shot\nrtol = 1\n"), toml_error);
    CHECK_THROWS_AS(toml_parse("n = 3\nn = 4\n"), toml_error);
}

TEST_CASE("minimal config gets defaults applied") {
    const auto path = write_temp("hlslab_min.toml",
                                 "n = 3\np = 2.0\nq = 2.0\nkind = \"lane-emden\"\n");
    const auto cfg = parse_config(path);
    CHECK(cfg.n == 3);
    CHECK(cfg.shot.rtol == 1e-10);
    CHECK(cfg.shot.r_max == 1e4);
    CHECK(cfg.shot.eps_decay == 1e-8);
    CHECK(cfg.search.a == 2.0);
    const auto spec = cfg.build_system();
    CHECK(spec.L == 2);
}

TEST_CASE("config rejects unknown keys and bad semantics") {
    const auto bad_key = write_temp("hlslab_badkey.toml", "n = 3\np = 2.0\nq = 2.0\nzz = 1\n");
    CHECK_THROWS_WITH(parse_config(bad_key), Catch::Matchers::ContainsSubstring("zz"));

    const auto bad_nk = write_temp("hlslab_badnk.toml",
                                   "kind = \"cascade\"\nn = 3\nk = 2\np = 3.0\nq = 3.0\n");
    CHECK_THROWS_WITH(parse_config(bad_nk), Catch::Matchers::ContainsSubstring("n > 2k"));

    const auto bad_n = write_temp("hlslab_badn.toml", "n = 2\np = 2.0\nq = 2.0\n");
    CHECK_THROWS_AS(parse_config(bad_n), config_error);

    // pq <= 1 parses (the system exists); exponent-requiring commands reject
    const auto pq1 = write_temp("hlslab_pq1.toml", "n = 3\np = 1.0\nq = 1.0\n");
    const auto cfg = parse_config(pq1);
    CHECK_THROWS_WITH(cfg.require_exponents(), Catch::Matchers::ContainsSubstring("pq>1"));
}

TEST_CASE("custom monomial tables") {
    const auto path = write_temp("hlslab_custom.toml",
                                 "kind = \"custom\"\nn = 3\n"
                                 "rhs1 = \"u2^2\"\n"
                                 "rhs2 = \"u1^2 + 0.5*u1*u2\"\n");
    const auto cfg = parse_config(path);
    const auto spec = cfg.build_system();
    REQUIRE(spec.L == 2);
    CHECK(spec.rhs[0].size() == 1);
    REQUIRE(spec.rhs[1].size() == 2);
    CHECK(spec.rhs[1][0].exponents == std::vector<double>{2.0, 0.0});
    CHECK(spec.rhs[1][1].coeff == 0.5);
    CHECK(spec.rhs[1][1].exponents == std::vector<double>{1.0, 1.0});

    CHECK_THROWS_AS(SystemConfig::parse_monomial_sum("u3", 2), config_error);
    CHECK_THROWS_AS(SystemConfig::parse_monomial_sum("u1 +", 2), config_error);
    CHECK_THROWS_AS(SystemConfig::parse_monomial_sum("u1 ? u2", 2), config_error);
}

TEST_CASE("config digest is stable under key reordering, changes on semantics") {
    const auto a = write_temp("hlslab_da.toml",
                              "n = 3\np = 2.0\nq = 2.0\n[shot]\nrtol = 1e-10\n");
    const auto b = write_temp("hlslab_db.toml",
                              "q = 2.0\np = 2.0\nn = 3\n[shot]\nrtol = 1e-10\n");
    const auto c = write_temp("hlslab_dc.toml",
                              "n = 3\np = 2.0\nq = 2.0\n[shot]\nrtol = 1e-9\n");
    const auto da = fnv1a64(parse_config(a).canonical());
    const auto db = fnv1a64(parse_config(b).canonical());
    const auto dc = fnv1a64(parse_config(c).canonical());
    CHECK(da == db);
    CHECK(da != dc);

    // explicitly writing a default value does not change the digest
    const auto d = write_temp("hlslab_dd.toml",
                              "n = 3\np = 2.0\nq = 2.0\n[shot]\nrtol = 1e-10\natol = 1e-12\n");
    CHECK(fnv1a64(parse_config(d).canonical()) == da);
}

TEST_CASE("profile csv round-trips at 17 significant digits") {
    RadialProfile prof;
    prof.n = 3;
    prof.r = {0.0, 1e-6, 0.123456789012345678, 2.0};
    prof.u = {{1.0, 0.9999999999999, 0.87654321, 1.0 / 3.0}};
    prof.du = {{0.0, -1e-7, -0.25, -1.234e-12}};
    const auto csv = profile_to_csv(prof);
    CHECK(csv.rfind("r,u1,du1\n", 0) == 0);
    const auto back = profile_from_csv(csv, 3);
    REQUIRE(back.size() == prof.size());
    for (std::size_t k = 0; k < prof.size(); ++k) {
        CHECK(back.r[k] == prof.r[k]);
        CHECK(back.u[0][k] == prof.u[0][k]);
        CHECK(back.du[0][k] == prof.du[0][k]);
    }

    CHECK_THROWS_AS(profile_from_csv("bogus\n", 3), std::exception);
}

TEST_CASE("atomic write replaces the target completely") {
    const auto path =
        (std::filesystem::temp_directory_path() / "hlslab_atomic.txt").string();
    atomic_write_file(path, "first\n");
    atomic_write_file(path, "second\n");
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    CHECK(content == "second\n");
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
    std::filesystem::remove(path);
}
