#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli_support.hpp"

using namespace cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "dicke3_cli_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

template <class Fn>
std::string usage_message(Fn&& fn) {
    try {
        fn();
    } catch (const UsageError& e) {
        return e.what();
    }
    return "";
}

std::string density_text(const std::vector<double>& rho) {
    std::ostringstream s;
    s << "dim 8\n";
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 8; ++c) s << (c ? " " : "") << rho[2 * (r * 8 + c)] << "," << rho[2 * (r * 8 + c) + 1];
        s << "\n";
    }
    return s.str();
}

} // namespace

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(2.0 / 3.0) == "0.666666666667");
    CHECK(format_number(-1.5037760132388303) == "-1.50377601324");
    CHECK(format_number(1e-20) == "1e-20");
    CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("CSV round trip keeps twelve significant digits") {
    std::mt19937 rng(3);
    std::normal_distribution<double> nd(0.0, 10.0);
    CsvTable t;
    t.header = {"a", "b", "c"};
    for (int i = 0; i < 20; ++i) t.rows.push_back({nd(rng), nd(rng) * 1e-9, static_cast<double>(i)});
    const auto path = scratch("round.csv");
    write_csv(path.string(), t);
    const CsvTable back = read_csv(path.string());
    REQUIRE(back.header == t.header);
    REQUIRE(back.rows.size() == t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (int j = 0; j < 3; ++j) {
            const double a = t.rows[i][j], b = back.rows[i][j];
            CHECK(std::abs(a - b) <= 5e-12 * std::abs(a));
            CHECK(format_number(a) == format_number(b));
        }
    CHECK(back.column("b") == 1);
    CHECK(back.column("zz") == -1);

    write_text(path, "a,b\n1,2\n3\n");
    CHECK(usage_message([&] { read_csv(path.string()); }).find(":3:") != std::string::npos);
    write_text(path, "a,b\n1,x\n");
    CHECK(usage_message([&] { read_csv(path.string()); }).find("field 'b'") != std::string::npos);
    write_text(path, "");
    CHECK(usage_message([&] { read_csv(path.string()); }).find("empty") != std::string::npos);
}

TEST_CASE("g ranges") {
    const GRange r = parse_g_range("0:2:0.1");
    const auto v = r.values();
    REQUIRE(v.size() == 21);
    CHECK(v.front() == 0.0);
    CHECK(v.back() == doctest::Approx(2.0));
    CHECK(parse_g_range("0.1:0.1:0.5").values().size() == 1);
    CHECK_THROWS_AS(parse_g_range("0:1"), UsageError);
    CHECK_THROWS_AS(parse_g_range("0:x:0.1"), UsageError);
    CHECK_THROWS_AS(parse_g_range("0:1:0.1:4"), UsageError);

    RunConfig c;
    c.g_range = parse_g_range("1:0:0.1");
    CHECK_THROWS_AS(c.validate(), UsageError);
    c.g_range = parse_g_range("0:1:0");
    CHECK_THROWS_AS(c.validate(), UsageError);
    c.g_range = parse_g_range("0:1:0.25");
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("run configuration validation") {
    RunConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.nmax == 40);
    CHECK(c.tmax_scaled == 3.0);
    CHECK(c.steps == 400);
    CHECK(c.gme_stride == 4);
    RunConfig bad = c;
    bad.omega = 0.0;
    CHECK_THROWS_AS(bad.validate(), UsageError);
    bad = c;
    bad.delta = -1.0;
    CHECK_THROWS_AS(bad.validate(), UsageError);
    bad = c;
    bad.nmax = 2;
    CHECK_THROWS_AS(bad.validate(), UsageError);
    bad = c;
    bad.steps = 0;
    CHECK_THROWS_AS(bad.validate(), UsageError);
    bad = c;
    bad.gme_stride = 0;
    CHECK_THROWS_AS(bad.validate(), UsageError);
    bad = c;
    bad.levels = 4 * 41 + 1;
    CHECK_THROWS_AS(bad.validate(), UsageError);
}

TEST_CASE("config files") {
    const auto path = scratch("config.json");
    write_text(path, R"({"delta": 0.1, "g": 0.5, "nmax": 60, "method": ["rwa", "exact"], "steps": 40,
                         "g_range": "0:1:0.5", "out": "x.csv"})");
    RunConfig c;
    apply_config_file(path.string(), c);
    CHECK(c.delta == 0.1);
    CHECK(c.g == 0.5);
    CHECK(c.nmax == 60);
    CHECK(c.steps == 40);
    CHECK(c.omega == 1.0);
    CHECK(c.methods == std::vector<std::string>{"rwa", "exact"});
    REQUIRE(c.g_range.has_value());
    CHECK(c.g_range->values().size() == 3);
    CHECK(c.out == "x.csv");

    write_text(path, R"({"method": "grwa"})");
    RunConfig single;
    apply_config_file(path.string(), single);
    CHECK(single.methods == std::vector<std::string>{"grwa"});

    write_text(path, R"({"detla": 0.1})");
    CHECK(usage_message([&] { RunConfig x; apply_config_file(path.string(), x); }).find("unknown key 'detla'") !=
          std::string::npos);
    write_text(path, R"({"nmax": "forty"})");
    CHECK_THROWS_AS(([&] { RunConfig x; apply_config_file(path.string(), x); })(), UsageError);
    write_text(path, "[1, 2]");
    CHECK_THROWS_AS(([&] { RunConfig x; apply_config_file(path.string(), x); })(), UsageError);
    write_text(path, "{");
    CHECK_THROWS_AS(([&] { RunConfig x; apply_config_file(path.string(), x); })(), UsageError);
    CHECK_THROWS_AS(([&] { RunConfig x; apply_config_file(scratch("absent.json").string(), x); })(), UsageError);
}

TEST_CASE("method lists") {
    CHECK(parse_methods({"rwa", "grwa"}, false) == std::vector<dicke3_method>{DICKE3_METHOD_RWA, DICKE3_METHOD_GRWA});
    CHECK(parse_methods({"rwa", "exact", "rwa"}, true) ==
          std::vector<dicke3_method>{DICKE3_METHOD_EXACT, DICKE3_METHOD_RWA});
    CHECK(parse_methods({}, true) == std::vector<dicke3_method>{DICKE3_METHOD_EXACT});
    CHECK(usage_message([] { parse_methods({"exact", "RWA2"}, false); }).find("RWA2") != std::string::npos);
}

TEST_CASE("worker thread cap") {
    ::setenv("DICKE3_THREADS", "1", 1);
    CHECK(worker_threads() == 1);
    ::setenv("DICKE3_THREADS", "0", 1);
    CHECK_THROWS_AS(worker_threads(), UsageError);
    ::setenv("DICKE3_THREADS", "4x", 1);
    CHECK_THROWS_AS(worker_threads(), UsageError);
    ::unsetenv("DICKE3_THREADS");
    CHECK(worker_threads() >= 1);
}

TEST_CASE("density files") {
    std::vector<double> rho(128, 0.0);
    rho[2 * (1 * 8 + 1)] = 0.5;
    rho[2 * (1 * 8 + 2)] = 0.25;
    rho[2 * (1 * 8 + 2) + 1] = -0.125;
    rho[2 * (2 * 8 + 1)] = 0.25;
    rho[2 * (2 * 8 + 1) + 1] = 0.125;
    rho[2 * (2 * 8 + 2)] = 0.5;

    int dim = 0;
    const auto parsed = parse_density("# comment\n" + density_text(rho), "mem", dim);
    CHECK(dim == 8);
    CHECK(parsed == rho);

    const auto path = scratch("rho.txt");
    write_density_file(path.string(), rho.data(), 8);
    CHECK(read_text(path).rfind("dim 8\n", 0) == 0);
    CHECK(read_density_file(path.string(), dim) == rho);

    auto message = [](const std::string& text) {
        return usage_message([&] {
            int d = 0;
            parse_density(text, "f.txt", d);
        });
    };
    CHECK(message("dim 4\n").find("f.txt:1:5: dimension must be 8") != std::string::npos);
    CHECK(message("size 8\n").find("f.txt:1:1: expected 'dim N'") != std::string::npos);
    CHECK(message("dim\n").find("f.txt:1:") != std::string::npos);
    CHECK(message("dim 8 9\n").find("unexpected text") != std::string::npos);
    CHECK(message("").find("missing 'dim N'") != std::string::npos);
    CHECK(message("dim 8\n1,0 0,0\n0,0 x,0\n").find("f.txt:3:5: bad real part") != std::string::npos);
    CHECK(message("dim 8\n1,0 0,y\n").find("f.txt:2:7: bad imaginary part") != std::string::npos);
    CHECK(message("dim 8\n1 0\n").find("f.txt:2:1: expected 're,im'") != std::string::npos);
    CHECK(message("dim 8\n1,0 inf,0\n").find("not finite") != std::string::npos);
    CHECK(message("dim 8\n1,0\n").find("expected 64") != std::string::npos);
    std::string too_many = density_text(rho) + "0,0\n";
    CHECK(message(too_many).find("more than 64") != std::string::npos);
    CHECK_THROWS_AS(read_density_file(scratch("absent.txt").string(), dim), UsageError);
}

TEST_CASE("plot scripts") {
    const auto spectrum_csv = scratch("spectrum.csv");
    CsvTable t;
    t.header = {"g_over_omega", "level_index", "exact", "rwa"};
    for (int g = 0; g < 3; ++g)
        for (int l = 0; l < 2; ++l) t.rows.push_back({0.1 * g, double(l), -1.5 + l, -1.5 + l});
    write_csv(spectrum_csv.string(), t);
    const std::string s = plot_script(spectrum_csv.string(), PlotKind::spectrum);
    CHECK(s.find("every 2::l") != std::string::npos);
    CHECK(s.find("'exact'") != std::string::npos);
    CHECK(s.find("'rwa'") != std::string::npos);
    CHECK(s.find("'grwa'") == std::string::npos);

    t.header[2] = "exakt";
    write_csv(spectrum_csv.string(), t);
    CHECK(usage_message([&] { plot_script(spectrum_csv.string(), PlotKind::spectrum); }).find("missing column 'exact'") !=
          std::string::npos);

    const auto dyn = scratch("dynamics.csv");
    CsvTable d;
    d.header = {"t_scaled", "concurrence_exact", "gme_exact", "gme_computed_exact", "negativity_AB_C_exact"};
    d.rows = {{0.0, 0.6, 0.4, 1, 0.4}, {1.0, 0.5, 0.3, 1, 0.3}};
    write_csv(dyn.string(), d);
    const std::string ds = plot_script(dyn.string(), PlotKind::dynamics);
    CHECK(ds.find("multiplot") != std::string::npos);
    CHECK(ds.find("'gme_exact'") != std::string::npos);
    CHECK(ds.find("'negativity_AB_C_exact'") != std::string::npos);
    CHECK_THROWS_AS(plot_script(dyn.string(), PlotKind::spectrum), UsageError);
    d.header = {"t_scaled", "x", "y", "z", "w"};
    write_csv(dyn.string(), d);
    CHECK_THROWS_AS(plot_script(dyn.string(), PlotKind::dynamics), UsageError);
}

TEST_CASE("population column names") {
    CHECK(population_column(0, "exact") == "P_p3_2_exact");
    CHECK(population_column(3, "grwa") == "P_m3_2_grwa");
}
