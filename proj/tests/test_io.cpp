#include "spdc/io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace spdc;

namespace {

JointSpectralAmplitude random_jsa(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> g(0.0, 1e3);
    JointSpectralAmplitude jsa;
    jsa.grid = FrequencyGrid::symmetric(1.2e15, 3.3e13, n);
    jsa.grid.center_r = 1.1e15;
    jsa.description = "random test amplitude";
    jsa.amplitude = MatrixXc(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) jsa.amplitude(i, j) = Complex(g(rng), g(rng));
    return jsa;
}

std::string small_csv(const std::string& body, const std::string& n_points = "3") {
    return "# spdc-jsa v1\n# center_l: 1\n# center_r: 1\n# half_span: 0.1\n# n_points: " + n_points + "\ni,j,re,im\n" + body;
}

JointSpectralAmplitude parse(const std::string& text) {
    std::istringstream in(text);
    return io::read_jsa_csv(in);
}

// 3×3 grid; the last row is (2,2) so single-row edits stay easy to read.
const std::string kHead = "0,0,1,0\n0,1,0,1\n0,2,0,0\n1,0,2,0\n1,1,0,0\n1,2,0,0\n2,0,0,0\n2,1,0,0\n";
const std::string kFullBody = kHead + "2,2,0,0\n";

}  // namespace

TEST_CASE("number formatting round-trips") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> e(-300, 300);
    for (int trial = 0; trial < 2000; ++trial) {
        const double x = std::ldexp(u(rng), e(rng));
        CHECK(std::stod(io::format_double(x)) == x);
    }
    CHECK(io::format_double(0.5) == "0.5");
}

TEST_CASE("JSA CSV round trip is bit-exact") {
    std::mt19937_64 rng(8);
    for (Eigen::Index n : {3, 7, 33}) {
        const auto jsa = random_jsa(rng, n);
        std::ostringstream out;
        io::write_jsa_csv(out, jsa, {"config: {\"a\":1}"});
        const auto back = parse(out.str());
        CHECK(back.grid.center_l == jsa.grid.center_l);
        CHECK(back.grid.center_r == jsa.grid.center_r);
        CHECK(back.grid.half_span == jsa.grid.half_span);
        CHECK(back.grid.n_points == jsa.grid.n_points);
        CHECK(back.description == jsa.description);
        CHECK(back.amplitude == jsa.amplitude);
        std::ostringstream again;
        io::write_jsa_csv(again, back, {"config: {\"a\":1}"});
        CHECK(again.str() == out.str());
    }
}

TEST_CASE("JSA CSV reader accepts rows in any order") {
    const auto jsa = parse(small_csv("2,2,0,0\n" + kHead.substr(8) + "\n0,0,1,0\n"));
    CHECK(jsa.amplitude(0, 1) == Complex(0.0, 1.0));
    CHECK(jsa.amplitude(1, 0) == Complex(2.0, 0.0));
    CHECK(jsa.amplitude(0, 0) == Complex(1.0, 0.0));
}

TEST_CASE("malformed JSA CSV is rejected") {
    CHECK_NOTHROW(parse(small_csv(kFullBody)));
    CHECK_THROWS_AS(parse("# spdc-jsa v1\n# n_points: 2\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("0,0,1,0\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("# spdc-jsa v1\n# center_l: 1\n# center_r: 1\n# n_points: 2\ni,j,re,im\n" + kFullBody),
                    InvalidArgument);
    CHECK_THROWS_AS(parse(small_csv(kHead)), InvalidArgument);
    CHECK_THROWS_AS(parse(small_csv(kFullBody + "1,1,0,0\n")), InvalidArgument);
    CHECK_THROWS_AS(parse(small_csv(kHead + "3,2,0,0\n")), InvalidArgument);
    CHECK_THROWS_AS(parse(small_csv(kHead + "-1,2,0,0\n")), InvalidArgument);
    CHECK_THROWS_AS(parse(small_csv(kHead + "2,2,0x,0\n")), InvalidArgument);
    CHECK_THROWS_AS(parse(small_csv(kHead + "2,2,0\n")), InvalidArgument);
    CHECK_THROWS_AS(parse(small_csv(kFullBody, "4")), InvalidArgument);
    CHECK_THROWS_AS(parse(small_csv(kFullBody, "two")), InvalidArgument);
    CHECK_THROWS_AS(parse(small_csv(kFullBody, "1.5")), InvalidArgument);
}

TEST_CASE("derived product headers") {
    const auto jsa = support::separable_gaussian(FrequencyGrid::symmetric(0.5, 0.5, 257), 0.05);

    std::ostringstream jti;
    io::write_jti_csv(jti, joint_temporal_intensity(jsa));
    CHECK(jti.str().rfind("# spdc-jti v1\n", 0) == 0);
    CHECK(jti.str().find("\ni,j,t1,t2,intensity\n") != std::string::npos);

    const auto map = franson_map(jsa, 2.0, 5);
    std::ostringstream m;
    io::write_map_csv(m, map, {"extra: yes"});
    CHECK(m.str().rfind("# spdc-franson-map v1\n# time_unit: ", 0) == 0);
    CHECK(m.str().find("# extra: yes\ntau1,tau2,probability\n") != std::string::npos);
    std::size_t rows = 0;
    for (char c : m.str()) rows += c == '\n';
    CHECK(rows == 5 + 1 + 25);

    std::ostringstream s;
    io::write_scan_csv(s, fourth_order_visibility(jsa));
    CHECK(s.str().rfind("# spdc-fringe-scan v1\n", 0) == 0);
    CHECK(s.str().find("# mode: carrier_phase\n") != std::string::npos);
    CHECK(s.str().find("\ndelta,probability\n") != std::string::npos);

    VisibilityCurve curve{"counterprop", {1e-3, 1e-2}, {0.1, 0.9}};
    std::ostringstream c;
    io::write_curve_csv(c, curve);
    CHECK(c.str() == "# spdc-visibility-curve v1\n# family: counterprop\nlength_m,scaled_visibility\n0.001,0.10000000000000001\n"
                     "0.01,0.90000000000000002\n");
}

TEST_CASE("PGM rendering") {
    MatrixXd v(2, 3);
    v << 0.0, 1.0, 2.0, 3.0, 4.0, 6.0;
    const std::string pgm = io::render_pgm(v);
    const std::string head = "P5\n3 2\n255\n";
    REQUIRE(pgm.size() == head.size() + 6);
    CHECK(pgm.substr(0, head.size()) == head);
    // Last matrix row first; linear scaling onto [0, 255].
    CHECK(static_cast<unsigned char>(pgm[head.size()]) == 128);
    CHECK(static_cast<unsigned char>(pgm[head.size() + 2]) == 255);
    CHECK(static_cast<unsigned char>(pgm[head.size() + 3]) == 0);
    const std::string flat = io::render_pgm(MatrixXd::Constant(2, 2, 0.3));
    CHECK(flat.substr(flat.size() - 4) == std::string(4, '\0'));
}

TEST_CASE("PPM rendering") {
    const std::vector<VisibilityCurve> curves = {{"a", {1e-3, 1e-1}, {0.0, 1.0}}, {"b", {1e-3, 1e-1}, {0.5, 0.5}}};
    const std::string ppm = io::render_curves_ppm(curves, 64, 40);
    const std::string head = "P6\n64 40\n255\n";
    CHECK(ppm.substr(0, head.size()) == head);
    CHECK(ppm.size() == head.size() + 64 * 40 * 3);
}

TEST_CASE("atomic file write") {
    const std::filesystem::path dir = std::filesystem::path(SPDC_TEST_SCRATCH) / "io";
    std::filesystem::remove_all(dir);
    const auto file = dir / "nested" / "out.txt";
    io::write_file_atomic(file, "first");
    io::write_file_atomic(file, "second");
    std::ifstream in(file);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content == "second");
    CHECK(!std::filesystem::exists(dir / "nested" / "out.txt.tmp"));
}
