#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "neuralpde/pde_solvers.hpp"
#include "neuralpde/series_io.hpp"

using namespace neuralpde;

namespace {

std::string tmp_path(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::path(NEURALPDE_TEST_TMP) / "series_io";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out);
  out.write(bytes.data(), std::streamsize(bytes.size()));
}

void check_grid_equal(const GridSpec& a, const GridSpec& b) {
  CHECK(a.nx == b.nx);
  CHECK(a.ny == b.ny);
  CHECK(a.n_steps == b.n_steps);
  CHECK(a.dt == b.dt);
  CHECK(a.x_min == b.x_min);
  CHECK(a.x_max == b.x_max);
  CHECK(a.y_min == b.y_min);
  CHECK(a.y_max == b.y_max);
}

FieldSeries small_multivar_series() {
  FieldSeries s;
  s.grid = make_grid_1d(0.0, 1.0, 5, 0.25, 3);
  s.variables = {"phi", "p", "u"};
  s.data.resize(15, 3);
  std::mt19937_64 rng(99);
  for (Index i = 0; i < 15; ++i)
    for (Index j = 0; j < 3; ++j) s.data(i, j) = uniform_in(rng, -2.0, 2.0);
  return s;
}

}  // namespace

TEST_CASE("series round trips bitwise (1D wave)", "[series_io]") {
  GridSpec g = make_grid_1d(0.0, 1.0, 11, 1e-3, 7);
  FieldSeries s = wave_exact(g);
  const std::string path = tmp_path("wave.nps");
  write_series(s, path);
  FieldSeries back = read_series(path);
  check_grid_equal(back.grid, g);
  CHECK(back.variables == s.variables);
  CHECK(back.data == s.data);
}

TEST_CASE("series round trips bitwise (2D, two variables)", "[series_io]") {
  GridSpec g = make_grid_2d(0.0, 1.0, 0.0, 1.0, 9, 9, 1e-3, 5);
  FieldSeries s = solve_burgers_2d(g);
  const std::string path = tmp_path("burgers.nps");
  write_series(s, path);
  FieldSeries back = read_series(path);
  check_grid_equal(back.grid, g);
  CHECK(back.variables == (std::vector<std::string>{"u", "v"}));
  REQUIRE(back.data.rows() == 162);
  CHECK(back.data == s.data);
}

TEST_CASE("series round trip preserves awkward doubles", "[series_io]") {
  FieldSeries s;
  s.grid = make_grid_1d(0.0, 1.0, 3, 0.5, 2);
  s.variables = {"u"};
  s.data.resize(3, 2);
  s.data << 1e-300, -0.0, 3.141592653589793, -2.2250738585072014e-308, 1.7976931348623157e308,
      5e-324;
  const std::string path = tmp_path("awkward.nps");
  write_series(s, path);
  Matrix back = read_series(path).data;
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 2; ++j) {
      // bitwise, not just ==: distinguishes -0.0 from 0.0
      std::uint64_t a, b;
      std::memcpy(&a, &s.data(i, j), 8);
      std::memcpy(&b, &back(i, j), 8);
      CHECK(a == b);
    }
}

TEST_CASE("series header is two text lines", "[series_io]") {
  FieldSeries s = small_multivar_series();
  const std::string path = tmp_path("header.nps");
  write_series(s, path);
  const std::string raw = slurp(path);
  REQUIRE(raw.rfind("NEURALPDE/1\n", 0) == 0);
  const auto second_nl = raw.find('\n', 12);
  REQUIRE(second_nl != std::string::npos);
  const std::string header = raw.substr(12, second_nl - 12);
  CHECK(header.find("vars=phi,p,u") != std::string::npos);
  CHECK(header.find("nx=5") != std::string::npos);
  CHECK(header.find("ny=0") != std::string::npos);
  CHECK(header.find("n_steps=3") != std::string::npos);
  CHECK(header.find("dt=0.25") != std::string::npos);
  // payload = 15 rows x 3 cols x 8 bytes
  CHECK(raw.size() - (second_nl + 1) == 15 * 3 * 8);

  // little-endian spot check: 1.0 encodes as 00..00 F0 3F
  FieldSeries one;
  one.grid = make_grid_1d(0.0, 1.0, 3, 0.5, 1);
  one.variables = {"u"};
  one.data = Matrix::Constant(3, 1, 1.0);
  const std::string p1 = tmp_path("one.nps");
  write_series(one, p1);
  const std::string raw1 = slurp(p1);
  const std::string payload = raw1.substr(raw1.find('\n', 12) + 1);
  REQUIRE(payload.size() == 24);
  const unsigned char expect[8] = {0, 0, 0, 0, 0, 0, 0xF0, 0x3F};
  for (int k = 0; k < 8; ++k) CHECK((unsigned char)payload[k] == expect[k]);
}

TEST_CASE("variable order round trips", "[series_io]") {
  FieldSeries s = small_multivar_series();
  const std::string path = tmp_path("vars.nps");
  write_series(s, path);
  FieldSeries back = read_series(path);
  REQUIRE(back.variables == (std::vector<std::string>{"phi", "p", "u"}));
  CHECK(back.data == s.data);
}

TEST_CASE("read rejects malformed files", "[series_io]") {
  FieldSeries s = small_multivar_series();
  const std::string good_path = tmp_path("good.nps");
  write_series(s, good_path);
  const std::string good = slurp(good_path);

  SECTION("missing file") {
    CHECK_THROWS_AS(read_series(tmp_path("nope.nps")), DataError);
  }
  SECTION("empty file") {
    const std::string p = tmp_path("empty.nps");
    spit(p, "");
    CHECK_THROWS_WITH(read_series(p), Catch::Matchers::ContainsSubstring("empty series file"));
  }
  SECTION("bad magic") {
    const std::string p = tmp_path("magic.nps");
    spit(p, "NEURALPDE/9\n" + good.substr(12));
    CHECK_THROWS_WITH(read_series(p), Catch::Matchers::ContainsSubstring("bad magic"));
  }
  SECTION("missing header key") {
    const std::string p = tmp_path("nokey.nps");
    std::string mangled = good;
    const auto pos = mangled.find(" nx=5");
    REQUIRE(pos != std::string::npos);
    mangled.replace(pos, 5, " nq=5");
    spit(p, mangled);
    CHECK_THROWS_WITH(read_series(p), Catch::Matchers::ContainsSubstring("missing key 'nx'"));
  }
  SECTION("malformed header token") {
    const std::string p = tmp_path("badtok.nps");
    std::string mangled = good;
    const auto pos = mangled.find("nx=5");
    mangled.replace(pos, 4, "nx55");
    spit(p, mangled);
    CHECK_THROWS_WITH(read_series(p), Catch::Matchers::ContainsSubstring("malformed token"));
  }
  SECTION("unparsable number") {
    const std::string p = tmp_path("badnum.nps");
    std::string mangled = good;
    const auto pos = mangled.find("dt=0.25");
    mangled.replace(pos, 7, "dt=zebra");
    spit(p, mangled);
    CHECK_THROWS_WITH(read_series(p), Catch::Matchers::ContainsSubstring("bad value for 'dt'"));
  }
  SECTION("truncated payload") {
    const std::string p = tmp_path("trunc.nps");
    spit(p, good.substr(0, good.size() - 30));  // cuts into row 13
    try {
      read_series(p);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("data ends inside row 13") != std::string::npos);
    }
  }
  SECTION("trailing bytes") {
    const std::string p = tmp_path("extra.nps");
    spit(p, good + std::string(4, '\0'));
    CHECK_THROWS_WITH(read_series(p), Catch::Matchers::ContainsSubstring("trailing bytes"));
  }
  SECTION("NaN in payload") {
    const std::string p = tmp_path("nan.nps");
    std::string mangled = good;
    const std::size_t payload_start = mangled.find('\n', 12) + 1;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    unsigned char bytes[8];
    write_f64_le(nan, bytes);
    // row 1, column 2 of the row-major payload
    std::memcpy(mangled.data() + payload_start + (1 * 3 + 2) * 8, bytes, 8);
    spit(p, mangled);
    try {
      read_series(p);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("row 1") != std::string::npos);
      CHECK(msg.find("column 2") != std::string::npos);
    }
  }
  SECTION("invalid grid in header") {
    const std::string p = tmp_path("badgrid.nps");
    std::string mangled = good;
    const auto pos = mangled.find("nx=5");
    mangled.replace(pos, 4, "nx=2");
    spit(p, mangled);
    CHECK_THROWS_AS(read_series(p), ConfigError);
  }
}

TEST_CASE("write refuses non-finite data", "[series_io]") {
  FieldSeries s = small_multivar_series();
  s.data(4, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(write_series(s, tmp_path("badwrite.nps")), DataError);
}

TEST_CASE("csv export format", "[series_io]") {
  Matrix m(2, 3);
  m << 0.5, 1.0, -2.25, 1e-3, 3.0, 0.1;
  const std::string p = tmp_path("mat.csv");
  export_matrix_csv(m, p);
  std::ifstream in(p);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "row,0,1,2");
  REQUIRE(std::getline(in, line));
  CHECK(line == "0,0.5,1,-2.25");
  REQUIRE(std::getline(in, line));
  CHECK(line == "1,0.001,3,0.1");
  CHECK_FALSE(std::getline(in, line));

  FieldSeries s = small_multivar_series();
  const std::string ps = tmp_path("series.csv");
  export_series_csv(s, ps);
  std::ifstream in2(ps);
  REQUIRE(std::getline(in2, line));
  CHECK(line == "row,0,1,2");
  Index rows = 0;
  while (std::getline(in2, line)) ++rows;
  CHECK(rows == 15);
}
