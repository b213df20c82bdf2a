#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "neuralpde/image.hpp"

using namespace neuralpde;

namespace {

std::string tmp_path(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::path(NEURALPDE_TEST_TMP) / "image";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

struct Pnm {
  std::string magic;
  Index width = 0, height = 0;
  int maxval = 0;
  std::string payload;
};

Pnm read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  Pnm p;
  in >> p.magic >> p.width >> p.height >> p.maxval;
  in.get();  // single whitespace byte before the payload
  p.payload.assign(std::istreambuf_iterator<char>(in), {});
  return p;
}

}  // namespace

TEST_CASE("pgm header and byte mapping", "[image]") {
  Matrix m(2, 3);
  m << 0.0, 0.5, 1.0, 0.25, 2.0, -1.0;  // last two test clamping
  const std::string p = tmp_path("map.pgm");
  write_pgm(m, p, 0.0, 1.0);
  Pnm img = read_pnm(p);
  CHECK(img.magic == "P5");
  CHECK(img.width == 3);
  CHECK(img.height == 2);
  CHECK(img.maxval == 255);
  REQUIRE(img.payload.size() == 6);
  const unsigned char expect[6] = {0, 128, 255, 64, 255, 0};
  for (int k = 0; k < 6; ++k) CHECK((unsigned char)img.payload[k] == expect[k]);
}

TEST_CASE("pgm auto range spans min to max", "[image]") {
  Matrix m(1, 3);
  m << -2.0, 0.0, 2.0;
  const std::string p = tmp_path("auto.pgm");
  write_pgm(m, p);
  Pnm img = read_pnm(p);
  REQUIRE(img.payload.size() == 3);
  CHECK((unsigned char)img.payload[0] == 0);
  CHECK((unsigned char)img.payload[1] == 128);
  CHECK((unsigned char)img.payload[2] == 255);
}

TEST_CASE("degenerate range gives a black image", "[image]") {
  Matrix m = Matrix::Constant(2, 2, 7.0);
  const std::string p = tmp_path("flat.pgm");
  write_pgm(m, p);  // auto range [7, 7]
  Pnm img = read_pnm(p);
  REQUIRE(img.payload.size() == 4);
  for (char b : img.payload) CHECK(b == 0);
}

TEST_CASE("diverging palette endpoints", "[image]") {
  unsigned char rgb[3];
  diverging_rgb(0.0, rgb);
  CHECK(rgb[0] == 0);
  CHECK(rgb[1] == 0);
  CHECK(rgb[2] == 255);
  diverging_rgb(1.0, rgb);
  CHECK(rgb[0] == 255);
  CHECK(rgb[1] == 0);
  CHECK(rgb[2] == 0);
  diverging_rgb(0.5, rgb);
  CHECK(rgb[0] == 255);
  CHECK(rgb[1] == 255);
  CHECK(rgb[2] == 255);
  diverging_rgb(-3.0, rgb);  // clamps to the blue end
  CHECK(rgb[2] == 255);
  CHECK(rgb[0] == 0);
}

TEST_CASE("ppm writes three bytes per pixel", "[image]") {
  Matrix m(2, 2);
  m << -1.0, 0.0, 0.5, 1.0;
  const std::string p = tmp_path("div.ppm");
  write_ppm_diverging(m, p, -1.0, 1.0);
  Pnm img = read_pnm(p);
  CHECK(img.magic == "P6");
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  REQUIRE(img.payload.size() == 12);
  // m(0,0) = -1 -> t=0 -> blue; m(0,1) = 0 -> t=0.5 -> white
  CHECK((unsigned char)img.payload[0] == 0);
  CHECK((unsigned char)img.payload[2] == 255);
  CHECK((unsigned char)img.payload[3] == 255);
  CHECK((unsigned char)img.payload[4] == 255);
  CHECK((unsigned char)img.payload[5] == 255);
  // m(1,1) = 1 -> t=1 -> red
  CHECK((unsigned char)img.payload[9] == 255);
  CHECK((unsigned char)img.payload[10] == 0);
  CHECK((unsigned char)img.payload[11] == 0);

  // degenerate range: all black
  const std::string pz = tmp_path("zero.ppm");
  write_ppm_diverging(m, pz, 1.0, 1.0);
  Pnm imgz = read_pnm(pz);
  for (char b : imgz.payload) CHECK(b == 0);
}

TEST_CASE("error images", "[image]") {
  Matrix a(1, 3), b(1, 3);
  a << 1.0, 2.0, 3.0;
  b << 1.0, 2.5, 2.0;

  const std::string p_abs = tmp_path("err.pgm");
  write_error_pgm(a - b, p_abs);
  Pnm abs_img = read_pnm(p_abs);
  REQUIRE(abs_img.payload.size() == 3);
  CHECK((unsigned char)abs_img.payload[0] == 0);    // |0|
  CHECK((unsigned char)abs_img.payload[1] == 128);  // |−0.5| of max 1.0
  CHECK((unsigned char)abs_img.payload[2] == 255);  // |1.0|

  // identical fields: all-zero payload, not a divide-by-zero artifact
  const std::string p_same = tmp_path("same.pgm");
  write_error_pgm(a - a, p_same);
  for (char byte : read_pnm(p_same).payload) CHECK(byte == 0);

  // signed map: zero error is white, extremes hit the blue/red ends
  const std::string p_sgn = tmp_path("err.ppm");
  write_error_ppm(a - b, p_sgn);
  Pnm sgn = read_pnm(p_sgn);
  REQUIRE(sgn.payload.size() == 9);
  CHECK((unsigned char)sgn.payload[0] == 255);  // white
  CHECK((unsigned char)sgn.payload[1] == 255);
  CHECK((unsigned char)sgn.payload[2] == 255);
  CHECK((unsigned char)sgn.payload[3] == 128);  // -0.5 on range [-1,1]: t=0.25
  CHECK((unsigned char)sgn.payload[4] == 128);
  CHECK((unsigned char)sgn.payload[5] == 255);
  CHECK((unsigned char)sgn.payload[6] == 255);  // +1.0 = max -> red
  CHECK((unsigned char)sgn.payload[7] == 0);
  CHECK((unsigned char)sgn.payload[8] == 0);
}
