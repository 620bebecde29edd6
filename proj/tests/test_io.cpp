#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pgvba/image_io.hpp"
#include "pgvba/rng.hpp"
#include "pgvba/simulate.hpp"

using namespace pgvba;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("pgvba_io_" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("pfm round-trips float32 data exactly") {
  TempDir dir;
  Image img(7, 5);
  Rng rng(4);
  for (double& v : img.data) v = static_cast<float>(20.0 * rng.uniform() - 5.0);
  write_pfm(dir.file("a.pfm"), img);
  const Image back = read_image(dir.file("a.pfm"));
  REQUIRE(back.same_shape(img));
  CHECK(back.data == img.data);
}

TEST_CASE("pgm16 round-trips integers and clamps") {
  TempDir dir;
  Image img(6, 4);
  Rng rng(9);
  for (double& v : img.data) v = std::floor(65535.0 * rng.uniform());
  write_pgm16(dir.file("a.pgm"), img);
  const Image back = read_image(dir.file("a.pgm"));
  REQUIRE(back.same_shape(img));
  CHECK(back.data == img.data);

  Image hot(2, 2);
  hot.data = {-5.0, 70000.0, 12.4, 12.6};
  write_pgm16(dir.file("b.pgm"), hot);
  const Image clamped = read_image(dir.file("b.pgm"));
  CHECK(clamped.data[0] == 0.0);
  CHECK(clamped.data[1] == 65535.0);
  CHECK(clamped.data[2] == 12.0);
  CHECK(clamped.data[3] == 13.0);
}

TEST_CASE("write_image picks the format from the extension") {
  TempDir dir;
  const Image img = synthetic_phantom(8, 8, 3.0);
  write_image(dir.file("x.pgm"), img);
  write_image(dir.file("x.pfm"), img);
  std::ifstream pgm(dir.file("x.pgm"), std::ios::binary);
  std::ifstream pfm(dir.file("x.pfm"), std::ios::binary);
  std::string m1, m2;
  pgm >> m1;
  pfm >> m2;
  CHECK(m1 == "P5");
  CHECK(m2 == "Pf");
}

TEST_CASE("metadata round-trips") {
  TempDir dir;
  Metadata meta{{"kernel", "uniform:5"}, {"sigma2", "4.000000"}, {"seed", "7"}};
  write_metadata(dir.file("m.meta"), meta);
  CHECK(read_metadata(dir.file("m.meta")) == meta);
  CHECK_THROWS(read_metadata(dir.file("missing.meta")));
}

TEST_CASE("weight tensors round-trip bit-exactly") {
  TempDir dir;
  WeightFile wf;
  wf.width = 4;
  wf.height = 3;
  wf.directions = 49;
  wf.weights.resize(4 * 3 * 49);
  Rng rng(12);
  for (double& v : wf.weights) v = rng.uniform();
  write_weights(dir.file("w.nltvw"), wf);
  const WeightFile back = read_weights(dir.file("w.nltvw"));
  CHECK(back.width == wf.width);
  CHECK(back.height == wf.height);
  CHECK(back.directions == wf.directions);
  CHECK(back.weights == wf.weights);  // bitwise

  CHECK_THROWS(read_weights(dir.file("missing")));
}

TEST_CASE("unsupported formats are rejected") {
  TempDir dir;
  std::ofstream out(dir.file("bad.img"), std::ios::binary);
  out << "P6\n2 2\n255\n";
  out.close();
  CHECK_THROWS(read_image(dir.file("bad.img")));
}
