#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "clickbench/codec.hpp"
#include "clickbench/error.hpp"
#include "clickbench/raster.hpp"
#include "clickbench/rng.hpp"

using namespace clickbench;

namespace {

std::vector<std::uint8_t> bytes_of(std::string_view s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_SUITE("raster") {
  TEST_CASE("buffer length is width * height * 4") {
    const Raster r(7, 5, Rgba{1, 2, 3, 4});
    CHECK(r.bytes().size() == 7 * 5 * 4);
    CHECK(r.at(6, 4) == Rgba{1, 2, 3, 4});
  }

  TEST_CASE("png round trip is lossless") {
    std::mt19937_64 gen(9);
    Raster r(33, 17);
    for (auto& b : r.bytes()) b = static_cast<std::uint8_t>(gen());
    const auto png = encode_png(r);
    CHECK(png.size() > 8);
    CHECK(png[1] == 'P');
    CHECK(decode_png(png) == r);

    const auto path = std::filesystem::temp_directory_path() / "clickbench_raster_test.png";
    write_png(r, path);
    CHECK(read_png(path) == r);
    std::filesystem::remove(path);
  }

  TEST_CASE("decode_png rejects garbage") {
    const auto junk = bytes_of("not a png at all");
    CHECK_THROWS_AS(decode_png(junk), Error);
  }

  TEST_CASE("base64 vectors") {
    CHECK(base64_encode(bytes_of("")) == "");
    CHECK(base64_encode(bytes_of("f")) == "Zg==");
    CHECK(base64_encode(bytes_of("fo")) == "Zm8=");
    CHECK(base64_encode(bytes_of("foo")) == "Zm9v");
    CHECK(base64_encode(bytes_of("foobar")) == "Zm9vYmFy");
    CHECK(base64_decode("Zm9vYg==") == bytes_of("foob"));
    CHECK(base64_decode("Zm9vYmE=") == bytes_of("fooba"));
    std::mt19937_64 gen(2);
    for (int n = 0; n < 64; ++n) {
      std::vector<std::uint8_t> v(n);
      for (auto& b : v) b = static_cast<std::uint8_t>(gen());
      CHECK(base64_decode(base64_encode(v)) == v);
    }
  }

  TEST_CASE("sha256 vectors") {
    CHECK(sha256_hex(bytes_of("")) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex(bytes_of("abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }
}

TEST_SUITE("raster") {
  TEST_CASE("rng streams are reproducible and independent") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(mix64(0) != mix64(1));
  }

  TEST_CASE("uniform matches the engine bits") {
    std::mt19937_64 engine(77);
    Rng rng(77);
    for (int i = 0; i < 100; ++i) {
      const double expected = static_cast<double>(engine() >> 11) * 0x1.0p-53;
      CHECK(rng.uniform() == expected);
    }
  }

  TEST_CASE("normal moments") {
    Rng rng(5);
    const int n = 200000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
      const double z = rng.normal();
      sum += z;
      sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
  }

  TEST_CASE("uniform_int is inclusive") {
    Rng rng(8);
    bool lo = false, hi = false;
    for (int i = 0; i < 1000; ++i) {
      const int v = rng.uniform_int(3, 5);
      CHECK(v >= 3);
      CHECK(v <= 5);
      lo |= v == 3;
      hi |= v == 5;
    }
    CHECK(lo);
    CHECK(hi);
  }
}
