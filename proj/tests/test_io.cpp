#include <doctest.h>

#include <filesystem>

#include "cantorlab/io.hpp"

using namespace cantorlab;

TEST_CASE("sha256_hex: known digests") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("Csv: round trip with empty cells") {
  Csv c({"n", "x", "flag"});
  c.row({"1", "0.5", "1"}).row({"2", "", "0"}).row({"3", "-1e-3", ""});
  Csv back = Csv::parse(c.str());
  CHECK(back.header() == c.header());
  CHECK(back.body() == c.body());
  CHECK(back.column("flag") == 2);
  CHECK(back.column("missing") == -1);
  CHECK(back.str() == c.str());
  CHECK_THROWS_AS(Csv::parse(""), LabError);
}

TEST_CASE("files: write then read") {
  const auto p = std::filesystem::temp_directory_path() / "cantorlab_io_test.txt";
  write_file(p, "line\n");
  CHECK(read_file(p) == "line\n");
  std::filesystem::remove(p);
  CHECK_THROWS_AS(read_file(p), LabError);
}

TEST_CASE("SvgPlot: well-formed output, log axes skip nonpositive values") {
  SvgPlot plot{"t", "x", "y", true, true, {{"a", {1, 10, 100}, {1, 0, 1e-3}, false}, {"b", {1, 2}, {2, 3}, true}}};
  const std::string s = plot.render();
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("</svg>") != std::string::npos);
  CHECK(s.find("polyline") != std::string::npos);
  CHECK(s.find("circle") != std::string::npos);
  CHECK(s.find("nan") == std::string::npos);
  CHECK(s.find("inf") == std::string::npos);
  SvgPlot empty{"e", "x", "y", false, false, {}};
  CHECK(empty.render().find("</svg>") != std::string::npos);
}

TEST_CASE("dec: rationals exact, reals round trip") {
  PrecisionGuard guard(256);
  CHECK(dec(Rational(3, 8)) == "3/8");
  const Real x = Real(1) / 3;
  CHECK(abs(parse_real(dec(x)) - x) < pow2(-250));
}
