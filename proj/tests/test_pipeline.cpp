#include <doctest.h>

#include <filesystem>

#include "cantorlab/pipeline.hpp"

using namespace cantorlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cantorlab_pipeline_" + name);
  fs::remove_all(p);
  return p;
}

std::string invalid_message(const Json& doc) {
  try {
    parse_config(doc);
  } catch (const LabError& e) {
    CHECK(e.kind() == ErrorKind::kInvalidArgument);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config: defaults and gamma forms") {
  auto c = parse_config(Json::parse(R"({"gamma": "1/8", "levels": 5})"));
  CHECK(c.gamma.gamma(3) == Rational(1, 8));
  CHECK(c.levels == 5);
  CHECK(c.variant == TowerVariant::kKGamma);
  CHECK(c.products.empty());
  auto p = parse_config(Json::parse(R"({"gamma": {"periodic": ["1/8", "1/16"]}, "levels": 3})"));
  CHECK(p.gamma.gamma(2) == Rational(1, 16));
  CHECK(p.gamma.gamma(3) == Rational(1, 8));
  auto f = parse_config(Json::parse(R"({"gamma": {"family": "power", "a": "1/50", "b": "1/2"}, "levels": 2})"));
  CHECK(f.gamma.gamma(1) > 0);
  auto l = parse_config(Json::parse(R"({"gamma": [0.125, "1/10"], "levels": 2, "variant": "K1-gamma"})"));
  CHECK(l.gamma.gamma(2) == Rational(1, 10));
  CHECK(l.variant == TowerVariant::kK1Gamma);
}

TEST_CASE("config: validation names the field") {
  CHECK(invalid_message(Json::parse(R"({"gamma": 0.3, "levels": 3})")).find("gamma[1] out of (0, 1/4)") == 0);
  CHECK(invalid_message(Json::parse(R"({"gamma": "1/8", "products": ["hset"]})")).find("h-comparison requires") !=
        std::string::npos);
  CHECK(invalid_message(Json::parse(R"({"products": ["nope"]})")).rfind("products", 0) == 0);
  CHECK(invalid_message(Json::parse(R"({"levels": -1})")).rfind("levels", 0) == 0);
  CHECK(invalid_message(Json::parse(R"({"variant": "square"})")).rfind("variant", 0) == 0);
  CHECK(invalid_message(Json::parse(R"({"gamma": {"nothing": 1}})")).rfind("gamma", 0) == 0);
  CHECK(invalid_message(Json::parse(R"({"variant": "custom"})")).rfind("stages", 0) == 0);
}

TEST_CASE("resolve_products: prerequisites are implied") {
  CHECK(resolve_products({"spacing"}) == std::set<std::string>{"spacing", "jacobi"});
  CHECK(resolve_products({"widom"}) == std::set<std::string>{"widom", "chebyshev"});
  CHECK(resolve_products({"capacity"}) == std::set<std::string>{"capacity"});
}

TEST_CASE("run: requested files, manifest hashes, determinism, compare") {
  auto c = parse_config(Json::parse(R"({"gamma": "1/8", "levels": 4, "m": 16, "N": 24,
                                        "products": ["spacing", "widom2", "capacity"]})"));
  RunOptions oa, ob;
  oa.output = scratch("a").string();
  ob.output = scratch("b").string();
  RunResult a = run_experiment(c, oa);
  REQUIRE(a.exit_code == 0);
  for (const char* f : {"spacing.json", "widom2.csv", "capacity.csv", "manifest.json"}) CHECK(fs::exists(a.directory / f));
  CHECK_FALSE(fs::exists(a.directory / "jacobi.csv"));

  const Json m = Json::parse(read_file(a.directory / "manifest.json"));
  CHECK(m.at("status") == "ok");
  CHECK(m.at("products").at("implied") == Json::array({"jacobi"}));
  for (const auto& f : m.at("files"))
    CHECK(sha256_hex(read_file(a.directory / f.at("name").get<std::string>())) == f.at("sha256").get<std::string>());

  RunResult b = run_experiment(c, ob);
  REQUIRE(b.exit_code == 0);
  for (const char* f : {"widom2.csv", "capacity.csv", "spacing.json"})
    CHECK(read_file(a.directory / f) == read_file(b.directory / f));

  PrecisionGuard guard(256);
  CompareReport r = compare_runs(a.directory / "manifest.json", b.directory / "manifest.json", {"widom2", "capacity"});
  CHECK(r.warnings.empty());
  REQUIRE_FALSE(r.columns.empty());
  for (const auto& col : r.columns) {
    CHECK(col.rows > 0);
    CHECK(col.max_abs == 0);
  }
  CHECK_THROWS_AS(compare_runs(a.directory / "manifest.json", b.directory / "manifest.json", {"markov"}), LabError);

  auto other = c;
  other.gamma = GammaSpec::constant(Rational(1, 16));
  RunOptions oc;
  oc.output = scratch("c").string();
  REQUIRE(run_experiment(other, oc).exit_code == 0);
  CompareReport d = compare_runs(a.directory / "manifest.json", fs::path(*oc.output) / "manifest.json", {"widom2"});
  REQUIRE_FALSE(d.warnings.empty());
  CHECK(d.warnings.front() == "inputs differ");
}

TEST_CASE("run: interval variant") {
  auto c = parse_config(Json::parse(R"({"variant": "interval", "m": 64, "N": 20, "products": ["jacobi", "capacity"]})"));
  RunOptions o;
  o.output = scratch("interval").string();
  RunResult r = run_experiment(c, o);
  REQUIRE(r.exit_code == 0);
  Csv j = Csv::parse(read_file(r.directory / "jacobi.csv"));
  CHECK(j.body().size() == 20);
}
