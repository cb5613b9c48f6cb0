#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cli.hpp"
#include "confmod/analytic.hpp"
#include "confmod/geometry.hpp"
#include "confmod/verify.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = confmod::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config(const char* name) {
  return (fs::path(CONFMOD_SOURCE_DIR) / "configs" / name).string();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("confmod_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == confmod::cli::kUsage);
  CHECK(run({"frobnicate"}).code == confmod::cli::kUsage);
  CHECK(run({"gamma"}).code == confmod::cli::kUsage);
  CHECK(run({"modulus", "--annulus", "1"}).code == confmod::cli::kUsage);
  CHECK(run({"modulus", "--annulus", "2,1"}).code == confmod::cli::kUsage);
  CHECK(run({"sweep", "--domain", config("f1.yaml"), "--H", "4,x"}).code == confmod::cli::kUsage);
  CHECK(run({"sweep", "--domain", config("f1.yaml"), "--H", "8,4"}).code == confmod::cli::kUsage);
  CHECK(run({"--help"}).code == confmod::cli::kOk);
}

TEST_CASE("config errors exit with 3") {
  CHECK(run({"gamma", "--domain", "/nonexistent/x.yaml"}).code == confmod::cli::kConfig);
  const fs::path bad = scratch("bad.yaml");
  {
    std::ofstream f(bad);
    f << "confmod_config: 1\nfixture: lens_channel\nextra: 1\n";
  }
  const Result r = run({"gamma", "--domain", bad.string()});
  CHECK(r.code == confmod::cli::kConfig);
  CHECK(r.err.find("extra") != std::string::npos);
  fs::remove(bad);
}

TEST_CASE("gamma prints the analytic value") {
  const Result r = run({"gamma", "--domain", config("f2.yaml"), "--json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  const double expected = confmod::analytic::gamma(confmod::geometry::fixtures::lens_channel()).value;
  CHECK(j["gamma"].get<double>() == doctest::Approx(expected).epsilon(1e-14));
  const Result text = run({"gamma", "--domain", config("f3.yaml")});
  CHECK(text.out.rfind("gamma 0.69314718056", 0) == 0);
}

TEST_CASE("annulus modulus") {
  const fs::path out = scratch("annulus");
  const Result r = run({"modulus", "--annulus", "1,2", "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("annulus modulus 0.1103", 0) == 0);
  std::ifstream f(out / "modulus.json");
  const auto j = nlohmann::json::parse(f);
  CHECK(std::abs(j["value"].get<double>() - 0.11031780) < 1e-4);
  CHECK(j["raw"].size() == 3);
  fs::remove_all(out);
}

TEST_CASE("rectangle quad and reciprocity") {
  const Result r = run({"quad", "--rect", "1,0.5", "--json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["modulus"]["value"].get<double>() == doctest::Approx(0.5));
  CHECK(j["product"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("maps reports the known shortfalls") {
  const Result r = run({"maps", "--json"});
  CHECK(r.code == confmod::cli::kVerificationFailure);
  const auto j = nlohmann::json::parse(r.out);
  int failed = 0;
  for (const auto& c : j["claims"]) failed += c["pass"].get<bool>() ? 0 : 1;
  CHECK(failed == 4);  // three large-|zeta| directions and K(1e3)
  CHECK(j["claims"][0]["pass"] == true);
  CHECK(j["claims"][1]["pass"] == true);
}

TEST_CASE("sweep output is byte-identical across runs") {
  const fs::path a = scratch("sweep_a");
  const fs::path b = scratch("sweep_b");
  const std::vector<std::string> base{"sweep", "--domain", config("f1.yaml"), "--H", "1,2",
                                      "--levels", "1", "--out"};
  auto args_a = base;
  args_a.push_back(a.string());
  auto args_b = base;
  args_b.push_back(b.string());
  const Result ra = run(args_a);
  const Result rb = run(args_b);
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  CHECK(ra.out == rb.out);
  std::ifstream fa(a / "sweep.csv");
  std::ifstream fb(b / "sweep.csv");
  const std::string sa((std::istreambuf_iterator<char>(fa)), {});
  const std::string sb((std::istreambuf_iterator<char>(fb)), {});
  CHECK(sa == sb);
  CHECK(sa == ra.out);
  CHECK(sa.rfind(confmod::verify::kCsvHeader, 0) == 0);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("verify with a short ladder is a usage error") {
  const Result r = run({"verify", "--domain", config("f1.yaml"), "--H", "1,2", "--levels", "1"});
  CHECK(r.code == confmod::cli::kUsage);
  CHECK(r.err.find("insufficient-span") != std::string::npos);
}

TEST_CASE("oracle on the annulus") {
  const Result r = run({"oracle", "--annulus", "1,2", "--levels", "2", "--json"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["levels"].size() == 2);
  CHECK(j["pass"] == true);
}
