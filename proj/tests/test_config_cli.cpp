#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tfi/config.hpp"
#include "tfi/runner.hpp"
#include "tfi/toml_lite.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kMinimalMarkov = R"(
[[scenario]]
id = "t"
kind = "markov"
tau = 0.5
dt = 1e-3

[scenario.model]
preset = "two_state"
k12 = 1.0
k21 = 1.0

[scenario.initial]
type = "delta"
index = 0
)";

}  // namespace

TEST_CASE("scenario file parsing") {
  const auto doc = tfi::parse_toml_lite(kMinimalMarkov);
  REQUIRE(doc.contains("scenario"));
  REQUIRE(doc["scenario"].is_array());
  CHECK(doc["scenario"][0]["model"]["k12"].get<double>() == 1.0);

  const auto cfgs = tfi::parse_config(doc);
  REQUIRE(cfgs.size() == 1);
  CHECK(cfgs[0].kind == "markov");
  CHECK(cfgs[0].tau == 0.5);
  CHECK(cfgs[0].seed == 1);  // default
}

TEST_CASE("reader handles comments, arrays and nested tables") {
  const auto doc = tfi::parse_toml_lite(R"(
# heading comment
[a.b]
x = 1_000   # trailing comment
y = [1.5, 2.5, [3, 4]]
s = "hi\nthere"
flag = true
)");
  CHECK(doc["a"]["b"]["x"].get<long long>() == 1000);
  CHECK(doc["a"]["b"]["y"][2][1].get<long long>() == 4);
  CHECK(doc["a"]["b"]["s"].get<std::string>() == "hi\nthere");
  CHECK(doc["a"]["b"]["flag"].get<bool>());
}

TEST_CASE("reader reports the offending line") {
  try {
    tfi::parse_toml_lite("x = 1\nx = 2\n");
    FAIL("expected a parse error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("strict validation") {
  auto doc = tfi::parse_toml_lite(kMinimalMarkov);

  SUBCASE("unknown fields are rejected with the key name") {
    doc["scenario"][0]["bogus"] = 1;
    try {
      tfi::parse_config(doc);
      FAIL("expected rejection");
    } catch (const std::exception& e) {
      CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
  }
  SUBCASE("preset plus explicit rates is ambiguous") {
    doc["scenario"][0]["model"]["rates"] = {{-1.0, 1.0}, {1.0, -1.0}};
    CHECK_THROWS(tfi::parse_config(doc));
  }
  SUBCASE("zero horizon is rejected") {
    doc["scenario"][0]["tau"] = 0.0;
    CHECK_THROWS(tfi::parse_config(doc));
  }
  SUBCASE("negative time step is rejected") {
    doc["scenario"][0]["dt"] = -1e-3;
    CHECK_THROWS(tfi::parse_config(doc));
  }
  SUBCASE("unknown kind is rejected") {
    doc["scenario"][0]["kind"] = "ising";
    CHECK_THROWS(tfi::parse_config(doc));
  }
  SUBCASE("duplicate ids are rejected") {
    doc["scenario"].push_back(doc["scenario"][0]);
    CHECK_THROWS(tfi::parse_config(doc));
  }
  SUBCASE("t0 at or past tau is rejected") {
    doc["scenario"][0]["t0"] = 0.5;
    CHECK_THROWS(tfi::parse_config(doc));
  }
  SUBCASE("path_fisher on a markov scenario is rejected") {
    doc["scenario"][0]["path_fisher"] = {{"enabled", true}};
    CHECK_THROWS(tfi::parse_config(doc));
  }
}

TEST_CASE("dotted-path overrides") {
  auto doc = tfi::parse_toml_lite(kMinimalMarkov);
  tfi::set_by_dotted_path(doc["scenario"][0], "model.k12", 2.5);
  CHECK(doc["scenario"][0]["model"]["k12"].get<double>() == 2.5);
  tfi::set_by_dotted_path(doc["scenario"][0], "dt", 5e-4);
  CHECK(doc["scenario"][0]["dt"].get<double>() == 5e-4);
  CHECK_THROWS(tfi::set_by_dotted_path(doc["scenario"][0], "model.missing.deep", 1.0));
}

TEST_CASE("in-process run produces a populated report") {
  const auto cfgs = tfi::parse_config(tfi::parse_toml_lite(kMinimalMarkov));
  const auto out = tfi::run_one_scenario(cfgs[0], tfi::RunnerOptions{});
  CHECK(out.status == 0);
  CHECK(out.report.checks.size() >= 4);
}

TEST_CASE("runner isolates a failing scenario from its siblings") {
  auto doc = tfi::parse_toml_lite(kMinimalMarkov);
  auto broken = doc["scenario"][0];
  broken["id"] = "broken";
  broken["initial"]["index"] = 9;  // out of range, caught at run time
  doc["scenario"].push_back(broken);

  const auto tmp = fs::temp_directory_path() / "tfi_test_runner";
  fs::remove_all(tmp);
  tfi::RunnerOptions opts;
  opts.out_dir = tmp.string();
  const auto summary = tfi::run_scenarios(tfi::parse_config(doc), opts);
  CHECK(summary.exit_code() == 2);
  CHECK(summary.outcomes[0].status == 0);
  CHECK(summary.outcomes[1].status == 2);
  CHECK(fs::exists(tmp / "t.csv"));
  CHECK_FALSE(fs::exists(tmp / "broken.csv"));

  const auto j = nlohmann::json::parse(slurp(tmp / "summary.json"));
  CHECK(j["schema_version"] == 1);
  CHECK(j["scenarios"].size() == 2);
  CHECK(j["scenarios"][1]["error"].get<std::string>().find("index") != std::string::npos);
  fs::remove_all(tmp);
}

TEST_CASE("command-line interface") {
  const std::string exe = TFI_BINARY_PATH;
  const std::string cfg = std::string(TFI_CONFIG_DIR) + "/two_state.toml";
  const auto tmp = fs::temp_directory_path() / "tfi_test_cli";
  fs::remove_all(tmp);

  SUBCASE("run exits zero on a passing config and writes CSV") {
    const int rc = std::system(
        (exe + " run " + cfg + " --out " + (tmp / "a").string() + " > /dev/null").c_str());
    CHECK(rc == 0);
    const auto csv = slurp(tmp / "a" / "two_state.csv");
    CHECK(csv.rfind("t,entropy,", 0) == 0);

    // Same invocation again: identical bytes.
    const int rc2 = std::system(
        (exe + " run " + cfg + " --out " + (tmp / "b").string() + " > /dev/null").c_str());
    CHECK(rc2 == 0);
    CHECK(slurp(tmp / "b" / "two_state.csv") == csv);
  }
  SUBCASE("bad config exits with status 2") {
    const auto bad = tmp / "bad.toml";
    fs::create_directories(tmp);
    std::ofstream(bad) << "[[scenario]]\nid = \"x\"\nkind = \"nope\"\n";
    const int rc = std::system(
        (exe + " run " + bad.string() + " --out " + tmp.string() + " 2> /dev/null").c_str());
    CHECK(WEXITSTATUS(rc) == 2);
  }
  SUBCASE("sweep writes slack table") {
    const int rc = std::system((exe + " sweep " + cfg +
                                " --param dt --values 0.002,0.001 --out " +
                                (tmp / "s").string() + " > /dev/null")
                                   .c_str());
    CHECK(rc == 0);
    const auto csv = slurp(tmp / "s" / "sweep.csv");
    CHECK(csv.rfind("value,slack_", 0) == 0);
  }
  fs::remove_all(tmp);
}
