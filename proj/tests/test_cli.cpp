#include "doctest.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cavityband/cli/config.hpp"
#include "cavityband/cli/output.hpp"
#include "cavityband/cli/run.hpp"

using namespace cavityband;
using namespace cavityband::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json base_params() { return {{"kappa", 350}, {"n_atoms", 1e4}, {"u0", 1}, {"eta", 909.9}, {"delta_c", 3140}}; }

std::vector<std::string> error_fields(const json& doc, const std::string& cmd) {
  try {
    parse_config(doc, cmd);
  } catch (const ConfigError& e) {
    std::vector<std::string> f;
    for (const auto& x : e.errors()) f.push_back(x.field);
    return f;
  }
  return {};
}

bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("cavityband_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("shortest round-trip formatting") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
      const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
      const auto s = format_double(x);
      double y = 0;
      std::from_chars(s.data(), s.data() + s.size(), y);
      CHECK(y == x);
    }
    CHECK(format_double(0.1) == "0.1");
  }

  TEST_CASE("sha256") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  }

  TEST_CASE("csv layout") {
    CsvTable t({"q[k]", "n", "label"});
    t.add_row({0.5, 3LL, std::string("upper")});
    CHECK(t.str() == "q[k],n,label\n0.5,3,upper\n");
    CHECK_THROWS(t.add_row({1.0}));
  }

  TEST_CASE("config errors name their fields") {
    json doc = {{"params", {{"kappa", -1}}}, {"bogus", 1}, {"q_grid", {0.5, 0.1}}};
    auto f = error_fields(doc, "band");
    CHECK(has(f, "bogus"));
    CHECK(has(f, "params.kappa"));
    CHECK(has(f, "params.n_atoms"));
    CHECK(has(f, "q_grid"));

    json ls = {{"params", base_params()}};
    CHECK(has(error_fields(ls, "lineshape"), "delta_grid"));
    json sc = {{"params", base_params()}};
    CHECK(has(error_fields(sc, "scurve"), "nph_grid"));

    json neg = {{"params", base_params()}};
    neg["params"]["u0"] = -1;
    CHECK_FALSE(error_fields(neg, "band").empty());
    neg["delta_grid"] = {-9000, -8000};
    neg["red_detuned"] = true;
    CHECK(error_fields(neg, "lineshape").empty());
  }

  TEST_CASE("grid forms") {
    json doc = {{"params", base_params()}, {"q_grid", {{"start", -1}, {"stop", 1}, {"points", 5}}}};
    auto cfg = parse_config(doc, "band");
    REQUIRE(cfg.q_grid.size() == 5);
    CHECK(cfg.q_grid[1] == doctest::Approx(-0.5));
    auto def = parse_config(json{{"params", base_params()}}, "band");
    CHECK(def.q_grid.size() == 41);
    CHECK(parse_config(json{{"params", base_params()}}, "validate").q_grid.size() == 21);
  }

  TEST_CASE("hash depends on every significant digit") {
    auto a = parse_config(json{{"params", base_params()}}, "band");
    auto b = a;
    b.params.eta += 1e-12 * b.params.eta;
    CHECK(config_hash(a) != config_hash(b));
    auto c = a;
    c.workers = 7;
    CHECK(config_hash(a) == config_hash(c));
  }

  TEST_CASE("cache hit, miss and corruption") {
    const auto dir = scratch("cache");
    json doc = {{"params", {{"kappa", 350}, {"n_atoms", 1e4}, {"u0", 1}, {"delta_c", 0}}},
                {"critical", {{"delta_lo", 4000}, {"delta_hi", 4500}}}};
    auto cfg = parse_config(doc, "critical");
    RunOptions opt;
    opt.out_dir = dir.string();
    std::ostringstream log;
    REQUIRE(run(cfg, opt, log) == exit_ok);
    auto m1 = json::parse(slurp(dir / "manifest.json"));
    CHECK(m1["cached"] == false);
    const auto csv = slurp(dir / "critical.csv");

    REQUIRE(run(cfg, opt, log) == exit_ok);
    CHECK(json::parse(slurp(dir / "manifest.json"))["cached"] == true);
    CHECK(slurp(dir / "critical.csv") == csv);

    for (auto& e : fs::recursive_directory_iterator(dir / ".cache"))
      if (e.is_regular_file() && e.path().extension() == ".csv") std::ofstream(e.path()) << "garbage";
    std::ostringstream log2;
    REQUIRE(run(cfg, opt, log2) == exit_ok);
    CHECK(json::parse(slurp(dir / "manifest.json"))["cached"] == false);
    CHECK(log2.str().find("warning") != std::string::npos);
    CHECK(slurp(dir / "critical.csv") == csv);
  }

  TEST_CASE("exit codes") {
    const auto dir = scratch("exit");
    std::ofstream(dir / "bad.json") << R"({"params": {"kappa": 0}})";
    std::ofstream(dir / "bad_syntax.json") << "{";
    auto call = [&](std::vector<std::string> args, std::string& err_text) {
      std::vector<char*> argv;
      for (auto& a : args) argv.push_back(a.data());
      std::ostringstream out, err;
      int rc = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
      err_text = err.str();
      return rc;
    };
    std::string err;
    CHECK(call({"cavityband", "band", "--config", (dir / "bad.json").string(), "--out", dir.string()}, err) ==
          exit_config);
    CHECK(err.find("params.kappa") != std::string::npos);
    CHECK(call({"cavityband", "band", "--config", (dir / "bad_syntax.json").string(), "--out", dir.string()}, err) ==
          exit_config);
    CHECK(call({"cavityband", "nonsense", "--config", (dir / "bad.json").string()}, err) == exit_config);
  }

  TEST_CASE("output bytes do not depend on the worker count") {
    json doc = {{"params", base_params()}, {"q_grid", {{"start", -1}, {"stop", 1}, {"points", 9}}}};
    auto cfg = parse_config(doc, "band");
    cfg.plots = false;
    auto a = compute(cfg, Execution{1});
    auto b = compute(cfg, Execution{3});
    REQUIRE(a.files.size() == b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) CHECK(a.files[i].second == b.files[i].second);
  }
}
