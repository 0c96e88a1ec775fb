#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/config.hpp"
#include "core/experiments.hpp"
#include "core/oracles.hpp"

using namespace fredlab;
using config::RunConfig;
using experiments::Csv;
using experiments::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// data rows of a CSV with schema and header lines
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream is(text);
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    if (n++ < 2) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    out.push_back(cells);
  }
  return out;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = config::parse(R"({
    // comment lines are allowed
    "experiment": "bulk-index",
    "model": {"family": "bhz", "mass": -1.5},
    "geometry": {"side": 12},
    "seeds": [3, 4]
  })");
  CHECK(c.experiment == config::Experiment::bulk_index);
  CHECK(c.model.family == models::Family::bhz);
  CHECK(c.model.mass == -1.5);
  CHECK(c.geometry.side == 12);
  CHECK(c.seeds == std::vector<std::uint64_t>{3, 4});
  CHECK(c.index.window_fraction == 0.8);
  CHECK(c.index.fredholm_gap_threshold == 0.05);
}

TEST_CASE("config schema errors") {
  auto code_of = [](const std::string& text) {
    try {
      config::parse(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::invalid_argument;
  };
  CHECK(code_of(R"({"experiment": "bulk-index", "bogus": 1})") == ErrorCode::schema);
  CHECK(code_of(R"({"experiment": "bulk-index", "geometry": {"side": "big"}})") == ErrorCode::schema);
  CHECK(code_of(R"({"experiment": "nope"})") == ErrorCode::schema);
  CHECK(code_of(R"({"model": {"family": "qwz"}})") == ErrorCode::schema);
  CHECK(code_of("{not json") == ErrorCode::schema);
  CHECK_THROWS(config::parse(R"({"experiment": "bulk-index", "geometry": {"side": 0}})"));
  CHECK_THROWS(config::parse(R"({"experiment": "bulk-index", "workers": 0})"));
}

TEST_CASE("canonical form and hash") {
  const RunConfig a = config::parse(R"({"experiment": "phase-scan", "scan": {"step": 0.75}})");
  const RunConfig b = config::parse(R"({"scan": {"step": 0.75},
                                       "experiment": "phase-scan"})");
  CHECK(config::canonical(a) == config::canonical(b));
  CHECK(config::hash(a) == config::hash(b));
  CHECK(config::hash(a).size() == 16);
  const RunConfig c = config::parse(R"({"experiment": "phase-scan", "scan": {"step": 0.5}})");
  CHECK(config::hash(a) != config::hash(c));
  CHECK(config::canonical(config::parse(config::canonical(a))) == config::canonical(a));
}

TEST_CASE("seed lists") {
  CHECK(config::parse_seed_list("1,2,3") == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(config::parse_seed_list("7") == std::vector<std::uint64_t>{7});
  CHECK_THROWS(config::parse_seed_list(""));
  CHECK_THROWS(config::parse_seed_list("1,-2"));
  CHECK_THROWS(config::parse_seed_list("a"));
}

TEST_CASE("number formatting and CSV") {
  CHECK(experiments::format_double(0.1) == "0.1");
  CHECK(experiments::format_double(1.0 / 3.0) == "0.333333333333");
  CHECK(experiments::format_double(-2.0) == "-2");
  CHECK(experiments::format_double(std::nan("")) == "nan");
  Csv csv({{"u", "mass"}, {"note", "free text"}});
  csv.add_row({"1", "a,b"});
  CHECK(csv.rows() == 1);
  CHECK(csv.str() == "# u: mass | note: free text\nu,note\n1,\"a,b\"\n");
  CHECK_THROWS(csv.add_row({"1"}));
}

TEST_CASE("phase scan reproduces the oracle pattern") {
  RunConfig c = config::parse(R"({"experiment": "phase-scan", "model": {"family": "qwz"},
                                  "geometry": {"side": 12}, "scan": {"from": -3, "to": 3, "step": 0.75}})");
  const experiments::RunOutput out = experiments::run(c);
  const auto rows = csv_rows(out.csv);
  REQUIRE(rows.size() == 9);
  models::ModelSpec one;
  one.mass = 1.0;
  const long cc = oracles::chern_berry(one);
  const long expected[9] = {0, 0, -cc, -cc, 0, cc, cc, 0, 0};
  for (int i = 0; i < 9; ++i) {
    INFO("point " << i);
    if (i == 4) {
      CHECK(rows[i][6] == "not-converged");
      continue;
    }
    CHECK(rows[i][6] == "converged");
    CHECK(rows[i][5] == std::to_string(expected[i]));
  }
  CHECK(out.exit_code == 2);
  CHECK(out.csv.rfind("# ", 0) == 0);
}

TEST_CASE("bec-check on clean BHZ") {
  const RunConfig c = config::parse(R"({"experiment": "bec-check", "model": {"family": "bhz", "mass": -1},
    "geometry": {"side": 12, "strip_length": 16, "strip_width": 8}, "seeds": [0]})");
  const experiments::RunOutput out = experiments::run(c);
  CHECK(out.exit_code == 0);
  const json& recs = out.result.at("records");
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].at("bulk_direct") == 1);
  CHECK(recs[0].at("bulk_transported") == 1);
  CHECK(recs[0].at("edges").at(0).at("agree") == true);
  CHECK(out.result.at("summary").at("agreements") == 1);
}

TEST_CASE("identical configs give byte-identical outputs") {
  const RunConfig c = config::parse(R"({"experiment": "bulk-index", "model": {"family": "qwz", "mass": -1},
    "disorder": {"amplitude": 0.5}, "geometry": {"side": 8}, "seeds": [1, 2]})");
  const auto dir = std::filesystem::temp_directory_path() / "fredlab_test_cli";
  std::filesystem::remove_all(dir);
  const experiments::RunOutput a = experiments::run(c);
  experiments::write_outputs(c, a, (dir / "a").string());
  const experiments::RunOutput b = experiments::run(c);
  experiments::write_outputs(c, b, (dir / "b").string());
  CHECK(a.result.dump() == b.result.dump());
  CHECK(a.csv == b.csv);
  for (const char* f : {"bulk-index.json", "bulk-index.csv"}) CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  CHECK(std::filesystem::exists(dir / "a" / "bulk-index.timing.json"));
  CHECK(a.result.at("config_hash") == config::hash(c));
  std::filesystem::remove_all(dir);
}

TEST_CASE("selfcheck") {
  RunConfig c;
  c.experiment = config::Experiment::selfcheck;
  const experiments::RunOutput ok = experiments::selfcheck(c);
  CHECK(ok.exit_code == 0);
  CHECK(ok.result.at("failed").empty());

  lattice::FaultInjection flux;
  flux.flip_flux_sign = true;
  const experiments::RunOutput bad = experiments::selfcheck(c, flux);
  CHECK(bad.exit_code == 1);
  CHECK(bad.summary.find("Fedosov/Kubo") != std::string::npos);

  lattice::FaultInjection step;
  step.flip_step_convention = true;
  const experiments::RunOutput bad2 = experiments::selfcheck(c, step);
  CHECK(bad2.exit_code == 1);
  CHECK(bad2.summary.find("derivative identities") != std::string::npos);
}
