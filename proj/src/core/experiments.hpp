#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "core/config.hpp"
#include "core/homotopy.hpp"
#include "core/indices.hpp"
#include "core/lattice.hpp"

namespace fredlab::experiments {

using json = nlohmann::json;

// %.12g; nan and inf spelled out
std::string format_double(double v);

// Flat table with a documented schema: the first line is `# name: description | ...`.
class Csv {
 public:
  struct Column {
    std::string name;
    std::string description;
  };
  explicit Csv(std::vector<Column> columns) : columns_(std::move(columns)) {}
  void add_row(std::vector<std::string> cells);
  std::string str() const;
  size_t rows() const { return rows_.size(); }

 private:
  std::vector<Column> columns_;
  std::vector<std::vector<std::string>> rows_;
};

json to_json(const indices::IndexResult& r);
json to_json(const spectral::GapReport& g);
json to_json(const lattice::LocalityFit& f);
json to_json(const homotopy::HomotopyReport& r);
json to_json(const homotopy::TransportReport& r);
json to_json(const indices::FermiScanRecord& r);

struct RunOutput {
  json result;
  std::string csv;
  json timing;
  // 0 converged and warning free, 2 warnings or unconverged samples, 1 errors
  int exit_code = 0;
  std::string summary;
};

RunOutput run(const config::RunConfig& c);
RunOutput selfcheck(const config::RunConfig& c, const lattice::FaultInjection& faults = {});

// writes <stem>.json, <stem>.csv and <stem>.timing.json under dir
void write_outputs(const config::RunConfig& c, const RunOutput& out, const std::string& dir);

}  // namespace fredlab::experiments
