#pragma once

// Scenario documents: one named measure, one task, task parameters — executed
// into a deterministic primary JSON report plus CSV views derived from it.
// The CLI is a thin shell over this module.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "skl/measure.hpp"

namespace skl {

enum class task_kind { moments, determinacy, classify, solve, kint, weakgap, truncation };
std::string to_string(task_kind t);
task_kind task_kind_from_string(const std::string& s);

struct scenario {
  std::string name;
  spectral_measure measure;
  task_kind task = task_kind::moments;
  nlohmann::json params = nlohmann::json::object();
  std::string output_prefix;          // file stem; defaults to name
  std::optional<std::uint64_t> seed;  // required by kint / weakgap / truncation

  static scenario from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;  // canonical echo (measure re-serialized)
};

// Parse plus per-task parameter validation, without executing anything.
// Unknown parameter keys are rejected. Throws schema_error (measure_error
// when the measure itself is invalid).
scenario validate_scenario(const nlohmann::json& j);

struct run_result {
  nlohmann::json report;  // primary report; depends only on (document, seed)
  // CSV views derived from the report: (file suffix, content)
  std::vector<std::pair<std::string, std::string>> tables;
  std::vector<std::string> written;  // paths placed by run_scenario_to_files
};

// Executes the task on a validated document.
run_result run_scenario(const scenario& sc);

// Runs, then writes <dir>/<prefix>.json, <dir>/<prefix>.<suffix>.csv, and a
// <prefix>.meta.json sidecar (the timestamp lives there, keeping the primary
// report byte-stable). Nothing is written until the run has succeeded; a
// write failure removes the files already placed.
run_result run_scenario_to_files(const scenario& sc, const std::string& dir);

// Built-in catalog: stable order, (name, one-line description) pairs.
const std::vector<std::pair<std::string, std::string>>& preset_catalog();

// Full scenario document of a named preset; schema_error on unknown names.
nlohmann::json preset_document(const std::string& name);

}  // namespace skl
