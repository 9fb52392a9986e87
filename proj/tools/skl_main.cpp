// skl — scenario front door for the spectral Krylov laboratory.
//
//   skl run <scenario.json> [--out DIR] [--seed N]   execute and write reports
//   skl preset <name>                                print a preset document
//   skl list                                         list the preset catalog
//   skl validate <scenario.json>                     schema-check only
//
// Output root: --out, else $SKL_OUT, else the current directory. Exit codes:
// 0 ok, 2 schema error, 3 measure error, 4 numerical degeneration,
// 5 not-in-range, 1 anything unexpected.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "skl/common.hpp"
#include "skl/scenario.hpp"

namespace {

nlohmann::json load_document(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw skl::schema_error("cannot open " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw skl::schema_error(std::string("malformed JSON: ") + e.what());
  }
  return j;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const skl::schema_error& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const skl::measure_error& e) {
    std::cerr << "measure error: " << e.what() << "\n";
    return 3;
  } catch (const skl::degeneration_error& e) {
    std::cerr << "degeneration: " << e.what() << "\n";
    return 4;
  } catch (const skl::not_in_range_error& e) {
    std::cerr << "not in range: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral Krylov laboratory"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, preset_name;
  std::optional<std::uint64_t> seed_override;

  auto* run = app.add_subcommand("run", "execute a scenario document");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory (default: $SKL_OUT or .)");
  run->add_option("--seed", seed_override, "override the document seed");

  auto* preset = app.add_subcommand("preset", "print a preset scenario document");
  preset->add_option("name", preset_name, "preset name (see `skl list`)")->required();

  app.add_subcommand("list", "list the preset catalog");

  auto* validate = app.add_subcommand("validate", "schema-check a scenario document");
  validate->add_option("scenario", scenario_path, "scenario JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("list")) {
    for (const auto& [name, desc] : skl::preset_catalog())
      std::cout << name << " — " << desc << "\n";
    return 0;
  }

  if (app.got_subcommand("preset"))
    return guarded([&] {
      std::cout << skl::preset_document(preset_name).dump(2) << "\n";
      return 0;
    });

  if (app.got_subcommand("validate"))
    return guarded([&] {
      skl::validate_scenario(load_document(scenario_path));
      std::cout << "ok\n";
      return 0;
    });

  return guarded([&] {
    nlohmann::json doc = load_document(scenario_path);
    if (seed_override) doc["seed"] = *seed_override;
    const skl::scenario sc = skl::validate_scenario(doc);
    std::string dir = out_dir;
    if (dir.empty())
      if (const char* env = std::getenv("SKL_OUT")) dir = env;
    const skl::run_result r = skl::run_scenario_to_files(sc, dir);
    for (const auto& f : r.written) std::cout << f << "\n";
    return 0;
  });
}
