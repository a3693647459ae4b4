// Command-line driver: validate inputs, expand spaces into nerve towers,
// compute shadows and export DOT drawings.
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ultranerve/error.hpp"
#include "ultranerve/pipeline.hpp"

using namespace ultranerve;
namespace fs = std::filesystem;

namespace {

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// "auto", a single integer, or a comma-separated list.
std::vector<std::int64_t> parse_k(const std::string& text) {
  if (text == "auto") return {};
  std::vector<std::int64_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw SchemaError("--k: \"" + item + "\" is not an integer");
    }
  }
  return out;
}

std::vector<std::string> split_stages(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

PipelineConfig load_config(const std::string& path) {
  std::string source = path;
  if (source.empty()) {
    if (const char* env = std::getenv("ULTRANERVE_CONFIG"); env && *env) source = env;
  }
  if (source.empty()) return {};
  return parse_config(read_file(source));
}

void print_report(const RunReport& report) {
  for (const auto& stage : report.stages) {
    std::cerr << (stage.ok ? "ok   " : "FAIL ") << stage.name;
    if (!stage.message.empty()) std::cerr << ": " << stage.message;
    std::cerr << "\n";
  }
}

struct Options {
  std::string input;
  std::string config;
  std::string out;
  std::string stages;
  std::string k;
  std::uint32_t prime = 0;
  std::size_t precision = 0;
  bool round = false;
  bool csv = false;
  std::int64_t depth = 0;
};

int cmd_validate(const Options& o) {
  PipelineConfig config = load_config(o.config);
  config.stages = {"validate"};
  if (o.round) config.stages.push_back("round");
  if (o.prime) config.prime = o.prime;
  const InputData input = parse_input(read_file(o.input), config.precision);
  const RunResult result = run(config, input);
  print_report(result.report);
  if (!result.report.ok()) return kExitVerificationFailed;

  Json out = gamma_matrix_json(*result.space);
  if (result.report.witnesses.contains("merged_points")) out["merged_points"] = result.report.witnesses["merged_points"];
  std::cout << dump(out);
  return kExitOk;
}

int cmd_expand(const Options& o) {
  PipelineConfig config = load_config(o.config);
  if (o.prime) config.prime = o.prime;
  if (o.precision) config.precision = o.precision;
  if (!o.stages.empty()) config.stages = split_stages(o.stages);
  if (!o.k.empty()) config.schedule.k = parse_k(o.k);
  if (!o.out.empty()) config.output = o.out;
  if (config.output.empty()) throw SchemaError("output: pass --out or set \"output\" in the config");
  check_config(config);

  const fs::path dir = config.output;
  const InputData input = parse_input(read_file(o.input), config.precision);
  const RunResult result = run(config, input);
  print_report(result.report);
  write_file(dir / "report.json", dump(result.report.to_json()));
  if (result.expansion_bundle) write_file(dir / "expansion.json", dump(*result.expansion_bundle));
  if (result.shadow_bundle) write_file(dir / "shadow.json", dump(*result.shadow_bundle));
  if (!result.csv_rows.empty()) {
    std::string csv;
    for (const auto& row : result.csv_rows) csv += row + "\n";
    write_file(dir / "theta.csv", csv);
  }
  return result.report.ok() ? kExitOk : kExitVerificationFailed;
}

int cmd_shadow(const Options& o) {
  const Json bundle = [&] {
    try {
      return Json::parse(read_file(o.input));
    } catch (const Json::parse_error& e) {
      throw ParseError(o.input + ": " + e.what());
    }
  }();
  std::vector<std::string> rows;
  const Json shadow = shadow_from_bundle(bundle, &rows);
  if (o.out.empty()) {
    std::cout << dump(shadow);
  } else {
    write_file(fs::path(o.out) / "shadow.json", dump(shadow));
    if (o.csv && !rows.empty()) {
      std::string csv;
      for (const auto& row : rows) csv += row + "\n";
      write_file(fs::path(o.out) / "theta.csv", csv);
    }
  }
  const bool ok = shadow["checks"]["ok"].get<bool>();
  if (!ok) std::cerr << "shadow checks failed: " << shadow["checks"].dump() << "\n";
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_demo(const Options& o) {
  if (!is_prime(o.prime)) throw SchemaError("--prime: " + std::to_string(o.prime) + " is not prime");
  if (o.depth < 1) throw SchemaError("--depth: must be at least 1");
  const DemoResult demo = demo_zp(o.prime, o.depth);
  if (o.out.empty()) {
    std::cout << dump(demo.bundle);
  } else {
    write_file(fs::path(o.out) / "expansion.json", dump(demo.bundle));
  }
  if (!demo.ok) std::cerr << "demo checks failed\n";
  return demo.ok ? kExitOk : kExitVerificationFailed;
}

int cmd_export_dot(const Options& o) {
  const Json bundle = [&] {
    try {
      return Json::parse(read_file(o.input));
    } catch (const Json::parse_error& e) {
      throw ParseError(o.input + ": " + e.what());
    }
  }();
  const fs::path dir = o.out.empty() ? fs::path(o.input).parent_path() : fs::path(o.out);
  for (const auto& name : export_dot(bundle, dir)) std::cout << (dir / name).string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nerve expansions of finite ultrametric spaces over Q_p"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "Check an input space and print its gamma matrix");
  validate->add_option("input", o.input, "Input JSON")->required();
  validate->add_flag("--round", o.round, "Repair a non-ultrametric matrix by subdominant closure");
  validate->add_option("--prime", o.prime, "Override the input prime");
  validate->add_option("--config", o.config, "Config JSON (default: $ULTRANERVE_CONFIG)");

  auto* expand = app.add_subcommand("expand", "Expand a space into a nerve tower and verify it");
  expand->add_option("input", o.input, "Input JSON")->required();
  expand->add_option("--config", o.config, "Config JSON (default: $ULTRANERVE_CONFIG)");
  expand->add_option("--out", o.out, "Output directory");
  expand->add_option("--prime", o.prime, "Override the prime");
  expand->add_option("--precision", o.precision, "Digits kept in the c0 embedding");
  expand->add_option("--stages", o.stages, "Comma-separated stages: validate,round,expand,verify,shadow");
  expand->add_option("--k", o.k, "Nerve exponent: auto, an integer, or a comma-separated list");

  auto* shadow = app.add_subcommand("shadow", "Compute the real shadow of an expansion bundle");
  shadow->add_option("bundle", o.input, "expansion.json")->required();
  shadow->add_option("--out", o.out, "Output directory (default: stdout)");
  shadow->add_flag("--csv", o.csv, "Also write theta.csv");

  auto* demo = app.add_subcommand("demo", "Built-in examples");
  demo->require_subcommand(1);
  auto* zp = demo->add_subcommand("zp", "Z/p^m residues under the p-adic metric");
  zp->add_option("--prime", o.prime, "Prime p")->required();
  zp->add_option("--depth", o.depth, "Depth m")->required();
  zp->add_option("--out", o.out, "Output directory (default: stdout)");

  auto* exporter = app.add_subcommand("export", "Export a bundle");
  exporter->require_subcommand(1);
  auto* dot = exporter->add_subcommand("dot", "One DOT graph per level");
  dot->add_option("bundle", o.input, "expansion.json")->required();
  dot->add_option("--out", o.out, "Output directory (default: next to the bundle)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*expand) return cmd_expand(o);
    if (*shadow) return cmd_shadow(o);
    if (*zp) return cmd_demo(o);
    if (*dot) return cmd_export_dot(o);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const MalformedMatrix& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const ScheduleError& e) {
    std::cerr << "schedule error: " << e.what() << "\n";
    return kExitSchedule;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerificationFailed;
  }
  return kExitUsage;
}
