#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ultranerve/padic.hpp"
#include "ultranerve/spectrum.hpp"
#include "ultranerve/ultraspace.hpp"

namespace ultranerve {

using Json = nlohmann::json;

// Process exit codes of the command-line driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitUsage = 2,
  kExitParse = 3,
  kExitSchema = 4,
  kExitSchedule = 5,
  kExitIo = 6,
};

// Either a rational distance matrix or a list of p-adic points.
struct InputData {
  std::vector<std::string> labels;
  std::uint32_t prime = 2;
  std::optional<RationalMatrix> matrix;
  std::optional<std::vector<PAdic>> points;
};

// Throws ParseError (with line and column) or SchemaError (with the field).
InputData parse_input(const std::string& text, std::size_t precision = kDefaultPrecision);

struct PipelineConfig {
  std::optional<std::uint32_t> prime;  // overrides the input's prime
  std::size_t precision = kDefaultPrecision;
  Schedule schedule;
  std::vector<std::string> stages{"validate", "expand", "verify"};
  std::string output;

  bool has_stage(const std::string& name) const;
};

// Fields absent from `text` keep the values already in `base`.
PipelineConfig parse_config(const std::string& text, PipelineConfig base = {});
void check_config(const PipelineConfig& config);

struct StageStatus {
  std::string name;
  bool ok = true;
  std::string message;
  double seconds = 0;
};

struct RunReport {
  std::vector<StageStatus> stages;
  Json witnesses = Json::object();

  bool ok() const;
  Json to_json() const;  // includes timings
};

struct RunResult {
  RunReport report;
  std::optional<UltraSpace> space;  // after rounding and merging
  std::optional<Json> expansion_bundle;
  std::optional<Json> shadow_bundle;
  std::vector<std::string> csv_rows;  // theta table, header first
};

// Builds the space (rounding when the "round" stage is requested), expands
// it and runs the requested checks. Input problems surface as ParseError,
// SchemaError or MalformedMatrix, schedules as ScheduleError; failed
// verifications are recorded in the report.
RunResult run(const PipelineConfig& config, const InputData& input);

// Gamma matrix output for the validate command.
Json gamma_matrix_json(const UltraSpace& space);

// Bundle of an expansion together with its verification reports.
Json expansion_bundle(const Expansion& expansion, const Json& reports,
                      const std::optional<std::vector<PAdic>>& points = std::nullopt);

// Shadow bundle computed from an expansion bundle alone. Throws SchemaError
// for malformed bundles and UnrealizedComplex for levels without a
// realization block. `csv_rows` receives the theta table when points exist.
Json shadow_from_bundle(const Json& bundle, std::vector<std::string>* csv_rows = nullptr);

// Expansion and checks for the Z/p^m demo, as a bundle.
struct DemoResult {
  Json bundle;
  bool ok = false;
};
DemoResult demo_zp(std::uint32_t p, std::int64_t m);

// One DOT graph per level, named level_<m>.dot. Returns the file names.
std::vector<std::string> export_dot(const Json& bundle, const std::filesystem::path& dir);
std::string level_dot(const Json& level);

// Reads a whole file; throws IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ultranerve
