#include "ultranerve/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "ultranerve/error.hpp"
#include "ultranerve/nerve.hpp"
#include "ultranerve/shadow.hpp"

namespace ultranerve {

namespace {

const std::set<std::string> kStages{"validate", "round", "expand", "verify", "shadow", "demo"};

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(what + " line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + e.what());
  }
}

Json gamma_json(const GammaValue& g) {
  if (g.is_zero()) return "INF";
  return g.exponent();
}

std::int64_t require_int(const Json& value, const std::string& field) {
  if (!value.is_number_integer()) throw SchemaError(field + ": expected an integer");
  return value.get<std::int64_t>();
}

std::uint32_t require_prime(const Json& value, const std::string& field) {
  const std::int64_t p = require_int(value, field);
  if (p < 2 || p > 1'000'000 || !is_prime(static_cast<std::uint32_t>(p))) {
    throw SchemaError(field + ": " + std::to_string(p) + " is not a supported prime");
  }
  return static_cast<std::uint32_t>(p);
}

std::vector<std::int64_t> int_list(const Json& value, const std::string& field) {
  if (value.is_number_integer()) return {value.get<std::int64_t>()};
  if (value.is_string() && value.get<std::string>() == "auto") return {};
  if (!value.is_array()) throw SchemaError(field + ": expected \"auto\", an integer or a list of integers");
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(require_int(value[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

Json labels_of(const UltraSpace& space, const std::vector<std::size_t>& ids) {
  Json out = Json::array();
  for (std::size_t i : ids) out.push_back(space.label(i));
  return out;
}

Json label_pairs(const UltraSpace& space, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  Json out = Json::array();
  for (const auto& [a, b] : pairs) out.push_back({space.label(a), space.label(b)});
  return out;
}

// Digits known for every point; exact zeros do not limit it.
std::size_t common_width(const std::vector<PAdic>& points) {
  std::int64_t width = std::numeric_limits<std::int64_t>::max();
  for (const auto& x : points) width = std::min(width, x.known_until());
  return width == std::numeric_limits<std::int64_t>::max() ? 1 : static_cast<std::size_t>(width);
}

std::vector<std::uint32_t> digits_of(const PAdic& x, std::size_t width) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < width; ++i) out.push_back(x.digit_at(static_cast<std::int64_t>(i)));
  return out;
}

// Every check the verify stage runs; `ok` turns false on any failure.
Json verify_expansion(const Expansion& ex, bool& ok) {
  const UltraSpace& space = *ex.space;
  Json reports = Json::object();
  bool all = true;

  std::size_t embedding_mismatches = 0;
  for (std::size_t a = 0; a < space.size(); ++a) {
    for (std::size_t b = a + 1; b < space.size(); ++b) {
      if (ex.embedding->distance(a, b) != space.dist(a, b)) ++embedding_mismatches;
    }
  }
  reports["embedding"] = {{"pairs", space.size() * (space.size() - 1) / 2}, {"mismatches", embedding_mismatches}};
  all = all && embedding_mismatches == 0;

  const auto functoriality = verify_functoriality(ex);
  Json failures = Json::array();
  for (const auto& f : functoriality.failures) failures.push_back({f[0], f[1], f[2]});
  reports["functoriality"] = {{"triples", functoriality.triples_checked}, {"failures", failures}};
  all = all && functoriality.failures.empty();

  Json bonding = Json::array();
  for (const auto& map : ex.bonding) {
    const auto& source = ex.levels[map.source];
    const auto stretch = verify_nonstretching(map, *source.realization, *ex.levels[map.target].realization);
    const auto degenerate = verify_nondegenerate(map, source.nerve);
    Json containment = Json::array();
    for (std::size_t s : map.containment_violations) containment.push_back(labels_of(space, source.nerve.maximal_simplexes[s]));
    Json flagged = Json::array();
    for (std::size_t s : degenerate.flagged) flagged.push_back(labels_of(space, source.nerve.maximal_simplexes[s]));
    bonding.push_back({
        {"from", map.source},
        {"to", map.target},
        {"containment_violations", containment},
        {"nonstretching",
         {{"pairs", stretch.pairs_checked},
          {"violations", label_pairs(space, stretch.violations)},
          {"collapsed", stretch.collapsed},
          {"min_factor_exponent", stretch.min_factor_exponent ? Json(*stretch.min_factor_exponent) : Json(nullptr)},
          {"factor_p", stretch.factor_p()}}},
        {"nondegeneracy", {{"flagged", flagged}, {"merged_vertices", degenerate.merged_vertices}}},
    });
    all = all && map.contains_simplexes() && stretch.violations.empty();
  }
  reports["bonding"] = bonding;

  Json lost = Json::array();
  for (std::size_t x = 0; x < space.size(); ++x) {
    const auto t = thread(ex, x);
    if (!is_coherent(ex, t) || reconstruct(ex, t) != std::vector<std::size_t>{x}) lost.push_back(space.label(x));
  }
  reports["threads"] = {{"points", space.size()}, {"reconstruction_failures", lost}};
  all = all && lost.empty();

  // A mismatch is expected on sparse schedules; only a recovered scale
  // outside the reported bound counts as a failure.
  const auto isometry = limit_isometry_check(ex);
  Json unexplained = Json::array();
  for (const auto& mm : isometry.mismatches) {
    const bool within = mm.recovered && !mm.recovered->is_zero() && !mm.actual.is_zero() &&
                        mm.actual <= *mm.recovered && mm.recovered->scaled(-isometry.bound_exponent) <= mm.actual;
    if (!within) unexplained.push_back({space.label(mm.a), space.label(mm.b)});
  }
  reports["limit_isometry"] = {{"pairs", isometry.pairs_checked},
                               {"mismatches", isometry.mismatches.size()},
                               {"bound_exponent", isometry.bound_exponent},
                               {"unexplained", unexplained}};
  all = all && unexplained.empty();

  Json uniformity = Json::array();
  for (std::size_t m = 0; m < ex.levels.size(); ++m) {
    const auto u = check_uniform(*ex.levels[m].realization);
    uniformity.push_back({{"level", m},
                          {"sup_diam", gamma_json(u.sup_diam)},
                          {"inf_dist", u.inf_dist ? gamma_json(*u.inf_dist) : Json(nullptr)},
                          {"uniform", u.is_uniform}});
    all = all && u.is_uniform;
  }
  reports["uniformity"] = uniformity;

  std::vector<ScaleCover> tower;
  std::vector<NerveComplex> nerves;
  for (const auto& level : ex.levels) {
    tower.push_back(level.cover);
    nerves.push_back(level.nerve);
  }
  const auto isolation = isolated_point_check(space, tower, nerves);
  Json exceptions = Json::array();
  for (const auto& [point, level] : isolation.exceptions) exceptions.push_back({space.label(point), level});
  Json first = Json::object();
  for (const auto& e : isolation.entries) {
    first[space.label(e.point)] = e.first_isolated_level ? Json(*e.first_isolated_level) : Json(nullptr);
  }
  reports["isolation"] = {{"first_isolated_level", first}, {"exceptions", exceptions}};
  all = all && isolation.exceptions.empty();

  reports["ok"] = all;
  ok = all;
  return reports;
}

class StageClock {
public:
  explicit StageClock(RunReport& report, std::string name) : report_(report), start_(std::chrono::steady_clock::now()) {
    status_.name = std::move(name);
  }
  void fail(std::string message) {
    status_.ok = false;
    status_.message = std::move(message);
  }
  void note(std::string message) { status_.message = std::move(message); }
  ~StageClock() {
    status_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    report_.stages.push_back(std::move(status_));
  }

private:
  RunReport& report_;
  StageStatus status_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write " + path.string());
}

InputData parse_input(const std::string& text, std::size_t precision) {
  const Json doc = parse_json(text, "input");
  if (!doc.is_object()) throw SchemaError("input: expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "labels" && key != "prime" && key != "matrix" && key != "padic_points") {
      throw SchemaError(key + ": unknown field");
    }
  }
  InputData input;
  if (!doc.contains("prime")) throw SchemaError("prime: missing");
  input.prime = require_prime(doc["prime"], "prime");

  if (!doc.contains("labels") || !doc["labels"].is_array()) throw SchemaError("labels: expected an array of strings");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc["labels"].size(); ++i) {
    const auto& label = doc["labels"][i];
    if (!label.is_string()) throw SchemaError("labels[" + std::to_string(i) + "]: expected a string");
    if (!seen.insert(label.get<std::string>()).second) {
      throw SchemaError("labels[" + std::to_string(i) + "]: duplicate label \"" + label.get<std::string>() + "\"");
    }
    input.labels.push_back(label.get<std::string>());
  }
  if (input.labels.empty()) throw SchemaError("labels: at least one point is required");
  const std::size_t n = input.labels.size();

  if (doc.contains("matrix") == doc.contains("padic_points")) {
    throw SchemaError("input: exactly one of \"matrix\" and \"padic_points\" is required");
  }
  if (doc.contains("matrix")) {
    const auto& rows = doc["matrix"];
    if (!rows.is_array() || rows.size() != n) throw SchemaError("matrix: expected " + std::to_string(n) + " rows");
    RationalMatrix m(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (!rows[i].is_array() || rows[i].size() != n) {
        throw SchemaError("matrix[" + std::to_string(i) + "]: expected " + std::to_string(n) + " entries");
      }
      for (std::size_t j = 0; j < n; ++j) {
        const auto& entry = rows[i][j];
        const std::string field = "matrix[" + std::to_string(i) + "][" + std::to_string(j) + "]";
        if (entry.is_number_integer()) {
          m[i][j] = Rational(entry.get<std::int64_t>());
        } else if (entry.is_string()) {
          try {
            m[i][j] = parse_rational(entry.get<std::string>());
          } catch (const ParseError& e) {
            throw ParseError(field + ": " + e.what());
          }
        } else if (entry.is_number_float()) {
          throw SchemaError(field + ": floating-point numbers are not exact; write the value as a string such as \"7/10\"");
        } else {
          throw SchemaError(field + ": expected a rational string or an integer");
        }
      }
    }
    input.matrix = std::move(m);
  } else {
    const auto& rows = doc["padic_points"];
    if (!rows.is_array() || rows.size() != n) throw SchemaError("padic_points: expected " + std::to_string(n) + " points");
    std::vector<PAdic> points;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string field = "padic_points[" + std::to_string(i) + "]";
      if (!rows[i].is_array() || rows[i].empty()) throw SchemaError(field + ": expected a nonempty array of digits");
      if (rows[i].size() > std::max<std::size_t>(precision, 1) * 64) throw SchemaError(field + ": too many digits");
      std::vector<std::uint32_t> digits;
      for (std::size_t d = 0; d < rows[i].size(); ++d) {
        const std::int64_t a = require_int(rows[i][d], field + "[" + std::to_string(d) + "]");
        if (a < 0 || a >= input.prime) {
          throw SchemaError(field + "[" + std::to_string(d) + "]: digit outside 0.." + std::to_string(input.prime - 1));
        }
        digits.push_back(static_cast<std::uint32_t>(a));
      }
      points.push_back(PAdic::from_digits(input.prime, 0, digits));
    }
    input.points = std::move(points);
  }
  return input;
}

bool PipelineConfig::has_stage(const std::string& name) const {
  return std::find(stages.begin(), stages.end(), name) != stages.end();
}

PipelineConfig parse_config(const std::string& text, PipelineConfig config) {
  const Json doc = parse_json(text, "config");
  if (!doc.is_object()) throw SchemaError("config: expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "prime") {
      config.prime = require_prime(value, "prime");
    } else if (key == "precision") {
      const std::int64_t precision = require_int(value, "precision");
      if (precision < 1 || precision > 4096) throw SchemaError("precision: expected 1..4096");
      config.precision = static_cast<std::size_t>(precision);
    } else if (key == "schedule") {
      if (!value.is_object()) throw SchemaError("schedule: expected an object");
      for (const auto& [field, entry] : value.items()) {
        if (field == "j") {
          if (entry.is_number_integer()) throw SchemaError("schedule.j: expected \"auto\" or a list");
          config.schedule.j = int_list(entry, "schedule.j");
        } else if (field == "k") {
          config.schedule.k = int_list(entry, "schedule.k");
        } else if (field == "b") {
          if (entry.is_null()) {
            config.schedule.b.reset();
          } else {
            config.schedule.b = GammaValue::from_exponent(require_int(entry, "schedule.b"));
          }
        } else {
          throw SchemaError("schedule." + field + ": unknown field");
        }
      }
    } else if (key == "stages") {
      if (!value.is_array()) throw SchemaError("stages: expected a list");
      config.stages.clear();
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_string()) throw SchemaError("stages[" + std::to_string(i) + "]: expected a string");
        config.stages.push_back(value[i].get<std::string>());
      }
    } else if (key == "output") {
      if (!value.is_string()) throw SchemaError("output: expected a path string");
      config.output = value.get<std::string>();
    } else {
      throw SchemaError(key + ": unknown field");
    }
  }
  check_config(config);
  return config;
}

void check_config(const PipelineConfig& config) {
  if (config.prime && !is_prime(*config.prime)) throw SchemaError("prime: " + std::to_string(*config.prime) + " is not prime");
  if (config.precision < 1) throw SchemaError("precision: must be at least 1");
  for (const auto& stage : config.stages) {
    if (!kStages.count(stage)) throw SchemaError("stages: unknown stage \"" + stage + "\"");
  }
  const auto& k = config.schedule.k;
  for (std::size_t m = 1; m < k.size(); ++m) {
    if (k[m] > k[m - 1]) throw ScheduleError("schedule.k must not increase (k[" + std::to_string(m) + "])");
  }
  const auto& j = config.schedule.j;
  for (std::size_t m = 1; m < j.size(); ++m) {
    if (j[m] <= j[m - 1]) throw ScheduleError("schedule.j must increase strictly (j[" + std::to_string(m) + "])");
  }
}

bool RunReport::ok() const {
  return std::all_of(stages.begin(), stages.end(), [](const StageStatus& s) { return s.ok; });
}

Json RunReport::to_json() const {
  Json stage_list = Json::array();
  for (const auto& s : stages) {
    stage_list.push_back({{"name", s.name}, {"ok", s.ok}, {"message", s.message}, {"seconds", s.seconds}});
  }
  return {{"ok", ok()}, {"stages", stage_list}, {"witnesses", witnesses}};
}

Json gamma_matrix_json(const UltraSpace& space) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < space.size(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < space.size(); ++j) row.push_back(gamma_json(space.dist(i, j)));
    rows.push_back(row);
  }
  return {{"labels", space.labels()}, {"prime", space.prime()}, {"gamma_matrix", rows}};
}

Json expansion_bundle(const Expansion& ex, const Json& reports, const std::optional<std::vector<PAdic>>& points) {
  const UltraSpace& space = *ex.space;
  Json bundle = gamma_matrix_json(space);

  Json thresholds = Json::array();
  for (const auto& t : ex.schedule.thresholds) thresholds.push_back(gamma_json(t));
  bundle["schedule"] = {{"j", ex.schedule.j},
                        {"k", ex.schedule.k},
                        {"b", ex.schedule.b ? gamma_json(*ex.schedule.b) : Json(nullptr)},
                        {"thresholds", thresholds}};

  Json levels = Json::array();
  for (std::size_t m = 0; m < ex.levels.size(); ++m) {
    const Level& level = ex.levels[m];
    Json blocks = Json::object();
    for (const auto& block : level.cover.blocks) blocks[space.label(block.front())] = labels_of(space, block);
    Json simplexes = Json::array();
    for (const auto& s : level.nerve.maximal_simplexes) simplexes.push_back(labels_of(space, s));
    Json realized = Json::array();
    for (const auto& rs : level.realization->simplexes) {
      realized.push_back({{"vertices", labels_of(space, rs.vertices)},
                          {"support", labels_of(space, rs.support)},
                          {"center", space.label(rs.center)},
                          {"radius", gamma_json(rs.radius)},
                          {"dimL", rs.dim_l}});
    }
    levels.push_back({{"level", m},
                      {"j", level.j},
                      {"k", level.k},
                      {"threshold", gamma_json(level.nerve.threshold)},
                      {"vertices", labels_of(space, level.nerve.vertices)},
                      {"blocks", blocks},
                      {"maximal_simplexes", simplexes},
                      {"dimL", level.nerve.dim_l()},
                      {"realization", {{"scale", gamma_json(level.realization->scale)}, {"simplexes", realized}}}});
  }
  bundle["levels"] = levels;

  Json bonding = Json::array();
  for (const auto& map : ex.bonding) {
    Json vertex_map = Json::object();
    for (const auto& [v, w] : map.vertex_map) vertex_map[space.label(v)] = space.label(w);
    bonding.push_back({{"from", map.source}, {"to", map.target}, {"vertex_map", vertex_map},
                       {"simplex_containment", map.contains_simplexes()}});
  }
  bundle["bonding"] = bonding;
  bundle["reports"] = reports;
  // Digit strings start at p^0, so only points of the unit ball are written.
  const auto in_ball = [](const PAdic& x) { return x.is_zero() || x.valuation() >= 0; };
  if (points && std::all_of(points->begin(), points->end(), in_ball)) {
    Json digits = Json::array();
    const std::size_t width = common_width(*points);
    for (const auto& x : *points) digits.push_back(digits_of(x, width));
    bundle["padic_points"] = digits;
  }
  return bundle;
}

Json shadow_from_bundle(const Json& bundle, std::vector<std::string>* csv_rows) {
  try {
    const auto prime = static_cast<std::uint32_t>(bundle.at("prime").get<std::int64_t>());
    const auto labels = bundle.at("labels").get<std::vector<std::string>>();
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < labels.size(); ++i) index[labels[i]] = i;
    auto ids = [&](const Json& list) {
      std::vector<std::size_t> out;
      for (const auto& label : list) {
        const auto found = index.find(label.get<std::string>());
        if (found == index.end()) throw SchemaError("bundle: unknown label \"" + label.get<std::string>() + "\"");
        out.push_back(found->second);
      }
      return out;
    };
    auto names = [&](const std::vector<std::size_t>& list) {
      Json out = Json::array();
      for (std::size_t i : list) out.push_back(labels[i]);
      return out;
    };

    std::vector<NerveComplex> nerves;
    std::vector<ShadowComplex> shadows;
    Json levels = Json::array();
    bool faces_ok = true, counts_ok = true;
    std::size_t dimension_mismatches = 0;
    for (const auto& level_json : bundle.at("levels")) {
      NerveComplex nerve;
      nerve.level = level_json.at("j").get<std::int64_t>();
      nerve.vertices = ids(level_json.at("vertices"));
      for (const auto& s : level_json.at("maximal_simplexes")) nerve.maximal_simplexes.push_back(ids(s));
      if (!level_json.contains("realization")) {
        throw UnrealizedComplex("bundle level " + std::to_string(level_json.at("level").get<std::int64_t>()) +
                                " has no realization");
      }
      Realization realization;
      realization.vertices = nerve.vertices;
      for (const auto& rs : level_json.at("realization").at("simplexes")) {
        RealizedSimplex simplex;
        simplex.vertices = ids(rs.at("vertices"));
        realization.simplexes.push_back(std::move(simplex));
      }
      const ShadowComplex shadow = shadow_complex(nerve, &realization);
      const ShadowCheck check = check_shadow(nerve, shadow);
      faces_ok = faces_ok && check.same_vertices && check.same_faces;
      dimension_mismatches += check.dimension_mismatches.size();
      counts_ok = counts_ok && shadow.vertices.size() == nerve.vertices.size();

      Json cells = Json::array();
      std::int64_t dim_r = 0;
      for (const auto& cell : shadow.cells) {
        Json constraints = Json::array();
        for (std::size_t a : cell.axes) constraints.push_back("0 <= e^" + labels[a] + "(y) <= 1");
        cells.push_back({{"vertices", names(cell.vertices)},
                         {"base", labels[cell.base]},
                         {"axes", names(cell.axes)},
                         {"cube", constraints},
                         {"dimR", cell.dim_r}});
        dim_r = std::max(dim_r, cell.dim_r);
      }
      levels.push_back({{"level", level_json.at("level")},
                        {"j", nerve.level},
                        {"vertices", names(shadow.vertices)},
                        {"cells", cells},
                        {"dimR", dim_r},
                        {"dimL", nerve.dim_l()}});
      nerves.push_back(std::move(nerve));
      shadows.push_back(shadow);
    }

    std::vector<BondingMap> maps;
    for (const auto& b : bundle.at("bonding")) {
      BondingMap map;
      map.source = b.at("from").get<std::size_t>();
      map.target = b.at("to").get<std::size_t>();
      if (map.source >= shadows.size() || map.target >= shadows.size()) throw SchemaError("bonding: level out of range");
      for (const auto& [v, w] : b.at("vertex_map").items()) {
        const auto found = index.find(v);
        if (found == index.end()) throw SchemaError("bonding.vertex_map: unknown label \"" + v + "\"");
        map.vertex_map[found->second] = ids(Json::array({w}))[0];
      }
      maps.push_back(std::move(map));
    }
    for (std::size_t i = 0; i < maps.size(); ++i) {
      if (maps[i].source != i + 1 || maps[i].target != i) throw SchemaError("bonding: expected consecutive levels");
    }

    Json bonding = Json::array();
    std::vector<ShadowBonding> shadow_maps;
    for (const auto& map : maps) {
      const auto sb = shadow_bonding(map, shadows[map.source], shadows[map.target]);
      Json vertex_map = Json::object();
      for (const auto& [v, w] : sb.vertex_map) vertex_map[labels[v]] = labels[w];
      Json cells = Json::array();
      for (const auto& cell : sb.cells) {
        Json affine = Json::object();
        for (const auto& [v, w] : cell.vertex_images) affine[labels[v]] = labels[w];
        cells.push_back({{"source", cell.source_cell}, {"target", cell.target_cell}, {"affine", affine}});
      }
      bonding.push_back({{"from", map.source}, {"to", map.target}, {"vertex_map", vertex_map}, {"cells", cells}});
      shadow_maps.push_back(sb);
    }

    // Shadow of each L-side composite against the composite of shadows.
    bool composition_ok = true;
    for (std::size_t m = 0; m < maps.size(); ++m) {
      BondingMap l_side = maps[m];
      ShadowBonding r_side = shadow_maps[m];
      for (std::size_t t = m; t-- > 0;) {
        l_side = compose(l_side, maps[t]);
        r_side = compose(r_side, shadow_maps[t]);
        composition_ok = composition_ok && r_side == shadow_bonding(l_side, shadows[l_side.source], shadows[t]);
      }
    }

    Json out = {{"prime", prime}, {"labels", labels}, {"levels", levels}, {"bonding", bonding}};
    Json checks = {{"face_poset", faces_ok},
                   {"dimension_mismatches", dimension_mismatches},
                   {"composition", composition_ok},
                   {"vertex_counts_preserved", counts_ok}};
    bool ok = faces_ok && dimension_mismatches == 0 && composition_ok && counts_ok;

    if (bundle.contains("padic_points")) {
      std::vector<PAdic> points;
      std::size_t n = std::numeric_limits<std::size_t>::max();
      for (const auto& digits : bundle.at("padic_points")) {
        const auto d = digits.get<std::vector<std::uint32_t>>();
        points.push_back(PAdic::from_digits(prime, 0, d));
        n = std::min(n, d.size());
      }
      if (points.size() != labels.size()) throw SchemaError("padic_points: expected one point per label");
      Json samples = Json::array();
      if (csv_rows) csv_rows->push_back("label,digits,theta");
      for (std::size_t i = 0; i < points.size(); ++i) {
        const auto digits = digits_of(points[i], n);
        const std::string value = rational_to_string(theta(points[i], n));
        samples.push_back({{"point", labels[i]}, {"digits", digits}, {"theta", value}});
        if (csv_rows) {
          std::string joined;
          for (std::size_t d = 0; d < digits.size(); ++d) joined += (d ? " " : "") + std::to_string(digits[d]);
          csv_rows->push_back(labels[i] + "," + joined + "," + value);
        }
      }
      std::vector<std::pair<PAdic, PAdic>> pairs;
      for (std::size_t a = 0; a < points.size(); ++a) {
        for (std::size_t b = a + 1; b < points.size(); ++b) pairs.emplace_back(points[a], points[b]);
      }
      const auto r = theta_nonstretch_check(pairs, n);
      checks["theta_digits"] = n;
      checks["theta_nonstretch_violations"] = r.violations.size();
      ok = ok && r.violations.empty();
      out["theta_samples"] = samples;
    }
    checks["ok"] = ok;
    out["checks"] = checks;
    return out;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("bundle: ") + e.what());
  }
}

RunResult run(const PipelineConfig& config, const InputData& input) {
  check_config(config);
  RunResult result;
  RunReport& report = result.report;
  const std::uint32_t prime = config.prime.value_or(input.prime);
  if (input.points && prime != input.prime) {
    throw SchemaError("prime: p-adic points are written in base " + std::to_string(input.prime) +
                      ", not " + std::to_string(prime));
  }

  std::optional<UltraSpace> space;
  {
    StageClock clock(report, "validate");
    if (input.points) {
      space = space_from_padics(input.labels, *input.points);
    } else {
      const auto triples = validate_ultrametric(input.labels, *input.matrix);
      report.witnesses["ultrametric_violations"] = triples.size();
      if (!triples.empty() && !config.has_stage("round")) {
        const auto& t = triples.front();
        const auto& l = input.labels;
        const auto& m = *input.matrix;
        report.witnesses["violating_triple"] = {l[t.i], l[t.j], l[t.k]};
        clock.fail("not ultrametric: rho(" + l[t.i] + ", " + l[t.k] + ") = " + rational_to_string(m[t.i][t.k]) +
                   " exceeds max(rho(" + l[t.i] + ", " + l[t.j] + "), rho(" + l[t.j] + ", " + l[t.k] + ")) = " +
                   rational_to_string(std::max(m[t.i][t.j], m[t.j][t.k])) + "; add the \"round\" stage to repair");
        return result;
      }
      if (!config.has_stage("round")) space = round_space(input.labels, *input.matrix, prime);
    }
  }
  if (!space) {
    StageClock clock(report, "round");
    const RationalMatrix closed = subdominant_closure(*input.matrix);
    std::size_t lowered = 0;
    for (std::size_t i = 0; i < closed.size(); ++i) {
      for (std::size_t j = 0; j < closed.size(); ++j) lowered += closed[i][j] != (*input.matrix)[i][j];
    }
    report.witnesses["closure_lowered_entries"] = lowered;
    space = round_space(input.labels, closed, prime);
  }

  std::optional<std::vector<PAdic>> points = input.points;
  if (!space->is_separated()) {
    auto quotient = quotient_zero(*space);
    Json merged = Json::object();
    for (const auto& [from, to] : quotient.merged) {
      if (from != to) merged[from] = to;
    }
    report.witnesses["merged_points"] = merged;
    if (points) {
      std::vector<PAdic> kept;
      for (const auto& label : quotient.space.labels()) {
        const auto at = std::find(input.labels.begin(), input.labels.end(), label) - input.labels.begin();
        kept.push_back((*points)[static_cast<std::size_t>(at)]);
      }
      points = std::move(kept);
    }
    space = std::move(quotient.space);
  }

  result.space = space;
  if (!config.has_stage("expand") && !config.has_stage("verify") && !config.has_stage("shadow")) return result;

  std::optional<Expansion> ex;
  {
    StageClock clock(report, "expand");
    ex = assemble_expansion(*space, config.schedule, config.precision);
    clock.note(std::to_string(ex->levels.size()) + " levels");
  }
  report.witnesses["level_sizes"] = Json::array();
  for (const auto& level : ex->levels) report.witnesses["level_sizes"].push_back(level.nerve.vertices.size());

  Json reports = Json::object();
  if (config.has_stage("verify")) {
    StageClock clock(report, "verify");
    bool ok = false;
    reports = verify_expansion(*ex, ok);
    report.witnesses["verify"] = reports;
    if (!ok) clock.fail("verification failed; see witnesses.verify");
  }
  result.expansion_bundle = expansion_bundle(*ex, reports, points);

  if (config.has_stage("shadow")) {
    StageClock clock(report, "shadow");
    result.shadow_bundle = shadow_from_bundle(*result.expansion_bundle, &result.csv_rows);
    report.witnesses["shadow"] = (*result.shadow_bundle)["checks"];
    if (!(*result.shadow_bundle)["checks"]["ok"].get<bool>()) clock.fail("shadow checks failed; see witnesses.shadow");
  }
  return result;
}

DemoResult demo_zp(std::uint32_t p, std::int64_t m) {
  const auto group = group_expansion(p, m);
  bool verified = false;
  Json reports = verify_expansion(group.expansion, verified);
  reports["group"] = {{"level_sizes", group.level_sizes},
                      {"sizes_match", group.sizes_match},
                      {"bonding_is_reduction", group.bonding_is_reduction},
                      {"translation_invariant", group.translation_invariant}};
  std::vector<PAdic> points;
  for (std::int64_t x : group.residues) points.push_back(PAdic::from_integer(p, x, static_cast<std::size_t>(m)));
  DemoResult out;
  out.ok = verified && group.sizes_match && group.bonding_is_reduction && group.translation_invariant;
  out.bundle = expansion_bundle(group.expansion, reports, points);
  return out;
}

std::string level_dot(const Json& level) {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  std::ostringstream dot;
  const auto m = level.at("level").get<std::int64_t>();
  dot << "graph level_" << m << " {\n";
  dot << "  label=" << quote("level " + std::to_string(m) + ", j = " + std::to_string(level.at("j").get<std::int64_t>())) << ";\n";
  dot << "  node [shape=circle];\n";
  std::size_t index = 0;
  for (const auto& simplex : level.at("maximal_simplexes")) {
    const auto vertices = simplex.get<std::vector<std::string>>();
    if (vertices.size() == 1) {
      dot << "  " << quote(vertices[0]) << ";\n";
      continue;
    }
    dot << "  subgraph simplex_" << index++ << " {\n";
    dot << "    node [style=filled, fillcolor=\"#c6dbef\"];\n";
    for (const auto& v : vertices) dot << "    " << quote(v) << ";\n";
    for (std::size_t a = 0; a < vertices.size(); ++a) {
      for (std::size_t b = a + 1; b < vertices.size(); ++b) dot << "    " << quote(vertices[a]) << " -- " << quote(vertices[b]) << ";\n";
    }
    dot << "  }\n";
  }
  dot << "}\n";
  return dot.str();
}

std::vector<std::string> export_dot(const Json& bundle, const std::filesystem::path& dir) {
  std::vector<std::string> names;
  try {
    for (const auto& level : bundle.at("levels")) {
      const std::string name = "level_" + std::to_string(level.at("level").get<std::int64_t>()) + ".dot";
      write_file(dir / name, level_dot(level));
      names.push_back(name);
    }
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("bundle: ") + e.what());
  }
  return names;
}

}  // namespace ultranerve
