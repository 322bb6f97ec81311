#include "hdod/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "hdod/error.hpp"
#include "hdod/format.hpp"

namespace hdod {

namespace {

using json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_number(std::string_view field) {
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) return std::nullopt;
  return v;
}

template <typename T>
T parse_integer(std::string_view key, std::string_view text) {
  T v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw Error(ErrorCode::InvalidConfig,
                "key '" + std::string(key) + "': expected an integer, got '" + std::string(text) + "'");
  return v;
}

double parse_real(std::string_view key, std::string_view text) {
  const auto v = parse_number(text);
  if (!v || !std::isfinite(*v))
    throw Error(ErrorCode::InvalidConfig,
                "key '" + std::string(key) + "': expected a number, got '" + std::string(text) + "'");
  return *v;
}

std::vector<std::string_view> list_of(const KeyValues& kv, const std::string& key,
                                      std::string_view fallback) {
  const auto it = kv.find(key);
  const std::string_view text = it == kv.end() ? fallback : std::string_view(it->second);
  std::vector<std::string_view> items;
  for (auto item : split(text, ','))
    if (!item.empty()) items.push_back(item);
  if (items.empty()) throw Error(ErrorCode::InvalidConfig, "key '" + key + "' has no values");
  return items;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  return os;
}

void require_output(const RunConfig& cfg, const char* command) {
  if (cfg.output.empty())
    throw Error(ErrorCode::InvalidConfig, std::string(command) + " requires --out");
}

json scenario_json(const SimScenario& scn) {
  json j;
  j["structure"] = to_string(scn.structure);
  j["n"] = scn.n;
  j["p"] = scn.p;
  j["n_out"] = scn.n_out;
  j["s_mu"] = scn.s_mu;
  j["s_sigma"] = scn.s_sigma;
  j["seed"] = scn.seed;
  return j;
}

json to_json(const DetectionResult& res, MethodId method, const DataMatrix& data) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["method"] = to_string(method);
  j["statistic"] = to_string(res.scores.kind);
  j["n"] = data.n();
  j["p"] = data.p();
  j["centered"] = data.centered();
  json flagged = json::array();
  for (std::size_t i : res.flagged) flagged.push_back(i + 1);
  j["flagged"] = std::move(flagged);
  j["scores"] = std::vector<double>(res.scores.values.begin(), res.scores.values.end());
  j["scale_hint"] = res.scores.scale_hint;

  json diag;
  if (const auto* d = std::get_if<ClusteringDiagnostics>(&res.diagnostics)) {
    diag["gap"] = d->gap;
    diag["gap_threshold"] = d->threshold;
    diag["cluster_sizes"] = {{"inlier", d->inlier_cluster_size}, {"outlier", d->outlier_cluster_size}};
    diag["max_outliers"] = d->max_outliers;
    diag["degenerate"] = d->degenerate;
  } else {
    const auto& r = std::get<RotationDiagnostics>(res.diagnostics);
    diag["critical_value"] = r.critical_value;
    diag["null_size"] = r.null_size;
  }
  j["diagnostics"] = std::move(diag);

  json config;
  if (const auto* c = std::get_if<ClusteringConfig>(&res.config)) {
    config["procedure"] = "clustering";
    config["alpha"] = c->alpha_max;
    config["coeff"] = c->gap_threshold_coeff;
  } else {
    const auto& r = std::get<RotationConfig>(res.config);
    config["procedure"] = r.mode == RotationMode::Pooled ? "rotation_pooled" : "rotation_fwer";
    config["alpha"] = r.alpha;
    config["B"] = r.rotations;
    config["seed"] = r.seed;
  }
  j["config"] = std::move(config);
  return j;
}

}  // namespace

DataMatrix parse_csv(std::istream& in, bool center) {
  std::vector<double> values;
  std::size_t columns = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (first) {
      first = false;
      const bool header = std::any_of(fields.begin(), fields.end(),
                                      [](std::string_view f) { return !parse_number(f); });
      if (header) {
        columns = fields.size();
        continue;
      }
    }
    if (columns == 0) columns = fields.size();
    if (fields.size() != columns) {
      throw Error(ErrorCode::RaggedRows, "line " + std::to_string(line_no) + " has " +
                                             std::to_string(fields.size()) + " fields, expected " +
                                             std::to_string(columns));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto v = parse_number(fields[c]);
      const std::string where = "(" + std::to_string(line_no) + "," + std::to_string(c + 1) + ")";
      if (!v) {
        throw Error(ErrorCode::ParseError,
                    "cannot parse '" + std::string(fields[c]) + "' as a number at " + where);
      }
      if (!std::isfinite(*v)) throw Error(ErrorCode::NonFinite, "non-finite value at " + where);
      values.push_back(*v);
    }
    ++rows;
  }
  RowMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(columns));
  std::copy(values.begin(), values.end(), m.data());
  return center ? center_columns(m) : DataMatrix::from_raw(std::move(m));
}

DataMatrix load_csv(const std::filesystem::path& path, bool center) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  return parse_csv(in, center);
}

void write_matrix_csv(std::ostream& os, const RowMatrix& values) {
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j) os << ',';
      os << format_double(values(i, j));
    }
    os << '\n';
  }
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected key = value");
    std::string key(trim(body.substr(0, eq)));
    std::string value(trim(body.substr(eq + 1)));
    if (key.empty())
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, value).second)
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
  }
  return kv;
}

void write_scenario_config(std::ostream& os, const SimScenario& scn) {
  os << "structure = " << to_string(scn.structure) << '\n'
     << "n = " << scn.n << '\n'
     << "p = " << scn.p << '\n'
     << "n_out = " << scn.n_out << '\n'
     << "s_mu = " << format_double(scn.s_mu) << '\n'
     << "s_sigma = " << format_double(scn.s_sigma) << '\n'
     << "seed = " << scn.seed << '\n';
}

SimScenario scenario_from_config(const KeyValues& kv) {
  static const char* const known[] = {"structure", "n", "p", "n_out", "s_mu", "s_sigma", "seed"};
  for (const auto& [key, value] : kv) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw Error(ErrorCode::InvalidConfig, "unknown scenario key '" + key + "'");
  }
  SimScenario scn;
  if (auto it = kv.find("structure"); it != kv.end()) scn.structure = parse_structure(it->second);
  if (auto it = kv.find("n"); it != kv.end()) scn.n = parse_integer<int>("n", it->second);
  if (auto it = kv.find("p"); it != kv.end()) scn.p = parse_integer<int>("p", it->second);
  if (auto it = kv.find("n_out"); it != kv.end()) scn.n_out = parse_integer<int>("n_out", it->second);
  if (auto it = kv.find("s_mu"); it != kv.end()) scn.s_mu = parse_real("s_mu", it->second);
  if (auto it = kv.find("s_sigma"); it != kv.end()) scn.s_sigma = parse_real("s_sigma", it->second);
  if (auto it = kv.find("seed"); it != kv.end())
    scn.seed = parse_integer<std::uint64_t>("seed", it->second);
  validate(scn);
  return scn;
}

BenchGrid grid_from_config(const KeyValues& kv) {
  static const char* const known[] = {"structure", "n",        "p",
                                      "n_out",     "s_mu",     "s_sigma",
                                      "methods",   "rotations", "coeff",
                                      "alpha_clustering", "alpha_pooled", "alpha_fwer"};
  for (const auto& [key, value] : kv) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw Error(ErrorCode::InvalidConfig, "unknown grid key '" + key + "'");
  }

  const auto structures = list_of(kv, "structure", "id");
  const auto ns = list_of(kv, "n", "30");
  const auto ps = list_of(kv, "p", "500");
  const auto nouts = list_of(kv, "n_out", "3");
  const auto mus = list_of(kv, "s_mu", "0.5");
  const auto sigmas = list_of(kv, "s_sigma", "1.0");
  if (mus.size() != sigmas.size() && mus.size() != 1 && sigmas.size() != 1)
    throw Error(ErrorCode::InvalidConfig, "s_mu and s_sigma lists must have equal length");
  const std::size_t shapes = std::max(mus.size(), sigmas.size());

  BenchGrid grid;
  for (auto s : structures)
    for (auto n : ns)
      for (auto p : ps)
        for (auto k : nouts)
          for (std::size_t i = 0; i < shapes; ++i) {
            SimScenario scn;
            scn.structure = parse_structure(s);
            scn.n = parse_integer<int>("n", n);
            scn.p = parse_integer<int>("p", p);
            scn.n_out = parse_integer<int>("n_out", k);
            scn.s_mu = parse_real("s_mu", mus[mus.size() == 1 ? 0 : i]);
            scn.s_sigma = parse_real("s_sigma", sigmas[sigmas.size() == 1 ? 0 : i]);
            validate(scn);
            grid.scenarios.push_back(scn);
          }

  int rotations = 300;
  if (auto it = kv.find("rotations"); it != kv.end())
    rotations = parse_integer<int>("rotations", it->second);
  auto optional_real = [&](const char* key) -> std::optional<double> {
    if (auto it = kv.find(key); it != kv.end()) return parse_real(key, it->second);
    return std::nullopt;
  };
  const auto coeff = optional_real("coeff");
  const auto alpha_clustering = optional_real("alpha_clustering");
  const auto alpha_pooled = optional_real("alpha_pooled");
  const auto alpha_fwer = optional_real("alpha_fwer");

  for (auto name : list_of(kv, "methods", "dod1,dod2,dod3,dog1,dog2,dog3")) {
    MethodSpec spec = default_method(parse_method_id(name), rotations);
    if (auto* c = std::get_if<ClusteringConfig>(&spec.config)) {
      if (coeff) c->gap_threshold_coeff = *coeff;
      if (alpha_clustering) c->alpha_max = *alpha_clustering;
    } else {
      auto& r = std::get<RotationConfig>(spec.config);
      if (r.mode == RotationMode::Pooled && alpha_pooled) r.alpha = *alpha_pooled;
      if (r.mode == RotationMode::FWER && alpha_fwer) r.alpha = *alpha_fwer;
    }
    validate(spec);
    grid.methods.push_back(spec);
  }
  return grid;
}

MethodSpec resolve_method(const RunConfig& cfg) {
  if (!cfg.method) throw Error(ErrorCode::InvalidConfig, "--method is required");
  const MethodId id = *cfg.method;
  if (cfg.kind && *cfg.kind != statistic_of(id)) {
    throw Error(ErrorCode::InvalidConfig, "method " + std::string(to_string(id)) +
                                              " uses statistic " +
                                              std::string(to_string(statistic_of(id))) + ", not " +
                                              std::string(to_string(*cfg.kind)));
  }
  MethodSpec spec = default_method(id, cfg.rotations.value_or(300));
  if (auto* c = std::get_if<ClusteringConfig>(&spec.config)) {
    if (cfg.alpha) c->alpha_max = *cfg.alpha;
    if (cfg.coeff) c->gap_threshold_coeff = *cfg.coeff;
  } else {
    auto& r = std::get<RotationConfig>(spec.config);
    if (cfg.alpha) r.alpha = *cfg.alpha;
    r.seed = cfg.seed;
  }
  validate(spec);
  return spec;
}

void cmd_score(const RunConfig& cfg, std::ostream& out) {
  const DataMatrix data = load_csv(cfg.input, cfg.center);
  const StatisticKind kind = cfg.kind.value_or(StatisticKind::DOD);
  const ScoreVector t = outlyingness_scores(data, kind);

  std::ostringstream csv;
  csv << "index,t,t_scaled\n";
  for (Eigen::Index i = 0; i < t.values.size(); ++i)
    csv << (i + 1) << ',' << format_double(t.values(i)) << ','
        << format_double(t.values(i) / t.scale_hint) << '\n';
  if (cfg.output.empty()) {
    out << csv.str() << '\n';
  } else {
    auto os = open_output(cfg.output);
    os << csv.str();
  }

  constexpr int kBarWidth = 50;
  const double max_t = t.values.size() ? t.values.maxCoeff() : 0.0;
  const int label_width = static_cast<int>(std::to_string(t.values.size()).size());
  out << "t^(" << (kind == StatisticKind::DOD ? 'D' : 'G') << ") by observation (n = " << data.n()
      << ", p = " << data.p() << ")\n";
  for (Eigen::Index i = 0; i < t.values.size(); ++i) {
    const int len =
        max_t > 0.0 ? static_cast<int>(std::lround(kBarWidth * t.values(i) / max_t)) : 0;
    out << std::setw(label_width) << (i + 1) << " | " << std::string(static_cast<std::size_t>(len), '#')
        << std::string(static_cast<std::size_t>(kBarWidth - len), ' ') << ' '
        << format_fixed(t.values(i), 3) << '\n';
  }
}

void cmd_detect(const RunConfig& cfg, std::ostream& out) {
  require_output(cfg, "detect");
  const MethodSpec spec = resolve_method(cfg);
  const DataMatrix data = load_csv(cfg.input, cfg.center);
  const DetectionResult res = run_method(data, spec, cfg.seed);
  auto os = open_output(cfg.output);
  os << to_json(res, spec.id, data).dump(2) << '\n';
  out << to_string(spec.id) << ": " << res.flagged.size() << " of " << data.n()
      << " observations flagged\n";
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  std::filesystem::path meta = csv;
  meta.replace_extension(".meta.json");
  return meta;
}

void cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  require_output(cfg, "simulate");
  SimScenario scn = cfg.scenario;
  if (!cfg.scenario_file.empty()) {
    std::ifstream in(cfg.scenario_file, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + cfg.scenario_file + "'");
    scn = scenario_from_config(parse_key_values(in));
  }
  const LabeledDataset ds = make_dataset(scn);
  {
    auto os = open_output(cfg.output);
    write_matrix_csv(os, ds.data.values());
  }
  json meta;
  meta["schema_version"] = kSchemaVersion;
  meta["scenario"] = scenario_json(scn);
  json idx = json::array();
  for (std::size_t i : ds.outlier_indices) idx.push_back(i + 1);
  meta["outlier_indices"] = std::move(idx);
  auto os = open_output(sidecar_path(cfg.output));
  os << meta.dump(2) << '\n';
  out << "wrote " << scn.n << " x " << scn.p << " matrix with " << scn.n_out << " outliers\n";
}

void cmd_bench(const RunConfig& cfg, std::ostream& out) {
  require_output(cfg, "bench");
  std::ifstream in(cfg.grid, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open grid file '" + cfg.grid + "'");
  const BenchGrid grid = grid_from_config(parse_key_values(in));
  const BenchSummary summary =
      run_grid(grid.scenarios, grid.methods, cfg.replicates, cfg.seed, GridOptions{cfg.threads});
  {
    auto os = open_output(cfg.output);
    write_summary_csv(os, summary, cfg.timing);
  }
  if (!cfg.raw_output.empty()) {
    auto os = open_output(cfg.raw_output);
    write_outcomes_jsonl(os, summary);
  }
  write_summary_text(out, summary);
}

}  // namespace hdod
