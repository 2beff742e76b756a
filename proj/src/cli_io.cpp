#include "strataboot/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "strataboot/ecdf.hpp"
#include "strataboot/estimators.hpp"
#include "strataboot/oracle.hpp"

namespace strataboot {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string where(std::size_t line) { return "line " + std::to_string(line) + ": "; }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      fields.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(trim(field));
  return fields;
}

// Reads a header and the data lines of a CSV, skipping blank lines.
struct CsvReader {
  explicit CsvReader(std::istream& stream) : in(stream) {}

  std::istream& in;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> columns;

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      fields = split_csv(line);
      return true;
    }
    return false;
  }

  void read_header() {
    std::vector<std::string> header;
    if (!next(header)) throw Error(ErrorCode::InvalidInput, "empty file: a header line is required");
    for (std::size_t k = 0; k < header.size(); ++k) {
      std::string name = header[k];
      std::transform(name.begin(), name.end(), name.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (!columns.emplace(name, k).second) {
        throw Error(ErrorCode::InvalidInput, where(line_no) + "duplicate column '" + name + "'");
      }
    }
  }

  std::optional<std::size_t> find(std::initializer_list<const char*> names) const {
    for (const char* name : names) {
      if (auto it = columns.find(name); it != columns.end()) return it->second;
    }
    return std::nullopt;
  }

  std::size_t require(std::initializer_list<const char*> names, const char* label) const {
    if (auto k = find(names)) return *k;
    throw Error(ErrorCode::InvalidInput, std::string("missing required column '") + label + "'");
  }

  const std::string& field(const std::vector<std::string>& fields, std::size_t k) const {
    if (fields.size() != columns.size()) {
      throw Error(ErrorCode::InvalidInput, where(line_no) + "expected " + std::to_string(columns.size()) +
                                               " fields, found " + std::to_string(fields.size()));
    }
    return fields[k];
  }

  double real(const std::vector<std::string>& fields, std::size_t k, const char* label) const {
    const std::string& text = field(fields, k);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
      throw Error(ErrorCode::InvalidInput,
                  where(line_no) + label + " is not a number: '" + text + "'");
    }
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::NonFiniteOutcome, where(line_no) + label + " is not finite: '" + text + "'");
    }
    return value;
  }

  int binary(const std::vector<std::string>& fields, std::size_t k) const {
    const std::string& text = field(fields, k);
    if (text == "0") return 0;
    if (text == "1") return 1;
    throw Error(ErrorCode::InvalidInput, where(line_no) + "z must be 0 or 1, got '" + text + "'");
  }
};

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidInput, "cannot open '" + path + "' for writing");
  return file;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidInput, "cannot open '" + path + "'");
  return file;
}

// Writes through `out` or a file, whichever the command asked for.
template <typename Fn>
void emit(const std::string& path, std::ostream& out, Fn&& write) {
  if (path.empty() || path == "-") {
    write(out);
  } else {
    auto file = open_output(path);
    write(file);
  }
}

json real_or_null(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// --- TOML subset -----------------------------------------------------------

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    if (line[k] == '"' && (k == 0 || line[k - 1] != '\\')) quoted = !quoted;
    if (line[k] == '#' && !quoted) return line.substr(0, k);
  }
  return line;
}

bool valid_key(const std::string& key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-';
  });
}

json parse_toml_value(const std::string& text, std::size_t line) {
  const std::string v = trim(text);
  if (v.empty()) throw Error(ErrorCode::InvalidInput, where(line) + "missing value");
  if (v.front() == '"') {
    std::string out;
    std::size_t k = 1;
    for (; k < v.size() && v[k] != '"'; ++k) {
      if (v[k] == '\\' && k + 1 < v.size()) {
        const char e = v[++k];
        out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
      } else {
        out += v[k];
      }
    }
    if (k + 1 != v.size()) throw Error(ErrorCode::InvalidInput, where(line) + "malformed string " + v);
    return out;
  }
  if (v.front() == '[') {
    if (v.back() != ']') throw Error(ErrorCode::InvalidInput, where(line) + "unterminated array");
    json arr = json::array();
    const std::string body = v.substr(1, v.size() - 2);
    std::string item;
    bool quoted = false;
    for (char c : body) {
      if (c == '"') quoted = !quoted;
      if (c == ',' && !quoted) {
        if (!trim(item).empty()) arr.push_back(parse_toml_value(item, line));
        item.clear();
      } else {
        item += c;
      }
    }
    if (!trim(item).empty()) arr.push_back(parse_toml_value(item, line));
    return arr;
  }
  if (v == "true") return true;
  if (v == "false") return false;
  std::string digits;
  for (char c : v) {
    if (c != '_') digits += c;
  }
  const bool is_float = digits.find_first_of(".eE") != std::string::npos || digits == "inf" ||
                        digits == "+inf" || digits == "-inf" || digits == "nan";
  const char* first = digits.data() + (digits.front() == '+' ? 1 : 0);
  const char* last = digits.data() + digits.size();
  if (is_float) {
    double d = 0.0;
    const auto [end, ec] = std::from_chars(first, last, d);
    if (ec == std::errc() && end == last) return d;
  } else {
    std::int64_t i = 0;
    const auto [end, ec] = std::from_chars(first, last, i);
    if (ec == std::errc() && end == last) return i;
  }
  throw Error(ErrorCode::InvalidInput, where(line) + "cannot parse value '" + v + "'");
}

// --- config access ---------------------------------------------------------

std::uint64_t get_uint(const json& obj, const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw Error(ErrorCode::InvalidInput, std::string("'") + key + "' must be a non-negative integer");
}

double get_real(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw Error(ErrorCode::InvalidInput, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw Error(ErrorCode::InvalidInput, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

CaseKind parse_case(const std::string& name) {
  for (auto k : {CaseKind::StratifiedAdditive, CaseKind::StratifiedComonotonic,
                 CaseKind::StratifiedDependent, CaseKind::StratifiedIndependent,
                 CaseKind::PairedAdditive, CaseKind::PairedIndependent}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::InvalidInput, "unknown case '" + name + "'");
}

Distribution parse_distribution(const json& obj) {
  const std::string name = get_string(obj, "distribution", "gamma");
  Distribution d;
  if (name == "gamma") {
    d = {Distribution::Kind::Gamma, 1.0, 1.0};
  } else if (name == "normal") {
    d = {Distribution::Kind::Normal, 0.0, 1.0};
  } else if (name == "uniform") {
    d = {Distribution::Kind::Uniform, -1.0, 1.0};
  } else if (name == "pareto") {
    d = {Distribution::Kind::Pareto, 1.0, 1.0};
  } else {
    throw Error(ErrorCode::InvalidInput, "unknown distribution '" + name + "'");
  }
  if (obj.contains("params")) {
    const auto& p = obj.at("params");
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw Error(ErrorCode::InvalidInput, "'params' must be an array of two numbers");
    }
    d.a = p[0].get<double>();
    d.b = p[1].get<double>();
  }
  return d;
}

std::vector<std::uint64_t> population_seeds(const json& scenario, const json& root) {
  const json* source = nullptr;
  if (scenario.contains("population_seed")) return {get_uint(scenario, "population_seed", 1)};
  if (scenario.contains("population_seeds")) {
    source = &scenario.at("population_seeds");
  } else if (root.contains("population_seeds")) {
    source = &root.at("population_seeds");
  }
  if (!source) return {1};
  if (!source->is_array() || source->empty()) {
    throw Error(ErrorCode::InvalidInput, "'population_seeds' must be a non-empty array");
  }
  std::vector<std::uint64_t> seeds;
  for (const auto& v : *source) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      throw Error(ErrorCode::InvalidInput, "'population_seeds' must hold non-negative integers");
    }
    seeds.push_back(v.get<std::uint64_t>());
  }
  return seeds;
}

std::string csv_real(double v) { return std::isnan(v) ? "NA" : format_real(v); }

void report_error(std::ostream& err, const Error& e) {
  err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptySample:
    case ErrorCode::EmptyStratumArm:
    case ErrorCode::NonFiniteOutcome:
    case ErrorCode::SingletonStratum:
    case ErrorCode::DomainError:
    case ErrorCode::InvalidInput:
      return exit_code::kInput;
    case ErrorCode::InsufficientArm:
    case ErrorCode::NotSharpEligible:
    case ErrorCode::NotPaired:
    case ErrorCode::TooFewPairs:
    case ErrorCode::DegenerateBootstrap:
      return exit_code::kMismatch;
    case ErrorCode::TooLargeToEnumerate:
      return exit_code::kTooLarge;
    case ErrorCode::IdentityViolation:
      return exit_code::kFailure;
  }
  return exit_code::kFailure;
}

std::vector<ObservationRow> read_observations(std::istream& in) {
  CsvReader csv(in);
  csv.read_header();
  const std::size_t s_col = csv.require({"stratum", "pair"}, "stratum");
  const std::size_t z_col = csv.require({"z"}, "z");
  const std::size_t y_col = csv.require({"y"}, "y");
  std::vector<ObservationRow> rows;
  std::vector<std::string> fields;
  while (csv.next(fields)) {
    ObservationRow row;
    row.stratum = csv.field(fields, s_col);
    if (row.stratum.empty()) throw Error(ErrorCode::InvalidInput, where(csv.line_no) + "empty stratum label");
    row.z = csv.binary(fields, z_col);
    row.y = csv.real(fields, y_col, "y");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptySample, "no data rows");
  return rows;
}

PopulationFile read_population(std::istream& in) {
  CsvReader csv(in);
  csv.read_header();
  const std::size_t s_col = csv.require({"stratum", "pair"}, "stratum");
  const std::size_t y1_col = csv.require({"y1"}, "y1");
  const std::size_t y0_col = csv.require({"y0"}, "y0");
  const auto z_col = csv.find({"z"});

  std::vector<std::string> labels;
  std::vector<PopulationUnit> units;
  std::vector<int> z;
  std::vector<std::string> fields;
  while (csv.next(fields)) {
    labels.push_back(csv.field(fields, s_col));
    units.push_back({0, csv.real(fields, y1_col, "y1"), csv.real(fields, y0_col, "y0")});
    if (z_col) z.push_back(csv.binary(fields, *z_col));
  }
  if (units.empty()) throw Error(ErrorCode::EmptySample, "no data rows");
  const auto strata = normalize_strata(labels);
  PopulationFile file;
  file.treated.assign(strata.names.size(), 0);
  std::vector<std::size_t> sizes(strata.names.size(), 0);
  for (std::size_t i = 0; i < units.size(); ++i) {
    units[i].stratum = static_cast<std::int64_t>(strata.unit_stratum[i] + 1);
    ++sizes[strata.unit_stratum[i]];
    if (z_col) file.treated[strata.unit_stratum[i]] += static_cast<std::size_t>(z[i]);
  }
  for (std::size_t m = 0; m < sizes.size(); ++m) {
    if (sizes[m] < 2) {
      throw Error(ErrorCode::SingletonStratum, "stratum '" + strata.names[m] + "' has a single unit");
    }
    if (!z_col) file.treated[m] = sizes[m] / 2;
  }
  file.units = std::move(units);
  return file;
}

json parse_toml(std::istream& in) {
  json root = json::object();
  json* table = &root;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(strip_comment(raw));
    if (text.empty()) continue;
    if (text.rfind("[[", 0) == 0) {
      if (text.size() < 5 || text.substr(text.size() - 2) != "]]") {
        throw Error(ErrorCode::InvalidInput, where(line) + "malformed table header");
      }
      const std::string name = trim(text.substr(2, text.size() - 4));
      if (!valid_key(name)) throw Error(ErrorCode::InvalidInput, where(line) + "bad table name '" + name + "'");
      auto& arr = root[name];
      if (arr.is_null()) arr = json::array();
      if (!arr.is_array()) throw Error(ErrorCode::InvalidInput, where(line) + "'" + name + "' is not an array");
      arr.push_back(json::object());
      table = &arr.back();
    } else if (text.front() == '[') {
      if (text.back() != ']') throw Error(ErrorCode::InvalidInput, where(line) + "malformed table header");
      const std::string name = trim(text.substr(1, text.size() - 2));
      if (!valid_key(name)) throw Error(ErrorCode::InvalidInput, where(line) + "bad table name '" + name + "'");
      if (root.contains(name)) throw Error(ErrorCode::InvalidInput, where(line) + "table '" + name + "' redefined");
      root[name] = json::object();
      table = &root[name];
    } else {
      const auto eq = text.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::InvalidInput, where(line) + "expected key = value");
      const std::string key = trim(text.substr(0, eq));
      if (!valid_key(key)) throw Error(ErrorCode::InvalidInput, where(line) + "bad key '" + key + "'");
      if (table->contains(key)) throw Error(ErrorCode::InvalidInput, where(line) + "duplicate key '" + key + "'");
      (*table)[key] = parse_toml_value(text.substr(eq + 1), line);
    }
  }
  return root;
}

json read_config(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::InvalidInput, std::string("config is not valid JSON: ") + e.what());
    }
  }
  std::istringstream stream(text);
  return parse_toml(stream);
}

std::vector<Scenario> load_scenarios(const json& config, std::uint64_t seed) {
  if (!config.is_object() || !config.contains("scenario") || !config.at("scenario").is_array() ||
      config.at("scenario").empty()) {
    throw Error(ErrorCode::InvalidInput, "config must define at least one [[scenario]]");
  }
  StudyOptions defaults;
  defaults.replications = get_uint(config, "replications", 1000);
  defaults.replicates = get_uint(config, "replicates", 1000);
  defaults.alpha = get_real(config, "alpha", 0.05);

  std::vector<Scenario> out;
  std::size_t index = 0;
  for (const auto& entry : config.at("scenario")) {
    ++index;
    if (!entry.is_object()) throw Error(ErrorCode::InvalidInput, "each scenario must be a table");
    try {
      DgpSpec spec;
      if (!entry.contains("case")) throw Error(ErrorCode::InvalidInput, "missing 'case'");
      spec.kind = parse_case(get_string(entry, "case", ""));
      if (!entry.contains("strata")) throw Error(ErrorCode::InvalidInput, "missing 'strata'");
      spec.strata = get_uint(entry, "strata", 0);
      if (is_paired(spec.kind)) {
        spec.stratum_size = 2;
      } else {
        if (!entry.contains("stratum_size")) throw Error(ErrorCode::InvalidInput, "missing 'stratum_size'");
        spec.stratum_size = get_uint(entry, "stratum_size", 0);
      }
      spec.distribution = parse_distribution(entry);
      const std::string propensity = get_string(entry, "propensity", "equal");
      if (propensity == "equal") {
        spec.propensity = Propensity::Equal;
      } else if (propensity == "unequal") {
        spec.propensity = Propensity::Unequal;
      } else {
        throw Error(ErrorCode::InvalidInput, "propensity must be 'equal' or 'unequal'");
      }

      StudyOptions options;
      options.replications = get_uint(entry, "replications", defaults.replications);
      options.replicates = get_uint(entry, "replicates", defaults.replicates);
      options.alpha = get_real(entry, "alpha", defaults.alpha);
      if (options.replications < 100) throw Error(ErrorCode::InvalidInput, "replications must be at least 100");
      if (options.replicates != 0 && options.replicates < kMinReplicates) {
        throw Error(ErrorCode::InvalidInput, "replicates must be 0 or at least 100");
      }
      if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
        throw Error(ErrorCode::InvalidInput, "alpha must lie in (0, 1)");
      }
      const std::string name = get_string(entry, "name", "scenario-" + std::to_string(index));
      for (std::uint64_t pop_seed : population_seeds(entry, config)) {
        spec.population_seed = pop_seed;
        const auto design = spec_design(spec);  // validates the spec
        if (!is_paired(spec.kind) && design.kind() != DesignKind::SharpEligible) {
          throw Error(ErrorCode::InvalidInput,
                      "stratified scenarios need 2 <= n_m1 <= n_m - 2 in every stratum");
        }
        options.seed = derive_seed(seed, out.size());
        out.push_back({name, spec, options});
      }
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidInput, "scenario " + std::to_string(index) + ": " + e.what());
    }
  }
  return out;
}

std::string format_real(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc() ? std::string(buf, end) : std::string("NA");
}

json to_json(const AnalysisResult& r, const ObservedExperiment& obs) {
  const auto& design = obs.design();
  std::size_t treated = 0;
  json strata = json::array();
  for (std::size_t m = 0; m < design.num_strata(); ++m) {
    const auto& s = design.stratum(m);
    treated += s.treated;
    strata.push_back({{"name", obs.stratum_names()[m]},
                      {"size", s.size},
                      {"treated", s.treated},
                      {"weight", r.estimate.weights[m]},
                      {"tau_hat", r.estimate.tau_hat_stratum[m]}});
  }
  json doc = {
      {"schema", 1},
      {"command", "analyze"},
      {"method", to_string(r.method)},
      {"alpha", r.ci.alpha},
      {"seed", r.seed},
      {"design",
       {{"kind", to_string(r.design_kind)},
        {"units", obs.size()},
        {"strata", design.num_strata()},
        {"treated", treated}}},
      {"tau_hat", r.estimate.tau_hat},
      {"variance",
       {{"neyman", real_or_null(r.sigma2_neyman)},
        {"sharp", real_or_null(r.sigma2_sharp)},
        {"paired", real_or_null(r.sigma2_paired)}}},
      {"sigma2_used", r.sigma2_used},
      {"ci",
       {{"lower", r.ci.lower},
        {"upper", r.ci.upper},
        {"length", r.ci.length()},
        {"type", r.ci.method_tag}}},
  };
  if (is_bootstrap(r.method)) {
    json boot = {{"replicates", r.boot_replicates}, {"n_degenerate", r.boot_degenerate}};
    boot["q_lo"] = r.bootstrap ? json(r.bootstrap->q_lo) : json(nullptr);
    boot["q_hi"] = r.bootstrap ? json(r.bootstrap->q_hi) : json(nullptr);
    boot["tau_star"] = r.bootstrap ? json(r.bootstrap->tau_star) : json(nullptr);
    boot["imputation"] = r.method == AnalysisMethod::SharpBoot ? "rank-preserving" : "constant-effect";
    if (r.delta) boot["delta"] = *r.delta;
    doc["bootstrap"] = boot;
  } else {
    doc["bootstrap"] = nullptr;
  }
  doc["strata"] = strata;
  doc["diagnostics"] = {{"zero_scale", r.zero_scale},
                        {"negative_sharp", r.negative_sharp},
                        {"warnings", r.warnings}};
  return doc;
}

void write_plot_data(std::ostream& out, const ObservedExperiment& obs,
                     const std::optional<BootstrapResult>& boot) {
  out << "series,arm,x,y\n";
  for (int arm : {1, 0}) {
    std::vector<double> values;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      if (obs.z()[i] == arm) values.push_back(obs.y()[i]);
    }
    const char* label = arm ? "treated" : "control";
    const Ecdf ecdf(values);
    const auto sorted = ecdf.sorted_values();
    const double k = static_cast<double>(sorted.size());
    for (std::size_t j = 0; j < sorted.size(); ++j) {
      if (j + 1 < sorted.size() && sorted[j + 1] == sorted[j]) continue;
      out << "ecdf," << label << ',' << format_real(sorted[j]) << ','
          << format_real(static_cast<double>(j + 1) / k) << '\n';
    }
    for (std::size_t j = 0; j < sorted.size(); ++j) {
      const double p = (static_cast<double>(j) + 0.5) / k;
      out << "qq," << label << ',' << format_real(normal_quantile(p)) << ','
          << format_real(sorted[j]) << '\n';
    }
  }
  if (boot && !boot->t_stats.empty()) {
    std::vector<double> t = boot->t_stats;
    std::sort(t.begin(), t.end());
    const double k = static_cast<double>(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) {
      out << "bootstrap-t-qq,all," << format_real(normal_quantile((static_cast<double>(j) + 0.5) / k))
          << ',' << format_real(t[j]) << '\n';
    }
  }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed, std::ostream& err) {
  if (seed) return *seed;
  std::random_device device;
  const std::uint64_t chosen = (static_cast<std::uint64_t>(device()) << 32) | device();
  err << "seed: " << chosen << '\n';
  return chosen;
}

int cmd_analyze(const AnalyzeCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    AnalysisSettings settings;
    settings.method = parse_method(cmd.method);
    settings.alpha = cmd.alpha;
    settings.replicates = cmd.replicates;
    settings.delta = cmd.delta;
    settings.threads = cmd.threads;
    auto file = open_input(cmd.data_path);
    const auto rows = read_observations(file);
    const auto obs = ObservedExperiment::from_rows(rows);
    settings.seed = resolve_seed(cmd.seed, err);
    const auto result = analyze(obs, settings);
    for (const auto& w : result.warnings) err << "warning: " << w << '\n';
    emit(cmd.output_path, out, [&](std::ostream& o) { o << to_json(result, obs).dump(2) << '\n'; });
    if (!cmd.plot_path.empty()) {
      auto plot = open_output(cmd.plot_path);
      write_plot_data(plot, obs, result.bootstrap);
    }
    return exit_code::kOk;
  } catch (const Error& e) {
    report_error(err, e);
    if (e.code() == ErrorCode::NotSharpEligible) {
      err << "hint: rank-preserving imputation needs 2 <= n_m1 <= n_m - 2 in every stratum; for "
             "paired data use pair-normal or pair-boot\n";
    }
    return exit_code_for(e.code());
  }
}

int cmd_simulate(const SimulateCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    auto file = open_input(cmd.config_path);
    const json config = read_config(file);
    std::optional<std::uint64_t> seed = cmd.seed;
    if (!seed && config.contains("seed")) seed = get_uint(config, "seed", 0);
    const std::uint64_t root_seed = resolve_seed(seed, err);
    auto scenarios = load_scenarios(config, root_seed);

    std::ostringstream table;
    table << "scenario,case,distribution,propensity,strata,stratum_size,population_seed,method,"
             "coverage,mean_length,ratio,tau,sigma2,replications,replicates,alpha,seed\n";
    for (auto& sc : scenarios) {
      sc.options.threads = cmd.threads;
      const auto report = run_study(sc.spec, sc.options);
      for (const auto& m : report.methods) {
        table << sc.name << ',' << to_string(sc.spec.kind) << ',' << sc.spec.distribution.label() << ','
              << (sc.spec.propensity == Propensity::Equal ? "equal" : "unequal") << ','
              << sc.spec.strata << ',' << (is_paired(sc.spec.kind) ? 2 : sc.spec.stratum_size) << ','
              << sc.spec.population_seed << ',' << m.method << ',' << csv_real(m.coverage) << ','
              << csv_real(m.mean_length) << ',' << csv_real(report.ratio) << ','
              << csv_real(report.tau) << ',' << csv_real(report.sigma2) << ','
              << report.replications << ',' << report.replicates << ',' << csv_real(sc.options.alpha)
              << ',' << sc.options.seed << '\n';
      }
      if (report.negative_sharp > 0) {
        err << "warning: " << sc.name << ": " << report.negative_sharp
            << " replications had a negative sharp estimate (clipped to 0)\n";
      }
    }
    emit(cmd.output_path, out, [&](std::ostream& o) { o << table.str(); });
    return exit_code::kOk;
  } catch (const Error& e) {
    report_error(err, e);
    return exit_code_for(e.code());
  }
}

int cmd_enumerate(const EnumerateCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    if (cmd.mode != "distribution" && cmd.mode != "identities") {
      throw Error(ErrorCode::InvalidInput, "mode must be 'distribution' or 'identities'");
    }
    auto file = open_input(cmd.data_path);
    const auto data = read_population(file);
    const FinitePopulation pop(data.units);
    const auto design = design_for(pop, data.treated);
    if (cmd.mode == "distribution") {
      const auto dist = exact_distribution(pop, design);
      emit(cmd.output_path, out, [&](std::ostream& o) {
        o << "tau_hat,prob\n";
        for (const auto& p : dist) o << format_real(p.tau_hat) << ',' << format_real(p.prob) << '\n';
      });
      return exit_code::kOk;
    }
    const auto report = check_variance_identities(pop, design);
    const json doc = {{"schema", 1},
                      {"command", "enumerate"},
                      {"mode", "identities"},
                      {"status", report.passed ? "PASS" : "FAIL"},
                      {"tau", report.tau},
                      {"mean_tau_hat", report.mean_tau_hat},
                      {"exact_variance", report.exact_variance},
                      {"sigma2", report.sigma2},
                      {"sigma2_cov", report.sigma2_cov},
                      {"sigma2_sharp", report.sigma2_sharp},
                      {"comonotonic", report.comonotonic},
                      {"failures", report.failures}};
    emit(cmd.output_path, out, [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
    return report.passed ? exit_code::kOk : exit_code::kFailure;
  } catch (const Error& e) {
    report_error(err, e);
    return exit_code_for(e.code());
  }
}

}  // namespace strataboot
