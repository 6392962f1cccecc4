#include "clmslab/config.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace clmslab {

namespace {

struct RawValue {
  int line = 0;
  bool is_array = false;
  std::vector<std::string> tokens;
  bool used = false;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split_array(const std::string& body, int line) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(body);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(line, "empty array element");
    out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& tok, int line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    fail(line, "expected a number, got '" + tok + "'");
  }
  if (pos != tok.size()) fail(line, "trailing characters in number '" + tok + "'");
  return v;
}

Cplx parse_complex(const std::string& tok, int line) {
  if (tok.empty()) fail(line, "empty complex literal");
  if (tok.back() != 'j') return {parse_double(tok, line), 0.0};
  const std::string body = tok.substr(0, tok.size() - 1);
  // Split at the last +/- that starts the imaginary part (not a leading sign
  // and not part of an exponent).
  for (std::size_t i = body.size(); i-- > 1;) {
    const char c = body[i];
    if ((c == '+' || c == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      const double re = parse_double(body.substr(0, i), line);
      std::string im_str = body.substr(i);
      if (im_str == "+" || im_str == "-") im_str += "1";
      return {re, parse_double(im_str, line)};
    }
  }
  return {0.0, body.empty() ? 1.0 : parse_double(body, line)};
}

class KeyTable {
 public:
  explicit KeyTable(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) fail(lineno, "missing key before '='");
      if (value.empty()) fail(lineno, "missing value for key '" + key + "'");
      if (values_.count(key)) fail(lineno, "duplicate key '" + key + "'");
      RawValue rv;
      rv.line = lineno;
      if (value.front() == '[') {
        if (value.back() != ']') fail(lineno, "unterminated array for '" + key + "'");
        rv.is_array = true;
        const std::string body = trim(value.substr(1, value.size() - 2));
        if (!body.empty()) rv.tokens = split_array(body, lineno);
      } else {
        rv.tokens.push_back(value);
      }
      values_.emplace(key, rv);
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  const RawValue& require(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end())
      throw ConfigError("config: missing required key '" + key + "'");
    it->second.used = true;
    return it->second;
  }

  const RawValue* optional(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  void check_all_used() const {
    for (const auto& [key, rv] : values_)
      if (!rv.used) fail(rv.line, "unknown key '" + key + "'");
  }

  std::vector<std::string> missing(const std::vector<std::string>& keys) const {
    std::vector<std::string> m;
    for (const auto& k : keys)
      if (!values_.count(k)) m.push_back(k);
    return m;
  }

 private:
  std::map<std::string, RawValue> values_;
};

double get_double(const RawValue& rv) {
  if (rv.is_array || rv.tokens.size() != 1) fail(rv.line, "expected a scalar");
  return parse_double(rv.tokens[0], rv.line);
}

long get_long(const RawValue& rv) {
  const double v = get_double(rv);
  const long n = static_cast<long>(v);
  if (static_cast<double>(n) != v) fail(rv.line, "expected an integer");
  return n;
}

std::uint64_t get_u64(const RawValue& rv) {
  if (rv.is_array || rv.tokens.size() != 1) fail(rv.line, "expected a scalar");
  try {
    return std::stoull(rv.tokens[0]);
  } catch (const std::exception&) {
    fail(rv.line, "expected an unsigned integer");
  }
}

bool get_bool(const RawValue& rv) {
  if (rv.is_array || rv.tokens.size() != 1) fail(rv.line, "expected a boolean");
  const std::string& t = rv.tokens[0];
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  fail(rv.line, "expected true/false");
}

std::string get_string(const RawValue& rv) {
  if (rv.is_array || rv.tokens.size() != 1) fail(rv.line, "expected a string");
  return rv.tokens[0];
}

std::vector<double> get_double_array(const RawValue& rv) {
  std::vector<double> out;
  for (const auto& t : rv.tokens) out.push_back(parse_double(t, rv.line));
  return out;
}

/// Scalars broadcast to one entry per node.
std::vector<double> get_per_node(const RawValue& rv, int n) {
  std::vector<double> v =
      rv.is_array ? get_double_array(rv) : std::vector<double>{get_double(rv)};
  if (v.size() == 1) v.assign(static_cast<std::size_t>(n), v[0]);
  if (static_cast<int>(v.size()) != n)
    fail(rv.line, "expected 1 or num_nodes values");
  return v;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

const std::vector<std::string> kRequired = {
    "num_nodes", "dim",        "true_weights",   "mode",
    "tx_power",  "path_loss_exp", "nominal_range", "meas_noise_var",
    "link_noise_var", "fading_var", "regressor_corr", "step_size",
    "iterations", "trials",    "window",         "seed"};

}  // namespace

ParsedConfig parse_config(const std::string& text) {
  KeyTable table(text);
  if (auto m = table.missing(kRequired); !m.empty()) {
    std::string msg = "config: missing required keys:";
    for (const auto& k : m) msg += " " + k;
    throw ConfigError(msg);
  }

  ParsedConfig c;
  NetworkScenario& s = c.scenario;

  {
    const RawValue& rv = table.require("num_nodes");
    s.num_nodes = static_cast<int>(get_long(rv));
    if (s.num_nodes < 1) fail(rv.line, "num_nodes must be >= 1");
  }
  {
    const RawValue& rv = table.require("dim");
    s.dim = static_cast<int>(get_long(rv));
    if (s.dim < 1) fail(rv.line, "dim must be >= 1");
  }
  {
    const RawValue& rv = table.require("true_weights");
    if (!rv.is_array) fail(rv.line, "true_weights must be an array");
    s.true_weights.resize(static_cast<Eigen::Index>(rv.tokens.size()));
    for (std::size_t j = 0; j < rv.tokens.size(); ++j)
      s.true_weights(static_cast<Eigen::Index>(j)) =
          parse_complex(rv.tokens[j], rv.line);
    if (s.true_weights.size() != s.dim)
      fail(rv.line, "true_weights must have dim entries");
  }
  {
    const RawValue& rv = table.require("mode");
    const std::string m = get_string(rv);
    if (m == "analog")
      s.mode = LinkMode::Analog;
    else if (m == "digital")
      s.mode = LinkMode::Digital;
    else
      fail(rv.line, "mode must be analog or digital");
  }
  {
    const RawValue& rv = table.require("tx_power");
    s.tx_power = get_double(rv);
    if (!(s.tx_power > 0.0)) fail(rv.line, "tx_power must be > 0");
  }
  {
    const RawValue& rv = table.require("path_loss_exp");
    s.path_loss_exp = get_double(rv);
    if (!(s.path_loss_exp > 0.0)) fail(rv.line, "path_loss_exp must be > 0");
  }
  s.nominal_range = get_per_node(table.require("nominal_range"), s.num_nodes);
  s.meas_noise_var = get_per_node(table.require("meas_noise_var"), s.num_nodes);
  s.link_noise_var = get_per_node(table.require("link_noise_var"), s.num_nodes);
  s.fading_var = get_per_node(table.require("fading_var"), s.num_nodes);
  s.regressor_corr = get_per_node(table.require("regressor_corr"), s.num_nodes);

  s.fusion_position.x = table.optional("fusion_x") ? get_double(*table.optional("fusion_x")) : 0.5;
  s.fusion_position.y = table.optional("fusion_y") ? get_double(*table.optional("fusion_y")) : 0.5;
  if (const RawValue* rv = table.optional("chan_est_err_var"))
    s.chan_est_err_var = get_double(*rv);
  if (const RawValue* rv = table.optional("fading_corr"))
    s.fading_corr = get_double(*rv);

  if (const RawValue* rv = table.optional("area_size")) c.area_size = get_double(*rv);
  if (const RawValue* rv = table.optional("placement_seed"))
    c.placement_seed = get_u64(*rv);

  const RawValue* nx = table.optional("node_x");
  const RawValue* ny = table.optional("node_y");
  if ((nx == nullptr) != (ny == nullptr))
    throw ConfigError("config: node_x and node_y must be given together");
  if (nx) {
    c.explicit_positions = true;
    const auto xs = get_per_node(*nx, s.num_nodes);
    const auto ys = get_per_node(*ny, s.num_nodes);
    for (int k = 0; k < s.num_nodes; ++k)
      s.node_positions.push_back({xs[static_cast<std::size_t>(k)],
                                  ys[static_cast<std::size_t>(k)]});
  } else {
    // Fixed seeded placement; redrawn until no node sits on the fusion center.
    Rng rng = Rng::substream(c.placement_seed, 0);
    do {
      s.node_positions = place_nodes_uniform(c.area_size, c.area_size,
                                             s.num_nodes, rng);
    } while ([&] {
      for (int k = 0; k < s.num_nodes; ++k)
        if (!(s.distance(k) > 0.0)) return true;
      return false;
    }());
  }

  c.step_size = get_double(table.require("step_size"));
  c.bc_step_size = c.step_size;
  c.baseline_step_size = c.step_size;
  if (const RawValue* rv = table.optional("bc_step_size"))
    c.bc_step_size = get_double(*rv);
  if (const RawValue* rv = table.optional("baseline_step_size"))
    c.baseline_step_size = get_double(*rv);

  ExperimentSpec& e = c.experiment;
  e.iterations = static_cast<int>(get_long(table.require("iterations")));
  e.trials = static_cast<int>(get_long(table.require("trials")));
  e.window = static_cast<int>(get_long(table.require("window")));
  e.seed = get_u64(table.require("seed"));
  e.area = c.area_size;
  if (const RawValue* rv = table.optional("placement_per_trial"))
    e.placement_per_trial = get_bool(*rv);

  std::vector<std::string> algo_names = {"clms", "bc_clms"};
  if (const RawValue* rv = table.optional("algorithms")) {
    if (!rv->is_array) fail(rv->line, "algorithms must be an array");
    algo_names = rv->tokens;
  }
  for (const auto& name : algo_names) {
    AlgorithmConfig a;
    a.label = name;
    if (name == "clms") {
      a.algo = Algorithm::Clms;
      a.step = c.step_size;
    } else if (name == "bc_clms") {
      a.algo = Algorithm::BcClms;
      a.step = c.bc_step_size;
    } else if (name == "baseline") {
      a.algo = Algorithm::Baseline;
      a.step = c.baseline_step_size;
    } else {
      throw ConfigError("config: unknown algorithm '" + name + "'");
    }
    e.algorithms.push_back(std::move(a));
  }

  if (const RawValue* rv = table.optional("bias_rel_tol"))
    c.tolerances.bias_rel = get_double(*rv);
  if (const RawValue* rv = table.optional("bias_abs_tol"))
    c.tolerances.bias_abs = get_double(*rv);
  if (const RawValue* rv = table.optional("msd_tol_db"))
    c.tolerances.msd_db = get_double(*rv);
  if (const RawValue* rv = table.optional("success_se_mult"))
    c.tolerances.success_se = get_double(*rv);

  if (const RawValue* rv = table.optional("sweep_param")) {
    c.sweep_param = get_string(*rv);
    if (c.sweep_param != "step_size" && c.sweep_param != "chan_est_err_var" &&
        c.sweep_param != "fading_corr")
      fail(rv->line, "sweep_param must be step_size, chan_est_err_var or fading_corr");
  }
  if (const RawValue* rv = table.optional("sweep_values"))
    c.sweep_values = get_double_array(*rv);

  table.check_all_used();

  try {
    s.validate();
    e.scenario = s;
    e.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  }
  return c;
}

std::string format_complex(Cplx z) {
  if (std::imag(z) == 0.0) return format_double(std::real(z));
  std::string out = format_double(std::real(z));
  if (std::imag(z) >= 0.0) out += "+";
  return out + format_double(std::imag(z)) + "j";
}

std::string serialize_config(const ParsedConfig& c) {
  const NetworkScenario& s = c.scenario;
  const ExperimentSpec& e = c.experiment;
  std::ostringstream os;
  auto arr = [](const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i)
      out += (i ? ", " : "") + format_double(v[i]);
    return out + "]";
  };
  os << "num_nodes = " << s.num_nodes << "\n";
  os << "dim = " << s.dim << "\n";
  os << "true_weights = [";
  for (Eigen::Index j = 0; j < s.true_weights.size(); ++j)
    os << (j ? ", " : "") << format_complex(s.true_weights(j));
  os << "]\n";
  os << "mode = " << (s.mode == LinkMode::Analog ? "analog" : "digital") << "\n";
  os << "tx_power = " << format_double(s.tx_power) << "\n";
  os << "path_loss_exp = " << format_double(s.path_loss_exp) << "\n";
  os << "nominal_range = " << arr(s.nominal_range) << "\n";
  os << "meas_noise_var = " << arr(s.meas_noise_var) << "\n";
  os << "link_noise_var = " << arr(s.link_noise_var) << "\n";
  os << "fading_var = " << arr(s.fading_var) << "\n";
  os << "regressor_corr = " << arr(s.regressor_corr) << "\n";
  os << "fusion_x = " << format_double(s.fusion_position.x) << "\n";
  os << "fusion_y = " << format_double(s.fusion_position.y) << "\n";
  std::vector<double> xs, ys;
  for (const auto& p : s.node_positions) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  os << "node_x = " << arr(xs) << "\n";
  os << "node_y = " << arr(ys) << "\n";
  os << "area_size = " << format_double(c.area_size) << "\n";
  os << "placement_seed = " << c.placement_seed << "\n";
  os << "chan_est_err_var = " << format_double(s.chan_est_err_var) << "\n";
  os << "fading_corr = " << format_double(s.fading_corr) << "\n";
  os << "step_size = " << format_double(c.step_size) << "\n";
  os << "bc_step_size = " << format_double(c.bc_step_size) << "\n";
  os << "baseline_step_size = " << format_double(c.baseline_step_size) << "\n";
  os << "iterations = " << e.iterations << "\n";
  os << "trials = " << e.trials << "\n";
  os << "window = " << e.window << "\n";
  os << "seed = " << e.seed << "\n";
  os << "placement_per_trial = " << (e.placement_per_trial ? "true" : "false")
     << "\n";
  os << "algorithms = [";
  for (std::size_t i = 0; i < e.algorithms.size(); ++i)
    os << (i ? ", " : "") << e.algorithms[i].label;
  os << "]\n";
  os << "bias_rel_tol = " << format_double(c.tolerances.bias_rel) << "\n";
  os << "bias_abs_tol = " << format_double(c.tolerances.bias_abs) << "\n";
  os << "msd_tol_db = " << format_double(c.tolerances.msd_db) << "\n";
  os << "success_se_mult = " << format_double(c.tolerances.success_se) << "\n";
  if (!c.sweep_param.empty()) os << "sweep_param = " << c.sweep_param << "\n";
  if (!c.sweep_values.empty()) os << "sweep_values = " << arr(c.sweep_values) << "\n";
  return os.str();
}

std::string version_string() { return "clmslab 0.1.0"; }

std::uint64_t config_hash(const ParsedConfig& config) {
  const std::string text = serialize_config(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace clmslab
