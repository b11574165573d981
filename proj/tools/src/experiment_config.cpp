#include "experiment_config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "ftct/errors.hpp"

namespace ftct::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("bad value for '" + key + "': '" + text + "'");
  }
  return value;
}

int parse_int(const std::string& key, const std::string& text) {
  return parse_number<int>(key, text);
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  return parse_number<std::size_t>(key, text);
}

double parse_real(const std::string& key, const std::string& text) {
  return parse_number<double>(key, text);
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "on") return true;
  if (text == "false" || text == "0" || text == "off") return false;
  throw ParseError("bad value for '" + key + "': '" + text + "'");
}

template <typename Fn>
auto named(const std::string& key, const std::string& text, Fn&& fn) {
  try {
    return fn(text);
  } catch (const std::invalid_argument& e) {
    throw ParseError("bad value for '" + key + "': " + e.what());
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::optional<int> n, tau;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) {
      throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    if (value.empty() && key != "checkpoint_dir") {
      throw ParseError("line " + std::to_string(line_no) + ": empty value for '" + key + "'");
    }
    SimConfig& s = c.sim;
    if (key == "d") {
      s.d = parse_count(key, value);
    } else if (key == "n") {
      n = parse_int(key, value);
    } else if (key == "tau") {
      tau = parse_int(key, value);
    } else if (key == "cases") {
      for (const auto& item : split(value, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
          throw ParseError("cases entries look like n:tau, got '" + item + "'");
        }
        c.cases.push_back({parse_int(key, trim(item.substr(0, colon))),
                           parse_int(key, trim(item.substr(colon + 1)))});
      }
    } else if (key == "layers") {
      s.layers = value == "auto" ? 0 : parse_int(key, value);
    } else if (key == "policy") {
      s.policy = named(key, value, parse_policy);
    } else if (key == "strategy") {
      s.strategy = named(key, value, parse_strategy);
    } else if (key == "strategies") {
      c.strategies.clear();
      for (const auto& item : split(value, ',')) {
        c.strategies.push_back(named(key, item, parse_strategy));
      }
    } else if (key == "nodes") {
      s.node_count = parse_count(key, value);
    } else if (key == "lambda") {
      if (value == "none") {
        c.lambda.reset();
      } else {
        c.lambda = parse_real(key, value);
      }
    } else if (key == "lambdas") {
      for (const auto& item : split(value, ',')) c.lambdas.push_back(parse_real(key, item));
    } else if (key == "kappa") {
      c.kappa = parse_real(key, value);
    } else if (key == "t_s") {
      s.t_s = parse_real(key, value);
    } else if (key == "combination_steps") {
      s.combination_steps = parse_int(key, value);
    } else if (key == "cfl") {
      s.cfl = parse_real(key, value);
    } else if (key == "seed") {
      s.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "cost_model") {
      s.cost_model = named(key, value, parse_cost_model);
    } else if (key == "task_seconds") {
      s.task_seconds = parse_real(key, value);
    } else if (key == "repair_time") {
      s.repair_time = parse_real(key, value);
    } else if (key == "probe_level") {
      s.probe_level = parse_int(key, value);
    } else if (key == "solve") {
      c.solve = parse_bool(key, value);
    } else if (key == "checkpoint_dir") {
      s.checkpoint_dir = value;
    } else if (key == "max_attempts") {
      s.max_attempts = parse_int(key, value);
    } else if (key == "runs") {
      c.runs = parse_count(key, value);
    } else if (key == "out") {
      c.out = value;
    } else {
      throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if ((n || tau) && !c.cases.empty()) {
    throw ParseError("use either n/tau or cases, not both");
  }
  if (n || tau) c.cases.push_back({n.value_or(c.sim.n), tau.value_or(c.sim.tau)});
  if (c.strategies.empty()) throw ParseError("strategies must not be empty");
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path + "'");
  return parse_config(in);
}

std::vector<Case> resolved_cases(const ExperimentConfig& config) {
  if (!config.cases.empty()) return config.cases;
  return {{config.sim.n, config.sim.tau}};
}

SimConfig case_config(const ExperimentConfig& config, const Case& c,
                      bool solve_default) {
  SimConfig s = config.sim;
  s.n = c.n;
  s.tau = c.tau;
  s.solve = config.solve.value_or(solve_default);
  if (config.lambda) s.faults = WeibullFaults(*config.lambda, config.kappa);
  return s;
}

std::vector<std::string> header_lines(const ExperimentConfig& config,
                                      bool compare, bool solve_default) {
  const SimConfig& s = config.sim;
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("d", std::to_string(s.d));
  std::string cases;
  for (const auto& c : resolved_cases(config)) {
    if (!cases.empty()) cases += ", ";
    cases += std::to_string(c.n) + ":" + std::to_string(c.tau);
  }
  kv.emplace_back("cases", cases);
  kv.emplace_back("layers", s.layers == 0 ? "auto" : std::to_string(s.layers));
  kv.emplace_back("policy", to_string(s.policy));
  if (compare) {
    std::string list;
    for (auto st : config.strategies) {
      if (!list.empty()) list += ", ";
      list += to_string(st);
    }
    kv.emplace_back("strategies", list);
    std::string lambdas;
    for (double l : config.lambdas) {
      if (!lambdas.empty()) lambdas += ", ";
      lambdas += format_double(l);
    }
    kv.emplace_back("lambdas", lambdas);
  } else {
    kv.emplace_back("strategy", to_string(s.strategy));
    kv.emplace_back("lambda", config.lambda ? format_double(*config.lambda) : "none");
  }
  kv.emplace_back("kappa", format_double(config.kappa));
  kv.emplace_back("nodes", std::to_string(s.node_count));
  kv.emplace_back("t_s", format_double(s.t_s));
  kv.emplace_back("combination_steps", std::to_string(s.combination_steps));
  kv.emplace_back("cfl", format_double(s.cfl));
  kv.emplace_back("seed", std::to_string(s.seed));
  kv.emplace_back("cost_model", to_string(s.cost_model));
  kv.emplace_back("task_seconds", format_double(s.task_seconds));
  kv.emplace_back("repair_time", format_double(s.repair_time));
  kv.emplace_back("probe_level", std::to_string(s.probe_level));
  kv.emplace_back("solve", config.solve.value_or(solve_default) ? "true" : "false");
  kv.emplace_back("max_attempts", std::to_string(s.max_attempts));
  kv.emplace_back("runs", std::to_string(config.runs));
  if (!s.checkpoint_dir.empty()) kv.emplace_back("checkpoint_dir", s.checkpoint_dir);

  std::vector<std::string> lines;
  for (const auto& [k, v] : kv) lines.push_back("# " + k + " = " + v);
  return lines;
}

}  // namespace ftct::cli
