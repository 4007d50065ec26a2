#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "speckle/errors.hpp"
#include "speckle/sweep.hpp"

namespace speckle {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct RawValue {
  std::string text;
  int line = 0;
  bool is_list = false;
  std::vector<std::string> items;
};

double parse_double(const RawValue& v, const std::string& key, const std::string& item) {
  try {
    std::size_t pos = 0;
    double d = std::stod(item, &pos);
    if (pos != item.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(v.line) + ": key '" + key +
                     "': cannot parse number '" + item + "'");
  }
}

long long parse_int(const RawValue& v, const std::string& key, const std::string& item) {
  try {
    std::size_t pos = 0;
    long long n = std::stoll(item, &pos);
    if (pos != item.size()) throw std::invalid_argument("trailing characters");
    return n;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(v.line) + ": key '" + key +
                     "': cannot parse integer '" + item + "'");
  }
}

bool parse_bool(const RawValue& v, const std::string& key) {
  std::string t = v.text;
  std::transform(t.begin(), t.end(), t.begin(), ::tolower);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ParseError("line " + std::to_string(v.line) + ": key '" + key +
                   "': cannot parse boolean '" + v.text + "'");
}

std::vector<std::string> list_items(const RawValue& v, const std::string& key) {
  if (v.is_list) return v.items;
  if (v.text.empty()) {
    throw ParseError("line " + std::to_string(v.line) + ": key '" + key + "': empty value");
  }
  return {v.text};
}

}  // namespace

double predicted_rate(int m, int n, int L, double sigma_z, int k) {
  double s4 = sigma_z * sigma_z * sigma_z * sigma_z;
  double top = std::max({s4, static_cast<double>(m) * m, static_cast<double>(n) * n});
  return top * k * std::log(static_cast<double>(n)) /
         (static_cast<double>(m) * m * static_cast<double>(n) * L);
}

SweepConfig parse_config_text(const std::string& text) {
  SweepConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  auto int_list = [](const RawValue& v, const std::string& key,
                     std::vector<int>& out) {
    out.clear();
    for (const auto& item : list_items(v, key)) {
      out.push_back(static_cast<int>(parse_int(v, key, item)));
    }
  };
  auto double_list = [](const RawValue& v, const std::string& key,
                        std::vector<double>& out) {
    out.clear();
    for (const auto& item : list_items(v, key)) out.push_back(parse_double(v, key, item));
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    RawValue value;
    value.line = line_no;
    value.text = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("line " + std::to_string(line_no) + ": missing key");
    if (!value.text.empty() && value.text.front() == '[') {
      if (value.text.back() != ']') {
        throw ParseError("line " + std::to_string(line_no) + ": key '" + key +
                         "': unterminated list");
      }
      value.is_list = true;
      std::string inner = value.text.substr(1, value.text.size() - 2);
      std::istringstream items(inner);
      std::string item;
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (!item.empty()) value.items.push_back(item);
      }
      if (value.items.empty()) {
        throw ParseError("line " + std::to_string(line_no) + ": key '" + key +
                         "': empty list");
      }
    }

    if (key == "n") int_list(value, key, config.n);
    else if (key == "m") int_list(value, key, config.m);
    else if (key == "L") int_list(value, key, config.L);
    else if (key == "k") int_list(value, key, config.k);
    else if (key == "sigma_z") double_list(value, key, config.sigma_z);
    else if (key == "x_min") config.x_min = parse_double(value, key, value.text);
    else if (key == "x_max") config.x_max = parse_double(value, key, value.text);
    else if (key == "trials") config.trials = static_cast<int>(parse_int(value, key, value.text));
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(parse_int(value, key, value.text));
    else if (key == "estimator") config.estimator = value.text;
    else if (key == "shared_operators") config.shared_operators = parse_bool(value, key);
    else if (key == "workers") config.workers = static_cast<int>(parse_int(value, key, value.text));
    else if (key == "timing") config.timing = parse_bool(value, key);
    else if (key == "output") config.output = value.text;
    else if (key == "trial_log") config.trial_log = value.text;
    else if (key == "fixed_signal") double_list(value, key, config.fixed_signal);
    else if (key == "net_levels") config.net_levels = static_cast<int>(parse_int(value, key, value.text));
    else if (key == "max_iters") config.optimizer.max_iters = static_cast<int>(parse_int(value, key, value.text));
    else if (key == "step_init") config.optimizer.step_init = parse_double(value, key, value.text);
    else if (key == "step_shrink") config.optimizer.step_shrink = parse_double(value, key, value.text);
    else if (key == "tol_grad") config.optimizer.tol_grad = parse_double(value, key, value.text);
    else if (key == "restarts") config.optimizer.restarts = static_cast<int>(parse_int(value, key, value.text));
    else if (key == "project_every") config.optimizer.project_every = static_cast<int>(parse_int(value, key, value.text));
    else {
      throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }

  validate_config(config);
  return config;
}

SweepConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void validate_config(SweepConfig& config) {
  std::vector<std::string> violations;
  config.warnings.clear();

  auto check_positive = [&](const std::vector<int>& grid, const std::string& name) {
    if (grid.empty()) violations.push_back(name + " grid is empty");
    for (int v : grid) {
      if (v < 1) violations.push_back(name + " must be >= 1 (got " + std::to_string(v) + ")");
    }
  };
  check_positive(config.n, "n");
  check_positive(config.m, "m");
  check_positive(config.L, "L");
  check_positive(config.k, "k");
  if (config.sigma_z.empty()) violations.push_back("sigma_z grid is empty");
  for (double s : config.sigma_z) {
    if (s < 0.0) violations.push_back("sigma_z must be >= 0");
  }
  if (!(config.x_min > 0.0) || !(config.x_min < config.x_max)) {
    violations.push_back("requires 0 < x_min < x_max");
  }
  if (config.trials < 1) violations.push_back("trials must be >= 1");
  if (config.workers < 1) violations.push_back("workers must be >= 1");

  for (int k : config.k) {
    for (int n : config.n) {
      if (k > n) {
        violations.push_back("k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
      }
    }
  }

  const bool known_estimator =
      config.estimator == "mle_ascent" || config.estimator == "net_search" ||
      config.estimator == "sufficient_statistic" || config.estimator == "truth";
  if (!known_estimator) {
    violations.push_back("unknown estimator '" + config.estimator + "'");
  }
  if (config.estimator == "sufficient_statistic") {
    for (int m : config.m) {
      for (int n : config.n) {
        if (m < n) {
          violations.push_back("sufficient_statistic requires m >= n (got m = " +
                               std::to_string(m) + ", n = " + std::to_string(n) + ")");
        }
      }
    }
    for (double s : config.sigma_z) {
      if (s > 0.0) {
        config.warnings.push_back("sufficient_statistic is intended for sigma_z = 0; "
                                  "results with sigma_z > 0 are biased");
        break;
      }
    }
  }

  if (!config.fixed_signal.empty()) {
    for (int n : config.n) {
      if (static_cast<int>(config.fixed_signal.size()) != n) {
        violations.push_back("fixed_signal length must equal n");
      }
    }
    for (double v : config.fixed_signal) {
      if (v < config.x_min || v > config.x_max) {
        violations.push_back("fixed_signal values must lie in [x_min, x_max]");
        break;
      }
    }
    int pieces = count_pieces(config.fixed_signal);
    for (int k : config.k) {
      if (pieces > k) {
        violations.push_back("fixed_signal has " + std::to_string(pieces) +
                             " pieces, exceeding k = " + std::to_string(k));
      }
    }
  }

  const OptimizerConfig& opt = config.optimizer;
  if (opt.max_iters < 1) violations.push_back("max_iters must be >= 1");
  if (!(opt.step_init > 0.0)) violations.push_back("step_init must be > 0");
  if (!(opt.step_shrink > 0.0 && opt.step_shrink < 1.0)) {
    violations.push_back("step_shrink must lie in (0, 1)");
  }
  if (!(opt.tol_grad > 0.0)) violations.push_back("tol_grad must be > 0");
  if (opt.restarts < 1) violations.push_back("restarts must be >= 1");
  if (opt.project_every < 1) violations.push_back("project_every must be >= 1");
  if (config.net_levels < 1) violations.push_back("net_levels must be >= 1");

  if (!violations.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw ValidationError(msg);
  }

  // regime warnings; exploring outside the theory's regime stays allowed
  if (config.trials < 30) {
    config.warnings.push_back("trials < 30: normal-approximation CIs are unreliable");
  }
  long looks_violations = 0;
  long saturated_cells = 0;
  long cells = 0;
  for (int m : config.m) {
    for (int n : config.n) {
      for (int L : config.L) {
        for (double s : config.sigma_z) {
          for (int k : config.k) {
            ++cells;
            double cap = std::pow(static_cast<double>(n), 4) * k *
                         std::log(static_cast<double>(n));
            if (static_cast<double>(L) > cap) ++looks_violations;
            if (predicted_rate(m, n, L, s, k) > 1.0) ++saturated_cells;
          }
        }
      }
    }
  }
  if (looks_violations > 0) {
    config.warnings.push_back(std::to_string(looks_violations) + " of " +
                              std::to_string(cells) +
                              " cells violate the regime condition L <= n^4 k log n");
  }
  if (saturated_cells > 0) {
    config.warnings.push_back(std::to_string(saturated_cells) + " of " + std::to_string(cells) +
                              " cells have predicted rate > 1 (outside the nontrivial regime)");
  }
}

}  // namespace speckle
