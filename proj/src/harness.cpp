#include "adacubic/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "adacubic/curvature.hpp"
#include "adacubic/errors.hpp"

namespace adacubic {
namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
    s = s.substr(1, s.size() - 2);
  }
  return std::string(s);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  s = trim(s);
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    out.push_back(unquote(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Vector parse_vector(std::string_view text, std::string_view key) {
  const auto items = split_list(text);
  if (items.empty()) throw ConfigError("empty list for key '" + std::string(key) + "'");
  Vector v(static_cast<Eigen::Index>(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_double(items[i], key);
  return v;
}

bool is_none(std::string_view v) {
  v = trim(v);
  return v == "none" || v == "full" || v.empty();
}

[[noreturn]] void unknown_key(std::string_view section, std::string_view key) {
  throw ConfigError("unknown key '" + std::string(key) + "' in [" + std::string(section) + "]");
}

std::string csv_optional(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : ""; }

}  // namespace

std::vector<ConfigSection> parse_config_text(std::string_view text) {
  std::vector<ConfigSection> sections;
  sections.push_back({"", "", {}, 0});
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
      const auto head = trim(line.substr(1, line.size() - 2));
      if (head.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
      ConfigSection sec;
      const auto dot = head.find('.');
      sec.name = std::string(trim(head.substr(0, dot)));
      if (dot != std::string_view::npos) sec.label = unquote(head.substr(dot + 1));
      sec.line = line_no;
      sections.push_back(std::move(sec));
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": missing key");
    sections.back().entries.emplace_back(std::string(key), unquote(line.substr(eq + 1)));
  }
  if (sections.front().entries.empty()) sections.erase(sections.begin());
  return sections;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view text, std::string_view key) {
  text = trim(text);
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("invalid number '" + std::string(text) + "' for key '" + std::string(key) + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view text, std::string_view key) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("invalid integer '" + std::string(text) + "' for key '" + std::string(key) + "'");
  }
  return v;
}

bool set_adacubic_field(AdaCubicConfig& cfg, std::string_view key, std::string_view value) {
  const auto as_int = [&] {
    const auto v = parse_uint(value, key);
    if (v > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
      throw ConfigError("value out of range for key '" + std::string(key) + "'");
    }
    return static_cast<int>(v);
  };
  if (key == "eta1") cfg.eta1 = parse_double(value, key);
  else if (key == "eta2") cfg.eta2 = parse_double(value, key);
  else if (key == "alpha1") cfg.alpha1 = parse_double(value, key);
  else if (key == "alpha2") cfg.alpha2 = parse_double(value, key);
  else if (key == "kappa_easy") cfg.kappa_easy = parse_double(value, key);
  else if (key == "eps_m") cfg.eps_m = parse_double(value, key);
  else if (key == "hutchinson_samples") cfg.hutchinson_samples = as_int();
  else if (key == "max_newton_iters") cfg.max_newton_iters = as_int();
  else if (key == "kkt_tol") cfg.kkt_tol = parse_double(value, key);
  else if (key == "rng_seed") cfg.rng_seed = parse_uint(value, key);
  else if (key == "xi_init") cfg.xi_init = parse_double(value, key);
  else return false;
  return true;
}

std::string format_adacubic_config(const AdaCubicConfig& cfg) {
  std::ostringstream out;
  out << "eta1 = " << format_double(cfg.eta1) << '\n'
      << "eta2 = " << format_double(cfg.eta2) << '\n'
      << "alpha1 = " << format_double(cfg.alpha1) << '\n'
      << "alpha2 = " << format_double(cfg.alpha2) << '\n'
      << "kappa_easy = " << format_double(cfg.kappa_easy) << '\n'
      << "eps_m = " << format_double(cfg.eps_m) << '\n'
      << "hutchinson_samples = " << cfg.hutchinson_samples << '\n'
      << "max_newton_iters = " << cfg.max_newton_iters << '\n'
      << "kkt_tol = " << format_double(cfg.kkt_tol) << '\n'
      << "rng_seed = " << cfg.rng_seed << '\n'
      << "xi_init = " << format_double(cfg.xi_init) << '\n';
  return out.str();
}

AdaCubicConfig parse_adacubic_config(std::string_view text) {
  AdaCubicConfig cfg;
  const auto sections = parse_config_text(text);
  if (sections.size() > 1) throw ConfigError("adacubic config: expected a single section");
  if (!sections.empty()) {
    const auto& sec = sections.front();
    if (!sec.name.empty() && sec.name != "adacubic") {
      throw ConfigError("adacubic config: unexpected section [" + sec.name + "]");
    }
    for (const auto& [k, v] : sec.entries) {
      if (!set_adacubic_field(cfg, k, v)) unknown_key("adacubic", k);
    }
  }
  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() const {
  if (problems.empty()) throw ConfigError("config defines no [problem.*] section");
  if (optimizers.empty()) throw ConfigError("config defines no [optimizer.*] section");
  if (seeds.empty()) throw ConfigError("key 'seeds' must list at least one seed");
  if (max_iters == 0) throw ConfigError("key 'max_iters' must be positive");
  if (batch_size && *batch_size == 0) throw ConfigError("key 'batch_size' must be positive");
  std::set<std::string> names;
  for (const auto& p : problems) {
    if (!names.insert(p.label).second) throw ConfigError("duplicate problem '" + p.label + "'");
  }
  names.clear();
  for (const auto& o : optimizers) {
    if (!names.insert(o.label).second) throw ConfigError("duplicate optimizer '" + o.label + "'");
    if (o.kind == OptimizerKind::AdaCubic) o.adacubic.validate();
  }
  std::set<std::uint64_t> uniq(seeds.begin(), seeds.end());
  if (uniq.size() != seeds.size()) throw ConfigError("key 'seeds' lists a seed twice");
}

namespace {

const std::set<std::string, std::less<>>& problem_keys(std::string_view type) {
  static const std::map<std::string, std::set<std::string, std::less<>>, std::less<>> keys{
      {"quadratic", {"diag", "g0", "x0", "loss_threshold"}},
      {"rosenbrock", {"dim", "x0", "loss_threshold"}},
      {"saddle", {"x0", "loss_threshold"}},
      {"logistic", {"data", "n", "d", "noise", "data_seed", "l2", "x0", "loss_threshold"}},
  };
  const auto it = keys.find(type);
  if (it == keys.end()) throw ConfigError("unknown problem type '" + std::string(type) + "' for key 'type'");
  return it->second;
}

OptimizerSpec parse_optimizer(const ConfigSection& sec) {
  OptimizerSpec spec;
  spec.label = sec.label;
  std::string type = "adacubic";
  for (const auto& [k, v] : sec.entries) {
    if (k == "type") type = v;
  }
  if (type == "adacubic") spec.kind = OptimizerKind::AdaCubic;
  else if (type == "sgd") spec.kind = OptimizerKind::Sgd;
  else if (type == "adam") spec.kind = OptimizerKind::Adam;
  else throw ConfigError("unknown optimizer type '" + type + "' for key 'type'");

  const std::string where = "optimizer." + sec.label;
  for (const auto& [k, v] : sec.entries) {
    if (k == "type") continue;
    switch (spec.kind) {
      case OptimizerKind::AdaCubic:
        if (!set_adacubic_field(spec.adacubic, k, v)) unknown_key(where, k);
        break;
      case OptimizerKind::Sgd:
        if (k == "lr") spec.sgd.lr = parse_double(v, k);
        else if (k == "momentum") spec.sgd.momentum = parse_double(v, k);
        else unknown_key(where, k);
        break;
      case OptimizerKind::Adam:
        if (k == "lr") spec.adam.lr = parse_double(v, k);
        else if (k == "beta1") spec.adam.beta1 = parse_double(v, k);
        else if (k == "beta2") spec.adam.beta2 = parse_double(v, k);
        else if (k == "eps") spec.adam.eps = parse_double(v, k);
        else unknown_key(where, k);
        break;
    }
  }
  return spec;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text) {
  ExperimentConfig cfg;
  cfg.seeds = {0};
  for (const auto& sec : parse_config_text(text)) {
    if (sec.name == "problem" || sec.name == "optimizer") {
      if (sec.label.empty()) throw ConfigError("line " + std::to_string(sec.line) + ": [" + sec.name + "] needs a label, e.g. [" + sec.name + ".name]");
    } else if (!sec.label.empty()) {
      throw ConfigError("line " + std::to_string(sec.line) + ": unexpected label on [" + sec.name + "]");
    }

    if (sec.name == "problem") {
      ProblemSpec spec;
      spec.label = sec.label;
      for (const auto& [k, v] : sec.entries) {
        if (k == "type") spec.type = v;
        else spec.params[k] = v;
      }
      if (spec.type.empty()) throw ConfigError("[problem." + sec.label + "] is missing key 'type'");
      const auto& allowed = problem_keys(spec.type);
      for (const auto& [k, v] : spec.params) {
        if (!allowed.contains(k)) unknown_key("problem." + sec.label, k);
      }
      cfg.problems.push_back(std::move(spec));
    } else if (sec.name == "optimizer") {
      cfg.optimizers.push_back(parse_optimizer(sec));
    } else if (sec.name == "run") {
      for (const auto& [k, v] : sec.entries) {
        if (k == "seeds") {
          cfg.seeds.clear();
          for (const auto& s : split_list(v)) cfg.seeds.push_back(parse_uint(s, k));
        } else if (k == "max_iters") {
          cfg.max_iters = parse_uint(v, k);
        } else if (k == "batch_size") {
          cfg.batch_size = is_none(v) ? std::nullopt : std::optional<std::size_t>(parse_uint(v, k));
        } else if (k == "stop_grad_norm") {
          cfg.stop_grad_norm = is_none(v) ? std::nullopt : std::optional<double>(parse_double(v, k));
        } else if (k == "success_grad_norm") {
          cfg.success_grad_norm = parse_double(v, k);
        } else if (k == "loss_threshold") {
          cfg.loss_threshold = is_none(v) ? std::nullopt : std::optional<double>(parse_double(v, k));
        } else if (k == "output") {
          cfg.output = v;
        } else {
          unknown_key("run", k);
        }
      }
    } else if (sec.name == "deviation") {
      for (const auto& [k, v] : sec.entries) {
        if (k == "trials") {
          cfg.deviation.trials = parse_uint(v, k);
        } else if (k == "batch_sizes") {
          cfg.deviation.batch_sizes.clear();
          for (const auto& s : split_list(v)) cfg.deviation.batch_sizes.push_back(parse_uint(s, k));
        } else if (k == "samples") {
          cfg.deviation.samples.clear();
          for (const auto& s : split_list(v)) cfg.deviation.samples.push_back(static_cast<int>(parse_uint(s, k)));
        } else {
          unknown_key("deviation", k);
        }
      }
    } else if (sec.name.empty()) {
      throw ConfigError("key '" + sec.entries.front().first + "' appears before any section header");
    } else {
      throw ConfigError("line " + std::to_string(sec.line) + ": unknown section [" + sec.name + "]");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

void select_problems(ExperimentConfig& cfg, const std::vector<std::string>& labels) {
  std::vector<ProblemSpec> kept;
  for (const auto& l : labels) {
    const auto it = std::find_if(cfg.problems.begin(), cfg.problems.end(), [&](const auto& p) { return p.label == l; });
    if (it == cfg.problems.end()) throw ConfigError("no problem named '" + l + "' for option '--problem'");
    kept.push_back(*it);
  }
  cfg.problems = std::move(kept);
}

void select_optimizers(ExperimentConfig& cfg, const std::vector<std::string>& labels) {
  std::vector<OptimizerSpec> kept;
  for (const auto& l : labels) {
    const auto it = std::find_if(cfg.optimizers.begin(), cfg.optimizers.end(), [&](const auto& o) { return o.label == l; });
    if (it == cfg.optimizers.end()) throw ConfigError("no optimizer named '" + l + "' for option '--optimizer'");
    kept.push_back(*it);
  }
  cfg.optimizers = std::move(kept);
}

ProblemInstance build_problem(const ProblemSpec& spec, const std::string& base_dir) {
  const auto param = [&](const std::string& k) -> std::optional<std::string> {
    const auto it = spec.params.find(k);
    if (it == spec.params.end()) return std::nullopt;
    return it->second;
  };
  const auto number = [&](const std::string& k, double fallback) {
    const auto v = param(k);
    return v ? parse_double(*v, k) : fallback;
  };
  const auto count = [&](const std::string& k, std::size_t fallback) {
    const auto v = param(k);
    return v ? static_cast<std::size_t>(parse_uint(*v, k)) : fallback;
  };

  ProblemInstance inst;
  inst.label = spec.label;
  std::size_t dim = 0;
  Vector default_x0;

  if (spec.type == "quadratic") {
    const auto diag_text = param("diag");
    if (!diag_text) throw ConfigError("[problem." + spec.label + "] is missing key 'diag'");
    const Vector diag = parse_vector(*diag_text, "diag");
    const auto g0_text = param("g0");
    const Vector g0 = g0_text ? parse_vector(*g0_text, "g0") : Vector::Zero(diag.size());
    if (g0.size() != diag.size()) throw ConfigError("key 'g0' must have as many entries as 'diag'");
    inst.objective = make_quadratic(diag, g0);
    dim = static_cast<std::size_t>(diag.size());
    default_x0 = Vector::Zero(diag.size());
  } else if (spec.type == "rosenbrock") {
    dim = count("dim", 2);
    inst.objective = make_rosenbrock(dim);
    default_x0.resize(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < default_x0.size(); ++i) default_x0[i] = i % 2 == 0 ? -1.2 : 1.0;
  } else if (spec.type == "saddle") {
    dim = 2;
    inst.objective = make_saddle();
    default_x0 = Vector::Zero(2);
  } else if (spec.type == "logistic") {
    LogisticData data;
    if (const auto path = param("data")) {
      std::filesystem::path p(*path);
      if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
      data = load_logistic_csv(p.string());
    } else {
      data = make_synthetic_logistic_data(count("n", 200), count("d", 5), number("noise", 0.5),
                                          count("data_seed", 7));
    }
    inst.objective = make_logistic(data.features, data.labels, number("l2", 1e-2));
    dim = static_cast<std::size_t>(data.features.cols());
    default_x0 = Vector::Zero(data.features.cols());
  } else {
    problem_keys(spec.type);  // throws
  }

  if (const auto t = param("loss_threshold")) inst.loss_threshold = parse_double(*t, "loss_threshold");

  if (const auto x0 = param("x0")) {
    inst.x0 = parse_vector(*x0, "x0");
    if (static_cast<std::size_t>(inst.x0.size()) != dim) {
      throw ConfigError("key 'x0' has " + std::to_string(inst.x0.size()) + " entries, problem '" + spec.label +
                        "' has dimension " + std::to_string(dim));
    }
  } else {
    inst.x0 = default_x0;
  }
  return inst;
}

std::optional<std::size_t> iterations_to_threshold(const Trajectory& traj, double threshold) {
  if (traj.records.empty()) return std::nullopt;
  if (traj.records.front().loss_before <= threshold) return 0;
  for (std::size_t k = 0; k < traj.records.size(); ++k) {
    if (traj.records[k].current_loss() <= threshold) return k + 1;
  }
  return std::nullopt;
}

RunResult run_single(const ProblemInstance& problem, const OptimizerSpec& optimizer, std::uint64_t seed,
                     const ExperimentConfig& cfg) {
  RunResult res;
  res.problem = problem.label;
  res.optimizer = optimizer.label;
  res.seed = seed;

  RunOptions opts;
  opts.max_iters = cfg.max_iters;
  opts.batch_size = cfg.batch_size;
  opts.stop_grad_norm = cfg.stop_grad_norm;

  try {
    switch (optimizer.kind) {
      case OptimizerKind::AdaCubic: {
        AdaCubicConfig ac = optimizer.adacubic;
        ac.rng_seed = seed;
        res.trajectory = run(*problem.objective, problem.x0, ac, opts);
        break;
      }
      case OptimizerKind::Sgd:
        res.trajectory = run_sgd(*problem.objective, problem.x0, optimizer.sgd, opts, seed);
        break;
      case OptimizerKind::Adam:
        res.trajectory = run_adam(*problem.objective, problem.x0, optimizer.adam, opts, seed);
        break;
    }
  } catch (const RunError& e) {
    res.trajectory = e.partial();
    res.error = e.what();
  } catch (const Error& e) {
    res.trajectory.final_x = problem.x0;
    res.trajectory.seed = seed;
    res.error = e.what();
  }

  const Vector& x = res.trajectory.final_x.size() ? res.trajectory.final_x : problem.x0;
  try {
    res.final_loss = problem.objective->eval(x);
    res.final_grad_norm = problem.objective->grad(x).norm();
  } catch (const Error& e) {
    res.final_loss = std::numeric_limits<double>::quiet_NaN();
    res.final_grad_norm = std::numeric_limits<double>::quiet_NaN();
    if (res.error.empty()) res.error = e.what();
  }
  if (const auto thr = problem.loss_threshold ? problem.loss_threshold : cfg.loss_threshold) {
    res.iters_to_threshold = iterations_to_threshold(res.trajectory, *thr);
  }
  res.success = res.error.empty() && std::isfinite(res.final_grad_norm) &&
                res.final_grad_norm <= cfg.success_grad_norm;
  return res;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& base_dir) {
  cfg.validate();
  std::vector<ProblemInstance> problems;
  problems.reserve(cfg.problems.size());
  for (const auto& p : cfg.problems) problems.push_back(build_problem(p, base_dir));

  ExperimentResult result;
  for (const auto& p : problems) {
    for (const auto& o : cfg.optimizers) {
      for (const auto seed : cfg.seeds) result.runs.push_back(run_single(p, o, seed, cfg));
    }
  }
  result.summary = summarize(result.runs);
  return result;
}

std::vector<SummaryRow> summarize(const std::vector<RunResult>& runs) {
  std::vector<SummaryRow> rows;
  std::vector<std::vector<const RunResult*>> groups;
  for (const auto& r : runs) {
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const SummaryRow& s) { return s.problem == r.problem && s.optimizer == r.optimizer; });
    if (it == rows.end()) {
      rows.push_back({r.problem, r.optimizer, 0, 0.0, 0.0, 0.0, 0.0});
      groups.emplace_back();
      it = rows.end() - 1;
    }
    groups[static_cast<std::size_t>(it - rows.begin())].push_back(&r);
  }

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& g = groups[i];
    auto& row = rows[i];
    row.runs = g.size();
    const double n = static_cast<double>(g.size());

    double sum = 0.0;
    for (const auto* r : g) sum += r->final_loss;
    row.mean_final_loss = sum / n;
    double ss = 0.0;
    for (const auto* r : g) ss += (r->final_loss - row.mean_final_loss) * (r->final_loss - row.mean_final_loss);
    row.std_final_loss = g.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

    double it_sum = 0.0;
    std::size_t reached = 0;
    std::size_t succeeded = 0;
    for (const auto* r : g) {
      if (r->iters_to_threshold) {
        it_sum += static_cast<double>(*r->iters_to_threshold);
        ++reached;
      }
      if (r->success) ++succeeded;
    }
    row.mean_iters_to_threshold =
        reached ? it_sum / static_cast<double>(reached) : std::numeric_limits<double>::quiet_NaN();
    row.success_rate = static_cast<double>(succeeded) / n;
  }
  return rows;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << kTrajectoryHeader << '\n';
  for (const auto& r : traj.records) {
    out << r.iteration << ',' << format_double(r.loss_before) << ',' << format_double(r.loss_after) << ','
        << format_double(r.grad_norm) << ',' << format_double(r.rho) << ',' << format_double(r.nu) << ','
        << format_double(r.xi) << ',' << format_double(r.step_norm) << ','
        << (r.status ? to_string(*r.status) : "") << ','
        << (r.subproblem_status ? to_string(*r.subproblem_status) : "") << ',' << (r.accepted ? 1 : 0) << '\n';
  }
}

std::vector<StepRecord> read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kTrajectoryHeader) {
    throw ConfigError("trajectory CSV: unexpected header");
  }
  std::vector<StepRecord> records;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 11) throw ConfigError("trajectory CSV: expected 11 fields, got " + std::to_string(f.size()));

    StepRecord r;
    r.iteration = parse_uint(f[0], "iter");
    r.loss_before = parse_double(f[1], "loss_before");
    r.loss_after = parse_double(f[2], "loss_after");
    r.grad_norm = parse_double(f[3], "grad_norm");
    r.rho = parse_double(f[4], "rho");
    r.nu = parse_double(f[5], "nu");
    r.xi = parse_double(f[6], "xi");
    r.step_norm = parse_double(f[7], "step_norm");
    for (auto c : {IterationClass::VerySuccessful, IterationClass::Successful, IterationClass::Unsuccessful}) {
      if (f[8] == to_string(c)) r.status = c;
    }
    for (auto c : {SubproblemStatus::Interior, SubproblemStatus::Boundary, SubproblemStatus::HardCase}) {
      if (f[9] == to_string(c)) r.subproblem_status = c;
    }
    r.accepted = trim(f[10]) == "1";
    records.push_back(r);
  }
  return records;
}

void write_runs_csv(std::ostream& out, const std::vector<RunResult>& runs) {
  out << "problem,optimizer,seed,iterations,final_loss,final_grad_norm,iters_to_threshold,success,error\n";
  for (const auto& r : runs) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << r.problem << ',' << r.optimizer << ',' << r.seed << ',' << r.trajectory.records.size() << ','
        << format_double(r.final_loss) << ',' << format_double(r.final_grad_norm) << ','
        << csv_optional(r.iters_to_threshold) << ',' << (r.success ? 1 : 0) << ',' << err << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "problem,optimizer,runs,mean_final_loss,std_final_loss,mean_iters_to_threshold,success_rate\n";
  for (const auto& r : rows) {
    out << r.problem << ',' << r.optimizer << ',' << r.runs << ',' << format_double(r.mean_final_loss) << ','
        << format_double(r.std_final_loss) << ',' << format_double(r.mean_iters_to_threshold) << ','
        << format_double(r.success_rate) << '\n';
  }
}

std::string trajectory_file_name(const RunResult& run) {
  return "traj_" + run.problem + "_" + run.optimizer + "_" + std::to_string(run.seed) + ".csv";
}

void write_experiment_outputs(const ExperimentResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());

  const auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write '" + (fs::path(dir) / name).string() + "'");
    return f;
  };
  for (const auto& r : result.runs) {
    auto f = open(trajectory_file_name(r));
    write_trajectory_csv(f, r.trajectory);
  }
  auto runs = open("runs.csv");
  write_runs_csv(runs, result.runs);
  auto summary = open("summary.csv");
  write_summary_csv(summary, result.summary);
}

DeviationSamples measure_subsample_deviation(const Objective& obj, const Vector& x, std::size_t batch_size,
                                             std::size_t trials, int samples, std::uint64_t seed) {
  const std::size_t n = obj.num_samples();
  if (n == 0) throw ConfigError("subsample deviation is unsupported for deterministic objective '" + obj.name() + "'");
  if (batch_size == 0 || batch_size > n) {
    throw ConfigError("batch_size must be in [1, " + std::to_string(n) + "]");
  }
  if (samples < 1) throw ConfigError("samples must be >= 1");
  if (static_cast<std::size_t>(x.size()) != obj.dim()) throw ConfigError("x has the wrong dimension");

  const Vector g_full = obj.grad(x);
  const std::size_t d = obj.dim();
  Vector diag_full;
  if (auto exact = obj.exact_diag_hessian(x)) {
    diag_full = *exact;
  } else {
    diag_full = hutchinson_exhaustive([&](const Vector& v) { return obj.hvp(x, v); }, d).b;
  }

  DeviationSamples out;
  out.grad.reserve(trials);
  out.diag.reserve(trials);
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const Batch batch = draw_batch(rng, obj, batch_size);
    out.grad.push_back((obj.grad(x, batch) - g_full).norm());
    const auto est = hutchinson_diag([&](const Vector& v) { return obj.hvp(x, v, batch); }, d, samples, rng);
    out.diag.push_back((est.b - diag_full).lpNorm<Eigen::Infinity>());
  }
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ConfigError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile level must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace adacubic
