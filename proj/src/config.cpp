#include "pfd/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pfd/presets.hpp"

namespace pfd {
namespace {

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

std::map<std::string, Section> parse_ini(const std::string& text,
                                         const std::string& origin) {
  static const std::map<std::string, std::set<std::string>> allowed = {
      {"problem",
       {"kind", "seed", "n", "target", "metric", "instance", "states", "actions",
        "gamma", "prior", "lik"}},
      {"algorithm", {"preset", "functional", "estimator", "descent", "grad_kind"}},
      {"run",
       {"outer_steps", "learning_rate", "inner_learning_rate", "inner_steps",
        "samples", "tolerance", "lr_v", "seed", "out_dir", "record_residual"}},
  };

  std::map<std::string, Section> sections;
  std::istringstream in(text);
  std::string raw;
  std::string current;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(origin, line, "malformed section header");
      current = trim(s.substr(1, s.size() - 2));
      if (!allowed.count(current)) fail(origin, line, "unknown section [" + current + "]");
      sections[current];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(origin, line, "expected 'key = value'");
    if (current.empty()) fail(origin, line, "key outside any section");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (!allowed.at(current).count(key))
      fail(origin, line, "unknown key '" + key + "' in [" + current + "]");
    if (sections[current].count(key))
      fail(origin, line, "duplicate key '" + key + "' in [" + current + "]");
    if (value.empty()) fail(origin, line, "empty value for key '" + key + "'");
    sections[current][key] = Entry{value, line};
  }
  return sections;
}

class SectionReader {
 public:
  SectionReader(const std::map<std::string, Section>& sections, std::string name,
                std::string origin)
      : origin_(std::move(origin)), name_(std::move(name)) {
    const auto it = sections.find(name_);
    if (it != sections.end()) section_ = &it->second;
  }

  bool has(const std::string& key) const { return section_ && section_->count(key); }

  std::string require(const std::string& key) const {
    if (!has(key))
      throw ConfigError(origin_ + ": missing required key '" + key + "' in [" +
                        name_ + "]");
    return section_->at(key).value;
  }

  std::optional<std::string> get(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return section_->at(key).value;
  }

  int line(const std::string& key) const { return section_->at(key).line; }

  template <typename T>
  std::optional<T> get_num(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    std::istringstream is(section_->at(key).value);
    T v{};
    char extra = 0;
    if (!(is >> v) || (is >> extra))
      fail(origin_, line(key), "key '" + key + "': not a valid number");
    return v;
  }

  std::optional<bool> get_bool(const std::string& key) const {
    const auto v = get(key);
    if (!v) return std::nullopt;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    fail(origin_, line(key), "key '" + key + "': expected true or false");
  }

  [[noreturn]] void fail_key(const std::string& key, const std::string& msg) const {
    fail(origin_, line(key), "key '" + key + "': " + msg);
  }

 private:
  std::string origin_;
  std::string name_;
  const Section* section_ = nullptr;
};

Eigen::VectorXd parse_list(const std::string& text) {
  std::vector<double> vals;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    std::istringstream is(trim(token));
    double v = 0.0;
    char extra = 0;
    if (!(is >> v) || (is >> extra)) throw ConfigError("bad list entry '" + token + "'");
    vals.push_back(v);
  }
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

ProblemContext build_problem(const SectionReader& prob, ConfigData& data) {
  data.kind = prob.require("kind");
  data.problem_seed = prob.get_num<std::uint64_t>("seed").value_or(0);
  data.n = prob.get_num<int>("n");
  data.target = prob.get("target");
  data.metric = prob.get("metric");
  data.instance = prob.get("instance");
  data.states = prob.get_num<int>("states");
  data.actions = prob.get_num<int>("actions");
  data.gamma = prob.get_num<double>("gamma");
  data.prior = prob.get("prior");
  data.lik = prob.get("lik");

  CounterRng rng(data.problem_seed);
  if (data.kind == "gan") {
    ProbVector nu;
    if (data.target) {
      try {
        nu = ProbVector(parse_list(*data.target));
      } catch (const std::exception& e) {
        prob.fail_key("target", e.what());
      }
    } else {
      if (!data.n) throw ConfigError("[problem]: gan needs 'n' or an explicit 'target'");
      if (*data.n < 2) prob.fail_key("n", "need n >= 2");
      CounterRng g = rng.fork(0);
      nu = random_interior(*data.n, g);
    }
    if (data.n && *data.n != nu.size())
      prob.fail_key("target", "length does not match n");
    std::optional<MetricSpace> metric;
    if (data.metric) {
      if (*data.metric != "line")
        prob.fail_key("metric", "only 'line' is supported");
      metric = MetricSpace::line(nu.size());
    }
    GanContext ctx;
    ctx.nu = nu;
    ctx.metric = metric;
    ctx.theta0 = Eigen::VectorXd::Zero(nu.size());
    return ctx;
  }
  if (data.kind == "vi") {
    if (data.prior || data.lik) {
      if (!data.prior || !data.lik)
        throw ConfigError("[problem]: inline vi models need both 'prior' and 'lik'");
      try {
        LatentModel model(ProbVector(parse_list(*data.prior)), parse_list(*data.lik));
        return ViContext{model, Eigen::VectorXd::Zero(model.latent_size())};
      } catch (const std::exception& e) {
        prob.fail_key("prior", e.what());
      }
    }
    if (!data.n) throw ConfigError("[problem]: vi needs 'n' or an inline prior/lik");
    if (*data.n < 2) prob.fail_key("n", "need n >= 2");
    CounterRng g = rng.fork(1);
    const ProbVector pz = random_interior(*data.n, g);
    Eigen::VectorXd lik(*data.n);
    for (int z = 0; z < *data.n; ++z) lik[z] = 0.1 + 0.9 * g.next_double();
    LatentModel model(pz, lik);
    return ViContext{model, Eigen::VectorXd::Zero(model.latent_size())};
  }
  if (data.kind == "rl") {
    if (data.instance) {
      TabularMdp mdp = read_mdp_file(*data.instance);
      return RlContext{mdp, Policy::uniform(mdp.S, mdp.A)};
    }
    if (!data.states || !data.actions || !data.gamma)
      throw ConfigError(
          "[problem]: rl needs 'instance' or all of 'states', 'actions', 'gamma'");
    if (*data.states < 1 || *data.actions < 1)
      throw ConfigError("[problem]: states and actions must be >= 1");
    if (!(*data.gamma > 0.0 && *data.gamma < 1.0))
      prob.fail_key("gamma", "gamma must lie in (0,1)");
    CounterRng g = rng.fork(2);
    TabularMdp mdp = random_mdp(*data.states, *data.actions, *data.gamma, g);
    return RlContext{mdp, Policy::uniform(mdp.S, mdp.A)};
  }
  prob.fail_key("kind", "expected gan, vi, or rl");
}

void set_diagnostic_target(PfdConfig& cfg) {
  if (const auto* gan = std::get_if<GanContext>(&cfg.context)) {
    cfg.target = gan->nu;
  } else if (const auto* vi = std::get_if<ViContext>(&cfg.context)) {
    cfg.target = vi->model.posterior();
  }
}

DivergenceKind parse_functional_gan(const SectionReader& alg, const std::string& f) {
  if (f == "js") return DivergenceKind::js;
  if (f == "ns") return DivergenceKind::ns;
  if (f == "w") return DivergenceKind::wasserstein;
  alg.fail_key("functional", "expected js, ns, w, vi, or rl");
}

EstimatorKind parse_estimator(const SectionReader& alg, const std::string& e) {
  if (e == "exact") return EstimatorKind::exact;
  if (e == "dual_ascent") return EstimatorKind::dual_ascent;
  if (e == "classifier") return EstimatorKind::classifier;
  if (e == "mc_q") return EstimatorKind::mc_q;
  if (e == "lsq_v") return EstimatorKind::lsq_v;
  alg.fail_key("estimator", "expected exact, dual_ascent, classifier, mc_q, or lsq_v");
}

}  // namespace

RunSpec parse_config_text(const std::string& text, const std::string& origin) {
  const auto sections = parse_ini(text, origin);
  SectionReader prob(sections, "problem", origin);
  SectionReader alg(sections, "algorithm", origin);
  SectionReader run(sections, "run", origin);

  RunSpec spec;
  ProblemContext context = build_problem(prob, spec.data);

  spec.data.preset = alg.get("preset");
  spec.data.functional = alg.get("functional");
  spec.data.estimator = alg.get("estimator");
  spec.data.descent = alg.get("descent");
  spec.data.grad_kind = alg.get("grad_kind");

  if (spec.data.preset) {
    if (spec.data.functional || spec.data.estimator || spec.data.descent ||
        spec.data.grad_kind)
      alg.fail_key("preset", "preset conflicts with explicit algorithm keys");
    const auto preset = preset_from_name(*spec.data.preset);
    if (!preset) alg.fail_key("preset", "unknown preset '" + *spec.data.preset + "'");
    spec.cfg = build_preset(*preset, std::move(context));
  } else {
    if (!spec.data.functional)
      throw ConfigError(origin + ": [algorithm] needs 'preset' or 'functional'");
    PfdConfig cfg;
    const std::string f = *spec.data.functional;
    if (std::holds_alternative<GanContext>(context)) {
      GanContext gan = std::get<GanContext>(context);
      gan.div = parse_functional_gan(alg, f);
      if (gan.div == DivergenceKind::wasserstein && !gan.metric)
        gan.metric = MetricSpace::line(gan.nu.size());
      cfg.context = std::move(gan);
    } else if (std::holds_alternative<ViContext>(context)) {
      if (f != "vi") alg.fail_key("functional", "a vi problem requires functional=vi");
      cfg.context = std::move(context);
    } else {
      if (f != "rl") alg.fail_key("functional", "an rl problem requires functional=rl");
      cfg.context = std::move(context);
    }
    cfg.estimator.kind = parse_estimator(alg, alg.has("estimator")
                                                  ? *spec.data.estimator
                                                  : std::string("exact"));
    if (!spec.data.estimator) spec.data.estimator = "exact";
    const std::string descent = spec.data.descent.value_or("gradient");
    if (!spec.data.descent) spec.data.descent = descent;
    if (descent == "gradient") {
      GradientRule rule;
      const std::string gk = spec.data.grad_kind.value_or("exact");
      if (!spec.data.grad_kind) spec.data.grad_kind = gk;
      if (gk == "exact") {
        rule.kind = GradKind::exact_chain_rule;
      } else if (gk == "score") {
        rule.kind = GradKind::score_function;
      } else {
        alg.fail_key("grad_kind", "expected exact or score");
      }
      cfg.descent = rule;
    } else if (descent == "global_min") {
      cfg.descent = GlobalMinRule{};
    } else {
      alg.fail_key("descent", "expected gradient or global_min");
    }
    spec.cfg = std::move(cfg);
  }

  // [run] overrides; unset keys keep preset or documented defaults.
  spec.cfg.outer_steps = run.get_num<int>("outer_steps").value_or(
      spec.data.preset ? spec.cfg.outer_steps : spec.data.outer_steps);
  if (spec.cfg.outer_steps < 0) run.fail_key("outer_steps", "must be >= 0");
  spec.data.outer_steps = spec.cfg.outer_steps;

  if (auto* rule = std::get_if<GradientRule>(&spec.cfg.descent)) {
    const double lr = run.get_num<double>("learning_rate")
                          .value_or(spec.data.preset ? rule->learning_rate : 0.1);
    if (!(lr > 0.0)) run.fail_key("learning_rate", "must be > 0");
    rule->learning_rate = lr;
    spec.data.learning_rate = lr;
    if (auto s = run.get_num<int>("samples")) rule->samples = *s;
  } else {
    spec.data.learning_rate.reset();
  }

  if (auto v = run.get_num<double>("inner_learning_rate")) {
    if (!(*v > 0.0)) run.fail_key("inner_learning_rate", "must be > 0");
    spec.cfg.estimator.learning_rate = *v;
  } else if (!spec.data.preset) {
    spec.cfg.estimator.learning_rate = 0.1;
  }
  spec.data.inner_learning_rate = spec.cfg.estimator.learning_rate;

  if (auto v = run.get_num<int>("inner_steps")) {
    if (*v < 1) run.fail_key("inner_steps", "must be >= 1");
    spec.cfg.estimator.inner_steps = *v;
  } else if (!spec.data.preset) {
    spec.cfg.estimator.inner_steps = 100;
  }
  spec.data.inner_steps = spec.cfg.estimator.inner_steps;

  if (auto v = run.get_num<int>("samples")) {
    if (*v < 1) run.fail_key("samples", "must be >= 1");
    spec.cfg.estimator.samples = *v;
  }
  spec.data.samples = spec.cfg.estimator.samples;

  if (auto v = run.get_num<double>("tolerance")) {
    if (!(*v > 0.0)) run.fail_key("tolerance", "must be > 0");
    spec.cfg.estimator.tolerance = *v;
  }
  spec.data.tolerance = spec.cfg.estimator.tolerance;

  if (spec.cfg.saddle) {
    if (auto v = run.get_num<double>("lr_v")) {
      if (!(*v > 0.0)) run.fail_key("lr_v", "must be > 0");
      spec.cfg.saddle->lr_v = *v;
    }
    if (spec.data.learning_rate) spec.cfg.saddle->lr_policy = *spec.data.learning_rate;
    spec.data.lr_v = spec.cfg.saddle->lr_v;
  }

  spec.cfg.seed = run.get_num<std::uint64_t>("seed").value_or(0);
  spec.data.seed = spec.cfg.seed;
  spec.data.out_dir = run.get("out_dir").value_or("");
  spec.data.record_residual = run.get_bool("record_residual").value_or(false);
  spec.cfg.record_residual = spec.data.record_residual;

  set_diagnostic_target(spec.cfg);
  return spec;
}

RunSpec parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config_text(os.str(), path);
}

std::string serialize_config(const RunSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  const ConfigData& d = spec.data;
  os << "[problem]\n";
  os << "kind = " << d.kind << "\n";
  os << "seed = " << d.problem_seed << "\n";
  if (d.n) os << "n = " << *d.n << "\n";
  if (d.target) os << "target = " << *d.target << "\n";
  if (d.metric) os << "metric = " << *d.metric << "\n";
  if (d.instance) os << "instance = " << *d.instance << "\n";
  if (d.states) os << "states = " << *d.states << "\n";
  if (d.actions) os << "actions = " << *d.actions << "\n";
  if (d.gamma) os << "gamma = " << *d.gamma << "\n";
  if (d.prior) os << "prior = " << *d.prior << "\n";
  if (d.lik) os << "lik = " << *d.lik << "\n";

  os << "\n[algorithm]\n";
  if (d.preset) {
    os << "preset = " << *d.preset << "\n";
  } else {
    os << "functional = " << *d.functional << "\n";
    os << "estimator = " << *d.estimator << "\n";
    os << "descent = " << *d.descent << "\n";
    if (d.grad_kind) os << "grad_kind = " << *d.grad_kind << "\n";
  }

  os << "\n[run]\n";
  os << "outer_steps = " << d.outer_steps << "\n";
  if (d.learning_rate) os << "learning_rate = " << *d.learning_rate << "\n";
  os << "inner_learning_rate = " << d.inner_learning_rate << "\n";
  os << "inner_steps = " << d.inner_steps << "\n";
  os << "samples = " << d.samples << "\n";
  os << "tolerance = " << d.tolerance << "\n";
  if (spec.cfg.saddle) os << "lr_v = " << d.lr_v << "\n";
  os << "seed = " << d.seed << "\n";
  if (!d.out_dir.empty()) os << "out_dir = " << d.out_dir << "\n";
  os << "record_residual = " << (d.record_residual ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace pfd
