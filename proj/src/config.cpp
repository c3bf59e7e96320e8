#include <subdiff/config.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace subdiff {

namespace {

using nlohmann::json;

json load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str(), nullptr, false);
  if (j.is_discarded())
    throw config_error("config file '" + path + "' is not valid JSON");
  return j;
}

void require_object(const json& j, const std::string& ctx) {
  if (!j.is_object())
    throw config_error("config: '" + ctx + "' must be a JSON object");
}

// Strictness: any field outside the declared set is an error, at every level.
void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& ctx) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      throw config_error("config: unknown field '" + item.key() + "' in " +
                         ctx);
}

double get_number(const json& obj, const char* key, const std::string& ctx) {
  if (!obj.contains(key))
    throw config_error("config: missing field '" + std::string(key) + "' in " +
                       ctx);
  if (!obj[key].is_number())
    throw config_error("config: field '" + std::string(key) + "' in " + ctx +
                       " must be a number");
  return obj[key].get<double>();
}

double get_number_or(const json& obj, const char* key, const std::string& ctx,
                     double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number())
    throw config_error("config: field '" + std::string(key) + "' in " + ctx +
                       " must be a number");
  return obj[key].get<double>();
}

int get_integer(const json& obj, const char* key, const std::string& ctx) {
  if (!obj.contains(key))
    throw config_error("config: missing field '" + std::string(key) + "' in " +
                       ctx);
  if (!obj[key].is_number_integer())
    throw config_error("config: field '" + std::string(key) + "' in " + ctx +
                       " must be an integer");
  return obj[key].get<int>();
}

std::string get_string(const json& obj, const char* key,
                       const std::string& ctx) {
  if (!obj.contains(key))
    throw config_error("config: missing field '" + std::string(key) + "' in " +
                       ctx);
  if (!obj[key].is_string())
    throw config_error("config: field '" + std::string(key) + "' in " + ctx +
                       " must be a string");
  return obj[key].get<std::string>();
}

std::function<double(double)> parse_initial(const json& j) {
  require_object(j, "problem.initial");
  const std::string kind = get_string(j, "kind", "problem.initial");
  if (kind == "zero") {
    check_keys(j, {"kind"}, "problem.initial");
    return [](double) { return 0.0; };
  }
  if (kind == "sin") {
    check_keys(j, {"kind", "frequency", "amplitude"}, "problem.initial");
    const double freq = get_number_or(j, "frequency", "problem.initial", 1.0);
    const double amp = get_number_or(j, "amplitude", "problem.initial", 1.0);
    return [freq, amp](double x) { return amp * std::sin(freq * M_PI * x); };
  }
  throw config_error("config: problem.initial.kind must be 'zero' or 'sin'");
}

Forcing parse_forcing(const json& j, double mu, double beta) {
  require_object(j, "problem.forcing");
  const std::string kind = get_string(j, "kind", "problem.forcing");
  if (kind == "zero") {
    check_keys(j, {"kind"}, "problem.forcing");
    return LinearForcing{[](double, double) { return 0.0; }};
  }
  if (kind == "quadratic") {
    // f(u) = a*u + b*u^2
    check_keys(j, {"kind", "linear", "quadratic"}, "problem.forcing");
    const double a = get_number_or(j, "linear", "problem.forcing", 0.0);
    const double b = get_number_or(j, "quadratic", "problem.forcing", 0.0);
    return NonlinearForcing{[a, b](double u) { return a * u + b * u * u; },
                            [a, b](double u) { return a + 2.0 * b * u; }};
  }
  if (kind == "manufactured") {
    check_keys(j, {"kind", "sigma"}, "problem.forcing");
    const double sigma = get_number(j, "sigma", "problem.forcing");
    try {
      return manufactured_problem(sigma, beta, mu).problem.forcing;
    } catch (const std::domain_error& e) {
      throw config_error(std::string("config: ") + e.what());
    }
  }
  throw config_error(
      "config: problem.forcing.kind must be 'zero', 'quadratic', or "
      "'manufactured'");
}

// Returns the problem plus, when it is manufactured, the exact solution.
ManufacturedProblem parse_problem(const json& j) {
  require_object(j, "problem");
  if (j.contains("kind")) {
    const std::string kind = get_string(j, "kind", "problem");
    if (kind != "manufactured")
      throw config_error("config: problem.kind must be 'manufactured' (or "
                         "specify mu/beta/initial/forcing directly)");
    check_keys(j, {"kind", "sigma", "beta", "mu", "T"}, "problem");
    const double sigma = get_number(j, "sigma", "problem");
    const double beta = get_number(j, "beta", "problem");
    const double mu = get_number_or(j, "mu", "problem", 1.0);
    try {
      ManufacturedProblem mp = manufactured_problem(sigma, beta, mu);
      mp.problem.T = get_number_or(j, "T", "problem", 1.0);
      return mp;
    } catch (const std::domain_error& e) {
      throw config_error(std::string("config: ") + e.what());
    }
  }
  check_keys(j, {"mu", "beta", "T", "initial", "forcing"}, "problem");
  ManufacturedProblem mp;
  mp.exact = nullptr;
  mp.problem.mu = get_number_or(j, "mu", "problem", 1.0);
  mp.problem.beta = get_number(j, "beta", "problem");
  mp.problem.T = get_number_or(j, "T", "problem", 1.0);
  if (!j.contains("initial"))
    throw config_error("config: missing field 'initial' in problem");
  mp.problem.initial = parse_initial(j["initial"]);
  if (!j.contains("forcing"))
    throw config_error("config: missing field 'forcing' in problem");
  mp.problem.forcing =
      parse_forcing(j["forcing"], mp.problem.mu, mp.problem.beta);
  return mp;
}

Startup parse_startup(const json& j) {
  require_object(j, "scheme.startup");
  const std::string kind = get_string(j, "kind", "scheme.startup");
  if (kind == "implicit") {
    check_keys(j, {"kind"}, "scheme.startup");
    return ImplicitFirstStep{};
  }
  if (kind == "refined") {
    check_keys(j, {"kind", "factor"}, "scheme.startup");
    RefinedFirstStep r;
    if (j.contains("factor")) r.factor = get_integer(j, "factor", "scheme.startup");
    if (r.factor < 1)
      throw config_error("config: scheme.startup.factor must be >= 1");
    return r;
  }
  throw config_error(
      "config: scheme.startup.kind must be 'implicit' or 'refined'");
}

SchemeKind parse_scheme_kind(const std::string& s) {
  if (s == "linear_p1") return SchemeKind::LinearP1;
  if (s == "linear_p2") return SchemeKind::LinearP2;
  if (s == "semi_implicit_1") return SchemeKind::SemiImplicit1;
  if (s == "semi_implicit_2") return SchemeKind::SemiImplicit2;
  throw config_error(
      "config: scheme.kind must be one of linear_p1, linear_p2, "
      "semi_implicit_1, semi_implicit_2");
}

SchemeSpec parse_scheme(const json& j, bool with_steps) {
  require_object(j, "scheme");
  if (with_steps)
    check_keys(j, {"kind", "n_steps", "startup"}, "scheme");
  else
    check_keys(j, {"kind", "startup"}, "scheme");
  SchemeSpec s;
  s.kind = parse_scheme_kind(get_string(j, "kind", "scheme"));
  if (with_steps) {
    s.n_steps = get_integer(j, "n_steps", "scheme");
    if (s.n_steps < 1)
      throw config_error("config: scheme.n_steps must be >= 1");
  }
  if (j.contains("startup")) s.startup = parse_startup(j["startup"]);
  return s;
}

}  // namespace

SolveConfig parse_solve_config(const std::string& path) {
  const json j = load_document(path);
  require_object(j, "document root");
  check_keys(j, {"problem", "scheme", "N"}, "document root");
  if (!j.contains("problem"))
    throw config_error("config: missing field 'problem'");
  if (!j.contains("scheme"))
    throw config_error("config: missing field 'scheme'");
  SolveConfig cfg;
  cfg.problem = parse_problem(j["problem"]).problem;
  cfg.scheme = parse_scheme(j["scheme"], /*with_steps=*/true);
  cfg.N = get_integer(j, "N", "document root");
  if (cfg.N < 2) throw config_error("config: N must be >= 2");
  cfg.echo = j.dump();
  return cfg;
}

StudySpec parse_study_config(const std::string& path) {
  const json j = load_document(path);
  require_object(j, "document root");
  check_keys(j,
             {"problem", "scheme", "N", "tau_grid", "reference", "eval_time",
              "error_measure", "label"},
             "document root");
  for (const char* req : {"problem", "scheme", "N", "tau_grid", "reference"})
    if (!j.contains(req))
      throw config_error("config: missing field '" + std::string(req) + "'");

  StudySpec spec;
  ManufacturedProblem mp = parse_problem(j["problem"]);
  spec.problem = mp.problem;
  spec.scheme = parse_scheme(j["scheme"], /*with_steps=*/false);
  spec.N = get_integer(j, "N", "document root");

  if (!j["tau_grid"].is_array())
    throw config_error("config: tau_grid must be an array of numbers");
  for (const auto& v : j["tau_grid"]) {
    if (!v.is_number())
      throw config_error("config: tau_grid must be an array of numbers");
    spec.tau_grid.push_back(v.get<double>());
  }

  const json& r = j["reference"];
  require_object(r, "reference");
  const std::string rkind = get_string(r, "kind", "reference");
  if (rkind == "self") {
    check_keys(r, {"kind", "tau_ref", "N_ref"}, "reference");
    SelfReference sr;
    sr.tau_ref = get_number(r, "tau_ref", "reference");
    sr.N_ref = r.contains("N_ref") ? get_integer(r, "N_ref", "reference")
                                   : spec.N;
    spec.reference = sr;
  } else if (rkind == "exact") {
    check_keys(r, {"kind"}, "reference");
    if (!mp.exact)
      throw config_error(
          "config: reference.kind 'exact' needs a manufactured problem (the "
          "exact solution is otherwise unknown)");
    spec.reference = ExactReference{mp.exact};
  } else {
    throw config_error("config: reference.kind must be 'self' or 'exact'");
  }

  spec.eval_time = get_number_or(j, "eval_time", "document root", 1.0);
  if (j.contains("error_measure")) {
    const std::string m = get_string(j, "error_measure", "document root");
    if (m == "final")
      spec.error_measure = ErrorMeasure::Final;
    else if (m == "max_over_time")
      spec.error_measure = ErrorMeasure::MaxOverTime;
    else
      throw config_error(
          "config: error_measure must be 'final' or 'max_over_time'");
  }
  spec.label = j.contains("label") ? get_string(j, "label", "document root")
                                   : j.dump();
  return spec;
}

}  // namespace subdiff
