#include "majorate/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <variant>

#include "majorate/distributions.hpp"
#include "majorate/entropic.hpp"
#include "majorate/error.hpp"
#include "majorate/majorisation.hpp"
#include "majorate/moderate.hpp"
#include "majorate/rates.hpp"
#include "majorate/rayleigh.hpp"

namespace majorate::cli {

namespace {

using json = nlohmann::json;

const std::vector<std::string> kCommands{"entropy",        "check",     "epsilon",  "embed",
                                         "rate-exact",     "rate-expand", "resonance-scan",
                                         "tail-scan",      "rayleigh",  "convergence"};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<double, std::int64_t, bool, std::string, std::vector<double>>;
using Row = std::vector<std::pair<std::string, Cell>>;

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

json to_json(double x) {
  if (!std::isfinite(x)) return fmt(x);
  return std::stod(fmt(x));
}

json to_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return to_json(v);
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          json a = json::array();
          for (double x : v) a.push_back(to_json(x));
          return a;
        } else {
          return v;
        }
      },
      c);
}

std::string to_csv(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return fmt(v);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else {
          std::string s = "[";
          for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + fmt(v[i]);
          return s + "]";
        }
      },
      c);
}

class Logger {
 public:
  Logger(std::ostream& err) : err_(err) {
    const char* v = std::getenv("MAJORATE_LOG");
    const std::string s = v ? v : "";
    level_ = s == "debug" ? 2 : (s == "info" || s == "1") ? 1 : 0;
  }
  void info(const std::string& m) const {
    if (level_ >= 1) err_ << "[majorate] " << m << '\n';
  }
  void debug(const std::string& m) const {
    if (level_ >= 2) err_ << "[majorate:debug] " << m << '\n';
  }

 private:
  std::ostream& err_;
  int level_ = 0;
};

struct Options {
  std::string command;
  std::string input;
  std::string p, q, f;
  std::vector<std::uint32_t> n;
  std::optional<std::uint32_t> m;
  std::optional<double> eps;
  double alpha = 1.0 / 3.0;
  double c = 1.0;
  double zeta = kDefaultZeta;
  std::string metric = "tvd";
  std::string direction = "ent";
  std::string regime = "direct";
  std::optional<double> beta;
  std::string weights;
  std::string energies;
  std::string grid;
  std::optional<double> nu;
  std::string mode = "magnitude";
  std::size_t cap_classes = kDefaultClassCap;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

/// Resolved inputs: flags win over the --input file.
struct Inputs {
  json file = json::object();
  const Options& o;

  std::optional<json> get(const std::string& flag, const std::string& key) const {
    if (!flag.empty()) {
      try {
        return json::parse(flag);
      } catch (const json::parse_error& e) {
        throw ValidationError("--" + key + " is not valid JSON");
      }
    }
    if (file.contains(key)) return file[key];
    return std::nullopt;
  }

  std::optional<ProbVec> dist(const std::string& flag, const std::string& key) const {
    const auto j = get(flag, key);
    if (!j) return std::nullopt;
    if (!j->is_array()) throw ValidationError("--" + key + " must be a JSON array");
    std::vector<double> v;
    for (const auto& x : *j) {
      if (!x.is_number()) throw ValidationError("--" + key + " must contain numbers");
      v.push_back(x.get<double>());
    }
    if (v.empty()) throw ValidationError("--" + key + " is empty");
    return make_prob_vec(std::move(v));
  }

  ProbVec require(const std::string& flag, const std::string& key) const {
    auto d = dist(flag, key);
    if (!d) throw ValidationError("--" + key + " is required");
    return *d;
  }

  std::optional<GibbsSpec> gibbs() const {
    std::optional<double> beta = o.beta;
    if (!beta && file.contains("beta")) beta = file["beta"].get<double>();
    std::vector<double> energies;
    if (const auto e = get(o.energies, "energies")) energies = e->get<std::vector<double>>();
    std::vector<Rational> w;
    if (const auto j = get(o.weights, "weights")) {
      if (!j->is_array()) throw ValidationError("--weights must be a JSON array");
      for (const auto& x : *j) w.push_back(parse_rational(x));
    }
    if (!w.empty()) {
      if (beta && !energies.empty()) {
        return GibbsSpec::from_energies_and_weights(std::move(energies), *beta, w);
      }
      return GibbsSpec::from_weights(w);
    }
    if (beta && !energies.empty()) return GibbsSpec::from_energies(std::move(energies), *beta);
    if (beta || !energies.empty()) {
      throw ValidationError("--beta needs energies (and vice versa)");
    }
    return std::nullopt;
  }

  static Rational parse_rational(const json& x) {
    if (x.is_array() && x.size() == 2) return {x[0].get<std::int64_t>(), x[1].get<std::int64_t>()};
    if (x.is_number_integer()) return {x.get<std::int64_t>(), 1};
    if (x.is_string()) {
      const std::string s = x.get<std::string>();
      const auto slash = s.find('/');
      try {
        if (slash == std::string::npos) return {std::stoll(s), 1};
        return {std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1))};
      } catch (const std::exception&) {
      }
    }
    throw ValidationError("weights must be \"a/b\" strings, [a, b] pairs or integers");
  }
};

std::vector<double> parse_grid(const std::string& g) {
  if (g.empty()) throw ValidationError("--grid lo:hi:steps is required");
  double lo = 0.0;
  double hi = 0.0;
  int steps = 0;
  char a = 0;
  char b = 0;
  std::istringstream in(g);
  if (!(in >> lo >> a >> hi >> b >> steps) || a != ':' || b != ':' || steps < 1 ||
      !in.eof() || hi < lo) {
    throw ValidationError("--grid must be lo:hi:steps with lo <= hi and steps >= 1");
  }
  std::vector<double> v;
  for (int i = 0; i < steps; ++i) {
    v.push_back(steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1));
  }
  return v;
}

Metric parse_metric(const std::string& s) { return s == "tvd" ? Metric::tvd : Metric::infidelity; }

Direction parse_direction(const std::string& s) {
  return s == "ent" ? Direction::entanglement : Direction::thermodynamic;
}

Regime parse_regime(const std::string& s) {
  return s == "direct" ? Regime::direct : Regime::converse;
}

std::vector<double> entries(const ProbVec& p) { return {p.entries().begin(), p.entries().end()}; }

std::uint32_t single_n(const Options& o) {
  if (o.n.size() != 1) throw ValidationError("--n takes exactly one value for " + o.command);
  if (o.n[0] == 0) throw ValidationError("--n must be at least 1");
  return o.n[0];
}

std::vector<std::uint32_t> n_list(const Options& o) {
  if (o.n.empty()) throw ValidationError("--n is required");
  for (auto n : o.n) {
    if (n == 0) throw ValidationError("--n must be at least 1");
  }
  return o.n;
}

ResourceContext context(const Options& o, const Inputs& in, std::size_t dim) {
  if (parse_direction(o.direction) == Direction::entanglement) return {};
  const auto g = in.gibbs();
  return ResourceContext::thermodynamic(g ? g->gamma() : uniform(dim));
}

template <class F>
std::vector<Row> parallel_rows(std::size_t count, F f) {
  std::vector<std::future<Row>> jobs;
  jobs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) jobs.push_back(std::async(std::launch::async, f, i));
  std::vector<Row> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

std::string nu_kind(const Irreversibility& nu) {
  switch (nu.kind) {
    case Irreversibility::Kind::finite:
      return "finite";
    case Irreversibility::Kind::infinite:
      return "infinite";
    case Irreversibility::Kind::indeterminate:
      return "indeterminate";
  }
  return "finite";
}

std::vector<Row> cmd_entropy(const Options& o, const Inputs& in) {
  const ProbVec p = in.require(o.p, "p");
  const auto g = in.gibbs();
  const EntropicSummary s = g ? summarise(p, &g->gamma()) : summarise(p);
  Row r{{"H", s.H}, {"V", s.V}};
  if (s.D_rel) r.emplace_back("D", *s.D_rel);
  if (s.V_rel) r.emplace_back("V_rel", *s.V_rel);
  return {r};
}

std::vector<Row> cmd_check(const Options& o, const Inputs& in) {
  const ProbVec p = in.require(o.p, "p");
  const ProbVec q = in.require(o.q, "q");
  const std::size_t d = std::max(p.dim(), q.dim());
  const std::vector<double> lp = lorenz(p, d);
  const std::vector<double> lq = lorenz(q, d);
  double excess = 0.0;
  for (std::size_t k = 0; k < lp.size(); ++k) excess = std::max(excess, lq[k] - lp[k]);
  return {Row{{"majorises", majorises(p, q)}, {"max_excess", excess}}};
}

std::vector<Row> cmd_epsilon(const Options& o, const Inputs& in) {
  const ProbVec p = in.require(o.p, "p");
  const ProbVec q = in.require(o.q, "q");
  const Metric metric = parse_metric(o.metric);
  std::vector<Row> rows;
  const ApproxMajResult post = min_epsilon_post(p, q, metric);
  rows.push_back({{"side", std::string("post")}, {"epsilon", post.epsilon}, {"witness", entries(post.witness)}});
  const ApproxMajResult pre = min_epsilon_pre(p, q, metric);
  rows.push_back({{"side", std::string("pre")}, {"epsilon", pre.epsilon}, {"witness", entries(pre.witness)}});
  return rows;
}

std::vector<Row> cmd_embed(const Options& o, const Inputs& in) {
  const ProbVec p = in.require(o.p, "p");
  const auto g = in.gibbs();
  if (!g) throw ValidationError("--weights is required for embed");
  const ProbVec e = embed(p, *g);
  return {Row{{"embedded_dim", static_cast<std::int64_t>(e.dim())},
              {"embedded", entries(e)},
              {"D", relative_entropy(p, g->gamma())},
              {"D_embedded", relative_entropy(e, uniform(e.dim()))}}};
}

std::vector<Row> cmd_rate_exact(const Options& o, const Inputs& in, const ProductOptions& caps,
                                const Logger& log) {
  const ProbVec p = in.require(o.p, "p");
  const ProbVec q = in.require(o.q, "q");
  const std::uint32_t n = single_n(o);
  const ModerateSequence t(o.c, o.alpha);
  const Regime regime = parse_regime(o.regime);
  const double eps = o.eps ? *o.eps : regime_epsilon(regime, t, n);
  const Direction direction = parse_direction(o.direction);
  ExactRateOptions opts;
  opts.metric = parse_metric(o.metric);
  opts.product = caps;
  ProbVec pp = p;
  ProbVec qq = q;
  std::optional<ProbVec> f = in.dist(o.f, "f");
  if (direction == Direction::thermodynamic && !f) {
    auto g = in.gibbs();
    if (!g) {
      std::vector<Rational> w(p.dim(), Rational{1, static_cast<std::int64_t>(p.dim())});
      g = GibbsSpec::from_weights(w);
    }
    pp = embed(p, *g);
    qq = embed(q, *g);
    f = uniform(pp.dim());
  }
  if (!f) f = sharp(1);
  log.info("rate-exact: n=" + std::to_string(n) + " eps=" + fmt(eps));
  const ExactRatePoint r = exact_optimal_rate(pp, qq, *f, n, eps, direction, opts);
  Row row{{"n", static_cast<std::int64_t>(r.n)},
          {"epsilon", r.epsilon},
          {"m_star", static_cast<std::int64_t>(r.m_star)},
          {"rate", r.rate()},
          {"rate_num", static_cast<std::int64_t>(r.rate_num)},
          {"rate_den", static_cast<std::int64_t>(r.rate_den)},
          {"achieved_epsilon", r.achieved_epsilon}};
  if (o.m) row.emplace_back("epsilon_at_m", total_state_epsilon(pp, qq, *f, n, *o.m, direction, opts));
  return {row};
}

std::vector<Row> cmd_rate_expand(const Options& o, const Inputs& in) {
  const ProbVec p = in.require(o.p, "p");
  const ProbVec q = in.require(o.q, "q");
  const std::uint32_t n = single_n(o);
  const ModerateSequence t(o.c, o.alpha);
  const ResourceContext ctx = context(o, in, p.dim());
  const Regime regime = parse_regime(o.regime);
  const Metric metric = parse_metric(o.metric);
  if (regime == Regime::converse && metric == Metric::infidelity) {
    const ConjecturedRate c = conjectured_converse_infidelity(p, q, ctx, t, n);
    return {Row{{"status", std::string(ConjecturedRate::status)},
                {"R_inf", c.R_inf},
                {"coefficient", c.coefficient},
                {"t_n", t.t(n)},
                {"R_n", c.R_n}}};
  }
  const ExpandedRate e = expand_rate(p, q, ctx, regime, t, n, metric);
  return {Row{{"status", std::string("theorem")},
              {"R_inf", e.expansion.R_inf},
              {"nu", e.expansion.nu.value},
              {"nu_kind", nu_kind(e.expansion.nu)},
              {"coefficient", e.expansion.coefficient},
              {"t_n", t.t(n)},
              {"R_n", e.R_n}}};
}

std::vector<Row> cmd_resonance_scan(const Options& o, const Inputs& in, json& extra) {
  const ProbVec q = in.require(o.q, "q");
  const std::vector<double> xs = parse_grid(o.grid);
  for (double x : xs) {
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("--grid values must lie in [0, 1]");
  }
  const ResourceContext ctx = context(o, in, 2);
  if (ctx.direction == Direction::entanglement) {
    extra["resonant_partner_x"] = to_json(resonant_binary_partner(q)[0]);
  }
  return parallel_rows(xs.size(), [&](std::size_t i) {
    const ProbVec p = make_prob_vec({xs[i], 1.0 - xs[i]});
    const ResonanceGap g = resonance_gap(p, q, ctx);
    return Row{{"x", xs[i]}, {"nu", g.nu.value}, {"nu_kind", nu_kind(g.nu)}, {"gap", g.gap}};
  });
}

std::vector<Row> cmd_tail_scan(const Options& o, const Inputs& in, const ProductOptions& caps) {
  const ProbVec a = in.require(o.p, "p");
  const std::vector<std::uint32_t> ns = n_list(o);
  const std::vector<double> xs = parse_grid(o.grid);
  if (o.mode != "magnitude" && o.mode != "rank") throw ValidationError("--mode must be magnitude or rank");
  const ModerateSequence t(o.c, o.alpha);
  return parallel_rows(ns.size() * xs.size(), [&](std::size_t i) {
    const std::uint32_t n = ns[i / xs.size()];
    const double x = xs[i % xs.size()];
    const double lk = log_k_n(a, x, n, t);
    const TailReport r =
        o.mode == "magnitude"
            ? magnitude_tail_sum(a, n, -lk, x <= 0 ? MagnitudeSide::above : MagnitudeSide::below,
                                 &t, caps)
            : rank_tail_sum(a, n, lk, x <= 0 ? RankSide::head : RankSide::tail, &t, caps);
    return Row{{"n", static_cast<std::int64_t>(n)},
               {"x", x},
               {"sum", r.sum},
               {"exponent_estimate", r.exponent_estimate},
               {"predicted_exponent", r.predicted_exponent}};
  });
}

std::vector<Row> cmd_rayleigh(const Options& o) {
  if (!o.nu) throw ValidationError("--nu is required");
  const std::vector<double> mus = parse_grid(o.grid);
  const double nu = *o.nu;
  return parallel_rows(mus.size(), [&](std::size_t i) {
    const RayleighEval r = rayleigh_cdf(nu, mus[i]);
    return Row{{"mu", mus[i]},
               {"Z", r.Z},
               {"alpha_cross", r.alpha_cross},
               {"method", std::string("integral")},
               {"log_Z", r.log_Z},
               {"log_one_minus_Z", r.log_one_minus_Z}};
  });
}

std::vector<Row> cmd_convergence(const Options& o, const Inputs& in, const ProductOptions& caps) {
  ProbVec p = in.require(o.p, "p");
  ProbVec q = in.require(o.q, "q");
  const std::vector<std::uint32_t> ns = n_list(o);
  const ModerateSequence t(o.c, o.alpha);
  const Direction direction = parse_direction(o.direction);
  std::optional<ProbVec> f = in.dist(o.f, "f");
  if (direction == Direction::thermodynamic && !f) {
    if (const auto g = in.gibbs()) {
      p = embed(p, *g);
      q = embed(q, *g);
    }
    f = uniform(p.dim());
  }
  if (!f) f = sharp(1);
  ExactRateOptions opts;
  opts.metric = parse_metric(o.metric);
  opts.product = caps;
  const auto rows = convergence_report(p, q, *f, direction, parse_regime(o.regime), t, ns, opts);
  std::vector<Row> out;
  for (const ConvergenceRow& r : rows) {
    out.push_back({{"n", static_cast<std::int64_t>(r.n)},
                   {"epsilon", r.epsilon},
                   {"m_star", static_cast<std::int64_t>(r.m_star)},
                   {"exact_rate", r.exact_rate},
                   {"expanded_rate", r.expanded_rate},
                   {"residual", r.residual}});
  }
  return out;
}

json parameters(const Options& o) {
  json p;
  p["input"] = o.input;
  p["p"] = o.p;
  p["q"] = o.q;
  p["f"] = o.f;
  p["n"] = o.n;
  p["m"] = o.m ? json(*o.m) : json(nullptr);
  p["eps"] = o.eps ? to_json(*o.eps) : json(nullptr);
  p["alpha"] = to_json(o.alpha);
  p["c"] = to_json(o.c);
  p["zeta"] = to_json(o.zeta);
  p["metric"] = o.metric;
  p["direction"] = o.direction;
  p["regime"] = o.regime;
  p["beta"] = o.beta ? to_json(*o.beta) : json(nullptr);
  p["weights"] = o.weights;
  p["energies"] = o.energies;
  p["grid"] = o.grid;
  p["nu"] = o.nu ? to_json(*o.nu) : json(nullptr);
  p["mode"] = o.mode;
  p["cap_classes"] = o.cap_classes;
  p["format"] = o.format;
  return p;
}

json metadata(const Options& o, const json& extra) {
  json m;
  m["tool"] = "majorate";
  m["version"] = kVersion;
  m["command"] = o.command;
  m["seed"] = o.seed;
  m["tolerances"] = {{"sum", kSumTolerance},
                     {"negative", kNegativeTolerance},
                     {"majorisation_slack", kMajorisationSlack},
                     {"class_merge_relative", 1e-12},
                     {"significant_digits", 12}};
  m["parameters"] = parameters(o);
  if (!extra.empty()) m["extra"] = extra;
  return m;
}

void emit(std::ostream& os, const Options& o, const json& meta, const std::vector<Row>& rows) {
  if (o.format == "json") {
    json records = json::array();
    for (const Row& r : rows) {
      json rec = json::object();
      for (const auto& [k, v] : r) rec[k] = to_json(v);
      records.push_back(rec);
    }
    os << json{{"metadata", meta}, {"records", records}}.dump(2) << '\n';
    return;
  }
  os << "# majorate " << kVersion << '\n';
  os << "# metadata " << meta.dump() << '\n';
  if (rows.empty()) return;
  for (std::size_t i = 0; i < rows[0].size(); ++i) os << (i ? "," : "") << rows[0][i].first;
  os << '\n';
  for (const Row& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << to_csv(r[i].second);
    os << '\n';
  }
}

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::ClassExplosion:
    case ErrorCode::DimensionTooLarge:
    case ErrorCode::NoBracket:
    case ErrorCode::InfeasibleAtZero:
      return kExitCap;
    default:
      return kExitValidation;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Logger log(err);
  Options o;
  CLI::App app{"Approximate majorisation and moderate-deviation conversion rates", "majorate"};
  app.add_option("command", o.command, "Command to run")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--input", o.input, "JSON file with p, q, f, weights, energies, beta");
  app.add_option("--p", o.p, "Initial distribution, JSON array");
  app.add_option("--q", o.q, "Target distribution, JSON array");
  app.add_option("--f", o.f, "Free state, JSON array");
  app.add_option("--n", o.n, "Copy count(s); comma separated for scans")->delimiter(',');
  app.add_option("--m", o.m, "Target copy count to report the error at");
  app.add_option("--eps", o.eps, "Error level");
  app.add_option("--alpha", o.alpha, "Moderate sequence exponent")->capture_default_str();
  app.add_option("--c", o.c, "Moderate sequence scale")->capture_default_str();
  app.add_option("--zeta", o.zeta, "Slack in constructions")->capture_default_str();
  app.add_option("--metric", o.metric)->check(CLI::IsMember({"tvd", "fid"}))->capture_default_str();
  app.add_option("--direction", o.direction)
      ->check(CLI::IsMember({"ent", "th"}))
      ->capture_default_str();
  app.add_option("--regime", o.regime)
      ->check(CLI::IsMember({"direct", "converse"}))
      ->capture_default_str();
  app.add_option("--beta", o.beta, "Inverse temperature");
  app.add_option("--weights", o.weights, "Rational Gibbs weights, e.g. [\"1/3\",\"2/3\"]");
  app.add_option("--energies", o.energies, "Energies, JSON array");
  app.add_option("--grid,--mu-grid", o.grid, "lo:hi:steps");
  app.add_option("--nu", o.nu, "Irreversibility parameter for rayleigh");
  app.add_option("--mode", o.mode, "tail-scan sum: magnitude or rank")->capture_default_str();
  app.add_option("--cap-classes", o.cap_classes, "Type-class cap")->capture_default_str();
  app.add_option("--seed", o.seed, "Seed recorded in the output")->capture_default_str();
  app.add_option("--out", o.out, "Output path (default stdout)");
  app.add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: ValidationError: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (!(o.c > 0.0) || !(o.alpha > 0.0 && o.alpha < 0.5)) {
      throw ValidationError("--c must be positive and --alpha in (0, 1/2)");
    }
    if (o.eps && !(*o.eps >= 0.0 && *o.eps < 1.0)) throw ValidationError("--eps must lie in [0, 1)");
    if (!(o.zeta > 0.0)) throw ValidationError("--zeta must be positive");
    if (o.cap_classes == 0) throw ValidationError("--cap-classes must be positive");
    Inputs in{json::object(), o};
    if (!o.input.empty()) {
      std::ifstream f(o.input);
      if (!f) throw ValidationError("cannot open " + o.input);
      try {
        in.file = json::parse(f);
      } catch (const json::parse_error&) {
        throw ValidationError(o.input + " is not valid JSON");
      }
    }
    const ProductOptions caps{o.cap_classes};
    log.debug("command " + o.command);
    json extra = json::object();
    std::vector<Row> rows;
    if (o.command == "entropy") rows = cmd_entropy(o, in);
    else if (o.command == "check") rows = cmd_check(o, in);
    else if (o.command == "epsilon") rows = cmd_epsilon(o, in);
    else if (o.command == "embed") rows = cmd_embed(o, in);
    else if (o.command == "rate-exact") rows = cmd_rate_exact(o, in, caps, log);
    else if (o.command == "rate-expand") rows = cmd_rate_expand(o, in);
    else if (o.command == "resonance-scan") rows = cmd_resonance_scan(o, in, extra);
    else if (o.command == "tail-scan") rows = cmd_tail_scan(o, in, caps);
    else if (o.command == "rayleigh") rows = cmd_rayleigh(o);
    else rows = cmd_convergence(o, in, caps);
    log.info(o.command + ": " + std::to_string(rows.size()) + " record(s)");

    const json meta = metadata(o, extra);
    if (o.out.empty()) {
      emit(out, o, meta, rows);
    } else {
      std::ofstream file(o.out);
      if (!file) throw ValidationError("cannot write " + o.out);
      emit(file, o, meta, rows);
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: ValidationError: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const json::exception& e) {
    err << "error: ValidationError: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace majorate::cli
