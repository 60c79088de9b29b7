#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace ocokit::cli {

namespace {

using nlohmann::json;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

fs::path prepare_out(const ExperimentConfig& c) {
  fs::path dir = c.out.empty() ? io::output_directory(fs::path("ocokit-out") / c.command) : c.out;
  fs::create_directories(dir);
  return dir;
}

json envelope(const ExperimentConfig& c) {
  const json cfg = to_json(c);
  return {{"version", kVersion}, {"config", cfg}, {"config_hash", io::config_hash(cfg)}};
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << text;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

// ---------------------------------------------------------------- oco

struct OcoProblem {
  ProximalSetup setup;
  PiecewiseQuadraticStream stream;
};

OcoProblem synthetic_stream(Regime regime, const std::string& domain, int T, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::string d = domain.empty() ? (regime == Regime::kNonsmooth ? "simplex" : "ball") : domain;
  ProximalSetup setup = d == "simplex" ? ProximalSetup::entropy_simplex(10) : ProximalSetup::euclidean_ball(5, 1.0);
  if (d != "simplex" && d != "ball") throw ConfigError("unknown domain: " + d + " (expected simplex or ball)");
  switch (regime) {
    case Regime::kNonsmooth:
      return {setup, streams::max_affine(rng, T, setup.dim(), 5)};
    case Regime::kStronglyConvex:
      if (d == "simplex") setup = ProximalSetup::euclidean_simplex(10);
      return {setup, streams::strongly_convex_max(rng, T, setup, 1.0, 3, 1.0)};
    case Regime::kSmooth:
      return {setup, streams::quadratic(rng, T, setup, 1.0)};
  }
  throw ConfigError("unknown regime");
}

OcoProblem load_stream(const ExperimentConfig& c, Regime regime, int T) {
  if (c.instance.empty()) return synthetic_stream(regime, c.domain, T, c.seed);
  auto inst = io::parse_stream_instance(io::read_json(c.instance));
  if (T > inst.stream.horizon()) {
    throw ConfigError("--T " + std::to_string(T) + " exceeds the " + std::to_string(inst.stream.horizon()) +
                      " terms of " + c.instance.string());
  }
  std::vector<PiecewiseQuadratic> terms(inst.stream.terms().begin(), inst.stream.terms().begin() + T);
  return {inst.setup, PiecewiseQuadraticStream(std::move(terms))};
}

int horizon_or_instance(const ExperimentConfig& c) {
  if (c.horizon > 0) return c.horizon;
  if (c.instance.empty()) return 256;
  return io::parse_stream_instance(io::read_json(c.instance)).stream.horizon();
}

int run_oco_command(const ExperimentConfig& c, std::ostream& log) {
  const Regime regime = parse_regime(c.regime);
  const int T = horizon_or_instance(c);
  const fs::path dir = prepare_out(c);
  const OcoProblem p = load_stream(c, regime, T);
  const OcoRun run = run_oco(regime, p.setup, p.stream);

  {
    std::ofstream out(dir / "trace.csv");
    io::write_trace_csv(out, run.trace);
  }
  if (c.dump_iterates) {
    std::ofstream out(dir / "iterates.csv");
    io::write_iterates_csv(out, run.trace);
  }
  json report = envelope(c);
  report["regret"] = to_json(run.report);
  report["max_step_residual"] = run.trace.max_residual();
  if (run.trace.mirror_prox) report["max_cancellation"] = run.trace.max_cancellation();
  Fnv1a h;
  hash_trace(h, run.trace);
  report["trace_hash"] = h.hex();

  bool bound_ok = run.report.realized_upper <= run.report.bound + 1e-6;
  if (c.bound_check) report["bound_check"] = bound_ok ? "pass" : "fail";

  if (c.rate_table) {
    const std::vector<int> hs{T, 2 * T, 4 * T, 8 * T};
    emit_rate_table(
        [&](int t) {
          const OcoProblem q = c.instance.empty() ? synthetic_stream(regime, c.domain, t, c.seed) : load_stream(c, regime, t);
          EngineOptions quiet;
          quiet.check_inequality = false;
          const OcoRun r = run_oco(regime, q.setup, q.stream, quiet);
          return std::pair{r.report.realized, r.report.bound};
        },
        hs, dir / "rate_table.csv");
    report["rate_table"] = "rate_table.csv";
  }
  io::write_json(dir / "report.json", report);

  std::ostringstream s;
  s << "oco " << to_string(regime) << " T=" << T << " dim=" << p.setup.dim() << '\n'
    << "realized " << fmt(run.report.realized) << "  bound " << fmt(run.report.bound) << "  slack "
    << fmt(run.report.slack()) << '\n'
    << "max step residual " << fmt(run.trace.max_residual()) << '\n';
  if (c.bound_check) s << "bound check " << (bound_ok ? "pass" : "FAIL") << '\n';
  write_text(dir / "summary.txt", s.str());
  log << s.str();
  return c.bound_check && !bound_ok ? kExitError : kExitOk;
}

// ---------------------------------------------------------------- ro

int run_ro_command(const ExperimentConfig& c, std::ostream& log) {
  const RobustInstance inst = io::parse_robust_instance(io::read_json(c.instance));
  std::mt19937_64 rng(c.seed);
  inst.validate_constants(rng);

  FeasibilityConfig fc;
  fc.eps = c.eps;
  fc.tau = c.tau;
  fc.horizon = c.horizon;
  fc.scheme = parse_scheme(c.scheme);
  fc.allow_doubling = c.doubling;
  const SchemeRun run = run_scheme(inst, fc);
  const fs::path dir = prepare_out(c);

  {
    std::ofstream out(dir / "trace.csv");
    out << "t,theta,active_constraint,max_value\n" << std::setprecision(17);
    for (int t = 1; t <= run.horizon; ++t) {
      const auto& x = run.xs[static_cast<size_t>(t - 1)];
      const auto& u = run.us[static_cast<size_t>(t - 1)];
      const Index i = argmax_constraint(inst, x, u);
      out << t << ',' << run.theta(t) << ',' << i << ',' << inst.value(i, x, u[static_cast<size_t>(i)]) << '\n';
    }
  }
  if (c.dump_iterates) {
    std::ofstream out(dir / "iterates.csv");
    out << 't';
    for (Index i = 0; i < inst.n(); ++i) out << ",x_" << i;
    out << '\n' << std::setprecision(17);
    for (size_t t = 0; t < run.xs.size(); ++t) {
      out << t + 1;
      for (Index i = 0; i < inst.n(); ++i) out << ',' << run.xs[t][i];
      out << '\n';
    }
  }

  const auto& cert = run.verdict.certificates;
  json report = envelope(c);
  report["verdict"] = to_string(run.verdict.outcome);
  report["scheme"] = to_string(fc.scheme);
  report["horizon"] = run.horizon;
  report["attempted_horizons"] = run.attempted_horizons;
  report["total_iterations"] = run.total_iterations;
  report["eps_circ"] = cert.eps_circ_upper;
  report["eps_bullet"] = cert.eps_bullet_upper;
  report["eps_bullet_form"] = cert.y_form ? "y" : "max";
  report["max_term"] = cert.max_term;
  report["u_regret"] = cert.u_regret;
  report["bounds"] = {{"eps_circ", run.bounds.circ}, {"eps_bullet", run.bounds.bullet}};
  report["certified"] = cert.certified;
  report["x_bar"] = io::to_json(run.verdict.x_bar);
  io::write_json(dir / "report.json", report);

  std::ostringstream s;
  s << "ro " << to_string(fc.scheme) << " eps=" << c.eps << " tau=" << c.tau << " T=" << run.horizon << '\n'
    << "verdict " << to_string(run.verdict.outcome) << '\n'
    << "eps_circ " << fmt(cert.eps_circ_upper) << " (bound " << fmt(run.bounds.circ) << ", budget "
    << fmt(c.tau * c.eps) << ")\n"
    << "eps_bullet " << fmt(cert.eps_bullet_upper) << " (bound " << fmt(run.bounds.bullet) << ", budget "
    << fmt((1 - c.tau) * c.eps) << ")\n"
    << "max term " << fmt(cert.max_term) << '\n';
  write_text(dir / "summary.txt", s.str());
  log << s.str();
  return run.verdict.outcome == Outcome::kInconclusive ? kExitInconclusive : kExitOk;
}

// ---------------------------------------------------------------- jeo

int run_jeo_command(const ExperimentConfig& c, std::ostream& log) {
  const io::JeoSpec spec = io::parse_jeo_instance(io::read_json(c.instance));
  const Regime regime = parse_regime(c.regime);
  EstimatorStream stream = [&] {
    if (c.stream == "file") return EstimatorStream::from_values(io::read_stream_file(c.stream_file));
    if (!spec.estimator) throw ConfigError("--stream from-g needs an \"estimator\" block in the instance");
    return EstimatorStream::from_g(*spec.estimator, *spec.u0);
  }();
  const JeoReport r = run_jeo(spec.instance, stream, regime, c.horizon);
  const fs::path dir = prepare_out(c);
  {
    std::ofstream out(dir / "trace.csv");
    io::write_jeo_trace_csv(out, r.trace);
  }
  if (c.dump_iterates) {
    std::ofstream out(dir / "iterates.csv");
    out << std::setprecision(17);
    for (size_t t = 0; t < r.xs.size(); ++t) {
      out << t + 1;
      for (Index i = 0; i < r.xs[t].size(); ++i) out << ',' << r.xs[t][i];
      out << '\n';
    }
  }
  json report = envelope(c);
  report["jeo"] = to_json(r);
  report["x_bar"] = io::to_json(r.x_bar);
  io::write_json(dir / "report.json", report);

  std::ostringstream s;
  s << "jeo " << to_string(regime) << " T=" << r.horizon << '\n'
    << "f(xbar, u_T) " << fmt(r.value_at_estimate) << '\n'
    << "regret " << fmt(r.regret) << " (bound " << fmt(r.regret_bound) << ")\n";
  if (r.gap) {
    s << "gap " << fmt(*r.gap) << "  data penalty " << fmt(*r.data_penalty) << "  eval penalty "
      << fmt(*r.eval_penalty) << "  slack " << fmt(*r.decomposition_slack) << '\n';
  }
  write_text(dir / "summary.txt", s.str());
  log << s.str();
  return kExitOk;
}

// ---------------------------------------------------------------- verify

int run_verify_command(const ExperimentConfig& c, std::ostream& log) {
  const VerifyResult v = run_verify(c.seed);
  const fs::path dir = prepare_out(c);
  json report = envelope(c);
  report["trace_hash"] = v.trace_hash;
  report["checks"] = json::array();
  std::ostringstream s;
  std::ostringstream trace;
  trace << "check,pass,detail\n";
  for (const auto& ch : v.checks) {
    report["checks"].push_back({{"name", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
    s << (ch.pass ? "PASS " : "FAIL ") << ch.name << "  " << ch.detail << '\n';
    trace << ch.name << ',' << (ch.pass ? 1 : 0) << ",\"" << ch.detail << "\"\n";
  }
  s << "trace hash " << v.trace_hash << '\n';
  report["ok"] = v.ok();
  io::write_json(dir / "report.json", report);
  write_text(dir / "trace.csv", trace.str());
  write_text(dir / "summary.txt", s.str());
  log << s.str();
  return v.ok() ? kExitOk : kExitError;
}

}  // namespace

void validate(const ExperimentConfig& c) {
  require(c.command == "oco" || c.command == "ro" || c.command == "jeo" || c.command == "verify",
          "unknown command: " + c.command);
  if (!c.instance.empty()) require(fs::exists(c.instance), "instance file not found: " + c.instance.string());
  require(c.horizon >= 0, "horizon must be positive");
  if (c.command == "oco") parse_regime(c.regime);
  if (c.command == "ro") {
    require(!c.instance.empty(), "ro solve needs --instance");
    require(c.eps > 0.0, "--eps must be positive");
    require(c.tau > 0.0 && c.tau < 1.0, "--tau must lie in (0, 1)");
    parse_scheme(c.scheme);
  }
  if (c.command == "jeo") {
    require(!c.instance.empty(), "jeo run needs --instance");
    require(c.horizon > 0, "jeo run needs a positive --horizon");
    parse_regime(c.regime);
    require(c.stream == "from-g" || c.stream == "file", "--stream must be from-g or file");
    if (c.stream == "file") {
      require(!c.stream_file.empty(), "--stream file needs --stream-file");
      require(fs::exists(c.stream_file), "stream file not found: " + c.stream_file.string());
    }
  }
}

nlohmann::json to_json(const ExperimentConfig& c) {
  json j{{"command", c.command}, {"seed", c.seed}};
  if (!c.instance.empty()) {
    j["instance"] = c.instance.filename().string();
    j["instance_hash"] = io::config_hash(io::read_json(c.instance));
  }
  if (c.command == "oco") {
    j["regime"] = c.regime;
    j["T"] = c.horizon;
    j["domain"] = c.domain;
    j["rate_table"] = c.rate_table;
  } else if (c.command == "ro") {
    j["scheme"] = c.scheme;
    j["eps"] = c.eps;
    j["tau"] = c.tau;
    j["horizon"] = c.horizon;
    j["doubling"] = c.doubling;
  } else if (c.command == "jeo") {
    j["regime"] = c.regime;
    j["horizon"] = c.horizon;
    j["stream"] = c.stream;
    if (c.stream == "file") {
      std::ifstream in(c.stream_file, std::ios::binary);
      std::ostringstream bytes;
      bytes << in.rdbuf();
      Fnv1a h;
      h.add(bytes.str());
      j["stream_hash"] = h.hex();
    }
  }
  return j;
}

int run_experiment(const ExperimentConfig& c, std::ostream& log) {
  validate(c);
  if (c.command == "oco") return run_oco_command(c, log);
  if (c.command == "ro") return run_ro_command(c, log);
  if (c.command == "jeo") return run_jeo_command(c, log);
  return run_verify_command(c, log);
}

std::vector<RateRow> emit_rate_table(const std::function<std::pair<double, double>(int)>& run,
                                     const std::vector<int>& horizons, const fs::path& file) {
  if (horizons.size() < 3) throw ConfigError("a rate table needs at least three horizons");
  std::vector<std::future<std::pair<double, double>>> jobs;
  jobs.reserve(horizons.size());
  for (int T : horizons) jobs.push_back(std::async(std::launch::async, run, T));
  std::vector<RateRow> rows;
  for (size_t i = 0; i < horizons.size(); ++i) {
    const auto [realized, bound] = jobs[i].get();
    RateRow r{horizons[i], realized, bound, std::numeric_limits<double>::quiet_NaN()};
    if (i > 0) r.ratio_to_prev = realized / rows.back().realized;
    rows.push_back(r);
  }
  if (!file.empty()) {
    std::ofstream out(file);
    out << "T,realized,bound,ratio_to_prev\n" << std::setprecision(10);
    for (const auto& r : rows) {
      out << r.T << ',' << r.realized << ',' << r.bound << ',';
      if (!std::isnan(r.ratio_to_prev)) out << r.ratio_to_prev;
      out << '\n';
    }
  }
  return rows;
}

bool VerifyResult::ok() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return !checks.empty();
}

void hash_trace(Fnv1a& h, const RunTrace& trace) {
  for (const auto& s : trace.steps) {
    h.add(static_cast<std::int64_t>(s.t));
    h.add(s.gamma);
    h.add(s.theta);
    h.add(s.xi_dual_norm);
    h.add(s.step_residual);
  }
  for (const auto& z : trace.points) h.add(z);
  for (const auto& v : trace.leaders) h.add(v);
}

}  // namespace ocokit::cli
