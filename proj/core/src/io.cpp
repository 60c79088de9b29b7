#include "ocokit/io.hpp"

#include "ocokit/errors.hpp"
#include "ocokit/hash.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace ocokit::io {

namespace {

const json& field(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) throw ParseError((path.empty() ? "document" : path) + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError((path.empty() ? key : path + "." + key) + ": missing");
  return *it;
}

const json* optional_field(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(path + ": must be finite");
  return v;
}

long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError(path + ": expected an integer");
  return j.get<long>();
}

std::optional<double> optional_number(const json& j, const std::string& path, const char* key) {
  const json* v = optional_field(j, key);
  if (!v) return std::nullopt;
  return number(*v, path + "." + key);
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path + ": expected a string");
  return j.get<std::string>();
}

void expect_kind(const json& j, const char* kind) {
  const json* k = optional_field(j, "kind");
  if (k && text(*k, "kind") != kind) {
    throw ParseError(std::string("kind: expected \"") + kind + "\", got \"" + k->get<std::string>() + "\"");
  }
}

template <class F>
auto wrap(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setw(2) << j << '\n';
}

Vector parse_vector(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Matrix parse_matrix(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected an array of rows");
  if (j.empty()) return Matrix(0, 0);
  const size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (size_t r = 0; r < j.size(); ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array()) throw ParseError(rp + ": expected an array");
    if (j[r].size() != cols) throw ParseError(rp + ": expected " + std::to_string(cols) + " entries");
    for (size_t c = 0; c < cols; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = number(j[r][c], rp + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

json to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) rows.push_back(to_json(Vector(m.row(r).transpose())));
  return rows;
}

ProximalSetup parse_domain(const json& j, const std::string& path) {
  const std::string type = text(field(j, path, "type"), path + ".type");
  return wrap(path, [&]() -> ProximalSetup {
    if (type == "simplex") {
      const long n = integer(field(j, path, "dim"), path + ".dim");
      if (n < 1) throw ParseError(path + ".dim: must be positive");
      const json* dgf = optional_field(j, "dgf");
      const std::string g = dgf ? text(*dgf, path + ".dgf") : "entropy";
      if (g == "entropy") return ProximalSetup::entropy_simplex(n);
      if (g == "euclidean") return ProximalSetup::euclidean_simplex(n);
      throw ParseError(path + ".dgf: expected \"entropy\" or \"euclidean\"");
    }
    if (type == "ball") {
      const double r = number(field(j, path, "radius"), path + ".radius");
      if (const json* c = optional_field(j, "center")) return ProximalSetup::euclidean_ball(parse_vector(*c, path + ".center"), r);
      const long n = integer(field(j, path, "dim"), path + ".dim");
      return ProximalSetup::euclidean_ball(n, r);
    }
    if (type == "box") {
      return ProximalSetup::euclidean_box(parse_vector(field(j, path, "lower"), path + ".lower"),
                                          parse_vector(field(j, path, "upper"), path + ".upper"));
    }
    throw ParseError(path + ".type: unknown domain \"" + type + "\"");
  });
}

json to_json(const ProximalSetup& s) {
  switch (s.kind()) {
    case DomainKind::kSimplex:
      return {{"type", "simplex"}, {"dim", s.dim()}, {"dgf", s.generator() == Generator::kEntropy ? "entropy" : "euclidean"}};
    case DomainKind::kBall:
      return {{"type", "ball"}, {"radius", s.radius()}, {"center", to_json(s.center())}};
    case DomainKind::kBox:
      return {{"type", "box"}, {"lower", to_json(s.lower())}, {"upper", to_json(s.upper())}};
    case DomainKind::kProduct:
      return {{"type", "product"},
              {"blocks", {to_json(s.block(0)), to_json(s.block(1))}},
              {"beta", {s.beta(0), s.beta(1)}}};
  }
  return {};
}

// ---------------------------------------------------------------- robust

RobustInstance parse_robust_instance(const json& j) {
  expect_kind(j, "robust");
  const long m = integer(field(j, "", "m"), "m");
  const long n = integer(field(j, "", "n"), "n");
  if (m < 1) throw ParseError("m: must be positive");
  if (n < 1) throw ParseError("n: must be positive");
  ProximalSetup X = parse_domain(field(j, "", "x_domain"), "x_domain");
  if (X.dim() != n) throw ParseError("x_domain: dimension " + std::to_string(X.dim()) + " differs from n");

  const json& ud = field(j, "", "u_domains");
  const json& cs = field(j, "", "constraints");
  if (!ud.is_array() || static_cast<long>(ud.size()) != m) throw ParseError("u_domains: expected m entries");
  if (!cs.is_array() || static_cast<long>(cs.size()) != m) throw ParseError("constraints: expected m entries");
  std::vector<ProximalSetup> Us;
  std::vector<RobustConstraint> cons;
  for (long i = 0; i < m; ++i) {
    const std::string up = "u_domains[" + std::to_string(i) + "]";
    Us.push_back(parse_domain(ud[static_cast<size_t>(i)], up));
    const std::string cp = "constraints[" + std::to_string(i) + "]";
    const json& c = cs[static_cast<size_t>(i)];
    RobustConstraint rc;
    rc.A = parse_matrix(field(c, cp, "A"), cp + ".A");
    rc.c = parse_vector(field(c, cp, "c"), cp + ".c");
    rc.b = optional_number(c, cp, "b").value_or(0.0);
    if (const json* s = optional_field(c, "slopes")) {
      rc.slopes = parse_matrix(*s, cp + ".slopes");
      rc.offsets = parse_vector(field(c, cp, "offsets"), cp + ".offsets");
    } else {
      rc.slopes.resize(0, n);
    }
    if (rc.A.rows() != Us.back().dim() || rc.A.cols() != n) {
      throw ParseError(cp + ".A: expected " + std::to_string(Us.back().dim()) + " x " + std::to_string(n));
    }
    cons.push_back(std::move(rc));
  }
  const json& curv = field(j, "", "curvature");
  const double ax = number(field(curv, "curvature", "x"), "curvature.x");
  const double au = number(field(curv, "curvature", "u"), "curvature.u");

  const json& k = field(j, "", "constants");
  RobustConstants rk;
  rk.G_X = number(field(k, "constants", "G_X"), "constants.G_X");
  rk.G_U = number(field(k, "constants", "G_U"), "constants.G_U");
  rk.alpha_X = optional_number(k, "constants", "alpha_X");
  rk.alpha_U = optional_number(k, "constants", "alpha_U");
  rk.L_X = optional_number(k, "constants", "L_X");
  rk.L_U = optional_number(k, "constants", "L_U");
  return wrap("instance", [&] { return RobustInstance(X, Us, cons, ax, au, rk); });
}

json to_json(const RobustInstance& inst) {
  json j;
  j["kind"] = "robust";
  j["m"] = inst.m();
  j["n"] = inst.n();
  j["x_domain"] = to_json(inst.x_setup());
  j["u_domains"] = json::array();
  j["constraints"] = json::array();
  for (Index i = 0; i < inst.m(); ++i) {
    j["u_domains"].push_back(to_json(inst.u_setup(i)));
    const auto& c = inst.constraint(i);
    json cj{{"A", to_json(c.A)}, {"c", to_json(c.c)}, {"b", c.b}};
    if (c.slopes.rows() > 0) {
      cj["slopes"] = to_json(c.slopes);
      cj["offsets"] = to_json(c.offsets);
    }
    j["constraints"].push_back(cj);
  }
  j["curvature"] = {{"x", inst.alpha_x()}, {"u", inst.alpha_u()}};
  const auto& k = inst.constants();
  json kj{{"G_X", k.G_X}, {"G_U", k.G_U}};
  if (k.alpha_X) kj["alpha_X"] = *k.alpha_X;
  if (k.alpha_U) kj["alpha_U"] = *k.alpha_U;
  if (k.L_X) kj["L_X"] = *k.L_X;
  if (k.L_U) kj["L_U"] = *k.L_U;
  j["constants"] = kj;
  return j;
}

// ---------------------------------------------------------------- streams

StreamInstance parse_stream_instance(const json& j) {
  expect_kind(j, "oco");
  ProximalSetup setup = parse_domain(field(j, "", "domain"), "domain");
  const json& ts = field(j, "", "terms");
  if (!ts.is_array() || ts.empty()) throw ParseError("terms: expected a nonempty array");
  std::vector<PiecewiseQuadratic> terms;
  for (size_t t = 0; t < ts.size(); ++t) {
    const std::string p = "terms[" + std::to_string(t) + "]";
    const json& tj = ts[t];
    PiecewiseQuadratic q;
    q.rho = optional_number(tj, p, "rho").value_or(0.0);
    q.anchor = optional_field(tj, "anchor") ? parse_vector(tj["anchor"], p + ".anchor") : Vector::Zero(setup.dim());
    q.slopes = parse_matrix(field(tj, p, "slopes"), p + ".slopes");
    q.offsets = optional_field(tj, "offsets") ? parse_vector(tj["offsets"], p + ".offsets")
                                              : Vector::Zero(q.slopes.rows());
    if (q.slopes.cols() != setup.dim() || q.anchor.size() != setup.dim()) {
      throw ParseError(p + ": dimension differs from the domain (" + std::to_string(setup.dim()) + ")");
    }
    if (q.offsets.size() != q.slopes.rows() || q.slopes.rows() == 0) throw ParseError(p + ".offsets: one per slope row");
    if (q.rho < 0) throw ParseError(p + ".rho: must be nonnegative");
    terms.push_back(std::move(q));
  }
  return {setup, PiecewiseQuadraticStream(std::move(terms))};
}

json to_json(const ProximalSetup& setup, const PiecewiseQuadraticStream& stream) {
  json j;
  j["kind"] = "oco";
  j["domain"] = to_json(setup);
  j["terms"] = json::array();
  for (const auto& q : stream.terms()) {
    j["terms"].push_back({{"rho", q.rho}, {"anchor", to_json(q.anchor)}, {"slopes", to_json(q.slopes)},
                          {"offsets", to_json(q.offsets)}});
  }
  return j;
}

// ---------------------------------------------------------------- jeo

JeoSpec parse_jeo_instance(const json& j) {
  expect_kind(j, "jeo");
  ProximalSetup X = parse_domain(field(j, "", "x_domain"), "x_domain");
  const json& o = field(j, "", "objective");
  JeoObjective f;
  f.rho = optional_number(o, "objective", "rho").value_or(0.0);
  f.P = parse_matrix(field(o, "objective", "P"), "objective.P");
  f.q = optional_field(o, "q") ? parse_vector(o["q"], "objective.q") : Vector::Zero(f.P.rows());
  if (const json* s = optional_field(o, "slopes")) {
    f.slopes = parse_matrix(*s, "objective.slopes");
    f.data = parse_matrix(field(o, "objective", "data"), "objective.data");
    f.offsets = parse_vector(field(o, "objective", "offsets"), "objective.offsets");
  } else {
    f.slopes.resize(0, f.P.rows());
    f.data.resize(0, f.P.cols());
  }
  const json& k = field(j, "", "constants");
  JeoConstants c;
  c.G_X = number(field(k, "constants", "G_X"), "constants.G_X");
  c.alpha_X = optional_number(k, "constants", "alpha_X");
  c.L_X = optional_number(k, "constants", "L_X");
  c.G_U = optional_number(k, "constants", "G_U");
  c.L_U = optional_number(k, "constants", "L_U");
  std::optional<Vector> u_star;
  if (const json* u = optional_field(j, "u_star")) u_star = parse_vector(*u, "u_star");

  JeoSpec spec{wrap("instance", [&] { return JeoInstance(X, f, c, u_star); }), std::nullopt, std::nullopt};
  if (const json* e = optional_field(j, "estimator")) {
    Matrix H = parse_matrix(field(*e, "estimator", "H"), "estimator.H");
    Vector target = parse_vector(field(*e, "estimator", "target"), "estimator.target");
    spec.u0 = parse_vector(field(*e, "estimator", "u0"), "estimator.u0");
    if (target.size() != f.dim_u() || spec.u0->size() != f.dim_u()) {
      throw ParseError("estimator: target and u0 must have " + std::to_string(f.dim_u()) + " entries");
    }
    spec.estimator = wrap("estimator", [&] { return EstimationObjective::quadratic(std::move(H), std::move(target)); });
  }
  return spec;
}

std::vector<Vector> read_stream_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  std::vector<Vector> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        size_t used = 0;
        vals.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw ParseError(path.string() + ":" + std::to_string(lineno) + ": not a number: " + cell);
      }
    }
    if (!out.empty() && static_cast<Index>(vals.size()) != out.front().size()) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": inconsistent width");
    }
    out.emplace_back(Eigen::Map<Vector>(vals.data(), static_cast<Index>(vals.size())));
  }
  if (out.empty()) throw ParseError(path.string() + ": no estimates");
  return out;
}

// ---------------------------------------------------------------- csv

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "t,gamma,theta,xi_dual_norm,step_residual\n" << std::setprecision(17);
  for (const auto& s : trace.steps) {
    out << s.t << ',' << s.gamma << ',' << s.theta << ',' << s.xi_dual_norm << ',' << s.step_residual << '\n';
  }
}

void write_iterates_csv(std::ostream& out, const RunTrace& trace) {
  if (trace.points.empty()) return;
  const Index n = trace.points.front().size();
  out << 't';
  for (Index i = 0; i < n; ++i) out << ",z_" << i;
  if (trace.mirror_prox) {
    for (Index i = 0; i < n; ++i) out << ",v_" << i;
  }
  out << '\n' << std::setprecision(17);
  for (size_t t = 0; t < trace.points.size(); ++t) {
    out << t + 1;
    for (Index i = 0; i < n; ++i) out << ',' << trace.points[t][i];
    if (trace.mirror_prox) {
      for (Index i = 0; i < n; ++i) out << ',' << trace.leaders[t][i];
    }
    out << '\n';
  }
}

void write_jeo_trace_csv(std::ostream& out, const std::vector<JeoStep>& steps) {
  out << "t,u_dist,gap_partial,regret_partial\n" << std::setprecision(17);
  for (const auto& s : steps) out << s.t << ',' << s.u_dist << ',' << s.gap_partial << ',' << s.regret_partial << '\n';
}

std::string config_hash(const json& config) {
  Fnv1a h;
  h.add(config.dump());
  return h.hex();
}

std::filesystem::path output_directory(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv("OCOKIT_OUT"); env && *env) return env;
  return fallback;
}

}  // namespace ocokit::io
