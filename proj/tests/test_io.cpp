#include "support/reference.hpp"

#include <ocokit/errors.hpp>
#include <ocokit/io.hpp>
#include <ocokit/regret.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <functional>
#include <fstream>
#include <sstream>

using namespace ocokit;
using nlohmann::json;

namespace {

const std::filesystem::path kData = OCOKIT_TEST_DATA_DIR;

std::string parse_error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(ParseDomain, AllKinds) {
  const auto s = io::parse_domain(json{{"type", "simplex"}, {"dim", 4}, {"dgf", "entropy"}});
  EXPECT_EQ(s.kind(), DomainKind::kSimplex);
  EXPECT_EQ(s.dim(), 4);
  const auto b = io::parse_domain(json{{"type", "ball"}, {"radius", 2.0}, {"dim", 3}});
  EXPECT_EQ(b.kind(), DomainKind::kBall);
  EXPECT_DOUBLE_EQ(b.radius(), 2.0);
  const auto x = io::parse_domain(json{{"type", "box"}, {"lower", {0, 0}}, {"upper", {1, 2}}});
  EXPECT_EQ(x.kind(), DomainKind::kBox);
  EXPECT_DOUBLE_EQ(x.upper()[1], 2.0);
}

TEST(ParseDomain, ErrorsNameTheField) {
  EXPECT_NE(parse_error_of([] { io::parse_domain(json{{"type", "cone"}}); }).find("domain.type"), std::string::npos);
  EXPECT_NE(parse_error_of([] { io::parse_domain(json{{"type", "ball"}, {"dim", 2}}, "x_domain"); })
                .find("x_domain.radius"),
            std::string::npos);
  EXPECT_NE(parse_error_of([] { io::parse_domain(json{{"type", "simplex"}, {"dim", 0}}); }).find("domain.dim"),
            std::string::npos);
}

TEST(ParseDomain, RoundTrip) {
  Vector lo(2), hi(2), c(3);
  lo << -1, 0;
  hi << 1, 3;
  c << 0.5, 0, -0.5;
  for (const auto& s : {ProximalSetup::entropy_simplex(5), ProximalSetup::euclidean_simplex(3),
                        ProximalSetup::euclidean_ball(c, 0.7), ProximalSetup::euclidean_box(lo, hi)}) {
    const auto back = io::parse_domain(io::to_json(s));
    EXPECT_EQ(back.kind(), s.kind());
    EXPECT_EQ(back.dim(), s.dim());
    EXPECT_DOUBLE_EQ(back.set_width(), s.set_width());
    EXPECT_EQ(io::to_json(back), io::to_json(s));
  }
}

TEST(ParseRobust, BundledInstancesLoad) {
  for (const char* f : {"planted_feasible.json", "planted_infeasible.json"}) {
    const auto inst = io::parse_robust_instance(io::read_json(kData / "instances" / f));
    EXPECT_EQ(inst.m(), 3);
    EXPECT_EQ(inst.n(), 5);
  }
}

TEST(ParseRobust, RoundTrip) {
  const json j = io::read_json(kData / "instances" / "planted_feasible.json");
  const auto inst = io::parse_robust_instance(j);
  const json again = io::to_json(io::parse_robust_instance(io::to_json(inst)));
  EXPECT_EQ(again, io::to_json(inst));
  EXPECT_EQ(io::config_hash(again), io::config_hash(io::to_json(inst)));
}

TEST(ParseRobust, MatrixShapeErrorNamesConstraint) {
  json j = io::read_json(kData / "instances" / "planted_feasible.json");
  j["constraints"][1]["A"] = json::array({json::array({1.0, 2.0})});
  const std::string msg = parse_error_of([&] { io::parse_robust_instance(j); });
  EXPECT_NE(msg.find("constraints[1].A"), std::string::npos) << msg;
}

TEST(ParseRobust, MissingAndMistypedFields) {
  json j = io::read_json(kData / "instances" / "planted_feasible.json");
  json missing = j;
  missing["constants"].erase("G_X");
  EXPECT_NE(parse_error_of([&] { io::parse_robust_instance(missing); }).find("constants.G_X"), std::string::npos);
  json wrong_kind = j;
  wrong_kind["kind"] = "oco";
  EXPECT_NE(parse_error_of([&] { io::parse_robust_instance(wrong_kind); }).find("kind"), std::string::npos);
  json ragged = j;
  ragged["constraints"][0]["A"][2] = json::array({1.0});
  EXPECT_NE(parse_error_of([&] { io::parse_robust_instance(ragged); }).find("constraints[0].A[2]"),
            std::string::npos);
  json bad_number = j;
  bad_number["constraints"][2]["c"][0] = "x";
  EXPECT_NE(parse_error_of([&] { io::parse_robust_instance(bad_number); }).find("constraints[2].c[0]"),
            std::string::npos);
  json no_m = j;
  no_m.erase("m");
  EXPECT_EQ(parse_error_of([&] { io::parse_robust_instance(no_m); }), "m: missing");
}

TEST(ParseStream, RoundTrip) {
  std::mt19937_64 rng(1);
  const auto setup = ProximalSetup::euclidean_ball(3, 1.0);
  const auto stream = streams::strongly_convex_max(rng, 7, setup, 1.0, 2, 1.0);
  const json j = io::to_json(setup, stream);
  const auto back = io::parse_stream_instance(j);
  ASSERT_EQ(back.stream.horizon(), 7);
  for (int t = 0; t < 7; ++t) {
    const Vector x = setup.sample(rng);
    EXPECT_EQ(back.stream.terms()[static_cast<size_t>(t)].value(x), stream.terms()[static_cast<size_t>(t)].value(x));
  }
  EXPECT_EQ(io::to_json(back.setup, back.stream), j);
}

TEST(ParseStream, TermDimensionError) {
  json j = io::read_json(kData / "instances" / "quadratic_stream.json");
  j["terms"][3]["anchor"] = json::array({0.0});
  EXPECT_NE(parse_error_of([&] { io::parse_stream_instance(j); }).find("terms[3]"), std::string::npos);
}

TEST(ParseJeo, BundledInstance) {
  const auto spec = io::parse_jeo_instance(io::read_json(kData / "instances" / "jeo_tracking.json"));
  ASSERT_TRUE(spec.estimator.has_value());
  ASSERT_TRUE(spec.u0.has_value());
  EXPECT_EQ(spec.u0->size(), 4);
}

TEST(ReadJson, MissingAndMalformedFiles) {
  EXPECT_THROW(io::read_json("/nonexistent/instance.json"), ParseError);
  const auto tmp = std::filesystem::temp_directory_path() / "ocokit_bad.json";
  std::ofstream(tmp) << "{\"kind\": ";
  EXPECT_NE(parse_error_of([&] { io::read_json(tmp); }).find("ocokit_bad.json"), std::string::npos);
  std::filesystem::remove(tmp);
}

TEST(StreamFile, ParsesLinesAndRejectsRagged) {
  const auto tmp = std::filesystem::temp_directory_path() / "ocokit_stream.csv";
  std::ofstream(tmp) << "0.1,0.2\n0.3,0.4\n\n0.5,0.6\n";
  const auto v = io::read_stream_file(tmp);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_DOUBLE_EQ(v[2][1], 0.6);
  std::ofstream(tmp) << "0.1,0.2\n0.3\n";
  EXPECT_THROW(io::read_stream_file(tmp), ParseError);
  std::filesystem::remove(tmp);
}

TEST(ConfigHash, StableAndKeyOrderInsensitive) {
  const json a = json::parse(R"({"seed": 3, "regime": "smooth", "T": 10})");
  const json b = json::parse(R"({"T": 10, "regime": "smooth", "seed": 3})");
  EXPECT_EQ(io::config_hash(a), io::config_hash(b));
  EXPECT_EQ(io::config_hash(a).size(), 16u);
  json c = a;
  c["seed"] = 4;
  EXPECT_NE(io::config_hash(a), io::config_hash(c));
}

TEST(OutputDirectory, EnvironmentOverride) {
  ::unsetenv("OCOKIT_OUT");
  EXPECT_EQ(io::output_directory("fallback"), std::filesystem::path("fallback"));
  ::setenv("OCOKIT_OUT", "/tmp/somewhere", 1);
  EXPECT_EQ(io::output_directory("fallback"), std::filesystem::path("/tmp/somewhere"));
  ::unsetenv("OCOKIT_OUT");
}

TEST(Csv, TraceHeaders) {
  std::mt19937_64 rng(2);
  const auto s = ProximalSetup::entropy_simplex(3);
  const auto run = run_oco(Regime::kNonsmooth, s, streams::max_affine(rng, 4, 3, 2));
  std::ostringstream trace, iterates;
  io::write_trace_csv(trace, run.trace);
  io::write_iterates_csv(iterates, run.trace);
  std::string line;
  std::istringstream t(trace.str());
  std::getline(t, line);
  EXPECT_EQ(line, "t,gamma,theta,xi_dual_norm,step_residual");
  int rows = 0;
  while (std::getline(t, line)) ++rows;
  EXPECT_EQ(rows, 4);
  std::istringstream it(iterates.str());
  std::getline(it, line);
  EXPECT_EQ(line.rfind("t,z_0,z_1,z_2", 0), 0u) << line;

  std::ostringstream jeo;
  io::write_jeo_trace_csv(jeo, {});
  EXPECT_EQ(jeo.str(), "t,u_dist,gap_partial,regret_partial\n");
}
