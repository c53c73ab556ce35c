#include <string>

#include "doctest.h"
#include "relaxbc/compat.hpp"
#include "relaxbc/json_io.hpp"

using namespace relaxbc;

namespace {

SpectralModel p1() {
  Vec lambda(2), a(2);
  lambda << 1.0, -1.0;
  a << 4.0, 4.0;
  return build_model(Mat::Identity(2, 2), lambda, a);
}

template <typename F>
errc thrown_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return errc::ok;
}

}  // namespace

TEST_CASE("model document") {
  const Json j = parse_json_text(R"({
    "T": [[1.0, 1.0], [0.0, 1.0]],
    "lambda": [1.0, -1.0],
    "a": [5.0, 3.0]
  })");
  const SpectralModel m = model_from_json(j);
  CHECK(m.n == 2);
  CHECK(m.l == 1);
  CHECK(m.F(0, 1) == doctest::Approx(-2.0));  // T diag(1,-1) T^-1 upper entry

  SUBCASE("round-trip preserves the spectral data exactly") {
    const SpectralModel back = model_from_json(parse_json_text(to_json(m).dump()));
    CHECK((back.T - m.T).norm() == 0.0);
    CHECK((back.lambda - m.lambda).norm() == 0.0);
    CHECK((back.a - m.a).norm() == 0.0);
  }

  SUBCASE("model validation keeps its own error codes") {
    Json bad = j;
    bad["lambda"] = Json::parse("[1.0, 0.0]");
    CHECK(thrown_code([&] { model_from_json(bad); }) == errc::non_characteristic);
  }

  SUBCASE("unknown and missing keys are schema errors") {
    Json extra = j;
    extra["Q"] = 1;
    CHECK(thrown_code([&] { model_from_json(extra); }) == errc::config_error);
    Json missing = j;
    missing.erase("a");
    CHECK(thrown_code([&] { model_from_json(missing); }) == errc::config_error);
  }

  SUBCASE("ragged matrix rows are rejected") {
    CHECK(thrown_code([&] {
            mat_from_json(Json::parse("[[1.0, 2.0], [3.0]]"), "T");
          }) == errc::config_error);
  }
}

TEST_CASE("malformed text reports line and column") {
  try {
    parse_json_text("{\n  \"T\": [[1,\n}");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::config_error);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("signals and profiles round-trip with defaults") {
  const Json sj = parse_json_text(R"([
    [{"poly": [0.0, 2.0], "rate": -1.0}],
    [{"poly": [1.0], "freq": 3.0, "phase": 0.5}, {"poly": [0.5]}]
  ])");
  const SmoothSignal s = signal_from_json(sj, "sig");
  CHECK(s.dim() == 2);
  CHECK(s.terms(0)[0].phase == 0.0);  // defaulted
  const SmoothSignal s2 = signal_from_json(parse_json_text(to_json(s).dump()), "sig");
  for (double t : {0.0, 0.3, 1.7}) {
    CHECK(s2.eval(0, t) == s.eval(0, t));
    CHECK(s2.eval(1, t) == s.eval(1, t));
  }

  SmoothProfile u0 = SmoothProfile::gaussian_bump(2, 0, 0.8, 3.0, 6.0);
  u0 += SmoothProfile::gaussian_bump(2, 1, -0.4, 2.5, 2.0);
  const SmoothProfile u2 = profile_from_json(parse_json_text(to_json(u0).dump()), "u0");
  for (double x : {0.0, 2.5, 3.1}) {
    CHECK(u2.eval(0, x) == u0.eval(0, x));
    CHECK(u2.eval(1, x) == u0.eval(1, x));
  }
  CHECK(u2.x_max() == u0.x_max());

  CHECK(thrown_code([&] {
          profile_from_json(parse_json_text(R"([[{"poly": [1.0], "beta": -2.0}]])"), "u0");
        }) == errc::config_error);
  CHECK(thrown_code([&] {
          signal_from_json(parse_json_text(R"([[{"poly": [1.0], "width": 2}]])"), "sig");
        }) == errc::config_error);
}

TEST_CASE("constructed boundary condition round-trips whole") {
  const SpectralModel m = p1();
  GivenBoundaryCondition g;
  g.Bhat = Mat(1, 2);
  g.Bhat << 1.0, 1.0;
  g.bhat = SmoothSignal::zero(1);
  PresetParams params;
  params.Bu11t = Mat::Ones(1, 1);
  ConstructedBC bc = preset_bc(m, g, PresetFamily::gen_czero, params);
  attach_compatible_data(m, &bc, SmoothProfile::gaussian_bump(2, 0, 0.7, 3.0, 4.0));

  const ConstructedBC back = bc_from_json(parse_json_text(to_json(bc).dump()));
  CHECK(back.family == bc.family);
  CHECK((back.Bu - bc.Bu).norm() == 0.0);
  CHECK((back.Bp - bc.Bp).norm() == 0.0);
  CHECK((back.H - bc.H).norm() == 0.0);
  CHECK((back.Z - bc.Z).norm() == 0.0);
  CHECK((back.Bbar - bc.Bbar).norm() == 0.0);
  CHECK(back.Ctilde.rows() == bc.Ctilde.rows());
  for (double t : {0.0, 0.4, 1.1}) {
    CHECK((back.b0(t) - bc.b0(t)).norm() == 0.0);
    CHECK((back.b1(t) - bc.b1(t)).norm() == 0.0);
    CHECK((back.b2(t) - bc.b2(t)).norm() == 0.0);
    CHECK((back.J(t) - bc.J(t)).norm() == 0.0);
  }
  CHECK(back.warnings == bc.warnings);
}

TEST_CASE("report serializations carry the verdict fields") {
  const SpectralModel m = p1();
  GivenBoundaryCondition g;
  g.Bhat = Mat(1, 2);
  g.Bhat << 1.0, 1.0;
  g.bhat = SmoothSignal::zero(1);
  PresetParams params;
  params.Bu11t = Mat::Ones(1, 1);
  const ConstructedBC bc = preset_bc(m, g, PresetFamily::gen_czero, params);

  SamplingConfig quick;
  quick.n_mu = 16;
  quick.n_psi = 17;
  quick.polish_rounds = 10;
  const CertifyReport rep = certify(m, bc.Bu, bc.Bp, quick);
  const Json j = to_json(rep);
  CHECK(j["verdict"] == rep.verdict);
  CHECK(j["c_hat"].get<double>() == rep.c_hat);
  CHECK(j["argmin"]["eta"].get<double>() == rep.argmin.eta);
  CHECK(j["c_by_delta"].size() == quick.deltas.size());
  CHECK(j["samples_used"].get<long>() == rep.samples_used);

  ConstructedBC full = bc;
  const SmoothProfile u0 = SmoothProfile::gaussian_bump(2, 0, 0.7, 3.0, 4.0);
  attach_compatible_data(m, &full, u0);
  Vec eps(3);
  eps << 1.0, 1e-2, 1e-4;
  const CompatibilityReport comp = verify_relaxation_compat(m, g, full, u0, eps);
  const Json cj = to_json(comp);
  CHECK(cj["max_residual"].get<double>() == comp.max_residual);
  CHECK(cj["assembled"].size() == 3);  // one row per eps sample
  CHECK(cj["given_compat"].size() == 4);
}

TEST_CASE("solver and sampling configs parse with defaults") {
  const Grid1D g = grid_from_json(parse_json_text(R"({"X": 10.0, "N": 400})"), "grid");
  CHECK(g.X == 10.0);
  CHECK(g.N == 400);
  CHECK(g.cfl == 0.8);
  CHECK(g.t_star == 1.0);

  const SolverOptions o = solver_options_from_json(
      parse_json_text(R"({"order": 1, "relaxation": "projection"})"), "solver");
  CHECK(o.order == 1);
  CHECK(o.relaxation == RelaxationMode::projection);
  CHECK(o.transport);
  CHECK(thrown_code([&] {
          solver_options_from_json(parse_json_text(R"({"relaxation": "fast"})"), "solver");
        }) == errc::config_error);
  CHECK(thrown_code([&] {
          grid_from_json(parse_json_text(R"({"X": 10.0, "N": 2.5})"), "grid");
        }) == errc::config_error);

  const SamplingConfig c =
      sampling_from_json(parse_json_text(R"({"n_mu": 32, "deltas": [1e-3]})"), "gkc");
  CHECK(c.n_mu == 32);
  CHECK(c.n_psi == 97);
  CHECK(c.deltas == std::vector<double>{1e-3});
}

TEST_CASE("run config document") {
  const std::string text = R"({
    "model": {"T": [[1.0, 0.0], [0.0, 1.0]], "lambda": [1.0, -1.0], "a": [4.0, 4.0]},
    "given_bc": {"Bhat": [[1.0, 1.0]], "bhat": [[]]},
    "construction": {"family": "gen_czero", "params": {"Bu11t": [[1.0]]}},
    "gkc": {"n_mu": 48},
    "initial_data": {"u0": [[{"poly": [0.5], "center": 3.0, "beta": 6.0}], []]},
    "solve": {"grid": {"X": 10.0, "N": 500, "t_star": 0.5}, "eps": 0.05},
    "experiment": {
      "preset": "demo",
      "eps": [2e-2, 1e-2],
      "policy": {"n_min": 400},
      "grid": {"X": 10.0, "N": 100, "t_star": 1.0},
      "norms": ["L2", "L2_vs_u0bar"],
      "sample_time": 0.5,
      "bands": {"L2": {"lo": 1.35, "hi": 1.65, "above_passes": true}}
    }
  })";
  const RunConfig c = run_config_from_json(parse_json_text(text));
  CHECK(c.model.n == 2);
  CHECK(c.family == "gen_czero");
  CHECK(c.preset_params.Bu11t(0, 0) == 1.0);
  CHECK(c.gkc.n_mu == 48);
  CHECK(c.has_initial_data);
  CHECK(c.u0.eval(0, 3.0) == doctest::Approx(0.5));
  CHECK(c.eps == 0.05);
  CHECK(c.grid.N == 500);
  REQUIRE(c.has_study);
  CHECK(c.study.preset == "demo");
  CHECK(c.study.eps.size() == 2);
  CHECK(c.study.policy.n_min == 400);
  CHECK(c.study.norms.size() == 2);
  REQUIRE(c.study.bands.size() == 1);
  CHECK(c.study.bands[0].first == StudyNorm::L2);
  CHECK(c.study.bands[0].second.above_passes);

  SUBCASE("unknown section and unknown family are refused") {
    Json j = parse_json_text(text);
    j["extra"] = 1;
    CHECK(thrown_code([&] { run_config_from_json(j); }) == errc::config_error);
    Json j2 = parse_json_text(text);
    j2["construction"]["family"] = "nope";
    CHECK(thrown_code([&] { run_config_from_json(j2); }) == errc::config_error);
  }

  SUBCASE("custom construction params") {
    Json j = parse_json_text(text);
    j["construction"] = parse_json_text(
        R"({"family": "custom", "params": {"Ctilde": [[0.2]], "annihilator_policy": "householder_qr"}})");
    const RunConfig cc = run_config_from_json(j);
    CHECK(cc.family == "custom");
    CHECK(cc.custom_params.Ctilde(0, 0) == 0.2);
    CHECK(cc.custom_params.annihilator_policy == AnnihilatorPolicy::householder_qr);
  }
}

TEST_CASE("file io") {
  const std::string path = "json_io_out/doc.json";
  save_text_file(path, "{\"T\": 1}\n");
  const Json j = load_json_file(path);
  CHECK(j["T"] == 1);
  CHECK(thrown_code([&] { load_json_file("no/such/file.json"); }) == errc::io_error);
}
