#include "relaxbc/capi.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <utility>

#include "relaxbc/asymptotics.hpp"
#include "relaxbc/bc_construct.hpp"
#include "relaxbc/compat.hpp"
#include "relaxbc/errors.hpp"
#include "relaxbc/gkc.hpp"
#include "relaxbc/harness.hpp"
#include "relaxbc/json_io.hpp"
#include "relaxbc/stiff_solver.hpp"

using namespace relaxbc;

struct rbc_model {
  SpectralModel m;
};
struct rbc_bc {
  ConstructedBC bc;
};
struct rbc_asym {
  AsymptoticSolution a;
};
struct rbc_solution {
  GridSolution sol;
};
struct rbc_study {
  RateTable table;
};

namespace {

static_assert(static_cast<int>(RBC_INTERNAL) == static_cast<int>(errc::internal),
              "status codes must mirror the library error enumeration");
static_assert(static_cast<int>(RBC_CONFIG_ERROR) == static_cast<int>(errc::config_error),
              "status codes must mirror the library error enumeration");

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

/// Runs fn, converting exceptions into status codes + the thread message.
template <typename Fn>
rbc_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RBC_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<rbc_status>(static_cast<int>(e.code()));
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RBC_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return RBC_INTERNAL;
  }
}

const char* require_text(const char* text, const char* what) {
  if (!text) fail(errc::invalid_argument, std::string(what) + " must not be null");
  return text;
}

template <typename T>
T* require_handle(T* h, const char* what) {
  if (!h) fail(errc::invalid_argument, std::string(what) + " handle must not be null");
  return h;
}

Json parse_arg(const char* text, const char* what) {
  return parse_json_text(require_text(text, what));
}

Json parse_or_default(const char* text) {
  return text ? parse_json_text(text) : Json::object();
}

std::string csv_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct AsymQuery {
  double eps = 0.0;
  std::vector<double> times;
  double x_max = 0.0;
  int points = 400;
  double xi_max = 12.0;
};

AsymQuery parse_query(const char* text, bool needs_eps, bool needs_x) {
  const Json j = parse_arg(text, "query");
  if (!j.is_object()) fail(errc::config_error, "config: query: expected an object");
  for (const auto& item : j.items())
    if (item.key() != "eps" && item.key() != "times" && item.key() != "x_max" &&
        item.key() != "points" && item.key() != "xi_max")
      fail(errc::config_error, "config: query: unknown key '" + item.key() + "'");
  AsymQuery q;
  if (j.contains("eps")) q.eps = j["eps"].get<double>();
  if (j.contains("times"))
    for (const auto& t : j["times"]) q.times.push_back(t.get<double>());
  if (j.contains("x_max")) q.x_max = j["x_max"].get<double>();
  if (j.contains("points")) q.points = j["points"].get<int>();
  if (j.contains("xi_max")) q.xi_max = j["xi_max"].get<double>();
  if (q.times.empty()) fail(errc::config_error, "config: query.times: at least one time");
  if (needs_eps && !(q.eps > 0.0)) fail(errc::config_error, "config: query.eps: must be > 0");
  if (needs_x && !(q.x_max > 0.0)) fail(errc::config_error, "config: query.x_max: must be > 0");
  if (q.points < 2 || q.points > 2000000)
    fail(errc::config_error, "config: query.points: out of range");
  return q;
}

ExperimentSpec assemble_spec(const SpectralModel& m, const GivenBoundaryCondition& g,
                             const ConstructedBC& bc, const SmoothProfile& u0,
                             const StudyConfig& sc) {
  ExperimentSpec spec;
  spec.preset = sc.preset;
  spec.model = m;
  spec.given = g;
  spec.bc = bc;
  spec.u0 = u0;
  spec.eps = sc.eps;
  spec.policy = sc.policy;
  spec.grid = sc.grid;
  spec.norms = sc.norms;
  spec.sample_time = sc.sample_time;
  spec.time_samples = sc.time_samples;
  spec.solver = sc.solver;
  spec.jobs = sc.jobs;
  return spec;
}

}  // namespace

extern "C" {

const char* rbc_status_name(rbc_status s) {
  return errc_name(static_cast<errc>(static_cast<int>(s)));
}

const char* rbc_last_error(void) { return g_last_error.c_str(); }

void rbc_string_free(char* s) { delete[] s; }

rbc_status rbc_model_parse(const char* json, rbc_model** out) {
  return guarded([&] {
    require_handle(out, "output");
    *out = new rbc_model{model_from_json(parse_arg(json, "model"))};
  });
}

rbc_status rbc_model_info(const rbc_model* m, char** json_out) {
  return guarded([&] {
    require_handle(m, "model");
    require_handle(json_out, "output");
    Json j;
    j["n"] = m->m.n;
    j["l"] = m->m.l;
    j["condT"] = m->m.condT;
    switch (subcharacteristic_status(m->m)) {
      case SubcharStatus::strict: j["subcharacteristic"] = "strict"; break;
      case SubcharStatus::weak: j["subcharacteristic"] = "weak"; break;
      case SubcharStatus::violated: j["subcharacteristic"] = "violated"; break;
    }
    *json_out = dup_string(j.dump(2) + "\n");
  });
}

void rbc_model_free(rbc_model* m) { delete m; }

rbc_status rbc_preset_list(char** json_out) {
  return guarded([&] {
    require_handle(json_out, "output");
    Json arr = Json::array();
    for (PresetFamily f :
         {PresetFamily::l_eq_n, PresetFamily::n1_pos, PresetFamily::n1_neg,
          PresetFamily::n2_l1_czero, PresetFamily::n2_l1_cnonzero, PresetFamily::gen_czero,
          PresetFamily::gen_clambda})
      arr.push_back(preset_family_name(f));
    arr.push_back("custom");
    *json_out = dup_string(arr.dump(2) + "\n");
  });
}

rbc_status rbc_construct_bc(const rbc_model* m, const char* given_json,
                            const char* construction_json, rbc_bc** out) {
  return guarded([&] {
    require_handle(m, "model");
    require_handle(out, "output");
    const GivenBoundaryCondition g = given_bc_from_json(parse_arg(given_json, "given_bc"));
    const Json cj = parse_or_default(construction_json);
    std::string family = "custom";
    if (cj.contains("family")) family = cj["family"].get<std::string>();
    const Json params = cj.contains("params") ? cj["params"] : Json::object();
    ConstructedBC bc;
    if (family == "custom") {
      bc = construct_bc(m->m, g,
                        construction_params_from_json(params, "construction.params"));
    } else if (auto f = preset_family_from_name(family)) {
      bc = preset_bc(m->m, g, *f, preset_params_from_json(params, "construction.params"));
    } else {
      fail(errc::config_error, "config: construction.family: unknown family '" + family + "'");
    }
    *out = new rbc_bc{std::move(bc)};
  });
}

rbc_status rbc_bc_parse(const char* json, rbc_bc** out) {
  return guarded([&] {
    require_handle(out, "output");
    *out = new rbc_bc{bc_from_json(parse_arg(json, "bc"))};
  });
}

rbc_status rbc_bc_to_json(const rbc_bc* bc, char** json_out) {
  return guarded([&] {
    require_handle(bc, "bc");
    require_handle(json_out, "output");
    *json_out = dup_string(to_json(bc->bc).dump(2) + "\n");
  });
}

rbc_status rbc_bc_attach_data(const rbc_model* m, rbc_bc* bc, const char* u0_json) {
  return guarded([&] {
    require_handle(m, "model");
    require_handle(bc, "bc");
    attach_compatible_data(m->m, &bc->bc, profile_from_json(parse_arg(u0_json, "u0"), "u0"));
  });
}

void rbc_bc_free(rbc_bc* bc) { delete bc; }

rbc_status rbc_certify(const rbc_model* m, const rbc_bc* bc, const char* sampling_json,
                       char** report_json) {
  return guarded([&] {
    require_handle(m, "model");
    require_handle(bc, "bc");
    require_handle(report_json, "output");
    SamplingConfig cfg;
    if (sampling_json) cfg = sampling_from_json(parse_json_text(sampling_json), "gkc");
    const CertifyReport rep = certify(m->m, bc->bc.Bu, bc->bc.Bp, cfg);
    *report_json = dup_string(to_json(rep).dump(2) + "\n");
  });
}

rbc_status rbc_gkc_ratio_csv(const rbc_model* m, const rbc_bc* bc, const char* sampling_json,
                             char** csv_out) {
  return guarded([&] {
    require_handle(m, "model");
    require_handle(bc, "bc");
    require_handle(csv_out, "output");
    SamplingConfig cfg;
    if (sampling_json) cfg = sampling_from_json(parse_json_text(sampling_json), "gkc");
    // Spherical shells matching the certifier: eta = cos(phi),
    // xi0 = sin(phi) e^{i psi} with Re xi0 >= delta.
    const double half_pi = 2.0 * std::atan(1.0);
    std::string csv = "delta,eta,xi0_re,xi0_im,ratio\n";
    for (double delta : cfg.deltas) {
      for (int i = 0; i < cfg.n_mu; ++i) {
        const double phi = half_pi * (i + 0.5) / cfg.n_mu;
        const double r = std::sin(phi);
        if (r <= delta) continue;
        const double psi_max = std::acos(std::min(1.0, delta / r));
        for (int k = 0; k < cfg.n_psi; ++k) {
          const double psi =
              cfg.n_psi == 1 ? 0.0 : -psi_max + 2.0 * psi_max * k / (cfg.n_psi - 1);
          FrequencyPoint fp;
          fp.eta = std::cos(phi);
          fp.xi0 = std::polar(r, psi);
          const double v = gkc_ratio(m->m, bc->bc.Bu, bc->bc.Bp, fp);
          csv += csv_num(delta) + "," + csv_num(fp.eta) + "," + csv_num(fp.xi0.real()) + "," +
                 csv_num(fp.xi0.imag()) + "," + csv_num(v) + "\n";
        }
      }
    }
    *csv_out = dup_string(csv);
  });
}

rbc_status rbc_compat_check(const rbc_model* m, const char* given_json, const rbc_bc* bc,
                            const char* u0_json, const char* eps_json, char** report_json) {
  return guarded([&] {
    require_handle(m, "model");
    require_handle(bc, "bc");
    require_handle(report_json, "output");
    const GivenBoundaryCondition g = given_bc_from_json(parse_arg(given_json, "given_bc"));
    const SmoothProfile u0 = profile_from_json(parse_arg(u0_json, "u0"), "u0");
    Vec eps(3);
    eps << 1.0, 1e-2, 1e-4;
    if (eps_json) eps = vec_from_json(parse_json_text(eps_json), "eps");
    const CompatibilityReport rep = verify_relaxation_compat(m->m, g, bc->bc, u0, eps);
    *report_json = dup_string(to_json(rep).dump(2) + "\n");
  });
}

rbc_status rbc_build_initial_data(const rbc_model* m, const char* u0_json, char** data_json) {
  return guarded([&] {
    require_handle(m, "model");
    require_handle(data_json, "output");
    const RelaxationInitialData d =
        build_initial_data(m->m, profile_from_json(parse_arg(u0_json, "u0"), "u0"));
    *data_json = dup_string(to_json(d).dump(2) + "\n");
  });
}

rbc_status rbc_asym_create(const rbc_model* m, const char* given_json, const rbc_bc* bc,
                           const char* u0_json, rbc_asym** out) {
  return guarded([&] {
    require_handle(m, "model");
    require_handle(bc, "bc");
    require_handle(out, "output");
    const GivenBoundaryCondition g = given_bc_from_json(parse_arg(given_json, "given_bc"));
    const SmoothProfile u0 = profile_from_json(parse_arg(u0_json, "u0"), "u0");
    *out = new rbc_asym{AsymptoticSolution(m->m, g, bc->bc, u0)};
  });
}

rbc_status rbc_asym_fields_csv(const rbc_asym* a, const char* query_json, char** csv_out) {
  return guarded([&] {
    require_handle(a, "asym");
    require_handle(csv_out, "output");
    const AsymQuery q = parse_query(query_json, true, true);
    const int n = a->a.model().n;
    std::string csv = "x,t";
    for (int j = 0; j < n; ++j) csv += ",u" + std::to_string(j);
    for (int j = 0; j < n; ++j) csv += ",p" + std::to_string(j);
    csv += "\n";
    for (double t : q.times) {
      for (int i = 0; i < q.points; ++i) {
        const double x = q.x_max * (i + 0.5) / q.points;
        const Vec up = a->a.eval(x, t, q.eps);
        csv += csv_num(x) + "," + csv_num(t);
        for (int j = 0; j < 2 * n; ++j) csv += "," + csv_num(up[j]);
        csv += "\n";
      }
    }
    *csv_out = dup_string(csv);
  });
}

rbc_status rbc_asym_norms(const rbc_asym* a, const char* query_json, char** json_out) {
  return guarded([&] {
    require_handle(a, "asym");
    require_handle(json_out, "output");
    const AsymQuery q = parse_query(query_json, true, true);
    Json j;
    j["eps"] = q.eps;
    j["reflection_mismatch"] = a->a.reflection_mismatch();
    Json per = Json::array();
    for (double t : q.times) {
      Json row;
      row["t"] = t;
      row["residual_l2"] = a->a.residual_l2(t, q.eps, q.x_max);
      per.push_back(std::move(row));
    }
    j["times"] = std::move(per);
    *json_out = dup_string(j.dump(2) + "\n");
  });
}

rbc_status rbc_asym_layers_svg(const rbc_asym* a, const char* query_json, char** svg_out) {
  return guarded([&] {
    require_handle(a, "asym");
    require_handle(svg_out, "output");
    const AsymQuery q = parse_query(query_json, false, false);
    const int n = a->a.model().n;
    const int pts = std::min(q.points, 2000);
    const int W = 720, H = 540, ml = 60, mr = 20, mt = 30, mb = 45;
    // collect nu0/nu1 component curves per queried time
    struct Curve {
      std::string label;
      std::vector<double> y;
    };
    std::vector<Curve> curves;
    double ymin = 0.0, ymax = 0.0;
    for (double t : q.times) {
      for (int field = 0; field < 2; ++field) {
        for (int j = 0; j < n; ++j) {
          Curve c;
          c.label = (field == 0 ? "nu0[" : "nu1[") + std::to_string(j) + "] t=" + csv_num(t);
          for (int i = 0; i < pts; ++i) {
            const double xi = q.xi_max * i / (pts - 1);
            const Vec v = field == 0 ? a->a.nu0(xi, t) : a->a.nu1(xi, t);
            c.y.push_back(v[j]);
            ymin = std::min(ymin, v[j]);
            ymax = std::max(ymax, v[j]);
          }
          curves.push_back(std::move(c));
        }
      }
    }
    if (ymax - ymin < 1e-300) ymax = ymin + 1.0;
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(W) +
                      "\" height=\"" + std::to_string(H) + "\" viewBox=\"0 0 " +
                      std::to_string(W) + " " + std::to_string(H) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + std::to_string(W / 2) +
           "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
           "boundary layer profiles</text>\n";
    const auto sx = [&](double xi) {
      return ml + (W - ml - mr) * xi / q.xi_max;
    };
    const auto sy = [&](double y) {
      return H - mb - (H - mt - mb) * (y - ymin) / (ymax - ymin);
    };
    // zero axis
    svg += "<line x1=\"" + csv_num(sx(0)) + "\" y1=\"" + csv_num(sy(0.0)) + "\" x2=\"" +
           csv_num(sx(q.xi_max)) + "\" y2=\"" + csv_num(sy(0.0)) +
           "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
    for (size_t c = 0; c < curves.size(); ++c) {
      std::string poly;
      for (int i = 0; i < pts; ++i) {
        const double xi = q.xi_max * i / (pts - 1);
        poly += csv_num(sx(xi)) + "," + csv_num(sy(curves[c].y[static_cast<size_t>(i)])) + " ";
      }
      const char* color = palette[c % 6];
      svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"1.5\" points=\"" + poly + "\"/>\n";
      svg += "<text x=\"" + std::to_string(W - mr - 150) + "\" y=\"" +
             std::to_string(mt + 16 * (static_cast<int>(c) + 1)) +
             "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" + color + "\">" +
             curves[c].label + "</text>\n";
    }
    svg += "<text x=\"" + std::to_string(W / 2) + "\" y=\"" + std::to_string(H - 10) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
           "stretched coordinate xi</text>\n";
    svg += "</svg>\n";
    *svg_out = dup_string(svg);
  });
}

void rbc_asym_free(rbc_asym* a) { delete a; }

rbc_status rbc_run_stiff(const rbc_model* m, const rbc_bc* bc, const char* data_json,
                         const char* grid_json, double eps, const char* solver_json,
                         rbc_solution** out) {
  return guarded([&] {
    require_handle(m, "model");
    require_handle(bc, "bc");
    require_handle(out, "output");
    const RelaxationInitialData data =
        initial_data_from_json(parse_arg(data_json, "initial_data"));
    const Grid1D grid = grid_from_json(parse_arg(grid_json, "grid"), "grid");
    SolverOptions opts;
    if (solver_json) opts = solver_options_from_json(parse_json_text(solver_json), "solver");
    *out = new rbc_solution{run_stiff(m->m, bc->bc, data, grid, eps, opts)};
  });
}

rbc_status rbc_solution_summary(const rbc_solution* s, char** json_out) {
  return guarded([&] {
    require_handle(s, "solution");
    require_handle(json_out, "output");
    const GridSolution& g = s->sol;
    Json j;
    j["cells"] = g.cells();
    j["dx"] = g.dx();
    j["dt"] = g.dt();
    j["eps"] = g.eps();
    j["snapshots"] = g.snapshots();
    Json times = Json::array();
    for (int k = 0; k < g.snapshots(); ++k) times.push_back(g.time(k));
    j["times"] = std::move(times);
    const Mat& last = g.field(g.snapshots() - 1);
    j["final_l2"] = GridSolution::l2_norm(last, g.dx());
    j["final_h1"] = GridSolution::h1_norm(last, g.dx());
    j["energy"] = g.energy_trace();
    *json_out = dup_string(j.dump(2) + "\n");
  });
}

rbc_status rbc_solution_csv(const rbc_solution* s, char** csv_out) {
  return guarded([&] {
    require_handle(s, "solution");
    require_handle(csv_out, "output");
    const GridSolution& g = s->sol;
    const int n = g.n();
    std::string csv = "t,x";
    for (int j = 0; j < n; ++j) csv += ",u" + std::to_string(j);
    for (int j = 0; j < n; ++j) csv += ",p" + std::to_string(j);
    csv += "\n";
    for (int k = 0; k < g.snapshots(); ++k) {
      const Mat& f = g.field(k);
      for (int i = 0; i < g.cells(); ++i) {
        csv += csv_num(g.time(k)) + "," + csv_num(g.x_center(i));
        for (int r = 0; r < 2 * n; ++r) csv += "," + csv_num(f(r, i));
        csv += "\n";
      }
    }
    *csv_out = dup_string(csv);
  });
}

void rbc_solution_free(rbc_solution* s) { delete s; }

rbc_status rbc_converge(const rbc_model* m, const char* given_json, const rbc_bc* bc,
                        const char* u0_json, const char* experiment_json, rbc_study** out) {
  return guarded([&] {
    require_handle(m, "model");
    require_handle(bc, "bc");
    require_handle(out, "output");
    const GivenBoundaryCondition g = given_bc_from_json(parse_arg(given_json, "given_bc"));
    const SmoothProfile u0 = profile_from_json(parse_arg(u0_json, "u0"), "u0");
    const StudyConfig sc =
        study_config_from_json(parse_arg(experiment_json, "experiment"), "experiment");
    const ExperimentSpec spec = assemble_spec(m->m, g, bc->bc, u0, sc);
    *out = new rbc_study{convergence_study(spec)};
  });
}

rbc_status rbc_study_csv(const rbc_study* s, char** out) {
  return guarded([&] {
    require_handle(s, "study");
    require_handle(out, "output");
    *out = dup_string(render_csv(s->table));
  });
}

rbc_status rbc_study_json(const rbc_study* s, char** out) {
  return guarded([&] {
    require_handle(s, "study");
    require_handle(out, "output");
    *out = dup_string(render_json(s->table));
  });
}

rbc_status rbc_study_svg(const rbc_study* s, char** out) {
  return guarded([&] {
    require_handle(s, "study");
    require_handle(out, "output");
    *out = dup_string(render_svg(s->table));
  });
}

rbc_status rbc_study_judge(const rbc_study* s, const char* bands_json, char** verdict_json) {
  return guarded([&] {
    require_handle(s, "study");
    require_handle(verdict_json, "output");
    const Json bj = parse_arg(bands_json, "bands");
    if (!bj.is_object()) fail(errc::config_error, "config: bands: expected an object");
    Json verdicts;
    bool all_pass = true;
    for (const auto& item : bj.items()) {
      const std::string bw = "bands." + item.key();
      const StudyNorm norm = study_norm_from_name(item.key(), bw);
      SlopeBand band;
      band.lo = item.value().at("lo").get<double>();
      band.hi = item.value().at("hi").get<double>();
      band.above_passes = item.value().value("above_passes", false);
      const RateSeries* series = nullptr;
      for (const RateSeries& cand : s->table.series)
        if (cand.norm == norm) series = &cand;
      if (!series)
        fail(errc::config_error, "config: " + bw + ": norm not present in the study");
      switch (judge_slope(series->slope, band)) {
        case BandVerdict::pass: verdicts[item.key()] = "pass"; break;
        case BandVerdict::flagged_above: verdicts[item.key()] = "flagged_above"; break;
        case BandVerdict::fail:
          verdicts[item.key()] = "fail";
          all_pass = false;
          break;
      }
    }
    Json j;
    j["verdicts"] = std::move(verdicts);
    j["all_pass"] = all_pass;
    *verdict_json = dup_string(j.dump(2) + "\n");
  });
}

void rbc_study_free(rbc_study* s) { delete s; }

}  // extern "C"
