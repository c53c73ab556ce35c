#include "relaxbc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <thread>

#include "json.hpp"
#include "relaxbc/compat.hpp"
#include "relaxbc/errors.hpp"
#include "relaxbc/gkc.hpp"
#include "relaxbc/json_io.hpp"

namespace relaxbc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int nearest_snapshot(const GridSolution& gs, double t) {
  require(gs.snapshots() > 0, errc::invalid_argument, "empty grid solution");
  const double tol = std::max(gs.dt() / 2.0, 1e-12);
  const double last = gs.time(gs.snapshots() - 1);
  require(t >= -tol && t <= last + tol, errc::invalid_argument,
          "sample time outside the run window");
  int best = 0;
  for (int k = 1; k < gs.snapshots(); ++k)
    if (std::abs(gs.time(k) - t) < std::abs(gs.time(best) - t)) best = k;
  return best;
}

void check_alignment(const GridSolution& gs, const AsymptoticSolution& asym) {
  require(gs.n() == asym.model().n, errc::invalid_argument,
          "grid solution and asymptotic solution disagree on n");
  require(gs.eps() > 0.0, errc::invalid_argument, "grid run carries no relaxation rate");
}

// Least-squares slope of ln(e) against ln(eps); NaN with fewer than two
// usable points.
double fit_slope(const std::vector<double>& eps, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (size_t i = 0; i < eps.size(); ++i) {
    if (!(err[i] > 0.0)) continue;
    const double x = std::log(eps[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  if (k < 2) return kNaN;
  const double det = k * sxx - sx * sx;
  if (det <= 0.0) return kNaN;
  return (k * sxy - sx * sy) / det;
}

struct RunErrors {
  double l2 = 0.0;
  double h1 = 0.0;
  double vs = 0.0;
};

RunErrors measure_run(const ExperimentSpec& spec, const AsymptoticSolution& asym,
                      const RelaxationInitialData& init, int N, double eps) {
  Grid1D g = spec.grid;
  g.N = N;
  g.t_star = spec.sample_time;
  // Mirror of the solver's step count so the stride lands about
  // time_samples snapshots in (0, sample_time].
  const double smax = spec.model.sqrt_a().maxCoeff();
  const int steps =
      static_cast<int>(std::ceil(spec.sample_time / (g.cfl * g.dx() / smax) - 1e-9));
  g.snapshot_stride = std::max(1, steps / spec.time_samples);

  const GridSolution sol = run_stiff(spec.model, spec.bc, init, g, eps, spec.solver);
  const int n = spec.model.n;
  Mat diff(2 * n, N), vs(n, N);
  RunErrors out;
  for (int k = 1; k < sol.snapshots(); ++k) {
    const double t = sol.time(k);
    const Mat& q = sol.field(k);
    for (int i = 0; i < N; ++i) {
      const double x = sol.x_center(i);
      diff.col(i) = q.col(i) - asym.eval(x, t, eps);
      vs.col(i) = q.col(i).head(n) - asym.u0_bar(x, t);
    }
    out.l2 = std::max(out.l2, GridSolution::l2_norm(diff, sol.dx()));
    out.h1 = std::max(out.h1, GridSolution::h1_norm(diff, sol.dx()));
    out.vs = std::max(out.vs, GridSolution::l2_norm(vs, sol.dx()));
  }
  return out;
}

double pick_norm(const RunErrors& e, StudyNorm nm) {
  switch (nm) {
    case StudyNorm::L2: return e.l2;
    case StudyNorm::H1: return e.h1;
    case StudyNorm::L2_vs_u0bar: return e.vs;
  }
  fail(errc::internal, "unknown study norm");
}

void validate_spec(const ExperimentSpec& spec) {
  require(!spec.eps.empty(), errc::config_error, "eps list is empty");
  for (size_t i = 0; i < spec.eps.size(); ++i) {
    require(std::isfinite(spec.eps[i]) && spec.eps[i] > 0.0, errc::config_error,
            "eps values must be positive");
    if (i > 0)
      require(spec.eps[i] < spec.eps[i - 1], errc::config_error,
              "eps list must be strictly decreasing");
  }
  require(!spec.norms.empty(), errc::config_error, "no norms requested");
  for (size_t i = 0; i < spec.norms.size(); ++i)
    for (size_t j = i + 1; j < spec.norms.size(); ++j)
      require(spec.norms[i] != spec.norms[j], errc::config_error, "duplicate norm requested");
  require(spec.grid.X > 0.0, errc::config_error, "grid extent must be positive");
  require(spec.sample_time > 0.0 && spec.sample_time <= spec.grid.t_star, errc::config_error,
          "sample time must lie in (0, t_star]");
  require(spec.time_samples >= 1 && spec.time_samples <= 1000, errc::config_error,
          "time_samples must lie in [1, 1000]");
  require(spec.jobs <= 256, errc::config_error, "jobs capped at 256");
  require(spec.solver.transport && spec.solver.relaxation == RelaxationMode::exact,
          errc::config_error, "studies run the full transport + relaxation scheme");
}

}  // namespace

const char* study_norm_name(StudyNorm n) {
  switch (n) {
    case StudyNorm::L2: return "L2";
    case StudyNorm::H1: return "H1";
    case StudyNorm::L2_vs_u0bar: return "L2_vs_u0bar";
  }
  fail(errc::internal, "unknown study norm");
}

int GridPolicy::cells(double X, double eps) const {
  require(n_min >= 8, errc::config_error, "policy floor below 8 cells");
  require(X > 0.0 && std::isfinite(X), errc::config_error, "policy domain must be positive");
  require(eps > 0.0 && std::isfinite(eps), errc::config_error, "policy eps must be positive");
  require(coeff > 0.0 && exponent >= 0.0 && exponent <= 3.0, errc::config_error,
          "policy coefficients out of range");
  const double raw = X * coeff * std::pow(eps, -exponent);
  require(raw < 5e7, errc::config_error, "policy cell count exceeds 5e7");
  return std::max(n_min, static_cast<int>(std::ceil(raw - 1e-9)));
}

ErrorNorms error_norms(const GridSolution& gs, const AsymptoticSolution& asym, double t) {
  check_alignment(gs, asym);
  const int k = nearest_snapshot(gs, t);
  const double tk = gs.time(k);
  const Mat& q = gs.field(k);
  Mat diff(2 * gs.n(), gs.cells());
  for (int i = 0; i < gs.cells(); ++i)
    diff.col(i) = q.col(i) - asym.eval(gs.x_center(i), tk, gs.eps());
  return {GridSolution::l2_norm(diff, gs.dx()), GridSolution::h1_norm(diff, gs.dx())};
}

double error_vs_u0bar(const GridSolution& gs, const AsymptoticSolution& asym, double t) {
  check_alignment(gs, asym);
  const int k = nearest_snapshot(gs, t);
  const double tk = gs.time(k);
  const Mat& q = gs.field(k);
  Mat diff(gs.n(), gs.cells());
  for (int i = 0; i < gs.cells(); ++i)
    diff.col(i) = q.col(i).head(gs.n()) - asym.u0_bar(gs.x_center(i), tk);
  return GridSolution::l2_norm(diff, gs.dx());
}

RateTable convergence_study(const ExperimentSpec& spec) {
  validate_spec(spec);

  const CertifyReport cert = certify(spec.model, spec.bc.Bu, spec.bc.Bp);
  require(cert.verdict == "PASS", errc::constraint_violation,
          "study precondition: boundary condition must certify PASS, got " + cert.verdict);

  Vec eps_samples(3);
  eps_samples << 1.0, 1e-2, 1e-4;
  const CompatibilityReport compat =
      verify_relaxation_compat(spec.model, spec.given, spec.bc, spec.u0, eps_samples);
  require(compat.max_residual <= 1e-8, errc::constraint_violation,
          "study precondition: corner compatibility residual " + num(compat.max_residual));

  const AsymptoticSolution asym(spec.model, spec.given, spec.bc, spec.u0);
  const RelaxationInitialData init = build_initial_data(spec.model, spec.u0);

  struct PerEps {
    int cells = 0;
    RunErrors base, refined;
  };
  const size_t m = spec.eps.size();
  std::vector<PerEps> res(m);
  std::vector<std::exception_ptr> errs(m);

  const auto work = [&](size_t i) {
    try {
      const int N = spec.policy.cells(spec.grid.X, spec.eps[i]);
      res[i].cells = N;
      res[i].base = measure_run(spec, asym, init, N, spec.eps[i]);
      res[i].refined = measure_run(spec, asym, init, 2 * N, spec.eps[i]);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  };

  unsigned jobs = spec.jobs ? spec.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(m));
  if (jobs <= 1) {
    for (size_t i = 0; i < m; ++i) work(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < m; i = next.fetch_add(1)) work(i);
      });
    for (std::thread& th : pool) th.join();
  }
  for (size_t i = 0; i < m; ++i)
    if (errs[i]) std::rethrow_exception(errs[i]);

  RateTable table;
  table.preset = spec.preset;
  table.sample_time = spec.sample_time;
  table.time_samples = spec.time_samples;

  std::string inconclusive;
  for (StudyNorm nm : spec.norms) {
    RateSeries s;
    s.norm = nm;
    for (size_t i = 0; i < m; ++i) {
      RateRow r;
      r.eps = spec.eps[i];
      r.cells = res[i].cells;
      r.error = pick_norm(res[i].base, nm);
      r.refined_error = pick_norm(res[i].refined, nm);
      if (r.refined_error > 0.0)
        r.rel_change = std::abs(r.error - r.refined_error) / r.refined_error;
      else
        r.rel_change = r.error == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      r.trusted = r.rel_change < kRefineTol;
      s.rows.push_back(r);
    }
    for (size_t i = 0; i + 1 < m; ++i) {
      const double e0 = s.rows[i].error, e1 = s.rows[i + 1].error;
      s.pair_rates.push_back(e0 > 0.0 && e1 > 0.0
                                 ? std::log(e0 / e1) / std::log(spec.eps[i] / spec.eps[i + 1])
                                 : kNaN);
    }

    std::vector<double> te, terr;
    for (const RateRow& r : s.rows)
      if (r.trusted) {
        te.push_back(r.eps);
        terr.push_back(r.error);
      }
    s.slope = fit_slope(te, terr);
    s.slope_drop_largest =
        te.size() >= 3 ? fit_slope({te.begin() + 1, te.end()}, {terr.begin() + 1, terr.end()})
                       : kNaN;
    s.monotone = true;
    for (size_t i = 0; i + 1 < terr.size(); ++i)
      if (!(terr[i] > terr[i + 1])) s.monotone = false;
    if (te.size() < 2 && inconclusive.empty())
      inconclusive = std::string("norm ") + study_norm_name(nm) + ": " +
                     std::to_string(te.size()) + " of " + std::to_string(m) +
                     " rows passed the refinement check; no slope";
    table.series.push_back(std::move(s));
  }
  if (!inconclusive.empty()) fail(errc::inconclusive_study, inconclusive);
  return table;
}

std::string render_csv(const RateTable& table) {
  std::string out = "preset,norm,eps,cells,error,refined_error,rel_change,trusted,pair_rate\n";
  for (const RateSeries& s : table.series) {
    for (size_t i = 0; i < s.rows.size(); ++i) {
      const RateRow& r = s.rows[i];
      out += table.preset;
      out += ',';
      out += study_norm_name(s.norm);
      out += ',' + num(r.eps) + ',' + std::to_string(r.cells) + ',' + num(r.error) + ',' +
             num(r.refined_error) + ',' + num(r.rel_change) + ',' +
             (r.trusted ? "true" : "false") + ',';
      if (i < s.pair_rates.size() && std::isfinite(s.pair_rates[i])) out += num(s.pair_rates[i]);
      out += '\n';
    }
    if (!s.rows.empty())
      out += std::string("# slope,") + study_norm_name(s.norm) + ',' + num(s.slope) +
             ",drop_largest," + num(s.slope_drop_largest) + '\n';
  }
  return out;
}

std::string render_json(const RateTable& table) {
  nlohmann::ordered_json j;
  j["preset"] = table.preset;
  j["sample_time"] = table.sample_time;
  j["time_samples"] = table.time_samples;
  j["series"] = nlohmann::ordered_json::array();
  for (const RateSeries& s : table.series) {
    nlohmann::ordered_json js;
    js["norm"] = study_norm_name(s.norm);
    js["rows"] = nlohmann::ordered_json::array();
    for (const RateRow& r : s.rows) {
      nlohmann::ordered_json jr;
      jr["eps"] = r.eps;
      jr["cells"] = r.cells;
      jr["error"] = r.error;
      jr["refined_error"] = r.refined_error;
      jr["rel_change"] = r.rel_change;
      jr["trusted"] = r.trusted;
      js["rows"].push_back(std::move(jr));
    }
    js["pair_rates"] = s.pair_rates;  // non-finite entries serialize as null
    js["slope"] = s.slope;
    js["slope_drop_largest"] = s.slope_drop_largest;
    js["monotone"] = s.monotone;
    j["series"].push_back(std::move(js));
  }
  return j.dump(2) + "\n";
}

std::string render_svg(const RateTable& table) {
  constexpr double W = 720, H = 540, ML = 70, MR = 180, MT = 40, MB = 55;
  const double pw = W - ML - MR, ph = H - MT - MB;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c"};

  double lx0 = 0, lx1 = 0, ly0 = 0, ly1 = 0;
  bool any = false;
  for (const RateSeries& s : table.series)
    for (const RateRow& r : s.rows) {
      if (!(r.eps > 0.0) || !(r.error > 0.0)) continue;
      const double lx = std::log10(r.eps), ly = std::log10(r.error);
      if (!any) {
        lx0 = lx1 = lx;
        ly0 = ly1 = ly;
        any = true;
      }
      lx0 = std::min(lx0, lx);
      lx1 = std::max(lx1, lx);
      ly0 = std::min(ly0, ly);
      ly1 = std::max(ly1, ly);
    }
  if (!any) {
    lx0 = -3;
    lx1 = 0;
    ly0 = -3;
    ly1 = 0;
  }
  if (lx1 - lx0 < 0.5) {
    lx0 -= 0.5;
    lx1 += 0.5;
  }
  if (ly1 - ly0 < 0.5) {
    ly0 -= 0.5;
    ly1 += 0.5;
  }
  const double padx = 0.06 * (lx1 - lx0), pady = 0.08 * (ly1 - ly0);
  lx0 -= padx;
  lx1 += padx;
  ly0 -= pady;
  ly1 += pady;

  const auto px = [&](double lx) { return ML + (lx - lx0) / (lx1 - lx0) * pw; };
  const auto py = [&](double ly) { return MT + ph - (ly - ly0) / (ly1 - ly0) * ph; };
  const auto f2 = [](double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2f", v);
    return std::string(b);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"540\" "
         "viewBox=\"0 0 720 540\" font-family=\"Helvetica,Arial,sans-serif\">\n";
  svg += "<rect width=\"720\" height=\"540\" fill=\"white\"/>\n";
  svg += "<text x=\"" + f2(ML) + "\" y=\"24\" font-size=\"16\">" + table.preset +
         ": error against eps</text>\n";
  svg += "<rect x=\"" + f2(ML) + "\" y=\"" + f2(MT) + "\" width=\"" + f2(pw) + "\" height=\"" +
         f2(ph) + "\" fill=\"none\" stroke=\"#444\"/>\n";

  for (int p = static_cast<int>(std::ceil(lx0)); p <= static_cast<int>(std::floor(lx1)); ++p) {
    const double x = px(p);
    svg += "<line x1=\"" + f2(x) + "\" y1=\"" + f2(MT) + "\" x2=\"" + f2(x) + "\" y2=\"" +
           f2(MT + ph) + "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + f2(x) + "\" y=\"" + f2(MT + ph + 18) +
           "\" font-size=\"11\" text-anchor=\"middle\">1e" + std::to_string(p) + "</text>\n";
  }
  for (int p = static_cast<int>(std::ceil(ly0)); p <= static_cast<int>(std::floor(ly1)); ++p) {
    const double y = py(p);
    svg += "<line x1=\"" + f2(ML) + "\" y1=\"" + f2(y) + "\" x2=\"" + f2(ML + pw) + "\" y2=\"" +
           f2(y) + "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + f2(ML - 6) + "\" y=\"" + f2(y + 4) +
           "\" font-size=\"11\" text-anchor=\"end\">1e" + std::to_string(p) + "</text>\n";
  }
  svg += "<text x=\"" + f2(ML + pw / 2) + "\" y=\"" + f2(H - 14) +
         "\" font-size=\"12\" text-anchor=\"middle\">eps</text>\n";

  int si = 0;
  for (const RateSeries& s : table.series) {
    const char* color = kColors[si % 3];
    std::string pts;
    for (auto it = s.rows.rbegin(); it != s.rows.rend(); ++it) {
      if (!(it->eps > 0.0) || !(it->error > 0.0)) continue;
      if (!pts.empty()) pts += ' ';
      pts += f2(px(std::log10(it->eps))) + ',' + f2(py(std::log10(it->error)));
    }
    if (!pts.empty())
      svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1.5\"/>\n";
    for (const RateRow& r : s.rows) {
      if (!(r.eps > 0.0) || !(r.error > 0.0)) continue;
      svg += "<circle cx=\"" + f2(px(std::log10(r.eps))) + "\" cy=\"" +
             f2(py(std::log10(r.error))) + "\" r=\"4\" stroke=\"" + color + "\" fill=\"" +
             (r.trusted ? color : "white") + "\"/>\n";
    }
    const double ly = MT + 16 + 20 * si;
    svg += "<rect x=\"" + f2(ML + pw + 14) + "\" y=\"" + f2(ly - 9) +
           "\" width=\"12\" height=\"12\" fill=\"" + std::string(color) + "\"/>\n";
    char slope_txt[64];
    std::snprintf(slope_txt, sizeof slope_txt, "%s  slope %.3f", study_norm_name(s.norm),
                  s.slope);
    svg += "<text x=\"" + f2(ML + pw + 32) + "\" y=\"" + f2(ly + 2) + "\" font-size=\"12\">" +
           slope_txt + "</text>\n";
    ++si;
  }
  svg += "</svg>\n";
  return svg;
}

void emit_report(const RateTable& table, const std::string& csv_path,
                 const std::string& json_path, const std::string& svg_path) {
  require(!csv_path.empty() && !json_path.empty(), errc::invalid_argument,
          "csv and json paths are required");
  save_text_file(csv_path, render_csv(table));
  save_text_file(json_path, render_json(table));
  if (!svg_path.empty()) save_text_file(svg_path, render_svg(table));
}

BandVerdict judge_slope(double slope, const SlopeBand& band) {
  require(band.hi >= band.lo, errc::invalid_argument, "slope band upper bound below lower");
  if (!std::isfinite(slope)) return BandVerdict::fail;
  if (slope < band.lo) return BandVerdict::fail;
  if (slope <= band.hi) return BandVerdict::pass;
  return band.above_passes ? BandVerdict::flagged_above : BandVerdict::fail;
}

}  // namespace relaxbc
