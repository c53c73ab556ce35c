#include "relaxbc/json_io.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "relaxbc/errors.hpp"

namespace relaxbc {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(errc::config_error, "config: " + where + ": " + what);
}

void reject_unknown(const Json& j, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(where, "expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) bad(where, "unknown key '" + item.key() + "'");
  }
}

const Json* opt(const Json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

const Json& req(const Json& j, const char* key, const std::string& where) {
  const Json* v = opt(j, key);
  if (!v) bad(where, std::string("missing key '") + key + "'");
  return *v;
}

double num(const Json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<int>();
}

bool boolean(const Json& j, const std::string& where) {
  if (!j.is_boolean()) bad(where, "expected a boolean");
  return j.get<bool>();
}

std::string str(const Json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

std::vector<double> num_list(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(num(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

// optional-field helpers with defaults
double num_or(const Json& j, const char* key, double dflt, const std::string& where) {
  const Json* v = opt(j, key);
  return v ? num(*v, where + "." + key) : dflt;
}
int int_or(const Json& j, const char* key, int dflt, const std::string& where) {
  const Json* v = opt(j, key);
  return v ? integer(*v, where + "." + key) : dflt;
}
bool bool_or(const Json& j, const char* key, bool dflt, const std::string& where) {
  const Json* v = opt(j, key);
  return v ? boolean(*v, where + "." + key) : dflt;
}
Mat mat_or(const Json& j, const char* key, const std::string& where) {
  const Json* v = opt(j, key);
  return v ? mat_from_json(*v, where + "." + key) : Mat();
}

}  // namespace

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.what() carries the "parse error at line L, column C" diagnostics
    throw Error(errc::config_error, e.what());
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_error, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_json_text(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void save_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw Error(errc::io_error, "cannot write " + path);
}

Json to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Mat mat_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Mat();
  if (!j[0].is_array()) bad(where, "expected an array of rows");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      bad(where, "rows have unequal lengths");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = num(row[static_cast<size_t>(c)],
                    where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

Vec vec_from_json(const Json& j, const std::string& where) {
  const std::vector<double> vals = num_list(j, where);
  Vec v(static_cast<Eigen::Index>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

Json to_json(const SmoothSignal& s) {
  Json comps = Json::array();
  for (int c = 0; c < s.dim(); ++c) {
    Json terms = Json::array();
    for (const SignalTerm& t : s.terms(c)) {
      Json term;
      term["poly"] = t.poly;
      if (t.rate != 0.0) term["rate"] = t.rate;
      if (t.freq != 0.0) term["freq"] = t.freq;
      if (t.phase != 0.0) term["phase"] = t.phase;
      terms.push_back(std::move(term));
    }
    comps.push_back(std::move(terms));
  }
  return comps;
}

SmoothSignal signal_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of components");
  SmoothSignal s(static_cast<int>(j.size()));
  for (size_t c = 0; c < j.size(); ++c) {
    const std::string cw = where + "[" + std::to_string(c) + "]";
    if (!j[c].is_array()) bad(cw, "expected an array of terms");
    for (size_t k = 0; k < j[c].size(); ++k) {
      const Json& tj = j[c][k];
      const std::string tw = cw + "[" + std::to_string(k) + "]";
      reject_unknown(tj, tw, {"poly", "rate", "freq", "phase"});
      SignalTerm t;
      t.poly = num_list(req(tj, "poly", tw), tw + ".poly");
      t.rate = num_or(tj, "rate", 0.0, tw);
      t.freq = num_or(tj, "freq", 0.0, tw);
      t.phase = num_or(tj, "phase", 0.0, tw);
      s.add_term(static_cast<int>(c), std::move(t));
    }
  }
  return s;
}

Json to_json(const SmoothProfile& p) {
  Json comps = Json::array();
  for (int c = 0; c < p.dim(); ++c) {
    Json terms = Json::array();
    for (const ProfileTerm& t : p.terms(c)) {
      Json term;
      term["poly"] = t.poly;
      if (t.center != 0.0) term["center"] = t.center;
      term["beta"] = t.beta;
      terms.push_back(std::move(term));
    }
    comps.push_back(std::move(terms));
  }
  return comps;
}

SmoothProfile profile_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of components");
  SmoothProfile p(static_cast<int>(j.size()));
  for (size_t c = 0; c < j.size(); ++c) {
    const std::string cw = where + "[" + std::to_string(c) + "]";
    if (!j[c].is_array()) bad(cw, "expected an array of terms");
    for (size_t k = 0; k < j[c].size(); ++k) {
      const Json& tj = j[c][k];
      const std::string tw = cw + "[" + std::to_string(k) + "]";
      reject_unknown(tj, tw, {"poly", "center", "beta"});
      ProfileTerm t;
      t.poly = num_list(req(tj, "poly", tw), tw + ".poly");
      t.center = num_or(tj, "center", 0.0, tw);
      t.beta = num_or(tj, "beta", 1.0, tw);
      if (!(t.beta > 0.0)) bad(tw + ".beta", "must be > 0");
      p.add_term(static_cast<int>(c), std::move(t));
    }
  }
  return p;
}

Json to_json(const SpectralModel& m) {
  Json j;
  j["T"] = to_json(m.T);
  j["lambda"] = to_json(m.lambda);
  j["a"] = to_json(m.a);
  return j;
}

SpectralModel model_from_json(const Json& j) {
  reject_unknown(j, "model", {"T", "lambda", "a"});
  return build_model(mat_from_json(req(j, "T", "model"), "model.T"),
                     vec_from_json(req(j, "lambda", "model"), "model.lambda"),
                     vec_from_json(req(j, "a", "model"), "model.a"));
}

Json to_json(const GivenBoundaryCondition& g) {
  Json j;
  j["Bhat"] = to_json(g.Bhat);
  j["bhat"] = to_json(g.bhat);
  return j;
}

GivenBoundaryCondition given_bc_from_json(const Json& j) {
  reject_unknown(j, "given_bc", {"Bhat", "bhat"});
  GivenBoundaryCondition g;
  g.Bhat = mat_from_json(req(j, "Bhat", "given_bc"), "given_bc.Bhat");
  g.bhat = signal_from_json(req(j, "bhat", "given_bc"), "given_bc.bhat");
  return g;
}

Json to_json(const ConstructedBC& bc) {
  Json j;
  j["family"] = bc.family;
  j["Bu"] = to_json(bc.Bu);
  j["Bp"] = to_json(bc.Bp);
  j["b0"] = to_json(bc.b0);
  j["b1"] = to_json(bc.b1);
  j["b2"] = to_json(bc.b2);
  j["Ctilde"] = to_json(bc.Ctilde);
  j["C"] = to_json(bc.C);
  j["D"] = to_json(bc.D);
  j["H"] = to_json(bc.H);
  j["J"] = to_json(bc.J);
  j["Z"] = to_json(bc.Z);
  j["Bbar"] = to_json(bc.Bbar);
  j["warnings"] = bc.warnings;
  return j;
}

ConstructedBC bc_from_json(const Json& j) {
  reject_unknown(j, "bc",
                 {"family", "Bu", "Bp", "b0", "b1", "b2", "Ctilde", "C", "D", "H", "J", "Z",
                  "Bbar", "warnings"});
  ConstructedBC bc;
  bc.family = str(req(j, "family", "bc"), "bc.family");
  bc.Bu = mat_from_json(req(j, "Bu", "bc"), "bc.Bu");
  bc.Bp = mat_from_json(req(j, "Bp", "bc"), "bc.Bp");
  bc.b0 = signal_from_json(req(j, "b0", "bc"), "bc.b0");
  bc.b1 = signal_from_json(req(j, "b1", "bc"), "bc.b1");
  bc.b2 = signal_from_json(req(j, "b2", "bc"), "bc.b2");
  bc.Ctilde = mat_from_json(req(j, "Ctilde", "bc"), "bc.Ctilde");
  bc.C = mat_from_json(req(j, "C", "bc"), "bc.C");
  bc.D = signal_from_json(req(j, "D", "bc"), "bc.D");
  bc.H = mat_from_json(req(j, "H", "bc"), "bc.H");
  bc.J = signal_from_json(req(j, "J", "bc"), "bc.J");
  bc.Z = mat_from_json(req(j, "Z", "bc"), "bc.Z");
  bc.Bbar = mat_from_json(req(j, "Bbar", "bc"), "bc.Bbar");
  const Json& w = req(j, "warnings", "bc");
  if (!w.is_array()) bad("bc.warnings", "expected an array of strings");
  for (size_t i = 0; i < w.size(); ++i)
    bc.warnings.push_back(str(w[i], "bc.warnings[" + std::to_string(i) + "]"));
  return bc;
}

Json to_json(const CertifyReport& r) {
  Json j;
  j["verdict"] = r.verdict;
  j["c_hat"] = r.c_hat;
  j["c_hat_grid"] = r.c_hat_grid;
  j["c_hat_refined"] = r.c_hat_refined;
  Json am;
  am["eta"] = r.argmin.eta;
  am["xi0_re"] = r.argmin.xi0.real();
  am["xi0_im"] = r.argmin.xi0.imag();
  j["argmin"] = std::move(am);
  j["samples_used"] = r.samples_used;
  Json shells = Json::array();
  for (const auto& [delta, val] : r.c_by_delta) {
    Json s;
    s["delta"] = delta;
    s["min_ratio"] = val;
    shells.push_back(std::move(s));
  }
  j["c_by_delta"] = std::move(shells);
  return j;
}

Json to_json(const CompatibilityReport& r) {
  Json j;
  j["given_compat"] = to_json(r.given_compat);
  j["b0_compat"] = to_json(r.b0_compat);
  j["b1_compat"] = to_json(r.b1_compat);
  j["b2_compat"] = to_json(r.b2_compat);
  j["D_compat"] = to_json(r.D_compat);
  j["eps_samples"] = to_json(r.eps_samples);
  j["assembled"] = to_json(r.assembled);
  j["max_residual"] = r.max_residual;
  return j;
}

Json to_json(const RelaxationInitialData& d) {
  Json j;
  j["u0"] = to_json(d.u0);
  j["p1"] = to_json(d.p1);
  j["p2"] = to_json(d.p2);
  return j;
}

RelaxationInitialData initial_data_from_json(const Json& j) {
  reject_unknown(j, "initial_data", {"u0", "p1", "p2"});
  RelaxationInitialData d;
  d.u0 = profile_from_json(req(j, "u0", "initial_data"), "initial_data.u0");
  if (const Json* p1 = opt(j, "p1")) d.p1 = profile_from_json(*p1, "initial_data.p1");
  if (const Json* p2 = opt(j, "p2")) d.p2 = profile_from_json(*p2, "initial_data.p2");
  return d;
}

Json to_json(const Grid1D& g) {
  Json j;
  j["X"] = g.X;
  j["N"] = g.N;
  j["cfl"] = g.cfl;
  j["t_star"] = g.t_star;
  j["snapshot_stride"] = g.snapshot_stride;
  return j;
}

Grid1D grid_from_json(const Json& j, const std::string& where) {
  reject_unknown(j, where, {"X", "N", "cfl", "t_star", "snapshot_stride"});
  Grid1D g;
  g.X = num(req(j, "X", where), where + ".X");
  g.N = integer(req(j, "N", where), where + ".N");
  g.cfl = num_or(j, "cfl", g.cfl, where);
  g.t_star = num_or(j, "t_star", g.t_star, where);
  g.snapshot_stride = int_or(j, "snapshot_stride", g.snapshot_stride, where);
  return g;
}

Json to_json(const SolverOptions& o) {
  Json j;
  j["order"] = o.order;
  switch (o.relaxation) {
    case RelaxationMode::exact: j["relaxation"] = "exact"; break;
    case RelaxationMode::off: j["relaxation"] = "off"; break;
    case RelaxationMode::projection: j["relaxation"] = "projection"; break;
  }
  j["transport"] = o.transport;
  return j;
}

SolverOptions solver_options_from_json(const Json& j, const std::string& where) {
  reject_unknown(j, where, {"order", "relaxation", "transport"});
  SolverOptions o;
  o.order = int_or(j, "order", o.order, where);
  if (const Json* r = opt(j, "relaxation")) {
    const std::string name = str(*r, where + ".relaxation");
    if (name == "exact")
      o.relaxation = RelaxationMode::exact;
    else if (name == "off")
      o.relaxation = RelaxationMode::off;
    else if (name == "projection")
      o.relaxation = RelaxationMode::projection;
    else
      bad(where + ".relaxation", "expected exact, off or projection");
  }
  o.transport = bool_or(j, "transport", o.transport, where);
  return o;
}

Json to_json(const SamplingConfig& c) {
  Json j;
  j["n_mu"] = c.n_mu;
  j["n_psi"] = c.n_psi;
  j["deltas"] = c.deltas;
  j["refine_factor"] = c.refine_factor;
  j["tol_pass"] = c.tol_pass;
  j["tol_fail"] = c.tol_fail;
  j["stability_tol"] = c.stability_tol;
  j["polish_rounds"] = c.polish_rounds;
  j["large_scale"] = c.large_scale;
  j["jobs"] = c.jobs;
  return j;
}

SamplingConfig sampling_from_json(const Json& j, const std::string& where) {
  reject_unknown(j, where,
                 {"n_mu", "n_psi", "deltas", "refine_factor", "tol_pass", "tol_fail",
                  "stability_tol", "polish_rounds", "large_scale", "jobs"});
  SamplingConfig c;
  c.n_mu = int_or(j, "n_mu", c.n_mu, where);
  c.n_psi = int_or(j, "n_psi", c.n_psi, where);
  if (const Json* d = opt(j, "deltas")) c.deltas = num_list(*d, where + ".deltas");
  c.refine_factor = num_or(j, "refine_factor", c.refine_factor, where);
  c.tol_pass = num_or(j, "tol_pass", c.tol_pass, where);
  c.tol_fail = num_or(j, "tol_fail", c.tol_fail, where);
  c.stability_tol = num_or(j, "stability_tol", c.stability_tol, where);
  c.polish_rounds = int_or(j, "polish_rounds", c.polish_rounds, where);
  c.large_scale = num_or(j, "large_scale", c.large_scale, where);
  c.jobs = int_or(j, "jobs", c.jobs, where);
  return c;
}

StudyNorm study_norm_from_name(const std::string& name, const std::string& where) {
  if (name == "L2") return StudyNorm::L2;
  if (name == "H1") return StudyNorm::H1;
  if (name == "L2_vs_u0bar") return StudyNorm::L2_vs_u0bar;
  bad(where, "unknown norm '" + name + "' (expected L2, H1 or L2_vs_u0bar)");
}

ConstructionParams construction_params_from_json(const Json& j, const std::string& where) {
  reject_unknown(j, where, {"Ctilde", "D", "BpU_free", "annihilator_policy"});
  ConstructionParams p;
  p.Ctilde = mat_or(j, "Ctilde", where);
  if (const Json* d = opt(j, "D")) p.D = signal_from_json(*d, where + ".D");
  p.BpU_free = mat_or(j, "BpU_free", where);
  if (const Json* pol = opt(j, "annihilator_policy")) {
    const std::string name = str(*pol, where + ".annihilator_policy");
    if (name == "svd")
      p.annihilator_policy = AnnihilatorPolicy::svd;
    else if (name == "householder_qr")
      p.annihilator_policy = AnnihilatorPolicy::householder_qr;
    else
      bad(where + ".annihilator_policy", "expected svd or householder_qr");
  }
  return p;
}

PresetParams preset_params_from_json(const Json& j, const std::string& where) {
  reject_unknown(j, where,
                 {"Bu11t", "Bp11t", "Bp22t", "Bu22t", "star", "Bu1t", "Bu2t", "Bp1t", "Bp2t",
                  "Ctilde", "Bp", "D"});
  PresetParams p;
  p.Bu11t = mat_or(j, "Bu11t", where);
  p.Bp11t = mat_or(j, "Bp11t", where);
  p.Bp22t = mat_or(j, "Bp22t", where);
  p.Bu22t = mat_or(j, "Bu22t", where);
  p.star = mat_or(j, "star", where);
  p.Bu1t = mat_or(j, "Bu1t", where);
  p.Bu2t = mat_or(j, "Bu2t", where);
  p.Bp1t = mat_or(j, "Bp1t", where);
  p.Bp2t = mat_or(j, "Bp2t", where);
  p.Ctilde = mat_or(j, "Ctilde", where);
  p.Bp = mat_or(j, "Bp", where);
  if (const Json* d = opt(j, "D")) p.D = signal_from_json(*d, where + ".D");
  return p;
}

StudyConfig study_config_from_json(const Json& j, const std::string& where) {
  reject_unknown(j, where,
                 {"preset", "eps", "policy", "grid", "norms", "sample_time", "time_samples",
                  "solver", "jobs", "bands"});
  StudyConfig c;
  if (const Json* p = opt(j, "preset")) c.preset = str(*p, where + ".preset");
  c.eps = num_list(req(j, "eps", where), where + ".eps");
  if (const Json* p = opt(j, "policy")) {
    const std::string pw = where + ".policy";
    reject_unknown(*p, pw, {"n_min", "coeff", "exponent"});
    c.policy.n_min = int_or(*p, "n_min", c.policy.n_min, pw);
    c.policy.coeff = num_or(*p, "coeff", c.policy.coeff, pw);
    c.policy.exponent = num_or(*p, "exponent", c.policy.exponent, pw);
  }
  c.grid = grid_from_json(req(j, "grid", where), where + ".grid");
  if (const Json* n = opt(j, "norms")) {
    if (!n->is_array()) bad(where + ".norms", "expected an array of norm names");
    c.norms.clear();
    for (size_t i = 0; i < n->size(); ++i) {
      const std::string nw = where + ".norms[" + std::to_string(i) + "]";
      c.norms.push_back(study_norm_from_name(str((*n)[i], nw), nw));
    }
  }
  c.sample_time = num_or(j, "sample_time", c.sample_time, where);
  c.time_samples = int_or(j, "time_samples", c.time_samples, where);
  if (const Json* s = opt(j, "solver")) c.solver = solver_options_from_json(*s, where + ".solver");
  c.jobs = static_cast<unsigned>(int_or(j, "jobs", 0, where));
  if (const Json* b = opt(j, "bands")) {
    if (!b->is_object()) bad(where + ".bands", "expected an object keyed by norm name");
    for (const auto& item : b->items()) {
      const std::string bw = where + ".bands." + item.key();
      reject_unknown(item.value(), bw, {"lo", "hi", "above_passes"});
      SlopeBand band;
      band.lo = num(req(item.value(), "lo", bw), bw + ".lo");
      band.hi = num(req(item.value(), "hi", bw), bw + ".hi");
      band.above_passes = bool_or(item.value(), "above_passes", false, bw);
      c.bands.emplace_back(study_norm_from_name(item.key(), bw), band);
    }
  }
  return c;
}

RunConfig run_config_from_json(const Json& j) {
  reject_unknown(j, "run config",
                 {"model", "given_bc", "construction", "gkc", "initial_data", "solve",
                  "experiment"});
  RunConfig c;
  c.model = model_from_json(req(j, "model", "run config"));
  c.given = given_bc_from_json(req(j, "given_bc", "run config"));
  if (const Json* con = opt(j, "construction")) {
    reject_unknown(*con, "construction", {"family", "params"});
    if (const Json* f = opt(*con, "family")) c.family = str(*f, "construction.family");
    const Json empty = Json::object();
    const Json& params = opt(*con, "params") ? *opt(*con, "params") : empty;
    if (c.family == "custom")
      c.custom_params = construction_params_from_json(params, "construction.params");
    else if (preset_family_from_name(c.family))
      c.preset_params = preset_params_from_json(params, "construction.params");
    else
      bad("construction.family", "unknown family '" + c.family + "'");
  }
  if (const Json* g = opt(j, "gkc")) c.gkc = sampling_from_json(*g, "gkc");
  if (const Json* d = opt(j, "initial_data")) {
    reject_unknown(*d, "initial_data", {"u0"});
    c.u0 = profile_from_json(req(*d, "u0", "initial_data"), "initial_data.u0");
    c.has_initial_data = true;
  }
  if (const Json* s = opt(j, "solve")) {
    reject_unknown(*s, "solve", {"grid", "eps", "solver"});
    c.grid = grid_from_json(req(*s, "grid", "solve"), "solve.grid");
    c.eps = num_or(*s, "eps", c.eps, "solve");
    if (const Json* so = opt(*s, "solver")) c.solver = solver_options_from_json(*so, "solve.solver");
  }
  if (const Json* e = opt(j, "experiment")) {
    c.study = study_config_from_json(*e, "experiment");
    c.has_study = true;
  }
  return c;
}

}  // namespace relaxbc
