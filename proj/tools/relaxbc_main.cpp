#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "relaxbc/capi.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";
constexpr double kCompatTol = 1e-8;

// Thrown to unwind into main with a process exit code:
// 0 success/PASS, 1 FAIL, 2 INCONCLUSIVE, 3 configuration error.
struct Exit {
  int code;
  std::string message;
};

int exit_code_for(rbc_status s) {
  if (s == RBC_OK) return 0;
  if (s == RBC_INCONCLUSIVE_STUDY) return 2;
  return 3;
}

void check(rbc_status s) {
  if (s != RBC_OK) throw Exit{exit_code_for(s), rbc_last_error()};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  rbc_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Exit{3, "cannot read " + path};
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw Exit{3, "cannot write " + path};
}

// 64-bit FNV-1a of the raw config text; stamped into every artifact so stale
// files are never reused.
std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Model {
  rbc_model* h = nullptr;
  ~Model() { rbc_model_free(h); }
};
struct Bc {
  rbc_bc* h = nullptr;
  ~Bc() { rbc_bc_free(h); }
};
struct Asym {
  rbc_asym* h = nullptr;
  ~Asym() { rbc_asym_free(h); }
};
struct Solution {
  rbc_solution* h = nullptr;
  ~Solution() { rbc_solution_free(h); }
};
struct Study {
  rbc_study* h = nullptr;
  ~Study() { rbc_study_free(h); }
};

struct Ctx {
  std::string config_path;
  std::string out_dir = "out";
  unsigned jobs = 0;
  bool jobs_set = false;
  unsigned seed = 1;
  bool want_svg = false;

  std::string hash;
  Json config;

  void load() {
    if (config_path.empty()) throw Exit{3, "--config FILE is required"};
    const std::string text = read_file(config_path);
    hash = fnv1a_hex(text);
    try {
      config = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Exit{3, config_path + ": " + e.what()};
    }
    if (!config.is_object()) throw Exit{3, config_path + ": expected a JSON object"};
    if (jobs_set) {  // flag overrides; results stay deterministic either way
      if (config.contains("experiment")) config["experiment"]["jobs"] = jobs;
      if (!config.contains("gkc")) config["gkc"] = Json::object();
      config["gkc"]["jobs"] = static_cast<int>(jobs);
    }
  }

  std::string section(const char* name, bool required) const {
    if (!config.contains(name)) {
      if (required) throw Exit{3, std::string("config: missing section '") + name + "'"};
      return "";
    }
    return config[name].dump();
  }

  std::string u0_text() const {
    if (!config.contains("initial_data") || !config["initial_data"].contains("u0"))
      throw Exit{3, "config: missing section 'initial_data.u0'"};
    return config["initial_data"]["u0"].dump();
  }

  std::string artifact(const std::string& name) const { return out_dir + "/" + name; }
  std::string marker() const { return "config_hash=" + hash; }
};

void write_json_artifact(const Ctx& c, const std::string& name, const std::string& payload) {
  Json j = Json::parse(payload);
  Json meta;
  meta["config_hash"] = c.hash;
  meta["version"] = kVersion;
  j["_meta"] = std::move(meta);
  write_file(c.artifact(name), j.dump(2) + "\n");
}

void write_csv_artifact(const Ctx& c, const std::string& name, const std::string& payload) {
  write_file(c.artifact(name),
             "# " + c.marker() + " version=" + kVersion + "\n" + payload);
}

void write_svg_artifact(const Ctx& c, const std::string& name, const std::string& payload) {
  write_file(c.artifact(name),
             payload + "<!-- " + c.marker() + " version=" + kVersion + " -->\n");
}

// An artifact is current when it exists and carries the hash of this config,
// either as the CSV/SVG comment marker or as the JSON _meta field.
bool artifact_current(const Ctx& c, const std::string& name) {
  std::ifstream in(c.artifact(name), std::ios::binary);
  if (!in) return false;
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  return text.find(c.marker()) != std::string::npos ||
         text.find("\"config_hash\": \"" + c.hash + "\"") != std::string::npos;
}

std::string load_json_artifact(const Ctx& c, const std::string& name) {
  Json j;
  try {
    j = Json::parse(read_file(c.artifact(name)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Exit{3, c.artifact(name) + ": " + e.what()};
  }
  j.erase("_meta");
  return j.dump();
}

void build_model(Ctx& c, Model& m) {
  check(rbc_model_parse(c.section("model", true).c_str(), &m.h));
}

// Construction plus the corner-compatible correction data whenever the
// initial profile is configured; certification does not need the data but
// every later stage does.
void build_bc(Ctx& c, const Model& m, Bc& bc) {
  const std::string given = c.section("given_bc", true);
  const std::string cons = c.section("construction", false);
  check(rbc_construct_bc(m.h, given.c_str(), cons.empty() ? nullptr : cons.c_str(), &bc.h));
  if (c.config.contains("initial_data"))
    check(rbc_bc_attach_data(m.h, bc.h, c.u0_text().c_str()));
}

Json asym_query(const Ctx& c) {
  if (!c.config.contains("solve")) throw Exit{3, "config: missing section 'solve'"};
  const Json& s = c.config["solve"];
  if (!s.contains("grid")) throw Exit{3, "config: missing section 'solve.grid'"};
  const Json& g = s["grid"];
  Json q;
  q["eps"] = s.value("eps", 1e-2);
  const double t_star = g.value("t_star", 1.0);
  q["times"] = Json::array({0.5 * t_star, t_star});
  if (!g.contains("X") || !g.contains("N")) throw Exit{3, "config: solve.grid needs X and N"};
  q["x_max"] = g["X"];
  q["points"] = g["N"];
  return q;
}

int cmd_preset_list() {
  char* out = nullptr;
  check(rbc_preset_list(&out));
  for (const auto& name : Json::parse(take(out)))
    std::printf("%s\n", name.get<std::string>().c_str());
  return 0;
}

int cmd_construct(Ctx& c) {
  c.load();
  Model m;
  build_model(c, m);
  Bc bc;
  build_bc(c, m, bc);
  char* out = nullptr;
  check(rbc_bc_to_json(bc.h, &out));
  const std::string payload = take(out);
  write_json_artifact(c, "bc.json", payload);
  const Json j = Json::parse(payload);
  std::printf("constructed %s boundary condition -> %s\n",
              j["family"].get<std::string>().c_str(), c.artifact("bc.json").c_str());
  for (const auto& w : j["warnings"])
    std::printf("warning: %s\n", w.get<std::string>().c_str());
  return 0;
}

int certify_stage(Ctx& c, const Model& m, const Bc& bc, std::string* payload) {
  const std::string cfg = c.section("gkc", false);
  char* rep = nullptr;
  check(rbc_certify(m.h, bc.h, cfg.empty() ? nullptr : cfg.c_str(), &rep));
  *payload = take(rep);
  write_json_artifact(c, "gkc.json", *payload);
  return 0;
}

int verdict_exit(const std::string& payload) {
  const Json j = Json::parse(payload);
  const std::string verdict = j["verdict"].get<std::string>();
  std::printf("[certify] %s  c_hat=%g  samples=%ld\n", verdict.c_str(),
              j["c_hat"].get<double>(), j["samples_used"].get<long>());
  if (verdict == "PASS") return 0;
  return verdict == "FAIL" ? 1 : 2;
}

int cmd_verify_gkc(Ctx& c, bool want_csv) {
  c.load();
  Model m;
  build_model(c, m);
  Bc bc;
  build_bc(c, m, bc);
  std::string payload;
  certify_stage(c, m, bc, &payload);
  if (want_csv) {
    const std::string cfg = c.section("gkc", false);
    char* csv = nullptr;
    check(rbc_gkc_ratio_csv(m.h, bc.h, cfg.empty() ? nullptr : cfg.c_str(), &csv));
    write_csv_artifact(c, "gkc_ratio.csv", take(csv));
  }
  return verdict_exit(payload);
}

int compat_stage(Ctx& c, const Model& m, const Bc& bc, std::string* payload) {
  char* rep = nullptr;
  check(rbc_compat_check(m.h, c.section("given_bc", true).c_str(), bc.h, c.u0_text().c_str(),
                         nullptr, &rep));
  *payload = take(rep);
  write_json_artifact(c, "compat.json", *payload);
  return 0;
}

int compat_exit(const std::string& payload) {
  const double res = Json::parse(payload)["max_residual"].get<double>();
  std::printf("[compat] max corner residual %.3e (tolerance %.0e)\n", res, kCompatTol);
  return res <= kCompatTol ? 0 : 1;
}

int cmd_compat(Ctx& c) {
  c.load();
  Model m;
  build_model(c, m);
  Bc bc;
  build_bc(c, m, bc);
  std::string payload;
  compat_stage(c, m, bc, &payload);
  return compat_exit(payload);
}

int cmd_build_data(Ctx& c) {
  c.load();
  Model m;
  build_model(c, m);
  Bc bc;
  build_bc(c, m, bc);
  char* bcj = nullptr;
  check(rbc_bc_to_json(bc.h, &bcj));
  write_json_artifact(c, "bc.json", take(bcj));
  char* dj = nullptr;
  check(rbc_build_initial_data(m.h, c.u0_text().c_str(), &dj));
  write_json_artifact(c, "initial_data.json", take(dj));
  std::printf("boundary data -> %s, prepared initial state -> %s\n",
              c.artifact("bc.json").c_str(), c.artifact("initial_data.json").c_str());
  return 0;
}

void asym_stage(Ctx& c, const Model& m, const Bc& bc) {
  Asym a;
  check(rbc_asym_create(m.h, c.section("given_bc", true).c_str(), bc.h, c.u0_text().c_str(),
                        &a.h));
  const std::string q = asym_query(c).dump();
  char* csv = nullptr;
  check(rbc_asym_fields_csv(a.h, q.c_str(), &csv));
  write_csv_artifact(c, "asym_fields.csv", take(csv));
  char* norms = nullptr;
  check(rbc_asym_norms(a.h, q.c_str(), &norms));
  const std::string payload = take(norms);
  write_json_artifact(c, "asym_norms.json", payload);
  if (c.want_svg) {
    char* svg = nullptr;
    check(rbc_asym_layers_svg(a.h, q.c_str(), &svg));
    write_svg_artifact(c, "asym_layers.svg", take(svg));
  }
  const Json j = Json::parse(payload);
  std::printf("[asymptotic] reflection mismatch %.3e, residual L2 at t=%g: %.3e\n",
              j["reflection_mismatch"].get<double>(), j["times"][0]["t"].get<double>(),
              j["times"][0]["residual_l2"].get<double>());
}

int cmd_run_asymptotic(Ctx& c) {
  c.load();
  Model m;
  build_model(c, m);
  Bc bc;
  build_bc(c, m, bc);
  asym_stage(c, m, bc);
  return 0;
}

void solve_stage(Ctx& c, const Model& m, const Bc& bc) {
  char* dj = nullptr;
  check(rbc_build_initial_data(m.h, c.u0_text().c_str(), &dj));
  const std::string data = take(dj);
  if (!c.config.contains("solve")) throw Exit{3, "config: missing section 'solve'"};
  const Json& s = c.config["solve"];
  if (!s.contains("grid")) throw Exit{3, "config: missing section 'solve.grid'"};
  const std::string grid = s["grid"].dump();
  const double eps = s.value("eps", 1e-2);
  const std::string solver = s.contains("solver") ? s["solver"].dump() : "";
  Solution sol;
  check(rbc_run_stiff(m.h, bc.h, data.c_str(), grid.c_str(), eps,
                      solver.empty() ? nullptr : solver.c_str(), &sol.h));
  char* sum = nullptr;
  check(rbc_solution_summary(sol.h, &sum));
  const std::string payload = take(sum);
  write_json_artifact(c, "solution.json", payload);
  char* csv = nullptr;
  check(rbc_solution_csv(sol.h, &csv));
  write_csv_artifact(c, "solution.csv", take(csv));
  const Json j = Json::parse(payload);
  std::printf("[solve] %d cells, %d snapshots, final L2 %.6g -> %s\n", j["cells"].get<int>(),
              j["snapshots"].get<int>(), j["final_l2"].get<double>(),
              c.artifact("solution.csv").c_str());
}

int cmd_run_stiff(Ctx& c) {
  c.load();
  Model m;
  build_model(c, m);
  Bc bc;
  build_bc(c, m, bc);
  solve_stage(c, m, bc);
  return 0;
}

// Band check over a stored study table; mirrors the library's slope judgment
// so a resumed pipeline can re-derive its exit code without recomputing.
int judge_from_payload(const Json& table, const Json& bands) {
  bool all_pass = true;
  for (const auto& item : bands.items()) {
    const Json* series = nullptr;
    for (const auto& s : table["series"])
      if (s["norm"] == item.key()) series = &s;
    if (!series) throw Exit{3, "bands: norm " + item.key() + " not present in the study"};
    const Json& band = item.value();
    const double lo = band.at("lo").get<double>();
    const double hi = band.at("hi").get<double>();
    if (lo > hi) throw Exit{3, "bands: inverted band for " + item.key()};
    const bool above_ok = band.value("above_passes", false);
    std::string verdict = "fail";
    if ((*series)["slope"].is_number()) {
      const double slope = (*series)["slope"].get<double>();
      if (slope >= lo && slope <= hi)
        verdict = "pass";
      else if (slope > hi && above_ok)
        verdict = "flagged_above";
    }
    std::printf("[converge] %s slope %s -> %s\n", item.key().c_str(),
                (*series)["slope"].is_number()
                    ? std::to_string((*series)["slope"].get<double>()).c_str()
                    : "n/a",
                verdict.c_str());
    if (verdict == "fail") all_pass = false;
  }
  return all_pass ? 0 : 1;
}

int converge_exit(const Ctx& c, const std::string& table_payload) {
  const Json& e = c.config["experiment"];
  const Json table = Json::parse(table_payload);
  for (const auto& s : table["series"])
    std::printf("[converge] %s: slope %s over %zu rows\n", s["norm"].get<std::string>().c_str(),
                s["slope"].is_number() ? std::to_string(s["slope"].get<double>()).c_str()
                                       : "n/a",
                s["rows"].size());
  if (!e.contains("bands") || e["bands"].empty()) return 0;
  return judge_from_payload(table, e["bands"]);
}

int converge_stage(Ctx& c, const Model& m, const Bc& bc, std::string* payload) {
  Study st;
  check(rbc_converge(m.h, c.section("given_bc", true).c_str(), bc.h, c.u0_text().c_str(),
                     c.config["experiment"].dump().c_str(), &st.h));
  char* csvp = nullptr;
  check(rbc_study_csv(st.h, &csvp));
  write_csv_artifact(c, "study.csv", take(csvp));
  char* jp = nullptr;
  check(rbc_study_json(st.h, &jp));
  *payload = take(jp);
  write_json_artifact(c, "study.json", *payload);
  char* sp = nullptr;
  check(rbc_study_svg(st.h, &sp));
  write_svg_artifact(c, "study.svg", take(sp));
  return 0;
}

int cmd_converge(Ctx& c) {
  c.load();
  if (!c.config.contains("experiment")) throw Exit{3, "config: missing section 'experiment'"};
  Model m;
  build_model(c, m);
  Bc bc;
  build_bc(c, m, bc);
  std::string payload;
  converge_stage(c, m, bc, &payload);
  return converge_exit(c, payload);
}

// construct -> certify -> compat -> asymptotic -> solve -> converge, stopping
// at the first FAIL.  Every stage writes its artifact stamped with the config
// hash; rerunning with unchanged config reuses current artifacts.
int cmd_pipeline(Ctx& c) {
  c.load();
  Model m;
  build_model(c, m);

  Bc bc;
  if (artifact_current(c, "bc.json")) {
    const std::string payload = load_json_artifact(c, "bc.json");
    check(rbc_bc_parse(payload.c_str(), &bc.h));
    std::printf("[construct] reusing %s\n", c.artifact("bc.json").c_str());
  } else {
    build_bc(c, m, bc);
    char* out = nullptr;
    check(rbc_bc_to_json(bc.h, &out));
    write_json_artifact(c, "bc.json", take(out));
    std::printf("[construct] wrote %s\n", c.artifact("bc.json").c_str());
  }
  if (c.config.contains("initial_data") && !artifact_current(c, "initial_data.json")) {
    char* dj = nullptr;
    check(rbc_build_initial_data(m.h, c.u0_text().c_str(), &dj));
    write_json_artifact(c, "initial_data.json", take(dj));
  }

  std::string gkc_payload;
  if (artifact_current(c, "gkc.json")) {
    gkc_payload = load_json_artifact(c, "gkc.json");
    std::printf("[certify] reusing %s\n", c.artifact("gkc.json").c_str());
  } else {
    certify_stage(c, m, bc, &gkc_payload);
  }
  if (const int rc = verdict_exit(gkc_payload); rc != 0) {
    std::printf("pipeline stopped at certification\n");
    return rc;
  }

  if (c.config.contains("initial_data")) {
    std::string compat_payload;
    if (artifact_current(c, "compat.json")) {
      compat_payload = load_json_artifact(c, "compat.json");
      std::printf("[compat] reusing %s\n", c.artifact("compat.json").c_str());
    } else {
      compat_stage(c, m, bc, &compat_payload);
    }
    if (compat_exit(compat_payload) != 0) {
      std::printf("pipeline stopped at compatibility\n");
      return 1;
    }

    if (c.config.contains("solve")) {
      if (artifact_current(c, "asym_norms.json"))
        std::printf("[asymptotic] reusing %s\n", c.artifact("asym_norms.json").c_str());
      else
        asym_stage(c, m, bc);

      if (artifact_current(c, "solution.json"))
        std::printf("[solve] reusing %s\n", c.artifact("solution.json").c_str());
      else
        solve_stage(c, m, bc);
    }
  }

  if (c.config.contains("experiment")) {
    std::string payload;
    if (artifact_current(c, "study.json")) {
      payload = load_json_artifact(c, "study.json");
      std::printf("[converge] reusing %s\n", c.artifact("study.json").c_str());
    } else {
      converge_stage(c, m, bc, &payload);
    }
    const int rc = converge_exit(c, payload);
    if (rc != 0) return rc;
  }
  std::printf("pipeline complete\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundary conditions for linear relaxation systems on the half line"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Ctx ctx;
  app.add_option("--out", ctx.out_dir, "artifact directory")->capture_default_str();
  auto* jobs_opt =
      app.add_option("--jobs", ctx.jobs, "worker threads (0: hardware concurrency)");
  app.add_option("--seed", ctx.seed,
                 "seed for randomized tooling; library subcommands are deterministic");

  // fallthrough lets the shared --out/--jobs/--seed options appear after the
  // subcommand name.
  const auto add_sub = [&](const char* name, const char* desc, bool needs_config) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->fallthrough();
    if (needs_config)
      sub->add_option("--config", ctx.config_path, "run configuration JSON")->required();
    return sub;
  };

  auto* preset = add_sub("preset-list", "list the built-in construction families", false);
  auto* construct = add_sub("construct-bc", "construct the boundary condition", true);
  auto* verify = add_sub("verify-gkc", "certify the generalized Kreiss condition", true);
  bool want_csv = false;
  verify->add_flag("--csv", want_csv, "also write the determinant ratio field CSV");
  auto* compat = add_sub("compat-check", "check corner compatibility of the data", true);
  auto* data = add_sub("build-data", "emit boundary and prepared initial data", true);
  auto* asym = add_sub("run-asymptotic", "sample the two-term expansion", true);
  asym->add_flag("--svg", ctx.want_svg, "also write the layer profile plot");
  auto* stiff = add_sub("run-stiff", "run the stiff finite-volume solver", true);
  auto* converge = add_sub("converge", "run the convergence-rate study", true);
  auto* pipeline = add_sub("pipeline", "run all stages with resumable artifacts", true);
  pipeline->add_flag("--svg", ctx.want_svg, "also write the layer profile plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }
  ctx.jobs_set = jobs_opt->count() > 0;

  try {
    if (preset->parsed()) return cmd_preset_list();
    if (construct->parsed()) return cmd_construct(ctx);
    if (verify->parsed()) return cmd_verify_gkc(ctx, want_csv);
    if (compat->parsed()) return cmd_compat(ctx);
    if (data->parsed()) return cmd_build_data(ctx);
    if (asym->parsed()) return cmd_run_asymptotic(ctx);
    if (stiff->parsed()) return cmd_run_stiff(ctx);
    if (converge->parsed()) return cmd_converge(ctx);
    if (pipeline->parsed()) return cmd_pipeline(ctx);
  } catch (const Exit& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code;
  }
  return 3;
}
