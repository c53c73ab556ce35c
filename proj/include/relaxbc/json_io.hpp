#pragma once

#include <string>

#include "json.hpp"
#include "relaxbc/bc_construct.hpp"
#include "relaxbc/compat.hpp"
#include "relaxbc/gkc.hpp"
#include "relaxbc/harness.hpp"
#include "relaxbc/model.hpp"
#include "relaxbc/stiff_solver.hpp"

namespace relaxbc {

using Json = nlohmann::ordered_json;

/// Parses JSON text; syntax errors surface as errc::config_error with the
/// line/column diagnostics of the underlying parser.
Json parse_json_text(const std::string& text);

/// load: errc::io_error when unreadable, then parse_json_text.
/// save: creates parent directories; errc::io_error on failure.
Json load_json_file(const std::string& path);
void save_text_file(const std::string& path, const std::string& text);

/// Matrices are nested row-major arrays, vectors flat arrays; all numbers
/// IEEE-754 doubles (the serializer emits shortest round-tripping decimals).
Json to_json(const Mat& m);
Json to_json(const Vec& v);
Mat mat_from_json(const Json& j, const std::string& where);
Vec vec_from_json(const Json& j, const std::string& where);

/// Signals: one array per component of terms
/// {"poly": [c0, c1, ...], "rate": r, "freq": f, "phase": ph}; rate, freq and
/// phase default to 0.  Profiles: {"poly": [...], "center": c, "beta": b}
/// with center defaulting to 0 and beta (> 0) to 1.
Json to_json(const SmoothSignal& s);
SmoothSignal signal_from_json(const Json& j, const std::string& where);
Json to_json(const SmoothProfile& p);
SmoothProfile profile_from_json(const Json& j, const std::string& where);

/// Model document {"T": [[...]], "lambda": [...], "a": [...]}; parsing runs
/// the full model validation, so its errors keep their own codes.
Json to_json(const SpectralModel& m);
SpectralModel model_from_json(const Json& j);

Json to_json(const GivenBoundaryCondition& g);
GivenBoundaryCondition given_bc_from_json(const Json& j);

/// The completed boundary condition round-trips with all derived blocks, so
/// downstream stages can run from the artifact alone.
Json to_json(const ConstructedBC& bc);
ConstructedBC bc_from_json(const Json& j);

Json to_json(const CertifyReport& r);
Json to_json(const CompatibilityReport& r);

Json to_json(const RelaxationInitialData& d);
RelaxationInitialData initial_data_from_json(const Json& j);

Json to_json(const Grid1D& g);
Grid1D grid_from_json(const Json& j, const std::string& where);
Json to_json(const SolverOptions& o);
SolverOptions solver_options_from_json(const Json& j, const std::string& where);
Json to_json(const SamplingConfig& c);
SamplingConfig sampling_from_json(const Json& j, const std::string& where);

StudyNorm study_norm_from_name(const std::string& name, const std::string& where);

/// Construction free parameters; the preset variant mirrors PresetParams
/// field names as keys, every block optional.
ConstructionParams construction_params_from_json(const Json& j, const std::string& where);
PresetParams preset_params_from_json(const Json& j, const std::string& where);

/// The experiment section of a run config: everything of ExperimentSpec
/// except the problem objects (model, boundary condition, data), plus
/// optional per-norm acceptance bands checked by the CLI.
struct StudyConfig {
  std::string preset = "custom";
  std::vector<double> eps;
  GridPolicy policy;
  Grid1D grid;
  std::vector<StudyNorm> norms{StudyNorm::L2, StudyNorm::H1};
  double sample_time = 0.5;
  int time_samples = 5;
  SolverOptions solver;
  unsigned jobs = 0;
  std::vector<std::pair<StudyNorm, SlopeBand>> bands;
};
StudyConfig study_config_from_json(const Json& j, const std::string& where);

/// One self-contained run document with sections
///   model, given_bc            required
///   construction               {"family": name, "params": {...}}; default custom/empty
///   gkc                        certifier sampling overrides
///   initial_data               {"u0": profile}
///   solve                      {"grid": {...}, "eps": e, "solver": {...}}
///   experiment                 study section, see StudyConfig
/// Unknown keys anywhere are rejected before any computation.
struct RunConfig {
  SpectralModel model;
  GivenBoundaryCondition given;
  std::string family = "custom";
  PresetParams preset_params;
  ConstructionParams custom_params;
  SamplingConfig gkc;
  bool has_initial_data = false;
  SmoothProfile u0;
  Grid1D grid;
  double eps = 1e-2;
  SolverOptions solver;
  bool has_study = false;
  StudyConfig study;
};
RunConfig run_config_from_json(const Json& j);

}  // namespace relaxbc
