#ifndef RELAXBC_CAPI_H
#define RELAXBC_CAPI_H

/*
 * C interface of the boundary-condition library.  Every operation either
 * returns RBC_OK or an error status; rbc_last_error() then holds a message
 * for the calling thread.  Structured inputs and outputs are JSON text
 * (schemas documented in the library headers and the README); every char*
 * output is owned by the caller and released with rbc_string_free().
 * Handles are opaque, created and destroyed by the matching pair below, and
 * may be shared across threads for read-only calls.
 */

#ifdef __cplusplus
extern "C" {
#endif

/* Mirrors the library error enumeration one-to-one; keep the order stable. */
typedef enum rbc_status {
  RBC_OK = 0,
  RBC_INVALID_ARGUMENT,
  RBC_ORDERING,
  RBC_NON_CHARACTERISTIC,
  RBC_RELAXATION_SPEED,
  RBC_SUBCHARACTERISTIC,
  RBC_SINGULAR_MATRIX,
  RBC_INVALID_GIVEN_BC,
  RBC_DEGENERATE_CONSTRUCTION,
  RBC_INVALID_LAYER_DATUM,
  RBC_EIGEN_SPLIT_FAILURE,
  RBC_REDUCTION_FAILURE,
  RBC_CONSTRAINT_VIOLATION,
  RBC_BOUNDARY_SOLVE_FAILURE,
  RBC_SYMMETRIZER_UNAVAILABLE,
  RBC_INCONCLUSIVE_STUDY,
  RBC_CONFIG_ERROR,
  RBC_IO_ERROR,
  RBC_INTERNAL
} rbc_status;

const char* rbc_status_name(rbc_status s);
/* Message of the most recent failing call on this thread; empty otherwise. */
const char* rbc_last_error(void);
void rbc_string_free(char* s);

typedef struct rbc_model rbc_model;
typedef struct rbc_bc rbc_bc;
typedef struct rbc_asym rbc_asym;
typedef struct rbc_solution rbc_solution;
typedef struct rbc_study rbc_study;

/* --- model ------------------------------------------------------------- */

/* json: {"T": [[...]], "lambda": [...], "a": [...]} */
rbc_status rbc_model_parse(const char* json, rbc_model** out);
/* {"n", "l", "condT", "subcharacteristic": "strict"|"weak"|"violated"} */
rbc_status rbc_model_info(const rbc_model* m, char** json_out);
void rbc_model_free(rbc_model* m);

/* --- boundary condition ------------------------------------------------ */

/* JSON array of the preset family names (plus "custom"). */
rbc_status rbc_preset_list(char** json_out);

/* given_json: {"Bhat": [[...]], "bhat": signal}
 * construction_json: {"family": name, "params": {...}} or null for the
 * all-default custom construction. */
rbc_status rbc_construct_bc(const rbc_model* m, const char* given_json,
                            const char* construction_json, rbc_bc** out);
rbc_status rbc_bc_parse(const char* json, rbc_bc** out);
rbc_status rbc_bc_to_json(const rbc_bc* bc, char** json_out);
/* Fills the first- and second-order boundary data from the initial profile
 * (corner compatibility); u0_json is a profile document. */
rbc_status rbc_bc_attach_data(const rbc_model* m, rbc_bc* bc, const char* u0_json);
void rbc_bc_free(rbc_bc* bc);

/* --- Kreiss certification ---------------------------------------------- */

/* sampling_json: certifier overrides or null for defaults.  The report
 * carries verdict PASS/FAIL/INCONCLUSIVE, the certified lower bound and the
 * minimizing frequency. */
rbc_status rbc_certify(const rbc_model* m, const rbc_bc* bc, const char* sampling_json,
                       char** report_json);
/* CSV of the normalized determinant ratio over the sampling shells:
 * delta,eta,xi0_re,xi0_im,ratio */
rbc_status rbc_gkc_ratio_csv(const rbc_model* m, const rbc_bc* bc, const char* sampling_json,
                             char** csv_out);

/* --- compatibility and initial data ------------------------------------ */

/* eps_json: array of sample rates or null for [1, 1e-2, 1e-4]. */
rbc_status rbc_compat_check(const rbc_model* m, const char* given_json, const rbc_bc* bc,
                            const char* u0_json, const char* eps_json, char** report_json);
/* {"u0", "p1", "p2"} profile documents of the prepared initial state. */
rbc_status rbc_build_initial_data(const rbc_model* m, const char* u0_json, char** data_json);

/* --- asymptotic solution ----------------------------------------------- */

rbc_status rbc_asym_create(const rbc_model* m, const char* given_json, const rbc_bc* bc,
                           const char* u0_json, rbc_asym** out);
/* query_json: {"eps": e, "times": [...], "x_max": X, "points": k}.
 * CSV columns: x,t,u_0..u_{n-1},p_0..p_{n-1} of the assembled expansion. */
rbc_status rbc_asym_fields_csv(const rbc_asym* a, const char* query_json, char** csv_out);
/* Residual L2 norms per queried time plus the reflection mismatch. */
rbc_status rbc_asym_norms(const rbc_asym* a, const char* query_json, char** json_out);
/* SVG plot of the layer profiles nu0, nu1 against the stretched variable. */
rbc_status rbc_asym_layers_svg(const rbc_asym* a, const char* query_json, char** svg_out);
void rbc_asym_free(rbc_asym* a);

/* --- stiff solver ------------------------------------------------------ */

/* data_json: {"u0", "p1", "p2"} (p1/p2 optional); grid_json: {"X", "N",
 * "cfl", "t_star", "snapshot_stride"}; solver_json: {"order", "relaxation",
 * "transport"} or null. */
rbc_status rbc_run_stiff(const rbc_model* m, const rbc_bc* bc, const char* data_json,
                         const char* grid_json, double eps, const char* solver_json,
                         rbc_solution** out);
/* {"cells", "dt", "eps", "snapshots", "times", "l2", "h1", "energy"} */
rbc_status rbc_solution_summary(const rbc_solution* s, char** json_out);
/* CSV rows t,x,u_0..u_{n-1},p_0..p_{n-1} over the stored snapshots. */
rbc_status rbc_solution_csv(const rbc_solution* s, char** csv_out);
void rbc_solution_free(rbc_solution* s);

/* --- convergence study ------------------------------------------------- */

/* experiment_json: the study section (eps list, policy, grid, norms,
 * sample_time, time_samples, solver, jobs).  Fails with
 * RBC_INCONCLUSIVE_STUDY when a norm has too few trusted rows. */
rbc_status rbc_converge(const rbc_model* m, const char* given_json, const rbc_bc* bc,
                        const char* u0_json, const char* experiment_json, rbc_study** out);
rbc_status rbc_study_csv(const rbc_study* s, char** out);
rbc_status rbc_study_json(const rbc_study* s, char** out);
rbc_status rbc_study_svg(const rbc_study* s, char** out);
/* bands_json: {"L2": {"lo", "hi", "above_passes"}, ...}; result
 * {"verdicts": {norm: "pass"|"flagged_above"|"fail"}, "all_pass": bool}. */
rbc_status rbc_study_judge(const rbc_study* s, const char* bands_json, char** verdict_json);
void rbc_study_free(rbc_study* s);

#ifdef __cplusplus
}
#endif

#endif /* RELAXBC_CAPI_H */
