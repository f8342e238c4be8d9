#ifndef FOGFORM_H
#define FOGFORM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of an API call.
 */
typedef enum FfStatus {
  FF_STATUS_OK = 0,
  FF_STATUS_NULL_POINTER = 1,
  FF_STATUS_DOMAIN = 2,
  FF_STATUS_UNSTABLE = 3,
  FF_STATUS_INFEASIBLE = 4,
  FF_STATUS_ORACLE_REFUSED = 5,
  FF_STATUS_CONFIG = 6,
  FF_STATUS_IO = 7,
  FF_STATUS_INVALID_STRING = 8,
  FF_STATUS_BUFFER_TOO_SMALL = 9,
  FF_STATUS_PANIC = 10,
} FfStatus;

/**
 * Opaque set of paths available to the initiating node.
 */
typedef struct FfNodeSet FfNodeSet;

/**
 * Opaque result of [`ff_solve`].
 */
typedef struct FfSolveReport FfSolveReport;

/**
 * Radio parameters in linear units (Hz, W/Hz, W, bits).
 */
typedef struct FfRadio {
  double bandwidth_hz;
  double noise_psd_w_per_hz;
  double tx_power_w;
  double pathloss_const;
  double pathloss_exp;
  double packet_size_bits;
} FfRadio;

/**
 * A candidate neighbor for online selection, in arrival order.
 */
typedef struct FfCandidate {
  /**
   * Link rate from the initiator, packets/s.
   */
  double mu_tx;
  /**
   * Computation queue rate, packets/s.
   */
  double mu;
  /**
   * Per-packet computing constant.
   */
  double c;
} FfCandidate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ff_last_error(void);

/**
 * Reference radio: 15 kHz, -174 dBm/Hz noise, 20 dBm, 1e-3 d^-4, 1500-byte packets.
 */
enum FfStatus ff_radio_reference(struct FfRadio *radio);

/**
 * Link service rate in packets/s at `distance_m`.
 */
enum FfStatus ff_service_rate(double distance_m, const struct FfRadio *radio, double *rate);

/**
 * Mean M/D/1 waiting time at arrival rate `lambda` and service rate `mu`.
 */
enum FfStatus ff_md1_wait(double lambda, double mu, double *wait);

/**
 * Creates a node set with only the local path. `x_i` is the input rate.
 */
enum FfStatus ff_node_set_new(double x_i,
                              double local_mu,
                              double local_c,
                              struct FfNodeSet **nodes);

/**
 * Sets (or replaces) the cloud path.
 */
enum FfStatus ff_node_set_set_cloud(struct FfNodeSet *nodes, double mu_tx, double c_cloud);

/**
 * Appends a neighboring fog node.
 */
enum FfStatus ff_node_set_add_neighbor(struct FfNodeSet *nodes, double mu_tx, double mu, double c);

void ff_node_set_free(struct FfNodeSet *nodes);

/**
 * Min-max task distribution. Paths are ordered local, cloud (if set),
 * then neighbors in insertion order.
 */
enum FfStatus ff_solve(const struct FfNodeSet *nodes,
                       double eta,
                       double tolerance,
                       struct FfSolveReport **report);

void ff_report_free(struct FfSolveReport *report);

/**
 * Number of paths in the report; 0 for a null handle.
 */
size_t ff_report_path_count(const struct FfSolveReport *report);

/**
 * Fraction of the input, delay, and whether the path carries load.
 */
enum FfStatus ff_report_path(const struct FfSolveReport *report,
                             size_t index,
                             double *alpha,
                             double *delay,
                             bool *active);

/**
 * Common delay, worst path delay, and total cost (worst delay plus the
 * per-node cost).
 */
enum FfStatus ff_report_summary(const struct FfSolveReport *report,
                                double *common_delay,
                                double *max_delay,
                                double *total_cost);

/**
 * Online neighbor selection over `count` candidates in arrival order.
 * Writes the 0-based arrival positions of accepted candidates into
 * `chosen` (capacity `capacity`, at least `max_neighbors`) and their
 * number into `chosen_len`. With `fill_remaining`, the last arrivals are
 * taken when they are needed to reach `max_neighbors`.
 */
enum FfStatus ff_online_secretary(const struct FfCandidate *candidates,
                                  size_t count,
                                  size_t tau,
                                  size_t max_neighbors,
                                  bool fill_remaining,
                                  size_t *chosen,
                                  size_t capacity,
                                  size_t *chosen_len);

/**
 * Runs a named experiment and writes `<name>.csv` and `<name>.manifest`
 * into `out_dir`. `config_path` may be NULL for the built-in defaults.
 * `overrides` holds `override_count` strings of the form `key=value`.
 */
enum FfStatus ff_run_experiment(const char *name,
                                const char *config_path,
                                const char *const *overrides,
                                size_t override_count,
                                const char *out_dir,
                                size_t workers);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOGFORM_H */
