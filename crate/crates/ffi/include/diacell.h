#ifndef DIACELL_H
#define DIACELL_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum DcStatus {
  DC_STATUS_OK = 0,
  DC_STATUS_NULL_POINTER = 1,
  DC_STATUS_INVALID_SPEC = 2,
  DC_STATUS_OUT_OF_DOMAIN = 3,
  DC_STATUS_OUT_OF_RANGE = 4,
  DC_STATUS_NUMERIC_OVERFLOW = 5,
  DC_STATUS_NO_VIBRATION = 6,
  DC_STATUS_WINDOW_NOT_FULL = 7,
  DC_STATUS_MONOTONICITY_VIOLATION = 8,
  DC_STATUS_PARSE_ERROR = 9,
  DC_STATUS_INVARIANT_VIOLATION = 10,
  DC_STATUS_ALL_TRIALS_FAILED = 11,
  DC_STATUS_CONFIG_ERROR = 12,
  DC_STATUS_IO_ERROR = 13,
  DC_STATUS_INVALID_ARGUMENT = 14,
  DC_STATUS_PANIC = 99,
} DcStatus;

typedef enum DcMode {
  DC_MODE_SINGLE = 1,
  DC_MODE_DUAL = 2,
} DcMode;

typedef enum DcChannelStatus {
  DC_CHANNEL_STATUS_OK = 0,
  DC_CHANNEL_STATUS_NO_VIBRATION = 1,
  DC_CHANNEL_STATUS_OUT_OF_RANGE = 2,
  DC_CHANNEL_STATUS_UNSUPPORTED = 3,
} DcChannelStatus;

/**
 * Opaque simulated cell.
 */
typedef struct DcCell DcCell;

/**
 * Opaque calibration table.
 */
typedef struct DcTable DcTable;

typedef struct DcTableRow {
  double pressure_pa;
  double length_m;
  double frequency_hz;
} DcTableRow;

typedef struct DcChannelReading {
  double applied_pa;
  double frequency_hz;
  double pressure_pa;
  enum DcChannelStatus status;
} DcChannelReading;

typedef struct DcReading {
  uint64_t cycle_index;
  enum DcMode mode;
  struct DcChannelReading ch1;
  struct DcChannelReading ch2;
  double p_avg_pa;
  double p_diff_pa;
  /**
   * Average channel current, 100..200 Pa onto 4..20 mA, 8-bit DAC.
   */
  double i_avg_ma;
  /**
   * Differential channel current, -50..50 Pa onto 4..20 mA, 8-bit DAC.
   */
  double i_diff_ma;
} DcReading;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after success.
 * The pointer stays valid until the next call on this thread.
 */
const char *dc_last_error_message(void);

/**
 * The built-in six-knot table. Never null.
 */
struct DcTable *dc_table_default(void);

/**
 * Loads a table CSV into `*out`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum DcStatus dc_table_load(const char *path, struct DcTable **out);

/**
 * # Safety
 * `table` must come from this library; `path` must be NUL-terminated.
 */
enum DcStatus dc_table_save(const struct DcTable *table, const char *path);

/**
 * # Safety
 * `table` must come from this library and not be used afterwards.
 */
void dc_table_free(struct DcTable *table);

/**
 * Number of knots, or 0 for a null handle.
 *
 * # Safety
 * `table` must be null or come from this library.
 */
size_t dc_table_len(const struct DcTable *table);

/**
 * # Safety
 * `table` must come from this library and `out` be writable.
 */
enum DcStatus dc_table_row(const struct DcTable *table, size_t index, struct DcTableRow *out);

/**
 * Enables or disables saturation at the table ends.
 *
 * # Safety
 * `table` must come from this library.
 */
enum DcStatus dc_table_set_clamp(struct DcTable *table, bool clamp);

/**
 * # Safety
 * `table` must come from this library and `out` be writable.
 */
enum DcStatus dc_table_frequency_from_pressure(const struct DcTable *table,
                                               double pressure_pa,
                                               double *out);

/**
 * # Safety
 * `table` must come from this library and `out` be writable.
 */
enum DcStatus dc_table_pressure_from_frequency(const struct DcTable *table,
                                               double frequency_hz,
                                               double *out);

/**
 * A cell with default acquisition settings and the built-in table.
 * Channel 2 uses seed `seed + 1`.
 *
 * # Safety
 * `out` must be writable.
 */
enum DcStatus dc_cell_new(enum DcMode mode, uint64_t seed, double noise_sigma, struct DcCell **out);

/**
 * Like [`dc_cell_new`] but with a copy of `table`.
 *
 * # Safety
 * `table` must come from this library and `out` be writable.
 */
enum DcStatus dc_cell_new_with_table(const struct DcTable *table,
                                     enum DcMode mode,
                                     uint64_t seed,
                                     double noise_sigma,
                                     struct DcCell **out);

/**
 * # Safety
 * `cell` must come from this library and not be used afterwards.
 */
void dc_cell_free(struct DcCell *cell);

/**
 * One measurement cycle. Per-channel failures show up in the channel
 * status, not the return code.
 *
 * # Safety
 * `cell` must come from this library and `out` be writable.
 */
enum DcStatus dc_cell_run_cycle(const struct DcCell *cell,
                                double p1_pa,
                                double p2_pa,
                                uint64_t cycle_index,
                                struct DcReading *out);

/**
 * Median of `trials` cycles (odd).
 *
 * # Safety
 * `cell` must come from this library and `out` be writable.
 */
enum DcStatus dc_cell_median_of_trials(const struct DcCell *cell,
                                       double p1_pa,
                                       double p2_pa,
                                       size_t trials,
                                       uint64_t cycle_index,
                                       struct DcReading *out);

/**
 * Fundamental frequency of `len` ADC codes sampled at `rate_hz`.
 *
 * # Safety
 * `codes` must point to `len` readable values and `out` be writable.
 */
enum DcStatus dc_estimate_frequency(const uint16_t *codes, size_t len, double rate_hz, double *out);

/**
 * Pressure-induced vertex deflection of a shell diaphragm (m).
 *
 * # Safety
 * `out` must be writable.
 */
enum DcStatus dc_shell_vertex_drift(double radius_m,
                                    double thickness_m,
                                    double height_m,
                                    double youngs_modulus_pa,
                                    double poisson,
                                    double pressure_pa,
                                    double *out);

/**
 * First-mode frequency of a strip cantilever (Hz).
 *
 * # Safety
 * `out` must be writable.
 */
enum DcStatus dc_cantilever_frequency(double modulus_pa,
                                      double width_m,
                                      double thickness_m,
                                      double strip_length_m,
                                      double density_kg_m3,
                                      double free_length_m,
                                      double *out);

/**
 * Transmitter current for `pressure_pa` mapped from `[p_lo, p_hi]` onto
 * 4–20 mA. `quantized` selects the DAC output over the ideal value.
 *
 * # Safety
 * `out` must be writable.
 */
enum DcStatus dc_to_current(double pressure_pa,
                            double p_lo,
                            double p_hi,
                            uint8_t dac_bits,
                            bool quantized,
                            double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIACELL_H */
