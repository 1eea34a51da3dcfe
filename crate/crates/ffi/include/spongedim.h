/* C interface for the spongedim library. */

#ifndef SPONGEDIM_H
#define SPONGEDIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared with the command-line tool.
 */
#define SPONGEDIM_OK 0

#define SPONGEDIM_INTERNAL 1

#define SPONGEDIM_INVALID 2

#define SPONGEDIM_PARSE 3

#define SPONGEDIM_SEPARATION 4

#define SPONGEDIM_NOT_APPLICABLE 5

#define SPONGEDIM_NULL_ARGUMENT 6

/**
 * An opaque validated sponge system.
 */
typedef struct SpongedimSystem SpongedimSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failing call on this thread. The pointer is
 * valid until the next call into the library from the same thread.
 */
const char *spongedim_last_error(void);

/**
 * Release a string returned by this library.
 */
void spongedim_string_free(char *s);

/**
 * Parse and validate a sponge spec (JSON text). On success stores a handle
 * in `out` and returns 0; otherwise returns an error code and leaves a
 * message in `spongedim_last_error`.
 */
int32_t spongedim_system_parse(const char *spec_json, struct SpongedimSystem **out);

/**
 * Release a system handle.
 */
void spongedim_system_free(struct SpongedimSystem *handle);

/**
 * Ambient dimension of the system.
 */
uint32_t spongedim_system_dimension(const struct SpongedimSystem *handle);

/**
 * Number of maps in the system.
 */
uint32_t spongedim_system_map_count(const struct SpongedimSystem *handle);

/**
 * Whether coordinate `x` dominates coordinate `y` (1-based coordinates).
 * Returns 1/0, or -1 on bad arguments.
 */
int32_t spongedim_system_dominates(const struct SpongedimSystem *handle, uint32_t x, uint32_t y);

/**
 * Stopping time of the eventually periodic word `prefix . cycle^inf` at the
 * exact scale `r` (a string such as "1/20000" or "0.05") in the 1-based
 * coordinate. Returns the stopping length, or 0 on error.
 */
uint64_t spongedim_stopping_time(const struct SpongedimSystem *handle,
                                 const uint32_t *prefix,
                                 uintptr_t prefix_len,
                                 const uint32_t *cycle,
                                 uintptr_t cycle_len,
                                 const char *scale,
                                 uint32_t coord);

/**
 * Validate command: report JSON in `out_json`, CLI-compatible status code.
 */
int32_t spongedim_run_validate(const char *spec_json, char **out_json);

/**
 * Orderings command.
 */
int32_t spongedim_run_orderings(const char *spec_json, char **out_json);

/**
 * Dims command. `measure` is "given", "uniform" or "natural:1,2"; `oracle`
 * is "off", "quick" or "full".
 */
int32_t spongedim_run_dims(const char *spec_json,
                           const char *measure,
                           uint64_t seed,
                           const char *oracle,
                           uint8_t formula_only,
                           char **out_json);

/**
 * Gap command.
 */
int32_t spongedim_run_gap(const char *spec_json, uint64_t seed, char **out_json);

/**
 * Render command: SVG text in `out_svg`.
 */
int32_t spongedim_render_svg(const char *spec_json, uint32_t depth, char **out_svg);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SPONGEDIM_H */
