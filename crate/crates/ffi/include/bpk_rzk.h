#ifndef BPK_RZK_H
#define BPK_RZK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BpkStatus {
  BPK_STATUS_OK = 0,
  /**
   * The verifier rejected or the prover halted.
   */
  BPK_STATUS_REJECT = 1,
  BPK_STATUS_NULL_POINTER = 2,
  BPK_STATUS_INVALID_ARGUMENT = 3,
  /**
   * Out-of-order delivery, unknown session or snapshot.
   */
  BPK_STATUS_PROTOCOL = 4,
  BPK_STATUS_BUFFER_TOO_SMALL = 5,
  BPK_STATUS_INTERNAL = 6,
} BpkStatus;

typedef enum BpkProfile {
  BPK_PROFILE_TINY = 0,
  BPK_PROFILE_SMALL = 1,
  /**
   * Tiny group with the Barak sub-protocol.
   */
  BPK_PROFILE_TOY_BARAK = 2,
} BpkProfile;

/**
 * Session state after a delivery.
 */
typedef enum BpkVerdict {
  BPK_VERDICT_PENDING = 0,
  BPK_VERDICT_ACCEPT = 1,
  BPK_VERDICT_REJECT = 2,
  BPK_VERDICT_HALT = 3,
} BpkVerdict;

/**
 * Opaque: one verifier key, one prover tape, any number of sessions.
 */
typedef struct BpkWorld BpkWorld;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *bpk_status_message(enum BpkStatus s);

/**
 * `g^x mod p` in the group `(p, q, g)`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum BpkStatus bpk_owf_eval(uint64_t p, uint64_t q, uint64_t g, uint64_t x, uint64_t *out);

/**
 * Registers a verifier key and a statement pool, all derived from `seed`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum BpkStatus bpk_world_new(enum BpkProfile profile,
                             uint32_t t,
                             uint64_t seed,
                             struct BpkWorld **out);

/**
 * # Safety
 * `w` must come from `bpk_world_new` and not be used afterwards. Null is
 * accepted.
 */
void bpk_world_free(struct BpkWorld *w);

/**
 * Starts an honest session on pool statement `index`.
 *
 * # Safety
 * `w` must be a live handle; `out_sid` valid for one write.
 */
enum BpkStatus bpk_world_start(struct BpkWorld *w, uint32_t index, uint32_t *out_sid);

/**
 * Delivers the message in flight for `sid`.
 *
 * # Safety
 * `w` must be a live handle; `out` valid for one write.
 */
enum BpkStatus bpk_world_deliver(struct BpkWorld *w, uint32_t sid, enum BpkVerdict *out);

/**
 * Delivers until `sid` has a verdict. Returns `BPK_REJECT` unless it
 * accepted.
 *
 * # Safety
 * `w` must be a live handle; `out` may be null.
 */
enum BpkStatus bpk_world_run_to_end(struct BpkWorld *w, uint32_t sid, enum BpkVerdict *out);

/**
 * # Safety
 * `w` must be a live handle; `id` a NUL-terminated UTF-8 string.
 */
enum BpkStatus bpk_world_snap(struct BpkWorld *w, uint32_t sid, const char *id);

/**
 * Restores both parties of `sid` to snapshot `id`.
 *
 * # Safety
 * `w` must be a live handle; `id` a NUL-terminated UTF-8 string.
 */
enum BpkStatus bpk_world_reset(struct BpkWorld *w, uint32_t sid, const char *id);

/**
 * Whether every prover input prefix so far got exactly one answer.
 *
 * # Safety
 * `w` must be a live handle; `out` valid for one write.
 */
enum BpkStatus bpk_world_prefixes_unique(struct BpkWorld *w, bool *out);

/**
 * Copies the transcript log, NUL-terminated, into `buf`. `needed`
 * receives the size including the terminator; call with `len = 0` to
 * query it.
 *
 * # Safety
 * `w` must be a live handle; `buf` valid for `len` bytes (may be null when
 * `len` is 0); `needed` may be null.
 */
enum BpkStatus bpk_world_log(struct BpkWorld *w, char *buf, size_t len, size_t *needed);

/**
 * Runs the reset attack against a prover variant (`"full"`, `"no-prf"`,
 * `"no-subproof"`, `"no-prf-no-subproof"`); path A profiles only.
 *
 * # Safety
 * `variant` must be a NUL-terminated string; `out_successes` valid for one
 * write.
 */
enum BpkStatus bpk_reset_attack(enum BpkProfile profile,
                                const char *variant,
                                uint32_t trials,
                                uint64_t seed,
                                uint32_t *out_successes);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BPK_RZK_H */
