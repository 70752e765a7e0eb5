#ifndef LINKCLUST_H
#define LINKCLUST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LcStatus {
  LC_STATUS_OK = 0,
  LC_STATUS_NULL_POINTER = 1,
  LC_STATUS_INVALID_UTF8 = 2,
  LC_STATUS_IO = 3,
  LC_STATUS_PARSE = 4,
  LC_STATUS_INVALID_PARAM = 5,
  LC_STATUS_OUT_OF_RANGE = 6,
  LC_STATUS_INTERNAL = 7,
} LcStatus;

/*
 A loaded corpus.
 */
typedef struct LcCorpus LcCorpus;

/*
 The outcome of one clustering run.
 */
typedef struct LcResult LcResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL. Valid until
 the next call into this library on the same thread.
 */
const char *lc_last_error(void);

/*
 Load a JSONL corpus file.

 # Safety
 `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LcStatus lc_corpus_load_path(const char *path, struct LcCorpus **out);

/*
 Parse a corpus from JSONL text held in memory.

 # Safety
 `jsonl` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LcStatus lc_corpus_load_jsonl(const char *jsonl, struct LcCorpus **out);

/*
 Number of documents, or 0 for NULL.

 # Safety
 `corpus` must be NULL or a live handle.
 */
size_t lc_corpus_len(const struct LcCorpus *corpus);

/*
 # Safety
 `corpus` must be NULL or a handle not yet freed.
 */
void lc_corpus_free(struct LcCorpus *corpus);

/*
 Seed from links, then cluster with threshold `alpha`.

 # Safety
 `corpus` must be a live handle and `out` a valid pointer.
 */
enum LcStatus lc_cluster_linked(const struct LcCorpus *corpus, double alpha, struct LcResult **out);

/*
 # Safety
 `result` must be NULL or a live handle.
 */
size_t lc_result_k_seed(const struct LcResult *result);

/*
 # Safety
 `result` must be NULL or a live handle.
 */
size_t lc_result_k_final(const struct LcResult *result);

/*
 # Safety
 `result` must be NULL or a live handle.
 */
size_t lc_result_misc_len(const struct LcResult *result);

/*
 Copy the members of cluster `index` into `buf`. `*len` receives the
 cluster size; nothing is copied when `cap` is too small, so a call with
 `cap == 0` queries the size.

 # Safety
 `result` must be a live handle, `len` valid, and `buf` valid for `cap`
 elements when `cap > 0`.
 */
enum LcStatus lc_result_cluster_members(const struct LcResult *result,
                                        size_t index,
                                        size_t *buf,
                                        size_t cap,
                                        size_t *len);

/*
 The result as a JSON document; release with [`lc_string_free`].

 # Safety
 `result` must be a live handle and `out` a valid pointer.
 */
enum LcStatus lc_result_to_json(const struct LcResult *result, char **out);

/*
 # Safety
 `result` must be NULL or a handle not yet freed.
 */
void lc_result_free(struct LcResult *result);

/*
 # Safety
 `s` must be NULL or a string returned by this library and not yet freed.
 */
void lc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINKCLUST_H */
