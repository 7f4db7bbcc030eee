/* C interface to the coordlab workbench: opaque session handle carrying the
 * experiment configuration, error-code returns, and one entry point per
 * pipeline stage. All functions return COORDLAB_OK (0) on success; on
 * failure coordlab_last_error() describes the problem. */
#ifndef COORDLAB_CAPI_H
#define COORDLAB_CAPI_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct coordlab_session coordlab_session;

#define COORDLAB_OK 0
#define COORDLAB_ERROR 1
#define COORDLAB_CONFIG_ERROR 2
#define COORDLAB_STAGE_ERROR 3
#define COORDLAB_VERIFY_ERROR 4

const char* coordlab_version(void);

coordlab_session* coordlab_session_new(void);
void coordlab_session_free(coordlab_session* s);
const char* coordlab_last_error(const coordlab_session* s);

/* Configuration: key-value pairs as in the config file format; presets are
 * "smoke", "desk", "full". Loading a file or applying a preset replaces
 * earlier settings for the keys involved. */
int coordlab_config_set(coordlab_session* s, const char* key, const char* value);
int coordlab_config_load(coordlab_session* s, const char* path);
int coordlab_config_preset(coordlab_session* s, const char* scale);
/* Writes the canonical configuration into buffer (NUL-terminated,
 * truncating); returns the untruncated length. */
int coordlab_config_dump(const coordlab_session* s, char* buffer, size_t size);

int coordlab_set_verbose(coordlab_session* s, int enabled);

/* Stages on explicit paths. */
int coordlab_gen(coordlab_session* s, int word_order, int replicate,
                 const char* grammar_out, const char* corpus_out);
int coordlab_transform(coordlab_session* s, const char* corpus_in,
                       const char* regime, const char* corpus_out);
int coordlab_oracle(coordlab_session* s, const char* corpus_in,
                    const char* oracle_out);
int coordlab_train(coordlab_session* s, const char* oracle_in,
                   const char* grammar_in, const char* model_out);
int coordlab_eval(coordlab_session* s, const char* model_in,
                  const char* corpus_in, const char* measures_out);
int coordlab_report(coordlab_session* s, const char* const* measures_files,
                    size_t n_files, const char* out_dir);

/* Full cached pipeline into out_dir. */
int coordlab_pipeline(coordlab_session* s, const char* out_dir);

/* Cross-module oracle checks; pass/fail lines land in buffer (truncating).
 * Returns COORDLAB_VERIFY_ERROR when any check fails. */
int coordlab_verify(coordlab_session* s, char* buffer, size_t size);

#ifdef __cplusplus
}
#endif

#endif
