#include "coordlab/capi.h"

#include <cstring>
#include <iostream>
#include <string>

#include "coordlab/error.hpp"
#include "coordlab/pipeline.hpp"

using namespace coordlab;

struct coordlab_session {
  Config config = Config::defaults();
  std::string last_error;
  bool verbose = false;
};

namespace {

int fail(coordlab_session* s, int code, const std::string& msg) {
  if (s) s->last_error = msg;
  return code;
}

template <class Fn>
int guarded(coordlab_session* s, int failure_code, Fn&& fn) {
  if (!s) return COORDLAB_ERROR;
  try {
    return fn();
  } catch (const ConfigError& e) {
    return fail(s, COORDLAB_CONFIG_ERROR, e.what());
  } catch (const std::exception& e) {
    return fail(s, failure_code, e.what());
  }
}

int fill_buffer(const std::string& text, char* buffer, size_t size) {
  if (buffer && size > 0) {
    size_t n = text.size() < size - 1 ? text.size() : size - 1;
    std::memcpy(buffer, text.data(), n);
    buffer[n] = '\0';
  }
  return static_cast<int>(text.size());
}

}  // namespace

extern "C" {

const char* coordlab_version(void) { return kCoordlabVersion; }

coordlab_session* coordlab_session_new(void) { return new coordlab_session(); }

void coordlab_session_free(coordlab_session* s) { delete s; }

const char* coordlab_last_error(const coordlab_session* s) {
  return s ? s->last_error.c_str() : "null session";
}

int coordlab_config_set(coordlab_session* s, const char* key, const char* value) {
  if (!key || !value) return fail(s, COORDLAB_CONFIG_ERROR, "null key or value");
  return guarded(s, COORDLAB_CONFIG_ERROR, [&] {
    s->config.set(key, value);
    return COORDLAB_OK;
  });
}

int coordlab_config_load(coordlab_session* s, const char* path) {
  if (!path) return fail(s, COORDLAB_CONFIG_ERROR, "null path");
  return guarded(s, COORDLAB_CONFIG_ERROR, [&] {
    Config base = s->config;
    Config loaded = Config::load(path);
    s->config = loaded;
    return COORDLAB_OK;
  });
}

int coordlab_config_preset(coordlab_session* s, const char* scale) {
  if (!scale) return fail(s, COORDLAB_CONFIG_ERROR, "null scale");
  return guarded(s, COORDLAB_CONFIG_ERROR, [&] {
    s->config = Config::preset(scale);
    return COORDLAB_OK;
  });
}

int coordlab_config_dump(const coordlab_session* s, char* buffer, size_t size) {
  if (!s) return -1;
  return fill_buffer(s->config.canonical_string(), buffer, size);
}

int coordlab_set_verbose(coordlab_session* s, int enabled) {
  if (!s) return COORDLAB_ERROR;
  s->verbose = enabled != 0;
  return COORDLAB_OK;
}

int coordlab_gen(coordlab_session* s, int word_order, int replicate,
                 const char* grammar_out, const char* corpus_out) {
  if (!grammar_out || !corpus_out) return fail(s, COORDLAB_CONFIG_ERROR, "null path");
  return guarded(s, COORDLAB_STAGE_ERROR, [&] {
    stage_gen(s->config, word_order, replicate, grammar_out, corpus_out);
    return COORDLAB_OK;
  });
}

int coordlab_transform(coordlab_session* s, const char* corpus_in,
                       const char* regime, const char* corpus_out) {
  if (!corpus_in || !regime || !corpus_out)
    return fail(s, COORDLAB_CONFIG_ERROR, "null argument");
  return guarded(s, COORDLAB_STAGE_ERROR, [&] {
    stage_transform(corpus_in, regime_from_name(regime), corpus_out);
    return COORDLAB_OK;
  });
}

int coordlab_oracle(coordlab_session* s, const char* corpus_in,
                    const char* oracle_out) {
  if (!corpus_in || !oracle_out) return fail(s, COORDLAB_CONFIG_ERROR, "null path");
  return guarded(s, COORDLAB_STAGE_ERROR, [&] {
    stage_oracle(corpus_in, oracle_out);
    return COORDLAB_OK;
  });
}

int coordlab_train(coordlab_session* s, const char* oracle_in,
                   const char* grammar_in, const char* model_out) {
  if (!oracle_in || !grammar_in || !model_out)
    return fail(s, COORDLAB_CONFIG_ERROR, "null path");
  return guarded(s, COORDLAB_STAGE_ERROR, [&] {
    stage_train(s->config, oracle_in, grammar_in, model_out);
    return COORDLAB_OK;
  });
}

int coordlab_eval(coordlab_session* s, const char* model_in,
                  const char* corpus_in, const char* measures_out) {
  if (!model_in || !corpus_in || !measures_out)
    return fail(s, COORDLAB_CONFIG_ERROR, "null path");
  return guarded(s, COORDLAB_STAGE_ERROR, [&] {
    stage_eval(s->config, model_in, corpus_in, measures_out);
    return COORDLAB_OK;
  });
}

int coordlab_report(coordlab_session* s, const char* const* measures_files,
                    size_t n_files, const char* out_dir) {
  if (!measures_files || !out_dir || n_files == 0)
    return fail(s, COORDLAB_CONFIG_ERROR, "no measures files");
  return guarded(s, COORDLAB_STAGE_ERROR, [&] {
    std::vector<std::string> files;
    for (size_t i = 0; i < n_files; ++i) files.push_back(measures_files[i]);
    stage_report(s->config, files, out_dir);
    return COORDLAB_OK;
  });
}

int coordlab_pipeline(coordlab_session* s, const char* out_dir) {
  if (!out_dir) return fail(s, COORDLAB_CONFIG_ERROR, "null output directory");
  return guarded(s, COORDLAB_STAGE_ERROR, [&] {
    run_pipeline(s->config, out_dir, s->verbose ? &std::cerr : nullptr);
    return COORDLAB_OK;
  });
}

int coordlab_verify(coordlab_session* s, char* buffer, size_t size) {
  if (!s) return COORDLAB_ERROR;
  try {
    VerifyReport rep = verify(s->config);
    std::string text;
    for (const VerifyCheck& c : rep.checks) {
      text += c.pass ? "[PASS] " : "[FAIL] ";
      text += c.name;
      if (!c.detail.empty()) text += ": " + c.detail;
      text += "\n";
    }
    fill_buffer(text, buffer, size);
    if (!rep.ok()) {
      s->last_error = "verification failed";
      return COORDLAB_VERIFY_ERROR;
    }
    return COORDLAB_OK;
  } catch (const ConfigError& e) {
    return fail(s, COORDLAB_CONFIG_ERROR, e.what());
  } catch (const std::exception& e) {
    return fail(s, COORDLAB_STAGE_ERROR, e.what());
  }
}

}  // extern "C"
