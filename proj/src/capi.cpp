#include "airylab.h"

#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "core/airy.hpp"
#include "core/brownian.hpp"
#include "core/dyson.hpp"
#include "core/errors.hpp"
#include "core/grid.hpp"
#include "core/harness.hpp"
#include "core/rng.hpp"
#include "core/serialize.hpp"
#include "core/stats.hpp"

struct airylab_rng {
  airylab::RngStream stream;
};

struct airylab_ensemble {
  airylab::LineEnsemble ensemble;
};

struct airylab_report {
  airylab::StatReport report;
  std::string json;
};

namespace {

thread_local std::string g_last_error;

int set_error(int code, const char* what) {
  g_last_error = what ? what : "";
  return code;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return AIRYLAB_OK;
  } catch (const airylab::RejectionError& e) {
    return set_error(AIRYLAB_ERR_REJECTION, e.what());
  } catch (const airylab::RangeError& e) {
    return set_error(AIRYLAB_ERR_RANGE, e.what());
  } catch (const airylab::NumericError& e) {
    return set_error(AIRYLAB_ERR_NUMERIC, e.what());
  } catch (const airylab::InsufficientDataError& e) {
    return set_error(AIRYLAB_ERR_CONFIG, e.what());
  } catch (const airylab::ConfigError& e) {
    return set_error(AIRYLAB_ERR_CONFIG, e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(AIRYLAB_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(AIRYLAB_ERR_NUMERIC, "out of memory");
  } catch (const std::exception& e) {
    return set_error(AIRYLAB_ERR_NUMERIC, e.what());
  }
}

int require(bool ok, const char* what) { return ok ? AIRYLAB_OK : set_error(AIRYLAB_ERR_CONFIG, what); }

nlohmann::json parse_config(const char* config_json) {
  if (!config_json || !*config_json) return nlohmann::json::object();
  nlohmann::json j = nlohmann::json::parse(config_json);
  if (!j.is_object()) throw airylab::ConfigError("config must be a JSON object");
  return j;
}

}  // namespace

extern "C" {

const char* airylab_version(void) { return "0.1.0"; }

const char* airylab_last_error(void) { return g_last_error.c_str(); }

int airylab_rng_create(uint64_t seed, uint64_t stream_id, airylab_rng** out) {
  if (int rc = require(out != nullptr, "rng_create: null output")) return rc;
  return guarded([&] { *out = new airylab_rng{airylab::RngStream(seed, stream_id)}; });
}

void airylab_rng_destroy(airylab_rng* rng) { delete rng; }

int airylab_rng_uniform(airylab_rng* rng, double* out) {
  if (int rc = require(rng && out, "rng_uniform: null argument")) return rc;
  return guarded([&] { *out = rng->stream.uniform01(); });
}

int airylab_rng_normal(airylab_rng* rng, double* out) {
  if (int rc = require(rng && out, "rng_normal: null argument")) return rc;
  return guarded([&] { *out = rng->stream.normal(); });
}

int airylab_airy_ai(double x, double* out) {
  if (int rc = require(out != nullptr, "airy_ai: null output")) return rc;
  return guarded([&] { *out = airylab::airy_ai(x); });
}

int airylab_airy_ai_prime(double x, double* out) {
  if (int rc = require(out != nullptr, "airy_ai_prime: null output")) return rc;
  return guarded([&] { *out = airylab::airy_ai_prime(x); });
}

int airylab_kernel_eval(double x, double y, double* out) {
  if (int rc = require(out != nullptr, "kernel_eval: null output")) return rc;
  return guarded([&] { *out = airylab::kernel_eval(x, y); });
}

int airylab_extended_kernel_eval(double x, double s, double y, double t, double* out) {
  if (int rc = require(out != nullptr, "extended_kernel_eval: null output")) return rc;
  return guarded([&] { *out = airylab::extended_kernel_eval(x, s, y, t); });
}

int airylab_tracy_widom_cdf(double s, double* out) {
  if (int rc = require(out != nullptr, "tracy_widom_cdf: null output")) return rc;
  return guarded([&] { *out = airylab::tracy_widom_cdf(s); });
}

int airylab_expected_count(double a, double* out) {
  if (int rc = require(out != nullptr, "expected_count: null output")) return rc;
  return guarded([&] { *out = airylab::expected_count(a); });
}

int airylab_sample_gue(int n, uint64_t seed, uint64_t stream_id, double* eigenvalues) {
  if (int rc = require(eigenvalues != nullptr, "sample_gue: null output")) return rc;
  return guarded([&] {
    airylab::RngStream rng(seed, stream_id);
    std::vector<double> ev = airylab::sample_gue_spectrum(n, rng);
    std::memcpy(eigenvalues, ev.data(), ev.size() * sizeof(double));
  });
}

int airylab_sample_bridge(double start_value, double end_value, double t0, double t1, int steps,
                          double variance, uint64_t seed, uint64_t stream_id, double* values) {
  if (int rc = require(values != nullptr, "sample_bridge: null output")) return rc;
  return guarded([&] {
    airylab::RngStream rng(seed, stream_id);
    airylab::BridgeSpec spec{start_value, end_value, airylab::GridSpec{t0, t1, steps}, variance};
    airylab::Path p = airylab::sample_brownian_bridge(spec, rng);
    std::memcpy(values, p.values.data(), p.values.size() * sizeof(double));
  });
}

int airylab_simulate_dyson(int n, double t0, double t1, int steps, uint64_t seed,
                           uint64_t stream_id, airylab_ensemble** out) {
  if (int rc = require(out != nullptr, "simulate_dyson: null output")) return rc;
  return guarded([&] {
    airylab::RngStream rng(seed, stream_id);
    airylab::DysonEnsemble e =
        airylab::sample_dyson_paths(n, airylab::GridSpec{t0, t1, steps}, rng);
    *out = new airylab_ensemble{std::move(e.base)};
  });
}

int airylab_simulate_melon(int k, double t, int steps, double variance, uint64_t seed,
                           uint64_t stream_id, airylab_ensemble** out) {
  if (int rc = require(out != nullptr, "simulate_melon: null output")) return rc;
  return guarded([&] {
    airylab::RngStream rng(seed, stream_id);
    airylab::LineEnsemble e =
        airylab::sample_melon(k, airylab::GridSpec{0.0, t, steps}, variance, rng);
    *out = new airylab_ensemble{std::move(e)};
  });
}

int airylab_ensemble_lines(const airylab_ensemble* e, int* out) {
  if (int rc = require(e && out, "ensemble_lines: null argument")) return rc;
  *out = e->ensemble.line_count();
  return AIRYLAB_OK;
}

int airylab_ensemble_points(const airylab_ensemble* e, int* out) {
  if (int rc = require(e && out, "ensemble_points: null argument")) return rc;
  *out = e->ensemble.grid.size();
  return AIRYLAB_OK;
}

int airylab_ensemble_time(const airylab_ensemble* e, int j, double* out) {
  if (int rc = require(e && out, "ensemble_time: null argument")) return rc;
  if (j < 0 || j >= e->ensemble.grid.size())
    return set_error(AIRYLAB_ERR_RANGE, "ensemble_time: index out of range");
  *out = e->ensemble.grid.time(j);
  return AIRYLAB_OK;
}

int airylab_ensemble_value(const airylab_ensemble* e, int line, int j, double* out) {
  if (int rc = require(e && out, "ensemble_value: null argument")) return rc;
  if (line < 0 || line >= e->ensemble.line_count() || j < 0 || j >= e->ensemble.grid.size())
    return set_error(AIRYLAB_ERR_RANGE, "ensemble_value: index out of range");
  *out = e->ensemble.value(line, j);
  return AIRYLAB_OK;
}

int airylab_ensemble_write_csv(const airylab_ensemble* e, const char* path) {
  if (int rc = require(e && path, "ensemble_write_csv: null argument")) return rc;
  return guarded([&] {
    std::ostringstream ss;
    airylab::write_ensemble_csv(e->ensemble, ss);
    airylab::write_text_file(path, ss.str());
  });
}

int airylab_ensemble_read_csv(const char* path, airylab_ensemble** out) {
  if (int rc = require(path && out, "ensemble_read_csv: null argument")) return rc;
  return guarded([&] {
    std::istringstream ss(airylab::read_text_file(path));
    *out = new airylab_ensemble{airylab::read_ensemble_csv(ss)};
  });
}

void airylab_ensemble_destroy(airylab_ensemble* e) { delete e; }

int airylab_simulate(const char* kind, const char* config_json, const char* out_dir) {
  if (int rc = require(kind && out_dir, "simulate: null argument")) return rc;
  return guarded([&] { airylab::run_simulate(kind, parse_config(config_json), out_dir); });
}

int airylab_verify(const char* test_id, const char* config_json, const char* out_dir,
                   airylab_report** out) {
  if (int rc = require(test_id != nullptr, "verify: null test id")) return rc;
  return guarded([&] {
    airylab::StatReport report =
        airylab::run_verify(test_id, parse_config(config_json), out_dir ? out_dir : "");
    if (out) {
      auto* r = new airylab_report;
      r->report = report;
      r->json = report.to_json().dump(2) + "\n";
      *out = r;
    }
  });
}

int airylab_table(const char* kind, const char* config_json, const char* out_path) {
  if (int rc = require(kind && out_path, "table: null argument")) return rc;
  return guarded([&] { airylab::run_table(kind, parse_config(config_json), out_path); });
}

int airylab_report_pass(const airylab_report* r) { return r && r->report.pass ? 1 : 0; }

const char* airylab_report_json(const airylab_report* r) { return r ? r->json.c_str() : ""; }

void airylab_report_destroy(airylab_report* r) { delete r; }

const char* airylab_verify_ids(void) {
  static const std::string ids = [] {
    std::string s;
    for (const std::string& id : airylab::verify_test_ids()) {
      s += id;
      s += '\n';
    }
    return s;
  }();
  return ids.c_str();
}

}  // extern "C"
