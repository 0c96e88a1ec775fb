#include "fredlab/fredlab.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "core/config.hpp"
#include "core/dump.hpp"
#include "core/experiments.hpp"
#include "core/indices.hpp"
#include "core/models.hpp"
#include "core/spectral.hpp"
#include "core/version.hpp"

struct fredlab_config {
  fredlab::config::RunConfig value;
};

struct fredlab_result {
  fredlab::config::RunConfig config;
  fredlab::experiments::RunOutput out;
  std::string json;
  std::string timing;
};

struct fredlab_operator {
  fredlab::lattice::LatticeOperator value;
};

namespace {

thread_local std::string last_error;

fredlab_status record(fredlab_status s, const std::string& message) {
  last_error = message;
  return s;
}

// runs body, mapping exceptions to status codes
template <class F>
fredlab_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return FREDLAB_OK;
  } catch (const fredlab::Error& e) {
    return record(static_cast<fredlab_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return record(FREDLAB_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(FREDLAB_E_INTERNAL, e.what());
  }
}

void require(const void* p, const char* what) {
  if (!p) fredlab::fail(fredlab::ErrorCode::invalid_argument, std::string(what) + " is NULL");
}

fredlab::models::Family family(const char* name) {
  require(name, "family");
  return fredlab::models::family_from_string(name);
}

}  // namespace

extern "C" {

const char* fredlab_version(void) { return fredlab::kVersion; }

const char* fredlab_status_name(fredlab_status status) {
  if (status == FREDLAB_OK) return "ok";
  if (status == FREDLAB_E_INTERNAL) return "internal";
  if (status >= FREDLAB_E_INVALID_ARGUMENT && status <= FREDLAB_E_SCHEMA)
    return fredlab::error_name(static_cast<fredlab::ErrorCode>(static_cast<int>(status)));
  return "unknown";
}

const char* fredlab_last_error(void) { return last_error.c_str(); }

fredlab_status fredlab_config_default(const char* experiment, fredlab_config** out) {
  return guarded([&] {
    require(out, "out");
    auto c = std::make_unique<fredlab_config>();
    if (experiment) c->value.experiment = fredlab::config::experiment_from_string(experiment);
    *out = c.release();
  });
}

fredlab_status fredlab_config_parse(const char* text, fredlab_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new fredlab_config{fredlab::config::parse(text)};
  });
}

fredlab_status fredlab_config_load(const char* path, fredlab_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new fredlab_config{fredlab::config::load(path)};
  });
}

fredlab_status fredlab_config_set_experiment(fredlab_config* config, const char* experiment) {
  return guarded([&] {
    require(config, "config");
    require(experiment, "experiment");
    config->value.experiment = fredlab::config::experiment_from_string(experiment);
  });
}

fredlab_status fredlab_config_set_seeds(fredlab_config* config, const char* seeds) {
  return guarded([&] {
    require(config, "config");
    require(seeds, "seeds");
    config->value.seeds = fredlab::config::parse_seed_list(seeds);
  });
}

fredlab_status fredlab_config_set_workers(fredlab_config* config, int workers) {
  return guarded([&] {
    require(config, "config");
    if (workers < 1) fredlab::fail(fredlab::ErrorCode::schema, "workers must be at least 1");
    config->value.workers = workers;
  });
}

fredlab_status fredlab_config_set_output_dir(fredlab_config* config, const char* dir) {
  return guarded([&] {
    require(config, "config");
    require(dir, "dir");
    config->value.output.dir = dir;
  });
}

const char* fredlab_config_output_dir(const fredlab_config* config) {
  return config ? config->value.output.dir.c_str() : nullptr;
}

fredlab_status fredlab_config_hash(const fredlab_config* config, char out[17]) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    const std::string h = fredlab::config::hash(config->value);
    std::memcpy(out, h.c_str(), 17);
  });
}

void fredlab_config_free(fredlab_config* config) { delete config; }

fredlab_status fredlab_run(const fredlab_config* config, fredlab_result** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    auto r = std::make_unique<fredlab_result>();
    r->config = config->value;
    r->out = fredlab::experiments::run(config->value);
    r->json = r->out.result.dump(2) + "\n";
    r->timing = r->out.timing.dump(2) + "\n";
    *out = r.release();
  });
}

fredlab_status fredlab_selfcheck(const fredlab_config* config, unsigned fault_flags, fredlab_result** out) {
  return guarded([&] {
    require(out, "out");
    auto r = std::make_unique<fredlab_result>();
    if (config) r->config = config->value;
    r->config.experiment = fredlab::config::Experiment::selfcheck;
    fredlab::lattice::FaultInjection f;
    f.flip_flux_sign = (fault_flags & FREDLAB_FAULT_FLIP_FLUX_SIGN) != 0;
    f.flip_step_convention = (fault_flags & FREDLAB_FAULT_FLIP_STEP_CONVENTION) != 0;
    r->out = fredlab::experiments::selfcheck(r->config, f);
    r->json = r->out.result.dump(2) + "\n";
    r->timing = r->out.timing.dump(2) + "\n";
    *out = r.release();
  });
}

int fredlab_result_exit_code(const fredlab_result* result) { return result ? result->out.exit_code : 1; }
const char* fredlab_result_json(const fredlab_result* result) { return result ? result->json.c_str() : nullptr; }
const char* fredlab_result_csv(const fredlab_result* result) { return result ? result->out.csv.c_str() : nullptr; }
const char* fredlab_result_timing_json(const fredlab_result* result) {
  return result ? result->timing.c_str() : nullptr;
}
const char* fredlab_result_summary(const fredlab_result* result) {
  return result ? result->out.summary.c_str() : nullptr;
}

fredlab_status fredlab_result_write(const fredlab_result* result, const char* dir) {
  return guarded([&] {
    require(result, "result");
    fredlab::experiments::write_outputs(result->config, result->out, dir ? dir : result->config.output.dir);
  });
}

void fredlab_result_free(fredlab_result* result) { delete result; }

fredlab_status fredlab_operator_build_bulk(const char* family_name, double mass, double disorder_amplitude,
                                           uint64_t seed, int side, int periodic, fredlab_operator** out) {
  return guarded([&] {
    require(out, "out");
    fredlab::models::ModelSpec m;
    m.family = family(family_name);
    m.mass = mass;
    fredlab::models::DisorderSpec d;
    d.amplitude = disorder_amplitude;
    d.seed = seed;
    const auto g = fredlab::lattice::LatticeGeometry::square(side, m.n_internal(), periodic != 0);
    *out = new fredlab_operator{fredlab::models::build_bulk(m, d, g)};
  });
}

fredlab_status fredlab_operator_load(const char* path, fredlab_operator** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new fredlab_operator{fredlab::dump::load_operator(path)};
  });
}

fredlab_status fredlab_operator_save(const fredlab_operator* op, const char* path) {
  return guarded([&] {
    require(op, "operator");
    require(path, "path");
    fredlab::dump::save_operator(path, op->value);
  });
}

size_t fredlab_operator_dim(const fredlab_operator* op) {
  return op ? static_cast<size_t>(op->value.matrix().rows()) : 0;
}

fredlab_status fredlab_operator_element(const fredlab_operator* op, size_t row, size_t col, double* re, double* im) {
  return guarded([&] {
    require(op, "operator");
    require(re, "re");
    require(im, "im");
    const auto& m = op->value.matrix();
    if (row >= static_cast<size_t>(m.rows()) || col >= static_cast<size_t>(m.cols()))
      fredlab::fail(fredlab::ErrorCode::range, "element index outside the operator");
    const auto v = m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    *re = v.real();
    *im = v.imag();
  });
}

fredlab_status fredlab_operator_fermi_projection(const fredlab_operator* h, double mu, fredlab_operator** out) {
  return guarded([&] {
    require(h, "operator");
    require(out, "out");
    *out = new fredlab_operator{fredlab::spectral::fermi_projection(h->value, mu)};
  });
}

fredlab_status fredlab_operator_flux_operator(const fredlab_operator* p, fredlab_operator** out) {
  return guarded([&] {
    require(p, "operator");
    require(out, "out");
    const auto& g = p->value.geometry();
    *out = new fredlab_operator{fredlab::indices::bulk_flux_operator(p->value, fredlab::indices::flux_route_unitary(g))};
  });
}

void fredlab_operator_free(fredlab_operator* op) { delete op; }

fredlab_status fredlab_index_chern(const fredlab_operator* p, fredlab_chern_route route, double* raw, long* value,
                                   int* converged) {
  return guarded([&] {
    require(p, "operator");
    require(raw, "raw");
    require(value, "value");
    require(converged, "converged");
    namespace ix = fredlab::indices;
    const auto& g = p->value.geometry();
    const auto region = ix::default_bulk_region(g);
    ix::FedosovOptions fo;
    fo.region = region;
    ix::IndexResult r;
    switch (route) {
      case FREDLAB_ROUTE_FLUX:
        r = ix::fredholm_index_fedosov(ix::bulk_flux_operator(p->value, ix::flux_route_unitary(g)), fo);
        break;
      case FREDLAB_ROUTE_CORNER: r = ix::fredholm_index_fedosov(ix::bulk_corner_operator(p->value), fo); break;
      case FREDLAB_ROUTE_KUBO: r = ix::chern_kubo_index(p->value, region); break;
      default: fredlab::fail(fredlab::ErrorCode::invalid_argument, "unknown Chern route");
    }
    *raw = r.raw;
    *value = r.value;
    *converged = r.converged() ? 1 : 0;
  });
}

}  // extern "C"
