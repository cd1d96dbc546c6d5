#include "rham/rham.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "rham/config.hpp"
#include "rham/error.hpp"
#include "rham/field.hpp"
#include "rham/flow.hpp"
#include "rham/io.hpp"

struct rham_config {
  rham::ExperimentConfig value;
};

struct rham_hamiltonian {
  std::shared_ptr<const rham::RandomHamiltonian> value;
  rham::FlowSettings flow;
};

namespace {

thread_local std::string last_error;

rham_status status_of(rham::ErrorCode c) {
  using rham::ErrorCode;
  switch (c) {
    case ErrorCode::InvalidArgument: return RHAM_INVALID_ARGUMENT;
    case ErrorCode::ParseError: return RHAM_PARSE_ERROR;
    case ErrorCode::ValidationError: return RHAM_VALIDATION_ERROR;
    case ErrorCode::FactorizationFailure: return RHAM_FACTORIZATION_FAILURE;
    case ErrorCode::OutOfRange: return RHAM_OUT_OF_RANGE;
    case ErrorCode::Unsupported: return RHAM_UNSUPPORTED;
    case ErrorCode::NonFinite: return RHAM_NON_FINITE;
    case ErrorCode::NotAutonomous: return RHAM_NOT_AUTONOMOUS;
    case ErrorCode::RefinementOverflow: return RHAM_REFINEMENT_OVERFLOW;
    case ErrorCode::DegenerateOverlap: return RHAM_DEGENERATE_OVERLAP;
    case ErrorCode::IOFailure: return RHAM_IO_FAILURE;
  }
  return RHAM_INTERNAL_ERROR;
}

template <class F>
rham_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return RHAM_OK;
  } catch (const rham::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return RHAM_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    last_error = e.what();
    return RHAM_INTERNAL_ERROR;
  } catch (...) {
    last_error = "unknown error";
    return RHAM_INTERNAL_ERROR;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw rham::Error(rham::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* rham_last_error(void) { return last_error.c_str(); }

const char* rham_status_name(rham_status status) {
  switch (status) {
    case RHAM_OK: return "ok";
    case RHAM_INVALID_ARGUMENT: return rham::to_string(rham::ErrorCode::InvalidArgument);
    case RHAM_PARSE_ERROR: return rham::to_string(rham::ErrorCode::ParseError);
    case RHAM_VALIDATION_ERROR: return rham::to_string(rham::ErrorCode::ValidationError);
    case RHAM_FACTORIZATION_FAILURE: return rham::to_string(rham::ErrorCode::FactorizationFailure);
    case RHAM_OUT_OF_RANGE: return rham::to_string(rham::ErrorCode::OutOfRange);
    case RHAM_UNSUPPORTED: return rham::to_string(rham::ErrorCode::Unsupported);
    case RHAM_NON_FINITE: return rham::to_string(rham::ErrorCode::NonFinite);
    case RHAM_NOT_AUTONOMOUS: return rham::to_string(rham::ErrorCode::NotAutonomous);
    case RHAM_REFINEMENT_OVERFLOW: return rham::to_string(rham::ErrorCode::RefinementOverflow);
    case RHAM_DEGENERATE_OVERLAP: return rham::to_string(rham::ErrorCode::DegenerateOverlap);
    case RHAM_IO_FAILURE: return rham::to_string(rham::ErrorCode::IOFailure);
    case RHAM_INTERNAL_ERROR: return "InternalError";
  }
  return "unknown";
}

const char* rham_version(void) { return "0.1.0"; }

rham_status rham_config_parse(const char* command, const char* text, rham_config** out) {
  return guarded([&] {
    require(command, "command");
    require(out, "out");
    *out = nullptr;
    auto c = std::make_unique<rham_config>();
    c->value = rham::parse_config(text ? text : "", rham::parse_command(command));
    *out = c.release();
  });
}

rham_status rham_config_set(rham_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    rham::ExperimentConfig copy = config->value;
    rham::apply_setting(copy, key, value);
    config->value = std::move(copy);
  });
}

rham_status rham_config_serialize(const rham_config* config, char** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = dup_string(rham::serialize_config(config->value));
  });
}

void rham_config_free(rham_config* config) { delete config; }

rham_status rham_run(const rham_config* config, char** summary) {
  return guarded([&] {
    require(config, "config");
    const std::string s = rham::run_command(config->value);
    if (summary) *summary = dup_string(s);
  });
}

void rham_string_free(char* s) { std::free(s); }

rham_status rham_hamiltonian_sample(const rham_config* config, size_t regularity_index,
                                    uint64_t index, rham_hamiltonian** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = nullptr;
    if (regularity_index >= config->value.regularities.size()) {
      throw rham::Error(rham::ErrorCode::OutOfRange, "regularity index");
    }
    const rham::LawDefiningConfig law = config->value.law(regularity_index);
    rham::RandomStream rng = rham::RandomStream::derive(law.seed, {index});
    auto h = std::make_unique<rham_hamiltonian>();
    h->value = std::make_shared<const rham::RandomHamiltonian>(rham::sample_hamiltonian(law, rng));
    h->flow = config->value.flow;
    *out = h.release();
  });
}

void rham_hamiltonian_free(rham_hamiltonian* h) { delete h; }

rham_status rham_hamiltonian_value(const rham_hamiltonian* h, double t, double x, double y,
                                   double* out) {
  return guarded([&] {
    require(h, "hamiltonian");
    require(out, "out");
    *out = rham::eval_h(*h->value, t, rham::TorusPoint(x, y));
  });
}

rham_status rham_hamiltonian_vector_field(const rham_hamiltonian* h, double t, double x, double y,
                                          double* out) {
  return guarded([&] {
    require(h, "hamiltonian");
    require(out, "out");
    const rham::Vec2 v = rham::eval_vector_field(*h->value, t, rham::TorusPoint(x, y));
    out[0] = v.x;
    out[1] = v.y;
  });
}

rham_status rham_hamiltonian_osc(const rham_hamiltonian* h, int spatial_grid, int time_grid,
                                 double* out) {
  return guarded([&] {
    require(h, "hamiltonian");
    require(out, "out");
    *out = rham::osc_estimate(*h->value, spatial_grid, time_grid);
  });
}

rham_status rham_hamiltonian_flow(const rham_hamiltonian* h, double x, double y, int steps,
                                  double* out) {
  return guarded([&] {
    require(h, "hamiltonian");
    require(out, "out");
    rham::FlowSettings s = h->flow;
    s.steps = steps;
    s.validate();
    const rham::FlowResult r = rham::integrate_point(*h->value, rham::Vec2{x, y}, 0.0, 1.0, s);
    out[0] = r.point.x();
    out[1] = r.point.y();
  });
}

rham_status rham_gaussian_dimension(const rham_config* config, size_t* out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = rham::gaussian_dimension(config->value.law(0));
  });
}

}  // extern "C"
