#include "plurikit/plurikit.h"

#include <cmath>
#include <sstream>
#include <string>

#include <json.hpp>

#include "plurikit/commands.hpp"
#include "plurikit/config.hpp"
#include "plurikit/errors.hpp"
#include "plurikit/orders.hpp"

struct plk_config {
  plurikit::RunConfig config;
  std::string serialized;
};

struct plk_current {
  plurikit::Current current;
};

struct plk_profile {
  plurikit::RadialProfile profile;
  std::string method;
  std::string csv;
};

namespace {

thread_local std::string t_last_error;

plk_status fail(plk_status status, const std::string& message) {
  t_last_error = message;
  return status;
}

template <class F>
plk_status guarded(F&& body) {
  try {
    t_last_error.clear();
    body();
    return PLK_OK;
  } catch (const plurikit::ConfigError& e) {
    return fail(PLK_CONFIG_ERROR, e.what());
  } catch (const plurikit::DomainError& e) {
    return fail(PLK_CONFIG_ERROR, e.what());
  } catch (const plurikit::DegenerateSlice& e) {
    return fail(PLK_DEGENERATE_SLICE, e.what());
  } catch (const plurikit::NumericFailure& e) {
    return fail(PLK_NUMERIC_FAILURE, e.what());
  } catch (const std::exception& e) {
    return fail(PLK_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(PLK_INTERNAL_ERROR, "unknown error");
  }
}

plurikit::ProfileOptions options_for(size_t budget, uint64_t seed) {
  plurikit::ProfileOptions o;
  o.budget = budget;
  o.seed = seed;
  return o;
}

}  // namespace

extern "C" {

const char* plk_version(void) { return "1.0.0"; }

const char* plk_last_error(void) { return t_last_error.c_str(); }

const char* plk_usage(void) {
  static const std::string text = plurikit::usage_text();
  return text.c_str();
}

int plk_run(const char* command, const char* config_path, const plk_run_options* options) {
  if (command == nullptr || config_path == nullptr) {
    t_last_error = "command and config path are required";
    return static_cast<int>(plurikit::ExitCode::config_error);
  }
  plurikit::RunOverrides overrides;
  if (options != nullptr) {
    if (options->has_seed) overrides.seed = options->seed;
    if (options->budget) overrides.budget = options->budget;
    if (options->frames) overrides.frames = options->frames;
    if (options->threads) overrides.threads = options->threads;
    if (options->out_dir) overrides.out_dir = options->out_dir;
  }
  const auto result = plurikit::run_command_file(command, config_path, overrides);
  t_last_error = result.message;
  return static_cast<int>(result.code);
}

plk_status plk_config_load(const char* path, plk_config** out) {
  if (path == nullptr || out == nullptr) return fail(PLK_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new plk_config{plurikit::load_config(path), {}}; });
}

plk_status plk_config_parse(const char* json_text, plk_config** out) {
  if (json_text == nullptr || out == nullptr) return fail(PLK_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new plk_config{plurikit::parse_config(json_text), {}}; });
}

const char* plk_config_serialize(plk_config* config) {
  if (config == nullptr) return nullptr;
  config->serialized = plurikit::serialize_config(config->config);
  return config->serialized.c_str();
}

int plk_config_equal(const plk_config* a, const plk_config* b) {
  return a != nullptr && b != nullptr && a->config == b->config;
}

void plk_config_free(plk_config* config) { delete config; }

plk_status plk_config_current(const plk_config* config, plk_current** out) {
  if (config == nullptr || out == nullptr) return fail(PLK_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new plk_current{plurikit::build_current(config->config)}; });
}

plk_status plk_current_from_json(const char* json_text, int ambient_dim, plk_current** out) {
  if (json_text == nullptr || out == nullptr) return fail(PLK_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    // reuse the full schema: wrap the block into a minimal document
    std::ostringstream doc;
    doc << R"({"space":{"n":)" << ambient_dim << R"(},"mc":{"seed":0},"current":)" << json_text << "}";
    const auto config = plurikit::parse_config(doc.str());
    *out = new plk_current{plurikit::build_current(config)};
  });
}

int plk_current_dim(const plk_current* current) { return current ? current->current.ambient_dim() : 0; }

int plk_current_bidegree(const plk_current* current) { return current ? current->current.bidegree() : 0; }

void plk_current_free(plk_current* current) { delete current; }

plk_status plk_nu_profile(const plk_current* current, double r_min, double r_max, size_t points, size_t budget,
                          uint64_t seed, plk_profile** out) {
  if (current == nullptr || out == nullptr) return fail(PLK_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto grid = plurikit::RadialGrid::geometric(r_min, r_max, points);
    auto profile = plurikit::nu_profile(current->current, grid, options_for(budget, seed));
    *out = new plk_profile{std::move(profile), {}, {}};
    (*out)->method = plurikit::to_string((*out)->profile.method);
  });
}

plk_status plk_slice_profile(const plk_current* current, const double* frame, int q, double r_min, double r_max,
                             size_t points, size_t budget, uint64_t seed, plk_profile** out) {
  if (current == nullptr || frame == nullptr || out == nullptr) return fail(PLK_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const int n = current->current.ambient_dim();
    plurikit::require(q >= 1 && q <= n, "slice: need 1 <= q <= n");
    plurikit::CMatrix m(n, q);
    for (int j = 0; j < q; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t at = 2 * (static_cast<std::size_t>(j) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i));
        m(i, j) = plurikit::Complex(frame[at], frame[at + 1]);
      }
    const auto f = plurikit::Frame::from_columns(m);
    const auto grid = plurikit::RadialGrid::geometric(r_min, r_max, points);
    auto profile = plurikit::slice_profile(current->current, f, grid, options_for(budget, seed));
    *out = new plk_profile{std::move(profile), {}, {}};
    (*out)->method = plurikit::to_string((*out)->profile.method);
  });
}

size_t plk_profile_size(const plk_profile* profile) { return profile ? profile->profile.grid.size() : 0; }

plk_status plk_profile_point(const plk_profile* profile, size_t index, double* r, double* value, double* std_error) {
  if (profile == nullptr) return fail(PLK_INVALID_ARGUMENT, "null profile");
  if (index >= profile->profile.grid.size()) return fail(PLK_INVALID_ARGUMENT, "index out of range");
  if (r) *r = profile->profile.grid[index];
  if (value) *value = profile->profile.values[index];
  if (std_error) *std_error = profile->profile.standard_errors[index];
  return PLK_OK;
}

const char* plk_profile_method(const plk_profile* profile) { return profile ? profile->method.c_str() : ""; }

const char* plk_profile_csv(plk_profile* profile) {
  if (profile == nullptr) return "";
  std::ostringstream out;
  plurikit::write_profile_csv(out, profile->profile);
  profile->csv = out.str();
  return profile->csv.c_str();
}

void plk_profile_free(plk_profile* profile) { delete profile; }

plk_status plk_estimate_order(const plk_profile* profile, double* rho, double* std_error, int* empty) {
  if (profile == nullptr) return fail(PLK_INVALID_ARGUMENT, "null profile");
  return guarded([&] {
    const auto e = plurikit::estimate_order(profile->profile);
    if (rho) *rho = e.rho;
    if (std_error) *std_error = e.standard_error;
    if (empty) *empty = e.empty ? 1 : 0;
  });
}

plk_status plk_is_algebraic(const plk_profile* profile, double flatness_tol, int* algebraic) {
  if (profile == nullptr || algebraic == nullptr) return fail(PLK_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *algebraic = plurikit::is_algebraic(profile->profile, flatness_tol) ? 1 : 0; });
}

plk_status plk_count_zeros_polynomial(const double* coefficients, size_t degree, double r, int* count) {
  if (coefficients == nullptr || count == nullptr) return fail(PLK_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    plurikit::PolynomialMap map{1, {}};
    for (size_t d = 0; d <= degree; ++d) {
      const plurikit::Complex c(coefficients[2 * d], coefficients[2 * d + 1]);
      if (c != plurikit::Complex(0.0, 0.0)) map.terms.push_back({{static_cast<int>(d)}, c});
    }
    plurikit::require(!map.terms.empty(), "the zero polynomial has no isolated zeros");
    plurikit::require(std::isfinite(r) && r > 0.0, "radius must be positive");
    *count = plurikit::count_zeros_disc(plurikit::HoloFunction::polynomial(map), r);
  });
}

plk_status plk_chi(double rho0, double r, double* chi, double* derivative) {
  return guarded([&] {
    const auto c = plurikit::build_chi(plurikit::ProximateOrder::constant(rho0));
    if (chi) *chi = c(r);
    if (derivative) *derivative = c.derivative(r);
  });
}

plk_status plk_check_chi(double rho0, int* passed, double* final_gap, double* final_drift) {
  return guarded([&] {
    const auto c = plurikit::build_chi(plurikit::ProximateOrder::constant(rho0));
    const auto report = plurikit::check_proximate_order(c, plurikit::default_probe_grid());
    if (passed) *passed = report.passed ? 1 : 0;
    if (final_gap) *final_gap = report.final_gap;
    if (final_drift) *final_drift = report.final_drift;
  });
}

}  // extern "C"
