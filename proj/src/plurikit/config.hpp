#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "plurikit/directional.hpp"
#include "plurikit/experiments.hpp"
#include "plurikit/orders.hpp"

namespace plurikit {

using ComplexColumns = std::vector<std::vector<Complex>>;

struct HoloSpec {
  std::string family = "polynomial";  // polynomial | exp_graph | sin_graph | affine_product
  int n_vars = 1;
  std::vector<PolynomialTerm> terms;
  int index = 0;
  std::vector<Complex> linear;
  Complex constant{};
  std::vector<AffineForm> factors;
  bool operator==(const HoloSpec&) const = default;
};

struct CurrentSpec {
  std::string kind = "zero_set";  // zero_set | potential | const_form | nonneg_sum
  std::optional<HoloSpec> function;
  //! potential: log_norm | norm_sq | log_smooth_max | log_abs
  //! const_form: kahler | block | matrix
  std::string family;
  int n = 0;  // 0: the ambient dimension
  int index = 0;
  double r0 = 1.0;
  int begin = 0;
  int end = 0;
  int k = 1;
  ComplexColumns coefficients;  // rows of the coefficient matrix
  std::vector<double> weights;
  std::vector<CurrentSpec> terms;
  bool operator==(const CurrentSpec&) const = default;
};

struct GridSpec {
  double r_min = 1.0;
  double r_max = 100.0;
  int points = 21;
  bool operator==(const GridSpec&) const = default;
};

struct McSpec {
  std::size_t budget = 100'000;
  std::uint64_t seed = 0;
  bool exact_const_form = false;
  double stencil_step = 0.02;
  bool operator==(const McSpec&) const = default;
};

struct GrassmannianSpec {
  int q = 1;
  std::size_t frames = 200;
  //! Each frame given as its list of columns.
  std::vector<ComplexColumns> forced_frames;
  bool operator==(const GrassmannianSpec&) const = default;
};

struct CapConfig {
  ComplexColumns center;  // empty: first q standard basis vectors
  double theta = 1.5707963267948966;
  bool operator==(const CapConfig&) const = default;
};

struct RegionConfig {
  std::string shape = "ball";
  std::vector<Complex> center;  // empty: origin
  double size = 1.0;
  bool operator==(const RegionConfig&) const = default;
};

struct ChiConfig {
  double rho0 = 1.0;
  std::vector<double> probe_grid;  // empty: default_probe_grid()
  std::vector<double> table;       // radii at which chi is tabulated
  bool operator==(const ChiConfig&) const = default;
};

struct OrderConfig {
  double flatness_tol = kDefaultFlatnessTol;
  TypeThresholds type;
  double rho0 = -1.0;  // < 0: use the estimated order as constant rho(r)
  bool operator==(const OrderConfig&) const = default;
};

struct RunConfig {
  int n = 2;
  std::optional<int> m;
  std::optional<CurrentSpec> current;
  GridSpec grid;
  McSpec mc;
  GrassmannianSpec grassmannian;
  CapConfig cap;
  RegionConfig region_d;
  RegionConfig region_d_prime;
  std::vector<double> alpha_set{1.0};
  std::vector<double> r_sequence;
  ChiConfig chi;
  OrderConfig order;
  bool exploratory = false;
  std::string output;
  bool operator==(const RunConfig&) const = default;
};

//! Parses and schema-checks a JSON document; throws ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& config);

HoloFunction build_holo(const HoloSpec& spec);
Current build_current(const CurrentSpec& spec, int ambient_dim);
Current build_current(const RunConfig& config);
RadialGrid build_grid(const GridSpec& spec);
ProfileOptions build_profile_options(const McSpec& spec);
FrameOptions build_frame_options(const RunConfig& config);
CapSpec build_cap(const RunConfig& config);
RegionSpec build_region(const RegionConfig& spec, int dim);
ProductSpace build_space(const RunConfig& config);

//! Total dimension: n, or n + m for product-space runs.
int ambient_dim(const RunConfig& config);

}  // namespace plurikit
