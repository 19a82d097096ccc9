#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "plurikit/plurikit.h"

namespace {

const std::string kConfigs = PLK_TEST_CONFIG_DIR;

const char* kHyperplane =
    R"({"kind": "zero_set", "function": {"family": "affine_product", "n_vars": 2,
        "factors": [{"linear": [[1, 0], [0, 0]]}]}})";

}  // namespace

TEST_CASE("version and usage") {
  CHECK(std::string(plk_version()).size() > 0);
  CHECK(std::string(plk_usage()).find("profile") != std::string::npos);
}

TEST_CASE("config load, serialize, compare") {
  plk_config* a = nullptr;
  REQUIRE(plk_config_load((kConfigs + "/cubic.json").c_str(), &a) == PLK_OK);
  const std::string text = plk_config_serialize(a);
  plk_config* b = nullptr;
  REQUIRE(plk_config_parse(text.c_str(), &b) == PLK_OK);
  CHECK(plk_config_equal(a, b) == 1);
  plk_current* t = nullptr;
  REQUIRE(plk_config_current(a, &t) == PLK_OK);
  CHECK(plk_current_dim(t) == 2);
  CHECK(plk_current_bidegree(t) == 1);
  plk_current_free(t);
  plk_config_free(a);
  plk_config_free(b);
}

TEST_CASE("error codes and messages") {
  plk_config* c = nullptr;
  CHECK(plk_config_parse("{not json", &c) == PLK_CONFIG_ERROR);
  CHECK(c == nullptr);
  CHECK(std::string(plk_last_error()).size() > 0);
  CHECK(plk_config_load((kConfigs + "/unknown_key.json").c_str(), &c) == PLK_CONFIG_ERROR);
  CHECK(plk_config_parse(nullptr, &c) == PLK_INVALID_ARGUMENT);
  CHECK(plk_config_parse("{}", nullptr) == PLK_INVALID_ARGUMENT);

  plk_current* t = nullptr;
  CHECK(plk_current_from_json(R"({"kind": "nope"})", 2, &t) == PLK_CONFIG_ERROR);
  REQUIRE(plk_current_from_json(kHyperplane, 2, &t) == PLK_OK);
  plk_profile* p = nullptr;
  CHECK(plk_nu_profile(t, 1.0, 10.0, 5, 10, 1, &p) == PLK_CONFIG_ERROR);
  CHECK(plk_nu_profile(t, -1.0, 10.0, 5, 1000, 1, &p) == PLK_CONFIG_ERROR);
  CHECK(plk_nu_profile(nullptr, 1.0, 10.0, 5, 1000, 1, &p) == PLK_INVALID_ARGUMENT);

  const double inside[] = {0.0, 0.0, 1.0, 0.0};
  CHECK(plk_slice_profile(t, inside, 1, 1.0, 10.0, 5, 1000, 1, &p) == PLK_DEGENERATE_SLICE);
  const double skew[] = {1.0, 0.0, 1.0, 0.0};
  CHECK(plk_slice_profile(t, skew, 1, 1.0, 10.0, 5, 1000, 1, &p) == PLK_CONFIG_ERROR);
  plk_current_free(t);

  double chi = 0.0, d = 0.0;
  CHECK(plk_chi(1.0, 0.0, &chi, &d) == PLK_CONFIG_ERROR);
  plk_current_free(nullptr);
  plk_profile_free(nullptr);
  plk_config_free(nullptr);
}

TEST_CASE("profiles through the C API") {
  plk_current* t = nullptr;
  REQUIRE(plk_current_from_json(kHyperplane, 2, &t) == PLK_OK);
  plk_profile* p = nullptr;
  REQUIRE(plk_nu_profile(t, 1.0, 100.0, 11, 10000, 3, &p) == PLK_OK);
  REQUIRE(plk_profile_size(p) == 11);
  for (size_t i = 0; i < 11; ++i) {
    double r = 0, v = 0, se = 0;
    REQUIRE(plk_profile_point(p, i, &r, &v, &se) == PLK_OK);
    CHECK(std::abs(v - 1.0) <= 1e-2);
  }
  double r = 0, v = 0, se = 0;
  CHECK(plk_profile_point(p, 11, &r, &v, &se) == PLK_INVALID_ARGUMENT);
  CHECK(std::string(plk_profile_method(p)) == "spherical-mean");
  CHECK(std::string(plk_profile_csv(p)).rfind("r,value,stderr,method\n", 0) == 0);
  double rho = -1, rho_se = -1;
  int empty = -1, algebraic = -1;
  REQUIRE(plk_estimate_order(p, &rho, &rho_se, &empty) == PLK_OK);
  CHECK(std::abs(rho) <= 0.02);
  CHECK(empty == 0);
  REQUIRE(plk_is_algebraic(p, 0.05, &algebraic) == PLK_OK);
  CHECK(algebraic == 1);
  plk_profile_free(p);

  const double line[] = {std::sqrt(0.5), 0.0, 0.0, std::sqrt(0.5)};
  REQUIRE(plk_slice_profile(t, line, 1, 1.0, 100.0, 5, 1000, 1, &p) == PLK_OK);
  REQUIRE(plk_profile_point(p, 0, &r, &v, &se) == PLK_OK);
  CHECK(v == 1.0);
  CHECK(std::string(plk_profile_method(p)) == "exact-count");
  plk_profile_free(p);
  plk_current_free(t);
}

TEST_CASE("zero counting and chi") {
  const double coeffs[] = {-2.0, 0.0, 1.0, 0.0, 1.0, 0.0};  // (w - 1)(w + 2)
  int count = -1;
  REQUIRE(plk_count_zeros_polynomial(coeffs, 2, 1.5, &count) == PLK_OK);
  CHECK(count == 1);
  REQUIRE(plk_count_zeros_polynomial(coeffs, 2, 3.0, &count) == PLK_OK);
  CHECK(count == 2);

  double chi = 0, d = 0;
  REQUIRE(plk_chi(1.0, 1.0, &chi, &d) == PLK_OK);
  CHECK(chi == 1.0 + std::exp(-1.0));
  REQUIRE(plk_chi(1.0, std::exp(1.0), &chi, &d) == PLK_OK);
  CHECK(std::abs(chi - 1.398695664133468648852) <= 1e-14);
  int passed = 0;
  double gap = 0, drift = 0;
  REQUIRE(plk_check_chi(1.0, &passed, &gap, &drift) == PLK_OK);
  CHECK(passed == 1);
  CHECK(gap < 1e-2);
}

TEST_CASE("plk_run maps outcomes to exit codes") {
  plk_run_options o{};
  o.out_dir = nullptr;
  CHECK(plk_run("profile", (kConfigs + "/hyperplane.json").c_str(), &o) == 1);
  CHECK(plk_run(nullptr, nullptr, nullptr) == 1);
  o.out_dir = "capi_run";
  o.has_seed = 1;
  o.seed = 3;
  CHECK(plk_run("profile", (kConfigs + "/kahler.json").c_str(), &o) == 0);
  CHECK(plk_run("crofton", (kConfigs + "/degenerate_slices.json").c_str(), &o) == 3);
  CHECK(plk_run("profile", (kConfigs + "/overflow.json").c_str(), &o) == 2);
}
