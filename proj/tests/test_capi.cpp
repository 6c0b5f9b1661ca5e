#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "airylab.h"

namespace fs = std::filesystem;

TEST_CASE("version and verify id listing") {
  CHECK(std::strlen(airylab_version()) > 0);
  std::string ids = airylab_verify_ids();
  CHECK(ids.find("two-bridge\n") != std::string::npos);
  CHECK(ids.find("bridge-rep\n") != std::string::npos);
}

TEST_CASE("rng handles are deterministic per (seed, stream)") {
  airylab_rng *a = nullptr, *b = nullptr;
  REQUIRE(airylab_rng_create(5, 9, &a) == AIRYLAB_OK);
  REQUIRE(airylab_rng_create(5, 9, &b) == AIRYLAB_OK);
  for (int i = 0; i < 16; ++i) {
    double x = 0, y = 0;
    CHECK(airylab_rng_uniform(a, &x) == AIRYLAB_OK);
    CHECK(airylab_rng_uniform(b, &y) == AIRYLAB_OK);
    CHECK(x == y);
    CHECK(x > 0.0);
    CHECK(x <= 1.0);
  }
  double z = 0;
  CHECK(airylab_rng_normal(a, &z) == AIRYLAB_OK);
  airylab_rng_destroy(a);
  airylab_rng_destroy(b);
}

TEST_CASE("numeric entry points and error codes") {
  double v = 0;
  CHECK(airylab_airy_ai(0.0, &v) == AIRYLAB_OK);
  CHECK(v == doctest::Approx(0.3550280539).epsilon(1e-9));
  CHECK(airylab_airy_ai(500.0, &v) == AIRYLAB_ERR_RANGE);
  CHECK(std::strlen(airylab_last_error()) > 0);
  CHECK(airylab_tracy_widom_cdf(100.0, &v) == AIRYLAB_ERR_RANGE);
  CHECK(airylab_kernel_eval(0.0, 0.0, &v) == AIRYLAB_OK);
  CHECK(v == doctest::Approx(0.0669875).epsilon(1e-5));
  CHECK(airylab_extended_kernel_eval(0.0, 0.0, 0.0, 1e-6, &v) == AIRYLAB_ERR_RANGE);
  CHECK(airylab_expected_count(10.0, &v) == AIRYLAB_OK);
  CHECK(v == doctest::Approx(6.7105616139).epsilon(1e-9));
  CHECK(airylab_airy_ai(0.0, nullptr) == AIRYLAB_ERR_CONFIG);
}

TEST_CASE("gue and bridge samplers fill caller buffers") {
  double ev[32];
  REQUIRE(airylab_sample_gue(32, 1, 2, ev) == AIRYLAB_OK);
  for (int i = 0; i + 1 < 32; ++i) CHECK(ev[i] > ev[i + 1]);
  CHECK(airylab_sample_gue(0, 1, 2, ev) == AIRYLAB_ERR_CONFIG);

  double values[17];
  REQUIRE(airylab_sample_bridge(1.0, -2.0, 0.0, 1.0, 16, 2.0, 3, 4, values) == AIRYLAB_OK);
  CHECK(values[0] == 1.0);
  CHECK(values[16] == -2.0);
  CHECK(airylab_sample_bridge(0, 0, 0.0, 1.0, 0, 1.0, 3, 4, values) == AIRYLAB_ERR_CONFIG);
}

TEST_CASE("ensemble lifecycle through the C surface") {
  airylab_ensemble* e = nullptr;
  REQUIRE(airylab_simulate_melon(2, 1.0, 8, 1.0, 11, 0, &e) == AIRYLAB_OK);
  int lines = 0, points = 0;
  CHECK(airylab_ensemble_lines(e, &lines) == AIRYLAB_OK);
  CHECK(airylab_ensemble_points(e, &points) == AIRYLAB_OK);
  CHECK(lines == 2);
  CHECK(points == 9);
  double t = -1, v = 1;
  CHECK(airylab_ensemble_time(e, 0, &t) == AIRYLAB_OK);
  CHECK(t == 0.0);
  CHECK(airylab_ensemble_value(e, 0, 0, &v) == AIRYLAB_OK);
  CHECK(v == 0.0);
  CHECK(airylab_ensemble_value(e, 5, 0, &v) == AIRYLAB_ERR_RANGE);

  fs::path path = fs::temp_directory_path() / "airylab_capi_ensemble.csv";
  REQUIRE(airylab_ensemble_write_csv(e, path.string().c_str()) == AIRYLAB_OK);
  airylab_ensemble* back = nullptr;
  REQUIRE(airylab_ensemble_read_csv(path.string().c_str(), &back) == AIRYLAB_OK);
  int lines2 = 0;
  CHECK(airylab_ensemble_lines(back, &lines2) == AIRYLAB_OK);
  CHECK(lines2 == lines);
  double v2 = -1;
  CHECK(airylab_ensemble_value(back, 1, 4, &v2) == AIRYLAB_OK);
  CHECK(airylab_ensemble_value(e, 1, 4, &v) == AIRYLAB_OK);
  CHECK(v2 == v);
  airylab_ensemble_destroy(e);
  airylab_ensemble_destroy(back);
  CHECK(airylab_ensemble_read_csv("/nonexistent/file.csv", &back) == AIRYLAB_ERR_CONFIG);

  airylab_ensemble* d = nullptr;
  REQUIRE(airylab_simulate_dyson(3, 0.0, 1.0, 4, 1, 0, &d) == AIRYLAB_OK);
  int dl = 0;
  CHECK(airylab_ensemble_lines(d, &dl) == AIRYLAB_OK);
  CHECK(dl == 3);
  airylab_ensemble_destroy(d);
}

TEST_CASE("harness entry points over the C surface") {
  fs::path dir = fs::temp_directory_path() / "airylab_capi_harness";
  fs::remove_all(dir);

  CHECK(airylab_simulate("melon", "{\"k\":1,\"steps\":5,\"seed\":2}", dir.string().c_str()) ==
        AIRYLAB_OK);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(airylab_simulate("bogus", "{}", dir.string().c_str()) == AIRYLAB_ERR_CONFIG);
  CHECK(airylab_simulate("melon", "{\"k\":0}", dir.string().c_str()) == AIRYLAB_ERR_CONFIG);
  CHECK(airylab_simulate("melon", "not json", dir.string().c_str()) == AIRYLAB_ERR_CONFIG);

  airylab_report* rep = nullptr;
  REQUIRE(airylab_verify("greedy", "{\"configs\":5000,\"seed\":4}", dir.string().c_str(), &rep) ==
          AIRYLAB_OK);
  CHECK(airylab_report_pass(rep) == 1);
  nlohmann::json j = nlohmann::json::parse(airylab_report_json(rep));
  CHECK(j.at("test") == "greedy");
  airylab_report_destroy(rep);
  CHECK(fs::exists(dir / "report_greedy.json"));
  CHECK(airylab_verify("bogus", "{}", nullptr, nullptr) == AIRYLAB_ERR_CONFIG);

  fs::path table = dir / "tw.csv";
  CHECK(airylab_table("tw-cdf", "{\"min\":-2.0,\"max\":0.0,\"step\":0.5}",
                      table.string().c_str()) == AIRYLAB_OK);
  CHECK(fs::exists(table));
}
