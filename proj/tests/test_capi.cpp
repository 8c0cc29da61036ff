// Exercises the shared library strictly through its C surface.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <cstring>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "relichoice.h"

namespace {

std::string data_dir() {
  const char* env = std::getenv("RELICHOICE_DATA");
  return env ? env : "data";
}

struct Sys {
  rc_system* p = nullptr;
  ~Sys() { rc_system_free(p); }
};

struct Str {
  char* p = nullptr;
  ~Str() { rc_string_free(p); }
};

constexpr const char* kDemoText =
    "comp utility(lambda=0.5, t0=0.5, p=0.9)\n"
    "comp ups(lambda=2.0, t0=0.25, p=0.75)\n"
    "comp diesel(lambda=1.0, t0=1.0, p=0.6)\n"
    "system: [0.6: utility, 0.3: ups, _: diesel]\n";

}  // namespace

TEST_CASE("version string") {
  REQUIRE(rc_version() != nullptr);
  CHECK(std::strlen(rc_version()) > 0);
}

TEST_CASE("text construction and accessors") {
  Sys sys;
  REQUIRE(rc_system_from_text(kDemoText, &sys.p) == RC_OK);

  Str shape;
  REQUIRE(rc_system_shape(sys.p, &shape.p) == RC_OK);
  CHECK(std::string(shape.p) == "flat-parallel");

  Str text;
  REQUIRE(rc_system_to_text(sys.p, &text.p) == RC_OK);
  Sys again;
  REQUIRE(rc_system_from_text(text.p, &again.p) == RC_OK);
  Str text2;
  REQUIRE(rc_system_to_text(again.p, &text2.p) == RC_OK);
  CHECK(std::string(text.p) == text2.p);
}

TEST_CASE("parse errors report status, message, and span") {
  Sys sys;
  rc_status st = rc_system_from_text(
      "comp A(lambda=1,t0=0) system: [0.7: A, 0.7: A]", &sys.p);
  CHECK(st == RC_ERR_PARSE);
  CHECK(sys.p == nullptr);
  const std::string msg = rc_last_error_message();
  CHECK(msg.find("weights sum 1.4") != std::string::npos);
  int line = 0, col = 0, len = 0;
  REQUIRE(rc_last_error_span(&line, &col, &len) == 1);
  CHECK(line == 1);
  CHECK(col >= 1);
  CHECK(len >= 1);

  st = rc_system_from_text("comp A(lambda=1,t0=0) system: A",
                           static_cast<rc_system**>(nullptr));
  CHECK(st == RC_ERR_INVALID);
}

TEST_CASE("json construction") {
  Sys sys;
  REQUIRE(rc_system_from_json(R"({
    "components": [{"id": "x", "lambda": 1.0, "t0": 0.0}],
    "system": {"leaf": "x"}
  })", &sys.p) == RC_OK);

  Str out;
  REQUIRE(rc_system_to_json(sys.p, &out.p) == RC_OK);
  CHECK(nlohmann::json::parse(out.p).contains("system"));

  Sys bad;
  CHECK(rc_system_from_json("{}", &bad.p) == RC_ERR_PARSE);
  CHECK(rc_last_error_span(nullptr, nullptr, nullptr) == 0);  // no span in JSON mode
}

TEST_CASE("file construction uses the bundled demo") {
  Sys sys;
  REQUIRE(rc_system_from_file((data_dir() + "/datacenter.json").c_str(),
                              &sys.p) == RC_OK);
  Str name;
  REQUIRE(rc_system_name(sys.p, &name.p) == RC_OK);
  CHECK(std::string(name.p) == "datacenter-power");

  Sys missing;
  CHECK(rc_system_from_file("/no/such/file.rel", &missing.p) == RC_ERR_IO);
}

TEST_CASE("scalar analysis calls") {
  Sys sys;
  REQUIRE(rc_system_from_text(kDemoText, &sys.p) == RC_OK);

  double v = 0.0;
  REQUIRE(rc_survival(sys.p, 0.0, &v) == RC_OK);
  CHECK(v == 1.0);
  CHECK(rc_survival(sys.p, -1.0, &v) == RC_ERR_DOMAIN);

  REQUIRE(rc_mttf(sys.p, "paper", &v) == RC_OK);
  CHECK(v == doctest::Approx(1.45).epsilon(1e-12));
  REQUIRE(rc_mtbf(sys.p, "paper", &v) == RC_OK);
  CHECK(v == doctest::Approx(1.925).epsilon(1e-12));
  REQUIRE(rc_mttr(sys.p, "paper", &v) == RC_OK);
  CHECK(v == doctest::Approx(0.475).epsilon(1e-12));
  CHECK(rc_mttf(sys.p, "telepathy", &v) == RC_ERR_DOMAIN);

  REQUIRE(rc_sfr(sys.p, 1.0, &v) == RC_OK);
  CHECK(v > 0.0);
  CHECK(rc_sfr(sys.p, 0.5, &v) == RC_ERR_DOMAIN);  // before max t0

  REQUIRE(rc_pdf(sys.p, 1.0, &v) == RC_OK);
  CHECK(v > 0.0);

  REQUIRE(rc_rte(sys.p, 0.9, "numeric", &v) == RC_OK);
  double s = 0.0;
  REQUIRE(rc_survival(sys.p, v, &s) == RC_OK);
  CHECK(s >= 0.9 - 1e-9);

  double horizon = 0.0;
  REQUIRE(rc_integration_horizon(sys.p, &horizon) == RC_OK);
  CHECK(horizon > 1.0);

  REQUIRE(rc_static_success_probability(sys.p, &v) == RC_OK);
  CHECK(v == doctest::Approx(0.6 * 0.9 + 0.3 * 0.75 + 0.1 * 0.6).epsilon(1e-12));
}

TEST_CASE("assign_weights through the C surface") {
  const double probs[2] = {0.8, 0.5};
  double w[2] = {0, 0};
  REQUIRE(rc_assign_weights(probs, 2, w) == RC_OK);
  CHECK(w[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.2).epsilon(1e-12));

  const double dead[2] = {0.0, 0.0};
  CHECK(rc_assign_weights(dead, 2, w) == RC_ERR_DOMAIN);
  CHECK(rc_assign_weights(nullptr, 2, w) == RC_ERR_INVALID);
}

TEST_CASE("analyze json has the agreed schema") {
  Sys sys;
  REQUIRE(rc_system_from_text(kDemoText, &sys.p) == RC_OK);

  rc_analyze_opts opts{};
  opts.mode = "paper";
  Str out;
  REQUIRE(rc_analyze_json(sys.p, &opts, &out.p) == RC_OK);
  auto doc = nlohmann::json::parse(out.p);
  for (const char* key : {"shape", "mode", "mttf", "mtbf", "mttr", "sfr", "rte", "pdf"}) {
    CHECK(doc.contains(key));
  }
  CHECK(doc.size() == 8);
  CHECK(doc["mode"] == "paper");
  CHECK(doc["mtbf"].get<double>() == doctest::Approx(1.925).epsilon(1e-12));
  CHECK(doc["rte"]["method"] == "parallel-quadratic");
  CHECK(doc["rte"].contains("quadratic"));

  Str text;
  REQUIRE(rc_analyze_text(sys.p, nullptr, &text.p) == RC_OK);
  CHECK(std::string(text.p).find("mttf") != std::string::npos);
}

TEST_CASE("curve csv golden head") {
  Sys sys;
  REQUIRE(rc_system_from_text("comp A(lambda=1, t0=0)\nsystem: A\n", &sys.p) == RC_OK);
  Str out;
  REQUIRE(rc_curve_csv(sys.p, "survival", 0.0, 1.0, 2, &out.p) == RC_OK);
  CHECK(std::string(out.p) == "T,value\n0,1\n1,0.36787944117144233\n");
  CHECK(rc_curve_csv(sys.p, "survival", 0.0, 1.0, 1, &out.p) == RC_ERR_DOMAIN);
}

TEST_CASE("simulation determinism across lanes") {
  Sys sys;
  REQUIRE(rc_system_from_text(kDemoText, &sys.p) == RC_OK);

  rc_estimate serial{}, threaded{};
  REQUIRE(rc_estimate_mttf(sys.p, 30000, 7, 1, &serial) == RC_OK);
  REQUIRE(rc_estimate_mttf(sys.p, 30000, 7, 6, &threaded) == RC_OK);
  CHECK(serial.value == threaded.value);
  CHECK(serial.std_error == threaded.std_error);
  CHECK(serial.trials == 30000);
  CHECK(serial.seed == 7);

  rc_estimate surv{};
  REQUIRE(rc_estimate_survival(sys.p, 1.0, 30000, 7, 0, &surv) == RC_OK);
  CHECK(surv.value > 0.3);
  CHECK(surv.value < 0.95);

  double t1 = 0.0, t2 = 0.0;
  REQUIRE(rc_sample_failure_time(sys.p, 42, 7, &t1) == RC_OK);
  REQUIRE(rc_sample_failure_time(sys.p, 42, 7, &t2) == RC_OK);
  CHECK(t1 == t2);
}

TEST_CASE("compare through the C surface") {
  Sys sys;
  REQUIRE(rc_system_from_text(kDemoText, &sys.p) == RC_OK);
  int pass = 0;
  Str text;
  REQUIRE(rc_compare_text(sys.p, "numeric", 50000, 3, 4.0, 0, &pass, &text.p) ==
          RC_OK);
  CHECK(pass == 1);
  CHECK(std::string(text.p).find("overall: PASS") != std::string::npos);
}
