// Command-line front end. Links only the shared C API.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relichoice.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitDomain = 2;
constexpr int kExitIo = 3;

int exit_code_for(rc_status status) {
  switch (status) {
    case RC_OK: return kExitOk;
    case RC_ERR_PARSE: return kExitParse;
    case RC_ERR_IO: return kExitIo;
    default: return kExitDomain;
  }
}

void print_error() {
  // Parse errors already carry "line L, col C:" in the message text.
  std::fprintf(stderr, "error: %s\n", rc_last_error_message());
}

struct SystemHandle {
  rc_system* sys = nullptr;
  ~SystemHandle() { rc_system_free(sys); }
};

struct OwnedString {
  char* s = nullptr;
  ~OwnedString() { rc_string_free(s); }
};

int load_or_exit_code(const std::string& path, SystemHandle& handle) {
  const rc_status status = rc_system_from_file(path.c_str(), &handle.sys);
  if (status == RC_OK) return kExitOk;
  print_error();
  return exit_code_for(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"degradation analysis of probabilistic-choice series-parallel systems"};
  app.require_subcommand(1);

  std::string input;
  std::string mode = "numeric";
  std::string rte_method = "auto";
  std::string format = "text";
  std::string quantity;
  double rho = 0.9;
  double from = 0.0, to = 0.0;
  std::size_t steps = 0;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  double sigmas = 4.0;
  int lanes = 0;
  std::vector<double> sfr_at, pdf_at, sim_at;

  auto* validate_cmd = app.add_subcommand("validate", "check an input file");
  validate_cmd->add_option("input", input, "system file (.json or DSL text)")->required();

  auto* analyze_cmd = app.add_subcommand("analyze", "full degradation report");
  analyze_cmd->add_option("input", input)->required();
  analyze_cmd->add_option("--mode", mode, "numeric|paper")->capture_default_str();
  analyze_cmd->add_option("--rho", rho, "reliability threshold in (0,1]")->capture_default_str();
  analyze_cmd->add_option("--rte-method", rte_method, "auto|closed-form|quadratic|numeric")
      ->capture_default_str();
  analyze_cmd->add_option("--sfr-at", sfr_at, "times for hazard rows")->delimiter(',');
  analyze_cmd->add_option("--pdf-at", pdf_at, "times for density rows")->delimiter(',');
  analyze_cmd->add_option("--format", format, "text|json")->capture_default_str();

  auto* curve_cmd = app.add_subcommand("curve", "CSV curve of one quantity");
  curve_cmd->add_option("input", input)->required();
  curve_cmd->add_option("--quantity", quantity, "survival|pdf|sfr")->required();
  curve_cmd->add_option("--from", from)->required();
  curve_cmd->add_option("--to", to)->required();
  curve_cmd->add_option("--steps", steps)->required();

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo estimates");
  simulate_cmd->add_option("input", input)->required();
  simulate_cmd->add_option("--trials", trials)->capture_default_str();
  simulate_cmd->add_option("--seed", seed)->capture_default_str();
  simulate_cmd->add_option("--lanes", lanes, "worker threads, 0=auto, 1=serial")
      ->capture_default_str();
  simulate_cmd->add_option("--at", sim_at, "times for survival estimates")->delimiter(',');
  simulate_cmd->add_option("--format", format, "text|json")->capture_default_str();

  auto* compare_cmd = app.add_subcommand("compare", "analytic vs simulation gate");
  compare_cmd->add_option("input", input)->required();
  compare_cmd->add_option("--mode", mode, "numeric|paper")->capture_default_str();
  compare_cmd->add_option("--trials", trials)->capture_default_str();
  compare_cmd->add_option("--seed", seed)->capture_default_str();
  compare_cmd->add_option("--tolerance-sigmas", sigmas)->capture_default_str();
  compare_cmd->add_option("--lanes", lanes, "worker threads, 0=auto, 1=serial")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitDomain;
  }

  if (format != "text" && format != "json") {
    std::fprintf(stderr, "error: --format must be text or json\n");
    return kExitDomain;
  }
  if (analyze_cmd->parsed() && !(rho > 0.0 && rho <= 1.0)) {
    std::fprintf(stderr, "error: --rho must be in (0, 1]\n");
    return kExitDomain;
  }

  SystemHandle handle;
  if (int code = load_or_exit_code(input, handle); code != kExitOk) return code;

  if (validate_cmd->parsed()) {
    return kExitOk;  // loading already validated; stay silent like a clean lint
  }

  if (analyze_cmd->parsed()) {
    rc_analyze_opts opts{};
    opts.mode = mode.c_str();
    opts.rho = rho;
    opts.rte_method = rte_method.c_str();
    opts.sfr_times = sfr_at.empty() ? nullptr : sfr_at.data();
    opts.sfr_times_len = sfr_at.size();
    opts.pdf_times = pdf_at.empty() ? nullptr : pdf_at.data();
    opts.pdf_times_len = pdf_at.size();
    OwnedString out;
    const rc_status status = format == "json"
                                 ? rc_analyze_json(handle.sys, &opts, &out.s)
                                 : rc_analyze_text(handle.sys, &opts, &out.s);
    if (status != RC_OK) {
      print_error();
      return exit_code_for(status);
    }
    std::fputs(out.s, stdout);
    return kExitOk;
  }

  if (curve_cmd->parsed()) {
    OwnedString out;
    const rc_status status =
        rc_curve_csv(handle.sys, quantity.c_str(), from, to, steps, &out.s);
    if (status != RC_OK) {
      print_error();
      if (status == RC_ERR_DOMAIN) {
        std::fprintf(stderr,
                     "usage: curve --quantity survival|pdf|sfr --from A --to B "
                     "--steps N (N >= 2, A < B)\n");
      }
      return exit_code_for(status);
    }
    std::fputs(out.s, stdout);
    return kExitOk;
  }

  if (simulate_cmd->parsed()) {
    rc_estimate mttf_est{};
    rc_status status =
        rc_estimate_mttf(handle.sys, trials, seed, lanes, &mttf_est);
    if (status != RC_OK) {
      print_error();
      return exit_code_for(status);
    }
    std::vector<rc_estimate> survival_est(sim_at.size());
    for (std::size_t i = 0; i < sim_at.size(); ++i) {
      status = rc_estimate_survival(handle.sys, sim_at[i], trials, seed, lanes,
                                    &survival_est[i]);
      if (status != RC_OK) {
        print_error();
        return exit_code_for(status);
      }
    }
    if (format == "json") {
      std::string out = "{\n  \"mttf\": {\"value\": ";
      char buf[64];
      auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
      };
      out += num(mttf_est.value) + ", \"std_error\": " + num(mttf_est.std_error) +
             ", \"trials\": " + std::to_string(mttf_est.trials) +
             ", \"seed\": " + std::to_string(mttf_est.seed) + "},\n  \"survival\": [";
      for (std::size_t i = 0; i < survival_est.size(); ++i) {
        if (i) out += ", ";
        out += "{\"t\": " + num(sim_at[i]) +
               ", \"value\": " + num(survival_est[i].value) +
               ", \"std_error\": " + num(survival_est[i].std_error) + "}";
      }
      out += "]\n}\n";
      std::fputs(out.c_str(), stdout);
    } else {
      std::printf("mttf estimate: %.6g  (std_error %.3g, trials %llu, seed %llu)\n",
                  mttf_est.value, mttf_est.std_error,
                  static_cast<unsigned long long>(mttf_est.trials),
                  static_cast<unsigned long long>(mttf_est.seed));
      for (std::size_t i = 0; i < survival_est.size(); ++i) {
        std::printf("survival(%g) estimate: %.6g  (std_error %.3g)\n", sim_at[i],
                    survival_est[i].value, survival_est[i].std_error);
      }
    }
    return kExitOk;
  }

  if (compare_cmd->parsed()) {
    if (trials < 1000) {
      std::fprintf(stderr, "error: compare needs --trials >= 1000\n");
      return kExitDomain;
    }
    int pass = 0;
    OwnedString out;
    const rc_status status = rc_compare_text(handle.sys, mode.c_str(), trials,
                                             seed, sigmas, lanes, &pass, &out.s);
    if (status != RC_OK) {
      print_error();
      return exit_code_for(status);
    }
    std::fputs(out.s, stdout);
    return pass ? kExitOk : 1;
  }

  return kExitDomain;
}
