#include <cmath>
#include <set>

#include "json.hpp"
#include "format_util.hpp"
#include "relichoice/analysis.hpp"

namespace relichoice::analysis {

using model::ExprKind;
using model::SystemExpr;
using model::SystemSpec;
using nlohmann::ordered_json;

namespace {

void collect_ids(const SystemExpr& e, std::set<std::string>& out) {
  if (e.kind == ExprKind::leaf) {
    out.insert(e.component);
    return;
  }
  for (const auto& c : e.children) collect_ids(c, out);
}

double max_install_time(const SystemSpec& spec) {
  std::set<std::string> ids;
  collect_ids(spec.root, ids);
  double max_t0 = 0.0;
  for (const auto& id : ids) {
    auto it = spec.components.find(id);
    if (it != spec.components.end()) max_t0 = std::max(max_t0, it->second.t0);
  }
  return max_t0;
}

bool series_common_t0(const SystemSpec& spec) {
  if (spec.root.kind == ExprKind::leaf) return true;
  double first = 0.0;
  bool have = false;
  for (const auto& c : spec.root.children) {
    const double t0 = spec.components.at(c.component).t0;
    if (!have) {
      first = t0;
      have = true;
    } else if (t0 != first) {
      return false;
    }
  }
  return true;
}

}  // namespace

AnalysisReport analyze(const SystemSpec& spec, const AnalyzeOptions& opts) {
  AnalysisReport r;
  r.shape = detect_shape(spec);

  Mode used = opts.mode;
  if (used == Mode::paper) {
    const bool covered =
        r.shape == Shape::flat_parallel ||
        (r.shape == Shape::flat_series && series_common_t0(spec));
    if (!covered) {
      used = Mode::numeric;
      r.notes.push_back(
          "closed forms cover flat shapes only (series needs a common "
          "installation time); parameters computed numerically");
    }
  }
  r.mode = used;
  r.mttf = mttf(spec, used);
  r.mtbf = mtbf(spec, used);
  r.mttr = mttr(spec, used);

  std::vector<double> sfr_times = opts.sfr_at;
  if (sfr_times.empty()) sfr_times.push_back(max_install_time(spec));
  for (double t : sfr_times) r.sfr_at.emplace_back(t, sfr(spec, t));

  const std::vector<double>& pdf_times =
      opts.pdf_at.empty() ? sfr_times : opts.pdf_at;
  for (double t : pdf_times) r.pdf_at.emplace_back(t, pdf(spec, t));

  RteMethod method = opts.rte_method;
  if (method == RteMethod::auto_pick && used == Mode::numeric) {
    method = RteMethod::numeric;
  }
  r.rte = rte(spec, opts.rho, method);
  if (used == Mode::paper && opts.rte_method == RteMethod::auto_pick &&
      r.rte.method == "numeric-bisection") {
    r.notes.push_back(
        "quadratic discriminant is negative at this rho; rte solved by "
        "bisection");
  }
  return r;
}

std::string report_json(const AnalysisReport& report) {
  ordered_json j;
  j["shape"] = to_string(report.shape);
  j["mode"] = to_string(report.mode);
  j["mttf"] = report.mttf;
  j["mtbf"] = report.mtbf;
  j["mttr"] = report.mttr;
  ordered_json sfr_rows = ordered_json::array();
  for (const auto& [t, v] : report.sfr_at) {
    ordered_json row;
    row["t"] = t;
    row["lambda_eq"] = v;
    sfr_rows.push_back(std::move(row));
  }
  j["sfr"] = std::move(sfr_rows);
  ordered_json rte_obj;
  rte_obj["rho"] = report.rte.rho;
  rte_obj["reliable_until"] = report.rte.reliable_until;
  rte_obj["method"] = report.rte.method;
  if (report.rte.method == "parallel-quadratic" && report.rte.quadratic_detail &&
      report.rte.quadratic_detail->t1 && report.rte.quadratic_detail->t2) {
    ordered_json q;
    q["Q"] = report.rte.quadratic_detail->Q;
    q["t1"] = *report.rte.quadratic_detail->t1;
    q["t2"] = *report.rte.quadratic_detail->t2;
    rte_obj["quadratic"] = std::move(q);
  }
  j["rte"] = std::move(rte_obj);
  ordered_json pdf_rows = ordered_json::array();
  for (const auto& [t, v] : report.pdf_at) {
    ordered_json row;
    row["t"] = t;
    row["f"] = v;
    pdf_rows.push_back(std::move(row));
  }
  j["pdf"] = std::move(pdf_rows);
  return j.dump(2) + "\n";
}

std::string report_text(const AnalysisReport& report, const std::string& name) {
  std::string out;
  if (!name.empty()) out += "system: " + name + "\n";
  out += std::string("shape:  ") + to_string(report.shape) + "\n";
  out += std::string("mode:   ") + to_string(report.mode) + "\n";
  out += "mttf:   " + detail::shortest(report.mttf) + "\n";
  out += "mtbf:   " + detail::shortest(report.mtbf) + "\n";
  out += "mttr:   " + detail::shortest(report.mttr) + "\n";
  for (const auto& [t, v] : report.sfr_at) {
    out += "sfr:    t=" + detail::shortest(t) +
           "  lambda_eq=" + detail::shortest(v) + "\n";
  }
  out += "rte:    rho=" + detail::shortest(report.rte.rho) +
         "  reliable_until=" + detail::shortest(report.rte.reliable_until) +
         "  method=" + report.rte.method;
  if (report.rte.quadratic_detail) {
    const auto& q = *report.rte.quadratic_detail;
    out += "  (Q=" + detail::shortest(q.Q);
    if (q.t2) out += ", t2=" + detail::shortest(*q.t2);
    if (q.t1) out += ", t1=" + detail::shortest(*q.t1);
    out += ")";
  }
  out += "\n";
  for (const auto& [t, v] : report.pdf_at) {
    out += "pdf:    t=" + detail::shortest(t) + "  f=" + detail::shortest(v) + "\n";
  }
  for (const auto& note : report.notes) {
    out += "note:   " + note + "\n";
  }
  return out;
}

std::string curve_csv(const SystemSpec& spec, const std::string& quantity,
                      double from, double to, std::size_t steps) {
  if (steps < 2) {
    throw DomainError("steps must be >= 2 (got " + std::to_string(steps) + ")");
  }
  if (!std::isfinite(from) || !std::isfinite(to) || !(from < to)) {
    throw DomainError("need from < to");
  }
  double (*eval)(const SystemSpec&, double) = nullptr;
  if (quantity == "survival") {
    eval = &survival;
  } else if (quantity == "pdf") {
    eval = &pdf;
  } else if (quantity == "sfr") {
    const double max_t0 = max_install_time(spec);
    if (from < max_t0) {
      throw DomainError("sfr curve must start at or after max installation time " +
                        detail::human(max_t0));
    }
    eval = &sfr;
  } else {
    throw DomainError("unknown quantity '" + quantity +
                      "' (expected survival, pdf, or sfr)");
  }
  std::string out = "T,value\n";
  for (std::size_t i = 0; i < steps; ++i) {
    const double t =
        i + 1 == steps
            ? to
            : from + (to - from) * static_cast<double>(i) /
                         static_cast<double>(steps - 1);
    out += detail::shortest(t) + "," + detail::shortest(eval(spec, t)) + "\n";
  }
  return out;
}

}  // namespace relichoice::analysis
