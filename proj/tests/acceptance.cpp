// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>

#include "morrey/harness.hpp"

using namespace morrey;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail += "; over the " + format_double(budget_s) + " s budget";
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string first_note(const SuiteResult& s) { return s.notes.empty() ? "" : "; first: " + s.notes.front(); }

Outcome from_suite(const SuiteResult& s, const std::string& metric) {
  return {s.passed(), std::to_string(s.cases - s.failures) + "/" + std::to_string(s.cases) + " passed, " + metric + " " +
                          format_double(s.worst) + first_note(s)};
}

constexpr Regime kRegimes[] = {Regime::integral_via_maximal, Regime::integral_via_integral, Regime::maximal_trace,
                               Regime::integral_trace};

}  // namespace

int main() {
  const int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  criterion(1, "oracle equivalence", 30, [] { return from_suite(oracle_suite(7, 100), "worst relative error"); });

  criterion(2, "closed-form spot checks", 1, [] { return from_suite(closed_form_suite(), "worst error"); });

  criterion(3, "Morrey embedding", 60, [] { return from_suite(embedding_suite(11, 1000), "worst relative excess"); });

  criterion(4, "dilation covariance", 120, [jobs] {
    auto o = from_suite(dilation_suite(13, 100), "worst relative error");
    double residual = 0.0;
    for (auto r : kRegimes) {
      ExperimentConfig c;
      c.seed = 13;
      c.trials = 25;
      const auto rep = run_trace_experiment(c, r, jobs);
      residual = std::max(residual, rep.max_residual);
    }
    o.pass = o.pass && residual <= 1e-9;
    o.detail += "; trace ratio residual " + format_double(residual);
    return o;
  });

  criterion(5, "sparse certificates", 300, [] {
    const auto s = sparse_suite(17, 200, 0.5);
    return Outcome{s.base.passed(), std::to_string(s.certified) + "/" + std::to_string(s.base.cases) +
                                        " certified, min eta " + format_double(s.min_eta) + ", max C_max " +
                                        format_double(s.max_constant_maximal) + ", max C_int " +
                                        format_double(s.max_constant_integral) + ", worst drift " +
                                        format_double(s.worst_constant_drift) + first_note(s.base)};
  });

  criterion(6, "Hedberg optimum", 60, [] { return from_suite(hedberg_sweep(19, 500), "worst relative error"); });

  criterion(7, "trace-inequality stability", 900, [jobs] {
    Outcome o{true, ""};
    for (auto r : kRegimes) {
      ExperimentConfig c;
      c.trials = 200;
      const auto a = run_trace_experiment(c, r, jobs);
      const auto b = run_trace_experiment(c, r, jobs);
      const bool same = render_report(a, ReportFormat::json) == render_report(b, ReportFormat::json) &&
                        render_report(a, ReportFormat::csv) == render_report(b, ReportFormat::csv);
      double worst = 0.0;
      for (const auto& g : a.groups) worst = std::max(worst, g.sup / g.median);
      o.pass = o.pass && a.passed() && same;
      o.detail += (o.detail.empty() ? "" : "; ") + a.regime + " sup/median " + format_double(worst) + " residual " +
                  format_double(a.max_residual) + (same ? "" : " NOT reproducible") +
                  (a.failures.empty() ? "" : " first failure: " + a.failures.front());
    }
    return o;
  });

  criterion(8, "dyadic maximal L^p bound", 60, [] { return from_suite(hl_bound_suite(23, 500), "worst ratio to p/(p-1)"); });

  criterion(9, "subadditivity gate", 60, [] { return from_suite(subadditivity_suite(29, 200), "worst margin"); });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
