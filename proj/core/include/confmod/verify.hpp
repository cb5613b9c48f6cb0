#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "confmod/analytic.hpp"
#include "confmod/geometry.hpp"
#include "confmod/modsolver.hpp"

namespace confmod::verify {

struct SweepOptions {
  modsolver::SolverOptions solver;
  unsigned threads = 0;  // 0: hardware concurrency, capped by CONFMOD_THREADS
};

/// One H-row of the verification table. A row whose solve threw keeps the
/// message in `error` and NaN in the solver columns.
struct SweepRecord {
  double H = 0.0;
  double m_omega = 0.0;
  double m_omega_err = 0.0;
  double gamma = 0.0;
  double ratio = 0.0;  // gamma H m_omega
  bool bound_ok = false;
  double m_Q = 0.0;
  double m_Q_err = 0.0;
  double m_P = 0.0;
  double m_P_err = 0.0;
  double grotzsch_gap = 0.0;      // 1/m_omega - m_Q - m_P
  double additivity_ratio = 0.0;  // (m_Q + m_P) m_omega
  double mP_over_logH = 0.0;      // NaN for H <= 1
  double box_factor = 0.0;
  std::optional<std::string> error;

  bool ok() const { return !error.has_value(); }
  /// Relative discretisation slack: m_omega_err / m_omega + 0.02.
  double eps_disc(double slack = 0.02) const;
};

/// Fills the derived columns from the four primary quantities.
SweepRecord make_record(double H, double gamma, double m_omega, double m_omega_err, double m_Q,
                        double m_Q_err, double m_P, double m_P_err, double slack = 0.02);

/// Worker count for sweeps: `requested` (0 = hardware), capped by CONFMOD_THREADS.
unsigned thread_count(unsigned requested);

/// Rows ordered as H_list. Throws Error(InvalidInput) unless H_list is
/// positive and strictly increasing; solver failures are kept per row.
std::vector<SweepRecord> sweep(const geometry::ChannelDomain& domain, std::span<const double> H_list,
                               const SweepOptions& options = {});

struct Tolerances {
  double slack = 0.02;         // added to the solver's relative error
  double ratio_floor = 0.7;    // calibration constant at the largest H
  double additivity_gain = 0.05;
  double quadratic_bound = 0.1;
  double min_span = 8.0;       // H_max / H_min
  std::size_t min_rows = 3;
  bool nonsymmetric = true;    // whether the additivity gain is required
};

struct Verdict {
  std::string claim;
  bool pass = false;
  double margin = 0.0;  // >= 0 when passing
  std::string detail;
};

struct Provenance {
  std::string source;       // config path or fixture name
  std::string config_hash;  // FNV-1a of the config text, hex
  modsolver::SolverOptions solver;
};

struct VerificationReport {
  std::vector<SweepRecord> records;
  std::vector<Verdict> verdicts;
  Provenance provenance;

  bool all_pass() const;
};

/// Verdicts: bound, asymptotics, lower_bound, grotzsch, additivity, growth,
/// rows. Throws Error(InsufficientSpan) with fewer than min_rows successful
/// rows or an H range below min_span.
VerificationReport check_theorem(std::span<const SweepRecord> records, const Tolerances& tol = {});

struct DilatationRow {
  double H = 0.0;
  double k = 0.0;
  double K = 1.0;
  double envelope_lo = 1.0;  // 1/K
  double envelope_hi = 1.0;  // K
  bool within_K1 = true;     // K(H) <= K(1), meaningful for H >= 1
};

std::vector<DilatationRow> dilatation_audit(const analytic::ShearParams& p,
                                            std::span<const double> H_list);

/// Least-squares polynomial fit y ~ sum c_k x^k of the given degree.
std::vector<double> polyfit(std::span<const double> x, std::span<const double> y, int degree);

inline constexpr const char* kCsvHeader =
    "H,m_omega,m_omega_err,gamma,ratio,bound_ok,m_Q,m_P,grotzsch_gap,additivity_ratio,"
    "mP_over_logH";

std::string to_csv(std::span<const SweepRecord> records);
std::string to_json(const VerificationReport& report, int indent = 2);
std::string dilatation_csv(std::span<const DilatationRow> rows);

/// 64-bit FNV-1a, lower-case hex.
std::string fnv1a_hex(std::string_view text);

}  // namespace confmod::verify
