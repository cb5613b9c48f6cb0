#include "confmod/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "confmod/error.hpp"

namespace confmod::verify {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

// Smallest successive increment (negative when the sequence dips).
double min_step(const std::vector<double>& v) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < v.size(); ++i) m = std::min(m, v[i] - v[i - 1]);
  return m;
}

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

double SweepRecord::eps_disc(double slack) const { return m_omega_err / m_omega + slack; }

SweepRecord make_record(double H, double gamma, double m_omega, double m_omega_err, double m_Q,
                        double m_Q_err, double m_P, double m_P_err, double slack) {
  SweepRecord r;
  r.H = H;
  r.gamma = gamma;
  r.m_omega = m_omega;
  r.m_omega_err = m_omega_err;
  r.m_Q = m_Q;
  r.m_Q_err = m_Q_err;
  r.m_P = m_P;
  r.m_P_err = m_P_err;
  r.ratio = gamma * H * m_omega;
  r.bound_ok = r.ratio <= 1.0 + r.eps_disc(slack);
  r.grotzsch_gap = 1.0 / m_omega - m_Q - m_P;
  r.additivity_ratio = (m_Q + m_P) * m_omega;
  r.mP_over_logH = H > 1.0 ? m_P / std::log(H) : kNaN;
  return r;
}

unsigned thread_count(unsigned requested) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CONFMOD_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

std::vector<SweepRecord> sweep(const geometry::ChannelDomain& domain, std::span<const double> H_list,
                               const SweepOptions& options) {
  if (H_list.empty()) throw Error(ErrorKind::InvalidInput, "sweep needs at least one H");
  for (std::size_t i = 0; i < H_list.size(); ++i) {
    if (!(H_list[i] > 0.0) || (i > 0 && !(H_list[i] > H_list[i - 1]))) {
      throw Error(ErrorKind::InvalidInput, "H list must be positive and strictly increasing");
    }
  }
  const double gamma = analytic::gamma(domain).value;

  std::vector<SweepRecord> rows(H_list.size());
  auto solve_row = [&](std::size_t i) {
    const double H = H_list[i];
    try {
      const modsolver::ChannelModuli cm = modsolver::channel_moduli(domain, H, options.solver);
      rows[i] = make_record(H, gamma, cm.omega.value, cm.omega.error_estimate, cm.q.value,
                            cm.q.error_estimate, cm.p.value, cm.p.error_estimate);
      rows[i].box_factor = cm.box_factor;
    } catch (const std::exception& e) {
      SweepRecord r = make_record(H, gamma, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN);
      r.bound_ok = false;
      r.error = e.what();
      rows[i] = r;
    }
  };

  const unsigned workers =
      std::min<unsigned>(thread_count(options.threads), static_cast<unsigned>(H_list.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < H_list.size(); ++i) solve_row(i);
    return rows;
  }
  // Largest H first: those rows dominate the wall time.
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < H_list.size(); k = next++) {
          solve_row(H_list.size() - 1 - k);
        }
      });
    }
  }
  return rows;
}

bool VerificationReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::vector<double> polyfit(std::span<const double> x, std::span<const double> y, int degree) {
  if (x.size() != y.size() || x.size() < static_cast<std::size_t>(degree + 1)) {
    throw Error(ErrorKind::InvalidInput, "polyfit needs more points than the degree");
  }
  Eigen::MatrixXd A(x.size(), degree + 1);
  Eigen::VectorXd b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double p = 1.0;
    for (int k = 0; k <= degree; ++k) {
      A(static_cast<Eigen::Index>(i), k) = p;
      p *= x[i];
    }
    b(static_cast<Eigen::Index>(i)) = y[i];
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  return {c.data(), c.data() + c.size()};
}

VerificationReport check_theorem(std::span<const SweepRecord> records, const Tolerances& tol) {
  VerificationReport report;
  report.records.assign(records.begin(), records.end());

  std::vector<const SweepRecord*> ok;
  for (const SweepRecord& r : records) {
    if (r.ok()) ok.push_back(&r);
  }
  if (ok.size() < tol.min_rows) {
    throw Error(ErrorKind::InsufficientSpan, "need at least " + std::to_string(tol.min_rows) +
                                                 " successful rows, got " +
                                                 std::to_string(ok.size()));
  }
  const double span = ok.back()->H / ok.front()->H;
  if (!(span >= tol.min_span)) {
    throw Error(ErrorKind::InsufficientSpan,
                "H range " + fmt(span) + "x is below " + fmt(tol.min_span) + "x");
  }

  std::vector<double> ratio;
  std::vector<double> additivity;
  std::vector<double> logH;
  std::vector<double> mP;
  for (const SweepRecord* r : ok) {
    ratio.push_back(r->ratio);
    additivity.push_back(r->additivity_ratio);
    logH.push_back(std::log(r->H));
    mP.push_back(r->m_P);
  }

  {
    Verdict v{"bound", true, std::numeric_limits<double>::infinity(), ""};
    for (const SweepRecord* r : ok) {
      const double m = 1.0 + r->eps_disc(tol.slack) - r->ratio;
      if (m < v.margin) {
        v.margin = m;
        v.detail = "tightest at H=" + fmt(r->H) + ": ratio " + fmt(r->ratio);
      }
    }
    v.pass = v.margin >= 0.0;
    report.verdicts.push_back(v);
  }
  {
    const double last = ratio.back() - tol.ratio_floor;
    const double step = min_step(ratio);
    Verdict v{"asymptotics", strictly_increasing(ratio) && last >= 0.0, std::min(last, step),
              "ratio " + fmt(ratio.front()) + " -> " + fmt(ratio.back()) + ", floor " +
                  fmt(tol.ratio_floor) + " (calibration constant)"};
    report.verdicts.push_back(v);
  }
  {
    Verdict v{"lower_bound", true, std::numeric_limits<double>::infinity(), ""};
    for (const SweepRecord* r : ok) {
      const double floor = r->gamma * r->H * (1.0 - r->eps_disc(tol.slack));
      const double m = (r->m_Q - floor) / floor;
      if (m < v.margin) {
        v.margin = m;
        v.detail = "tightest at H=" + fmt(r->H) + ": m_Q " + fmt(r->m_Q) + " vs gamma H " +
                   fmt(r->gamma * r->H);
      }
    }
    v.pass = v.margin >= 0.0;
    report.verdicts.push_back(v);
  }
  {
    Verdict v{"grotzsch", true, std::numeric_limits<double>::infinity(), ""};
    for (const SweepRecord* r : ok) {
      const double allowance = r->eps_disc(tol.slack) / r->m_omega + r->m_Q_err + r->m_P_err;
      const double m = r->grotzsch_gap + allowance;
      if (m < v.margin) {
        v.margin = m;
        v.detail = "tightest at H=" + fmt(r->H) + ": gap " + fmt(r->grotzsch_gap);
      }
    }
    v.pass = v.margin >= 0.0;
    report.verdicts.push_back(v);
  }
  {
    const double gain = additivity.back() - additivity.front();
    const bool trend = strictly_increasing(additivity);
    const bool enough = !tol.nonsymmetric || gain >= tol.additivity_gain;
    double margin = min_step(additivity);
    if (tol.nonsymmetric) margin = std::min(margin, gain - tol.additivity_gain);
    report.verdicts.push_back({"additivity", trend && enough, margin,
                               "ratio " + fmt(additivity.front()) + " -> " +
                                   fmt(additivity.back()) + ", gain " + fmt(gain) +
                                   (tol.nonsymmetric ? " (required " + fmt(tol.additivity_gain) +
                                                           ")"
                                                     : " (symmetric, trend only)")});
  }
  {
    const double slope = polyfit(logH, mP, 1)[1];
    const double quad = polyfit(logH, mP, 2)[2];
    double bound = 0.0;
    for (const SweepRecord* r : ok) {
      if (std::isfinite(r->mP_over_logH)) bound = std::max(bound, r->mP_over_logH);
    }
    report.verdicts.push_back({"growth", slope > 0.0 && std::abs(quad) <= tol.quadratic_bound,
                               std::min(slope, tol.quadratic_bound - std::abs(quad)),
                               "slope " + fmt(slope) + ", quadratic " + fmt(quad) +
                                   ", max m_P/log H " + fmt(bound)});
  }
  {
    const std::size_t failed = records.size() - ok.size();
    report.verdicts.push_back({"rows", failed == 0, -static_cast<double>(failed),
                               std::to_string(failed) + " failed row(s)"});
  }
  return report;
}

std::vector<DilatationRow> dilatation_audit(const analytic::ShearParams& p,
                                            std::span<const double> H_list) {
  const double K1 = analytic::shear_dilatation(p, geometry::StretchFactor(1.0));
  std::vector<DilatationRow> rows;
  rows.reserve(H_list.size());
  for (double H : H_list) {
    const geometry::StretchFactor h(H);
    DilatationRow r;
    r.H = H;
    r.k = analytic::shear_k(p, h);
    r.K = analytic::shear_dilatation(p, h);
    r.envelope_lo = 1.0 / r.K;
    r.envelope_hi = r.K;
    r.within_K1 = H < 1.0 || r.K <= K1 * (1.0 + 1e-15);
    rows.push_back(r);
  }
  return rows;
}

std::string to_csv(std::span<const SweepRecord> records) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const SweepRecord& r : records) {
    out += fmt(r.H) + ',' + fmt(r.m_omega) + ',' + fmt(r.m_omega_err) + ',' + fmt(r.gamma) + ',' +
           fmt(r.ratio) + ',' + (r.bound_ok ? "true" : "false") + ',' + fmt(r.m_Q) + ',' +
           fmt(r.m_P) + ',' + fmt(r.grotzsch_gap) + ',' + fmt(r.additivity_ratio) + ',' +
           fmt(r.mP_over_logH) + '\n';
  }
  return out;
}

std::string dilatation_csv(std::span<const DilatationRow> rows) {
  std::string out = "H,k,K,envelope_lo,envelope_hi,within_K1\n";
  for (const DilatationRow& r : rows) {
    out += fmt(r.H) + ',' + fmt(r.k) + ',' + fmt(r.K) + ',' + fmt(r.envelope_lo) + ',' +
           fmt(r.envelope_hi) + ',' + (r.within_K1 ? "true" : "false") + '\n';
  }
  return out;
}

std::string to_json(const VerificationReport& report, int indent) {
  nlohmann::json j;
  j["records"] = nlohmann::json::array();
  for (const SweepRecord& r : report.records) {
    nlohmann::json row = {{"H", r.H},
                          {"m_omega", number(r.m_omega)},
                          {"m_omega_err", number(r.m_omega_err)},
                          {"gamma", number(r.gamma)},
                          {"ratio", number(r.ratio)},
                          {"bound_ok", r.bound_ok},
                          {"m_Q", number(r.m_Q)},
                          {"m_Q_err", number(r.m_Q_err)},
                          {"m_P", number(r.m_P)},
                          {"m_P_err", number(r.m_P_err)},
                          {"grotzsch_gap", number(r.grotzsch_gap)},
                          {"additivity_ratio", number(r.additivity_ratio)},
                          {"mP_over_logH", number(r.mP_over_logH)},
                          {"box_factor", number(r.box_factor)}};
    if (r.error) row["error"] = *r.error;
    j["records"].push_back(row);
  }
  j["verdicts"] = nlohmann::json::array();
  for (const Verdict& v : report.verdicts) {
    j["verdicts"].push_back(
        {{"claim", v.claim}, {"pass", v.pass}, {"margin", number(v.margin)}, {"detail", v.detail}});
  }
  const modsolver::SolverOptions& s = report.provenance.solver;
  j["provenance"] = {{"source", report.provenance.source},
                     {"config_hash", report.provenance.config_hash},
                     {"solver",
                      {{"grid_h0", s.h0},
                       {"levels", s.levels},
                       {"cg_tol", s.cg_tol},
                       {"cg_max_iters", s.cg_max_iters},
                       {"box_factor", s.box_factor},
                       {"backend", s.backend == modsolver::Backend::Cholesky ? "cholesky"
                                                                             : "jacobi_cg"}}}};
  j["all_pass"] = report.all_pass();
  return j.dump(indent);
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace confmod::verify
