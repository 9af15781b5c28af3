/**
 * Report tables: MSE and error-PMF comparisons, failure rates, capacity
 * bounds, and expansion rates, in shapes mirroring the reference results.
 * Rendering to CSV or aligned Markdown is separate from table content.
 */

#ifndef SCK_TABLES_HPP
#define SCK_TABLES_HPP

#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sck/analysis.hpp"

namespace sck {

struct Table {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

namespace detail {

inline std::string fixed_str(double v, int places) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(places) << v;
  return os.str();
}

inline std::string rational_str(const Rational& r, int places) {
  return fixed_str(r.convert_to<double>(), places);
}

}  // namespace detail

/// Per-coefficient MSE of Kyber compression vs Lloyd-Max, d in {11, 10}.
inline Table mse_table() {
  Table t;
  t.title = "MSE(e_L): Kyber compression vs Lloyd-Max quantization";
  t.header = {"d", "11", "10"};
  auto lm_mse = [](int d) {
    return error_pmf(lm_quantizer(d).codebook(), uniform_pmf(kQ))
        .second_moment();
  };
  t.rows = {
      {"Kyber compression", detail::rational_str(mse_compress(11), 4),
       detail::rational_str(mse_compress(10), 4)},
      {"Lloyd-Max", detail::rational_str(lm_mse(11), 4),
       detail::rational_str(lm_mse(10), 4)},
  };
  return t;
}

/// PMF of e_L for L = 2^d under both quantizers; one table per method.
inline std::vector<Table> pmf_tables(int d) {
  std::vector<Table> out;
  auto emit = [&](const std::string& method, const ErrorPmf& pmf) {
    Table t;
    t.title = "PMF of e_L with L = 2^" + std::to_string(d) + " (" + method + ")";
    t.header = {"e_L"};
    std::vector<std::string> probs = {"Pr(e_L)"};
    for (size_t i = 0; i < pmf.support.size(); ++i) {
      double s = pmf.support[i].convert_to<double>();
      t.header.push_back(denominator(pmf.support[i]) == 1
                             ? std::to_string(numerator(pmf.support[i]).convert_to<long>())
                             : detail::fixed_str(s, 1));
      probs.push_back(detail::rational_str(pmf.probs[i], 4));
    }
    t.rows = {probs};
    out.push_back(std::move(t));
  };
  emit("Kyber compression", error_pmf_compress(d));
  emit("Lloyd-Max", error_pmf(lm_quantizer(d).codebook(), uniform_pmf(kQ)));
  return out;
}

/// DFR of the original compression vs Lloyd-Max parameter sets.
/// Original rows use the exact convolution of the noise PMF; Lloyd-Max
/// rows use the Theorem-2 Marcum-Q formula. Theorem-2 values for the
/// original rows are included as a separate column for comparison.
inline Table dfr_table(unsigned prec = 256) {
  Table t;
  t.title = "DFR (log2): Kyber compression vs Lloyd-Max";
  t.header = {"Parameter set", "Original (exact)", "Original (Theorem 2)",
              "Lloyd-Max (Theorem 2)"};
  for (const char* base : {"KYBER512", "KYBER768", "KYBER1024"}) {
    const auto& ps = param_set(base);
    const auto& ps_lm = param_set(std::string(base) + "-LM");
    auto exact = dfr_exact_original(ps, prec);
    auto clt = dfr_theorem2(noise_model(ps), ps.n, prec);
    auto lm = dfr_theorem2(noise_model(ps_lm), ps_lm.n, prec);
    t.rows.push_back({base,
                      detail::fixed_str(exact.log2_dfr.convert_to<double>(), 1),
                      detail::fixed_str(clt.log2_dfr.convert_to<double>(), 1),
                      detail::fixed_str(lm.log2_dfr.convert_to<double>(), 1)});
  }
  return t;
}

/// Capacity bound K_UB and the implied CER lower bound across PAM orders.
inline Table bound_table(const ParamSet& ps, const std::vector<int>& pam_orders,
                         unsigned prec = 256) {
  Table t;
  t.title = ps.name + ": K_UB and CER_LB";
  t.header = {"p"};
  std::vector<std::string> kub = {"K_UB"}, kubr = {"K_UB (real)"},
                           cer = {"CER_LB"};
  const Rational s2 = sigma_g(ps, mse_lu(ps));
  for (int p : pam_orders) {
    auto cb = capacity_bound(ps, s2, p, prec);
    t.header.push_back(std::to_string(p));
    kub.push_back(std::to_string(cb.k_ub));
    kubr.push_back(detail::fixed_str(cb.k_ub_real.convert_to<double>(), 2));
    cer.push_back(detail::rational_str(cb.cer_lb, 1));
  }
  t.rows = {kub, kubr, cer};
  return t;
}

/// Ciphertext expansion rates of all variants, plus the coded DFR of the
/// semi-compressed sets under both sigma_G evaluations (with and without
/// the MSE(e_Lu) term; the two disagree, and both are reported).
inline Table cer_table(unsigned prec = 256) {
  Table t;
  t.title = "Ciphertext expansion rate and coded DFR";
  t.header = {"Parameter set", "K", "CT bytes", "CER",
              "log2 DFR (sigma with MSE)", "log2 DFR (sigma w/o MSE)"};
  for (const auto& ps : builtin_param_sets()) {
    if (ps.name.rfind("WEAK", 0) == 0) continue;
    std::vector<std::string> row{ps.name, std::to_string(ps.message_bits()),
                                 std::to_string(ps.ciphertext_bytes()),
                                 detail::rational_str(cer(ps, ps.message_bits()), 2)};
    if (ps.variant == Variant::kSemiCompressed) {
      auto with = dfr_coded(ps, sigma_g(ps, mse_lu(ps)), prec);
      auto without = dfr_coded(ps, sigma_g(ps, 0), prec);
      row.push_back(detail::fixed_str(with.log2_dfr.convert_to<double>(), 1));
      row.push_back(detail::fixed_str(without.log2_dfr.convert_to<double>(), 1));
    } else {
      row.push_back("-");
      row.push_back("-");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Rendering

inline void render_csv(const Table& t, std::ostream& os) {
  os << "# " << t.title << "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i)
      os << (i ? "," : "") << cells[i];
    os << "\n";
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

inline void render_markdown(const Table& t, std::ostream& os) {
  os << "### " << t.title << "\n\n";
  std::vector<size_t> w(t.header.size(), 0);
  auto widen = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size() && i < w.size(); ++i)
      w[i] = std::max(w[i], cells[i].size());
  };
  widen(t.header);
  for (const auto& r : t.rows) widen(r);
  auto line = [&](const std::vector<std::string>& cells) {
    os << "|";
    for (size_t i = 0; i < w.size(); ++i)
      os << " " << std::setw(static_cast<int>(w[i])) << std::left
         << (i < cells.size() ? cells[i] : "") << " |";
    os << "\n";
  };
  line(t.header);
  os << "|";
  for (size_t i = 0; i < w.size(); ++i) os << std::string(w[i] + 2, '-') << "|";
  os << "\n";
  for (const auto& r : t.rows) line(r);
  os << "\n";
}

}  // namespace sck

#endif  // SCK_TABLES_HPP
