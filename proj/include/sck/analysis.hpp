/**
 * Noise model, failure-rate formulas, capacity bounds, and Monte-Carlo
 * validation for the three encryption variants.
 *
 * All tail probabilities are evaluated with MPFR at a caller-chosen bit
 * precision (default 256); log2(delta) values near -270 stay exact to
 * many digits because mpfr's exponent range is effectively unbounded.
 */

#ifndef SCK_ANALYSIS_HPP
#define SCK_ANALYSIS_HPP

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "sck/params.hpp"
#include "sck/pke.hpp"
#include "sck/quantization.hpp"

namespace sck {

using Real = boost::multiprecision::mpfr_float;

namespace detail {

/// Scoped working precision for mpfr_float (thread-local in boost).
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned bits)
      : saved_(Real::default_precision()) {
    Real::default_precision(static_cast<unsigned>(bits * 0.3010299957) + 5);
  }
  ~PrecisionGuard() { Real::default_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_;
};

/// Gaussian tail Q(x) = erfc(x / sqrt(2)) / 2 at the current precision.
inline Real gauss_q(const Real& x) {
  return erfc(x / sqrt(Real(2))) / 2;
}

inline Real to_real(const Rational& r) {
  return Real(numerator(r)) / Real(denominator(r));
}

}  // namespace detail

enum class DfrMethod { kTheorem2, kCodedLemma4, kMonteCarlo, kExactConvolution };

struct NoiseModel {
  Rational sigma_g2;  // variance of the Gaussian part
  ErrorPmf e_lv;      // v-side quantization error; point mass at 0 for SC
};

struct DfrResult {
  Real log2_dfr;
  DfrMethod method;
  unsigned precision_bits;
};

/// sigma_G^2 = k*n*eta1^2/4 + k*n*eta1/2 * (eta2/2 + MSE(e_Lu)) + eta2/2.
inline Rational sigma_g(const ParamSet& ps, const Rational& mse_lu) {
  if (mse_lu < 0) throw std::domain_error("sigma_g: MSE must be nonnegative");
  const Rational kn = ps.k * ps.n;
  return kn * ps.eta1 * ps.eta1 / 4 +
         kn * Rational(ps.eta1, 2) * (Rational(ps.eta2, 2) + mse_lu) +
         Rational(ps.eta2, 2);
}

/// MSE of the u-side per-coefficient quantization error for a variant.
inline Rational mse_lu(const ParamSet& ps) {
  if (ps.variant == Variant::kOriginal) return mse_compress(ps.d_u);
  const auto& q = lm_quantizer(ps.d_u);
  return error_pmf(q.codebook(), uniform_pmf(kQ)).second_moment();
}

/// Builds the Theorem-1 noise model for a parameter set. For the SC
/// variant (v uncompressed) e_lv is the constant-zero PMF.
inline NoiseModel noise_model(const ParamSet& ps) {
  NoiseModel nm;
  nm.sigma_g2 = sigma_g(ps, mse_lu(ps));
  switch (ps.variant) {
    case Variant::kOriginal:
      nm.e_lv = error_pmf_compress(ps.d_v);
      break;
    case Variant::kLloydMax:
      nm.e_lv = error_pmf(lm_quantizer(ps.d_v).codebook(), uniform_pmf(kQ));
      break;
    case Variant::kSemiCompressed:
      nm.e_lv = ErrorPmf{{Rational(0)}, {Rational(1)}};
      break;
  }
  return nm;
}

/// Marcum Q_{1/2}(a, b) = Q(b - a) + Q(b + a), with Q the Gaussian tail.
inline Real marcum_q_half(const Real& a, const Real& b, unsigned prec = 256) {
  detail::PrecisionGuard g(prec);
  Real aa(a), bb(b);
  return detail::gauss_q(bb - aa) + detail::gauss_q(bb + aa);
}

/// Theorem 2: delta = 1 - (1 - sum_e Pr(e) Q_{1/2}(|e|/sigma, t/sigma))^n
/// with t = round(q/4). Returns log2(delta), evaluated via log1p/expm1
/// so that delta ~ 2^-200 keeps full relative precision.
inline DfrResult dfr_theorem2(const NoiseModel& nm, int n = kN,
                              unsigned prec = 256) {
  detail::PrecisionGuard g(prec);
  const Real sigma = sqrt(detail::to_real(nm.sigma_g2));
  const Real threshold = Real((2 * kQ + 4) / 8) / sigma;  // round(q/4)/sigma
  Real p = 0;
  for (size_t i = 0; i < nm.e_lv.support.size(); ++i) {
    Real a = abs(detail::to_real(nm.e_lv.support[i])) / sigma;
    p += detail::to_real(nm.e_lv.probs[i]) *
         (detail::gauss_q(threshold - a) + detail::gauss_q(threshold + a));
  }
  // delta = -expm1(n * log1p(-p))
  Real delta = -expm1(Real(n) * log1p(-p));
  return {log2(delta), DfrMethod::kTheorem2, prec};
}

/// Raw bit error rate for the PAM/Gray channel of Lemma 4.
/// `bound` selects the conservative upper bound (interior-point factor 2 for
/// every symbol); otherwise the mixed interior/end-point average is used.
inline Real coded_rber(const Rational& sigma_g2, int p, unsigned prec = 256,
                       bool bound = true) {
  detail::PrecisionGuard g(prec);
  const Real sigma = sqrt(detail::to_real(sigma_g2));
  const int half_step = (kQ + p) / (2 * p);  // round(q/(2p))
  const Real tail = detail::gauss_q(Real(half_step) / sigma);
  int log2p = 0;
  while ((1 << log2p) < p) ++log2p;
  Real rser = bound ? 2 * tail : Real(2 * (p - 1)) / p * tail;
  return rser / log2p;
}

/// Lemma 4: delta = sum_{j=t+1}^{N} C(N,j) RBER^j (1-RBER)^{N-j},
/// with exact big-integer binomial coefficients. Returns log2(delta).
inline DfrResult dfr_coded(const ParamSet& ps, const Rational& sigma_g2,
                           unsigned prec = 256, bool bound = true) {
  if (!ps.code) throw std::domain_error("dfr_coded: no code spec");
  detail::PrecisionGuard g(prec);
  const Real rber = coded_rber(sigma_g2, ps.p, prec, bound);
  const int N = ps.code->n_bits, t = ps.code->t;
  if (rber == 0 || t >= N) {
    Real zero(0);
    return {log2(zero), DfrMethod::kCodedLemma4, prec};  // -inf
  }
  // Sum the tail from j = t+1 upward; terms decay geometrically once
  // j >> N * RBER, so the running sum converges quickly.
  Real delta = 0;
  BigInt binom = 1;
  for (int j = 1; j <= t; ++j) binom = binom * (N - j + 1) / j;
  for (int j = t + 1; j <= N; ++j) {
    binom = binom * (N - j + 1) / j;
    Real term = Real(binom) * pow(rber, j) * pow(1 - rber, N - j);
    delta += term;
    if (term < delta * pow(Real(2), -static_cast<int>(prec) - 16)) break;
  }
  return {log2(delta), DfrMethod::kCodedLemma4, prec};
}

/// Lemma 3 capacity bound and the CER lower bound it implies.
struct CapacityBound {
  Real k_ub_real;    // n/2 * log2((1+gamma)/(1+gamma/p^2))
  long k_ub;         // ceil(k_ub_real), as tabulated
  Rational cer_lb;   // (k*n*d_u + 12*n) / k_ub
};

inline CapacityBound capacity_bound(const ParamSet& ps,
                                    const Rational& sigma_g2, int p,
                                    unsigned prec = 256) {
  if (p < 2 || (p & (p - 1)) != 0)
    throw std::domain_error("capacity_bound: p must be a power of two >= 2");
  detail::PrecisionGuard g(prec);
  const int step = (2 * kQ + p) / (2 * p);  // round(q/p)
  Rational energy = 0;                      // sum_i (i - (p-1)/2)^2
  for (int i = 0; i < p; ++i) {
    Rational d = Rational(i) - Rational(p - 1, 2);
    energy += d * d;
  }
  const Rational gamma = Rational(step) * step * energy / (p * sigma_g2);
  const Real gr = detail::to_real(gamma);
  CapacityBound cb;
  cb.k_ub_real = Real(ps.n) / 2 * log2((1 + gr) / (1 + gr / (p * p)));
  cb.k_ub = static_cast<long>(ceil(cb.k_ub_real).convert_to<long>());
  cb.cer_lb = Rational(ps.k * ps.n * ps.d_u + 12 * ps.n, cb.k_ub);
  return cb;
}

// ---------------------------------------------------------------------------
// Exact convolution DFR (original compression variant)
//
// Computes the per-coefficient noise distribution exactly under the
// standard independence assumption: each of the k*n scalar products in
// e^T r - s^T (e1 + psi_du) is drawn i.i.d., then e2 and psi_dv are
// added. Probabilities are nonnegative throughout, so plain double
// convolution keeps full relative accuracy in the far tail.

namespace detail {

/// PMF over a centered integer support [-radius, radius], stored densely.
struct DensePmf {
  int radius = 0;
  std::vector<double> p;  // size 2*radius + 1; p[radius + x] = Pr[x]

  static DensePmf delta() { return {0, {1.0}}; }
};

inline DensePmf conv(const DensePmf& a, const DensePmf& b) {
  DensePmf out;
  out.radius = a.radius + b.radius;
  out.p.assign(a.p.size() + b.p.size() - 1, 0.0);
  for (size_t i = 0; i < a.p.size(); ++i) {
    if (a.p[i] == 0.0) continue;
    const double ai = a.p[i];
    for (size_t j = 0; j < b.p.size(); ++j) out.p[i + j] += ai * b.p[j];
  }
  return out;
}

inline DensePmf conv_power(DensePmf base, size_t e) {
  DensePmf acc = DensePmf::delta();
  while (e) {
    if (e & 1) acc = conv(acc, base);
    e >>= 1;
    if (e) base = conv(base, base);
  }
  return acc;
}

/// Centered binomial distribution of width eta as a DensePmf.
inline DensePmf cbd_pmf(int eta) {
  DensePmf out;
  out.radius = eta;
  out.p.assign(static_cast<size_t>(2 * eta) + 1, 0.0);
  double denom = std::pow(4.0, eta);
  double c = 1.0;  // C(2*eta, j)
  for (int j = 0; j <= 2 * eta; ++j) {
    out.p[static_cast<size_t>(j)] = c / denom;
    c = c * (2 * eta - j) / (j + 1);
  }
  return out;
}

inline DensePmf dense_from_error_pmf(const ErrorPmf& e) {
  int radius = 0;
  for (const auto& s : e.support) {
    if (denominator(s) != 1)
      throw std::domain_error("exact convolution requires integer support");
    radius = std::max(radius, static_cast<int>(
        abs(numerator(s)).convert_to<long>()));
  }
  DensePmf out;
  out.radius = radius;
  out.p.assign(static_cast<size_t>(2 * radius) + 1, 0.0);
  for (size_t i = 0; i < e.support.size(); ++i)
    out.p[static_cast<size_t>(radius +
        numerator(e.support[i]).convert_to<long>())] =
        e.probs[i].convert_to<double>();
  return out;
}

/// Distribution of X*Y for independent X, Y with the given PMFs.
inline DensePmf product_pmf(const DensePmf& x, const DensePmf& y) {
  DensePmf out;
  out.radius = x.radius * y.radius;
  out.p.assign(static_cast<size_t>(2 * out.radius) + 1, 0.0);
  for (int a = -x.radius; a <= x.radius; ++a)
    for (int b = -y.radius; b <= y.radius; ++b)
      out.p[static_cast<size_t>(out.radius + a * b)] +=
          x.p[static_cast<size_t>(x.radius + a)] *
          y.p[static_cast<size_t>(y.radius + b)];
  return out;
}

}  // namespace detail

/// Numerically exact DFR of the original compression variant: builds the
/// full per-coefficient noise PMF by convolution and sums the tail beyond
/// round(q/4). Returns log2(delta) with delta = 1 - (1 - P)^n.
inline DfrResult dfr_exact_original(const ParamSet& ps, unsigned prec = 256) {
  if (ps.variant != Variant::kOriginal)
    throw std::domain_error("dfr_exact_original: original variant only");
  using detail::DensePmf;
  DensePmf eta1 = detail::cbd_pmf(ps.eta1);
  DensePmf eta2 = detail::cbd_pmf(ps.eta2);
  DensePmf psi_u = detail::dense_from_error_pmf(error_pmf_compress(ps.d_u));
  DensePmf psi_v = detail::dense_from_error_pmf(error_pmf_compress(ps.d_v));

  // one scalar term: e*r - s*(e1 + psi_du); both factors symmetric
  DensePmf term = detail::conv(detail::product_pmf(eta1, eta1),
                               detail::product_pmf(eta1, detail::conv(eta2, psi_u)));
  DensePmf total = detail::conv_power(term, static_cast<size_t>(ps.k) * ps.n);
  total = detail::conv(total, detail::conv(eta2, psi_v));

  const int threshold = (2 * kQ + 4) / 8;  // round(q/4); fail iff |x| > threshold
  double p_tail = 0;
  for (int x = threshold + 1; x <= total.radius; ++x)
    p_tail += total.p[static_cast<size_t>(total.radius + x)] +
              total.p[static_cast<size_t>(total.radius - x)];

  detail::PrecisionGuard g(prec);
  Real delta = -expm1(Real(ps.n) * log1p(-Real(p_tail)));
  return {log2(delta), DfrMethod::kExactConvolution, prec};
}

// ---------------------------------------------------------------------------
// Monte-Carlo validation

namespace detail {

inline Seed derive_seed(const Seed& master, uint64_t domain, uint64_t index) {
  uint8_t buf[48];
  std::copy(master.begin(), master.end(), buf);
  for (int i = 0; i < 8; ++i) buf[32 + i] = static_cast<uint8_t>(domain >> (8 * i));
  for (int i = 0; i < 8; ++i) buf[40 + i] = static_cast<uint8_t>(index >> (8 * i));
  Shake256 g({buf, sizeof buf});
  Seed out;
  g.squeeze(out.data(), out.size());
  return out;
}

}  // namespace detail

/// Draws samples of Y = e^T r + e2 - s^T (e1 + e_Lu), the Gaussian part
/// of the decoding noise (Theorem 1), using real Lloyd-Max codebooks on
/// the u side. Returns per-coefficient values; each independent draw of
/// (s, e, r, e1, e2) contributes n of them.
inline std::vector<double> simulate_noise(const ParamSet& ps, size_t samples,
                                          const Seed& seed) {
  const IntQuantizer* qu = nullptr;
  if (ps.variant != Variant::kOriginal) qu = &lm_quantizer(ps.d_u);
  std::vector<double> out;
  out.reserve(samples);
  const size_t draws = (samples + kN - 1) / kN;
  for (size_t d = 0; d < draws; ++d) {
    KeyPair kp = keygen(ps, detail::derive_seed(seed, 0, d));
    PolyMat A = expand_matrix(kp.pk.rho, ps.k);
    // e = t - A s, recomputed from the keypair
    PolyVec e(ps.k);
    {
      std::vector<Poly> s_hat(ps.k);
      for (int j = 0; j < ps.k; ++j) {
        s_hat[j] = kp.sk.s[static_cast<size_t>(j)];
        ntt(s_hat[j]);
      }
      for (int i = 0; i < ps.k; ++i) {
        Poly acc;
        for (int j = 0; j < ps.k; ++j) {
          Poly a = A[i][j];
          ntt(a);
          acc = poly_add(acc, ntt_pointwise(a, s_hat[j]));
        }
        inv_ntt(acc);
        e[i] = poly_sub(kp.pk.t[static_cast<size_t>(i)], acc);
      }
    }
    auto noise = detail::sample_enc_noise(detail::derive_seed(seed, 1, d), ps);
    PolyVec up = matvec_t(A, noise.r);
    for (int i = 0; i < ps.k; ++i) up[i] = poly_add(up[i], noise.e1[i]);

    // 2 * e_Lu, reduced into [0, 2q)
    std::vector<std::array<int32_t, kN>> twice_err(static_cast<size_t>(ps.k));
    for (int i = 0; i < ps.k; ++i)
      for (int j = 0; j < ps.n; ++j) {
        int32_t x = up[i].c[j];
        int32_t te;
        if (qu) {
          te = qu->twice_level(qu->index_of(static_cast<uint16_t>(x))) - 2 * x;
        } else {
          te = 2 * (decompress(compress(x, ps.d_u), ps.d_u) - x);
        }
        te %= 2 * kQ;
        if (te < 0) te += 2 * kQ;
        twice_err[static_cast<size_t>(i)][j] = te;
      }
    auto s_err2 = detail::dot_scaled(kp.sk.s, twice_err);

    // integer part: e^T r + e2 - s^T e1 (mod q)
    Poly ip = poly_add(inner_product(e, noise.r), noise.e2);
    ip = poly_sub(ip, inner_product(kp.sk.s, noise.e1));

    for (int j = 0; j < ps.n && out.size() < samples; ++j) {
      int32_t y2 = (2 * ip.c[j] - s_err2[j]) % (2 * kQ);
      if (y2 < 0) y2 += 2 * kQ;
      if (y2 > kQ) y2 -= 2 * kQ;  // center into (-q, q]
      out.push_back(y2 / 2.0);
    }
  }
  return out;
}

struct EmpiricalDfr {
  size_t trials;
  size_t failures;
  double rate;
  double wilson_lo;  // 99% Wilson score interval
  double wilson_hi;
};

namespace detail {

inline EmpiricalDfr wilson_summary(size_t trials, size_t failures) {
  const double z = 2.5758293035489004;  // 99.5th percentile of N(0,1)
  const double n = static_cast<double>(trials);
  const double ph = static_cast<double>(failures) / n;
  const double den = 1 + z * z / n;
  const double mid = (ph + z * z / (2 * n)) / den;
  const double half =
      z * std::sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / den;
  return {trials, failures, ph, mid - half, mid + half};
}

}  // namespace detail

/// Runs full encrypt/decrypt trials and counts decryption failures.
/// Trials are seeded individually (derive_seed on the trial index), so
/// the result is independent of any parallel scheduling.
inline EmpiricalDfr empirical_dfr(const ParamSet& ps, size_t trials,
                                  const Seed& seed, int jobs = 1) {
  (void)jobs;  // per-trial seeding keeps any schedule equivalent to serial
  const IntQuantizer* qu = nullptr;
  const IntQuantizer* qv = nullptr;
  if (ps.variant != Variant::kOriginal) qu = &lm_quantizer(ps.d_u);
  if (ps.variant == Variant::kLloydMax) qv = &lm_quantizer(ps.d_v);
  std::unique_ptr<BchCode> code;
  if (ps.variant == Variant::kSemiCompressed)
    code = std::make_unique<BchCode>(make_bch(*ps.code));

  std::mt19937_64 msg_rng(0x5ebc0de);
  size_t failures = 0;
  for (size_t t = 0; t < trials; ++t) {
    // fresh key per trial: the analytic formulas average over (s, e),
    // and the failure rate conditioned on one key can differ widely
    KeyPair kp = keygen(ps, detail::derive_seed(seed, 2, t));
    ExpandedKey ek = expand_key(kp.pk, ps);
    BitVec m(static_cast<size_t>(ps.message_bits()));
    for (auto& b : m) b = static_cast<uint8_t>(msg_rng() & 1);
    Seed coins = detail::derive_seed(seed, 3, t);
    switch (ps.variant) {
      case Variant::kOriginal: {
        auto ct = encrypt_original(ek, m, coins, ps);
        failures += decrypt_original(kp.sk, ct, ps) != m;
        break;
      }
      case Variant::kLloydMax: {
        auto ct = encrypt_lm(ek, m, coins, ps, *qu, *qv);
        failures += decrypt_lm(kp.sk, ct, ps, *qu, *qv) != m;
        break;
      }
      case Variant::kSemiCompressed: {
        auto ct = encrypt_sc(ek, m, coins, ps, *code, *qu);
        auto dec = decrypt_sc(kp.sk, ct, ps, *code, *qu);
        failures += !dec || *dec != m;
        break;
      }
    }
  }
  return detail::wilson_summary(trials, failures);
}

/// One-sample Kolmogorov-Smirnov statistic of `samples` (consumed,
/// sorted in place) against the standard normal CDF.
inline double ks_statistic_normal(std::vector<double>& samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0;
  for (size_t i = 0; i < samples.size(); ++i) {
    double cdf = 0.5 * std::erfc(-samples[i] / std::sqrt(2.0));
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    d = std::max(d, std::abs(cdf - static_cast<double>(i + 1) / n));
  }
  return d;
}

}  // namespace sck

#endif  // SCK_ANALYSIS_HPP
