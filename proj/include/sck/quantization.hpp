/**
 * Scalar quantization: Kyber compress/decompress, Lloyd-Max MMSE
 * codebook construction over discrete PMFs, nearest-level quantization,
 * quantization-error statistics, and a dynamic-programming optimal
 * quantizer used as an independent oracle.
 *
 * All codebook arithmetic is exact rational; values are rounded only
 * for display.
 */

#ifndef SCK_QUANTIZATION_HPP
#define SCK_QUANTIZATION_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "sck/params.hpp"
#include "sck/ring.hpp"

namespace sck {

// ---------------------------------------------------------------------------
// Kyber compress / decompress (round half up)

inline int compress(int x, int d, int q = kQ) {
  if ((1 << d) >= q) throw std::domain_error("compress: 2^d must be < q");
  if (x < 0 || x >= q) throw std::domain_error("compress: x out of range");
  // round((2^d / q) * x), ties up: floor((2^(d+1) x + q) / (2q))
  long long num = (2LL << d) * x + q;
  return static_cast<int>((num / (2LL * q)) & ((1 << d) - 1));
}

inline int decompress(int y, int d, int q = kQ) {
  if ((1 << d) >= q) throw std::domain_error("decompress: 2^d must be < q");
  if (y < 0 || y >= (1 << d)) throw std::domain_error("decompress: y out of range");
  // round((q / 2^d) * y), ties up
  long long num = 2LL * q * y + (1LL << d);
  return static_cast<int>(num >> (d + 1));
}

// ---------------------------------------------------------------------------
// Discrete PMFs

struct DiscretePmf {
  std::vector<long long> support;  // sorted, distinct
  std::vector<Rational> probs;     // nonnegative, sums to 1
  std::string label;

  void validate() const {
    if (support.empty() || support.size() != probs.size())
      throw std::domain_error("pmf: empty or mismatched support");
    if (!std::is_sorted(support.begin(), support.end()))
      throw std::domain_error("pmf: support not sorted");
    Rational sum = 0;
    for (const auto& p : probs) {
      if (p < 0) throw std::domain_error("pmf: negative probability");
      sum += p;
    }
    if (sum != 1) throw std::domain_error("pmf: probabilities must sum to 1");
  }

  Rational mean() const {
    Rational m = 0;
    for (size_t i = 0; i < support.size(); ++i) m += probs[i] * support[i];
    return m;
  }
};

inline DiscretePmf uniform_pmf(int q, std::string label = {}) {
  DiscretePmf pmf;
  pmf.support.resize(q);
  std::iota(pmf.support.begin(), pmf.support.end(), 0);
  pmf.probs.assign(q, Rational(1, q));
  pmf.label = label.empty() ? "uniform-Z" + std::to_string(q) : std::move(label);
  return pmf;
}

/// PMF over rational error values (x - quantized x).
struct ErrorPmf {
  std::vector<Rational> support;  // sorted
  std::vector<Rational> probs;

  Rational mean() const {
    Rational m = 0;
    for (size_t i = 0; i < support.size(); ++i) m += probs[i] * support[i];
    return m;
  }
  Rational second_moment() const {
    Rational m = 0;
    for (size_t i = 0; i < support.size(); ++i)
      m += probs[i] * support[i] * support[i];
    return m;
  }
};

// ---------------------------------------------------------------------------
// Codebooks

struct QuantCodebook {
  std::vector<Rational> levels;      // strictly increasing
  std::vector<Rational> thresholds;  // midpoints, size L-1
  std::string source_pmf_id;
  int dropped_levels = 0;  // empty cells removed during construction

  size_t size() const { return levels.size(); }

  void rebuild_thresholds() {
    thresholds.resize(levels.size() > 0 ? levels.size() - 1 : 0);
    for (size_t i = 0; i + 1 < levels.size(); ++i)
      thresholds[i] = (levels[i] + levels[i + 1]) / 2;
  }

  /// Nearest level; ties on a threshold go to the lower index
  /// (half-open cells (beta_{i-1}, beta_i]). Binary search.
  std::pair<size_t, Rational> quantize(const Rational& x) const {
    if (levels.empty()) throw std::domain_error("empty codebook");
    size_t lo = 0, hi = thresholds.size();  // answer in [lo, hi]
    while (lo < hi) {
      size_t mid = (lo + hi) / 2;
      if (x <= thresholds[mid])
        hi = mid;
      else
        lo = mid + 1;
    }
    return {lo, levels[lo]};
  }
};

namespace detail {

// Cell assignment for sorted integer support against sorted thresholds:
// boundary[i] = index of the first support point past cell i.
inline std::vector<size_t> cell_boundaries(const std::vector<long long>& support,
                                           const std::vector<Rational>& thresholds) {
  std::vector<size_t> b(thresholds.size() + 1);
  size_t pos = 0;
  for (size_t i = 0; i < thresholds.size(); ++i) {
    while (pos < support.size() && Rational(support[pos]) <= thresholds[i]) ++pos;
    b[i] = pos;
  }
  b.back() = support.size();
  return b;
}

inline Rational cell_sse(const DiscretePmf& pmf, size_t begin, size_t end,
                         const Rational& level) {
  Rational sse = 0;
  for (size_t i = begin; i < end; ++i) {
    Rational e = Rational(pmf.support[i]) - level;
    sse += pmf.probs[i] * e * e;
  }
  return sse;
}

}  // namespace detail

inline Rational mse(const QuantCodebook& cb, const DiscretePmf& pmf) {
  Rational total = 0;
  for (size_t i = 0; i < pmf.support.size(); ++i) {
    Rational e = Rational(pmf.support[i]) - cb.quantize(pmf.support[i]).second;
    total += pmf.probs[i] * e * e;
  }
  return total;
}

namespace detail {

/// Runs the two-step iteration (midpoint thresholds, conditional-mean
/// levels) to a fixed point from the given initial levels. Cells that
/// lose all probability mass are dropped (L shrinks, recorded).
inline QuantCodebook lloyd_fixed_point(const DiscretePmf& pmf,
                                       std::vector<Rational> init_levels) {
  QuantCodebook cb;
  cb.source_pmf_id = pmf.label;
  cb.levels = std::move(init_levels);
  cb.rebuild_thresholds();

  std::vector<size_t> assignment =
      detail::cell_boundaries(pmf.support, cb.thresholds);
  Rational prev_mse = -1;

  for (;;) {
    // conditional-mean levels per cell; drop empty cells
    std::vector<Rational> new_levels;
    new_levels.reserve(cb.levels.size());
    size_t begin = 0;
    for (size_t i = 0; i < assignment.size(); ++i) {
      size_t end = assignment[i];
      Rational mass = 0, moment = 0;
      for (size_t j = begin; j < end; ++j) {
        mass += pmf.probs[j];
        moment += pmf.probs[j] * pmf.support[j];
      }
      if (mass > 0) new_levels.push_back(moment / mass);
      begin = end;
    }
    cb.dropped_levels += static_cast<int>(cb.levels.size() - new_levels.size());
    cb.levels = std::move(new_levels);
    cb.rebuild_thresholds();

    Rational cur_mse = mse(cb, pmf);
    if (prev_mse >= 0 && cur_mse > prev_mse)
      throw std::logic_error("lloyd_max: MSE increased between iterations");
    prev_mse = cur_mse;

    auto next = detail::cell_boundaries(pmf.support, cb.thresholds);
    if (next == assignment && cb.thresholds.size() + 1 == assignment.size())
      break;
    assignment = std::move(next);
  }
  return cb;
}

}  // namespace detail

/// Lloyd-Max MMSE quantizer construction.
///
/// The two-step iteration is run from two deterministic starts and the
/// fixed point with the smaller MSE is returned:
///   - the linear init x_min + i*(x_max - x_min)/L, and
///   - an equal-probability-mass init.
/// The linear init alone can stall in a suboptimal fixed point on
/// discrete sources (e.g. uniform Z_31 with L = 4); the equal-mass
/// start gives balanced cells, which are optimal for uniform inputs.
inline QuantCodebook lloyd_max(const DiscretePmf& pmf, size_t L) {
  pmf.validate();
  if (L < 1) throw std::domain_error("lloyd_max: L must be >= 1");
  if (L > pmf.support.size())
    throw std::domain_error("lloyd_max: L exceeds support size");

  const size_t S = pmf.support.size();
  const Rational x_min = pmf.support.front();
  const Rational x_max = pmf.support.back();

  std::vector<Rational> linear(L);
  for (size_t i = 1; i <= L; ++i)
    linear[i - 1] = x_min + Rational(i) * (x_max - x_min) / Rational(L);

  // equal-mass cells, forced nonempty, levels at cell conditional means
  std::vector<Rational> quantile(L);
  {
    Rational total = 0;
    for (const auto& p : pmf.probs) total += p;
    std::vector<size_t> bounds(L + 1);
    bounds[0] = 0;
    bounds[L] = S;
    Rational cum = 0;
    size_t pos = 0;
    for (size_t i = 1; i < L; ++i) {
      Rational target = total * Rational(i, L);
      while (pos < S && cum < target) cum += pmf.probs[pos++];
      pos = std::max(pos, bounds[i - 1] + 1);
      pos = std::min(pos, S - (L - i));  // leave room for remaining cells
      bounds[i] = pos;
    }
    for (size_t i = 0; i < L; ++i) {
      Rational mass = 0, moment = 0;
      for (size_t j = bounds[i]; j < bounds[i + 1]; ++j) {
        mass += pmf.probs[j];
        moment += pmf.probs[j] * pmf.support[j];
      }
      quantile[i] = mass > 0
                        ? moment / mass
                        : Rational(pmf.support[bounds[i]]);
    }
    // strictly increasing levels are required by the codebook invariant
    for (size_t i = 1; i < L; ++i)
      if (!(quantile[i - 1] < quantile[i])) {
        quantile = linear;  // degenerate masses; fall back to one start
        break;
      }
  }

  QuantCodebook a = detail::lloyd_fixed_point(pmf, std::move(linear));
  QuantCodebook b = detail::lloyd_fixed_point(pmf, std::move(quantile));
  return mse(b, pmf) < mse(a, pmf) ? b : a;
}

/// Exact distribution of x - quantize(x) under the source PMF.
inline ErrorPmf error_pmf(const QuantCodebook& cb, const DiscretePmf& pmf) {
  std::vector<std::pair<Rational, Rational>> acc;
  for (size_t i = 0; i < pmf.support.size(); ++i) {
    Rational e = Rational(pmf.support[i]) - cb.quantize(pmf.support[i]).second;
    acc.emplace_back(e, pmf.probs[i]);
  }
  std::sort(acc.begin(), acc.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  ErrorPmf out;
  for (const auto& [e, p] : acc) {
    if (!out.support.empty() && out.support.back() == e)
      out.probs.back() += p;
    else {
      out.support.push_back(e);
      out.probs.push_back(p);
    }
  }
  return out;
}

/// Exact error PMF of Kyber compress/decompress over uniform Z_q,
/// with errors centered into (-q/2, q/2].
inline ErrorPmf error_pmf_compress(int d, int q = kQ) {
  std::vector<std::pair<long long, Rational>> acc;
  for (int x = 0; x < q; ++x) {
    int e = x - decompress(compress(x, d, q), d, q);
    if (e > q / 2) e -= q;
    if (e <= -(q + 1) / 2) e += q;
    acc.emplace_back(e, Rational(1, q));
  }
  std::sort(acc.begin(), acc.end());
  ErrorPmf out;
  for (const auto& [e, p] : acc) {
    if (!out.support.empty() && out.support.back() == e)
      out.probs.back() += p;
    else {
      out.support.push_back(e);
      out.probs.push_back(p);
    }
  }
  return out;
}

/// MSE of compress/decompress roundtrip over uniform Z_q (exact rational).
inline Rational mse_compress(int d, int q = kQ) {
  ErrorPmf pmf = error_pmf_compress(d, q);
  return pmf.second_moment();
}

/// Globally MSE-optimal L-level quantizer via dynamic programming over
/// contiguous cells with conditional-mean levels. Independent of the
/// Lloyd-Max path; O(|support|^2 * L).
inline QuantCodebook dp_optimal_quantizer(const DiscretePmf& pmf, size_t L) {
  pmf.validate();
  const size_t S = pmf.support.size();
  if (L < 1 || L > S) throw std::domain_error("dp_optimal_quantizer: bad L");
  if (S > 4096) throw std::length_error("dp_optimal_quantizer: instance too large");

  // prefix sums for O(1) cell cost
  std::vector<Rational> pm(S + 1, 0), px(S + 1, 0), pxx(S + 1, 0);
  for (size_t i = 0; i < S; ++i) {
    Rational x = pmf.support[i];
    pm[i + 1] = pm[i] + pmf.probs[i];
    px[i + 1] = px[i] + pmf.probs[i] * x;
    pxx[i + 1] = pxx[i] + pmf.probs[i] * x * x;
  }
  // SSE of cell [a, b) around its conditional mean; empty-mass cells cost 0
  auto cost = [&](size_t a, size_t b) -> Rational {
    Rational mass = pm[b] - pm[a];
    if (mass == 0) return 0;
    Rational sx = px[b] - px[a], sxx = pxx[b] - pxx[a];
    return sxx - sx * sx / mass;
  };

  const Rational kInf = Rational(BigInt(1) << 62);
  std::vector<std::vector<Rational>> dp(L + 1, std::vector<Rational>(S + 1, kInf));
  std::vector<std::vector<size_t>> cut(L + 1, std::vector<size_t>(S + 1, 0));
  dp[0][0] = 0;
  for (size_t l = 1; l <= L; ++l)
    for (size_t i = l; i <= S; ++i)
      for (size_t j = l - 1; j < i; ++j) {
        Rational cand = dp[l - 1][j] + cost(j, i);
        if (cand < dp[l][i]) {
          dp[l][i] = cand;
          cut[l][i] = j;
        }
      }

  QuantCodebook cb;
  cb.source_pmf_id = pmf.label;
  std::vector<size_t> bounds(L + 1);
  bounds[L] = S;
  for (size_t l = L; l > 0; --l) bounds[l - 1] = cut[l][bounds[l]];
  for (size_t l = 0; l < L; ++l) {
    size_t a = bounds[l], b = bounds[l + 1];
    Rational mass = pm[b] - pm[a];
    if (mass > 0) cb.levels.push_back((px[b] - px[a]) / mass);
  }
  cb.rebuild_thresholds();
  return cb;
}

// ---------------------------------------------------------------------------
// Integer fast path: per-element quantizer for Z_q inputs

/// Precomputed nearest-level table for integer inputs in [0, q).
class IntQuantizer {
 public:
  IntQuantizer() = default;
  IntQuantizer(QuantCodebook cb, int q = kQ) : cb_(std::move(cb)) {
    index_.resize(q);
    for (int x = 0; x < q; ++x)
      index_[x] = static_cast<uint32_t>(cb_.quantize(x).first);
    // levels for uniform Z_q Lloyd-Max codebooks have denominator 1 or 2;
    // store 2*level as an integer for scaled ring arithmetic
    twice_level_.resize(cb_.size());
    for (size_t i = 0; i < cb_.size(); ++i) {
      Rational two_l = 2 * cb_.levels[i];
      if (denominator(two_l) != 1)
        throw std::logic_error("codebook level denominator exceeds 2");
      twice_level_[i] = static_cast<int32_t>(numerator(two_l));
    }
  }

  const QuantCodebook& codebook() const { return cb_; }
  size_t size() const { return cb_.size(); }
  uint32_t index_of(uint16_t x) const { return index_[x]; }
  /// 2 * level, an exact integer.
  int32_t twice_level(uint32_t index) const { return twice_level_[index]; }

 private:
  QuantCodebook cb_;
  std::vector<uint32_t> index_;
  std::vector<int32_t> twice_level_;
};

// ---------------------------------------------------------------------------
// Codebook file format (bit-exact across platforms, little-endian)
//
//   magic "SCKQ", u32 L, u32 label length, label bytes,
//   u64 D = lcm of level denominators,
//   L   i64 level numerators scaled by D,
//   L-1 i64 threshold numerators scaled by 2D.

namespace detail {

template <typename T>
void write_le(std::ostream& os, T v) {
  for (size_t i = 0; i < sizeof(T); ++i)
    os.put(static_cast<char>((static_cast<uint64_t>(v) >> (8 * i)) & 0xff));
}

template <typename T>
T read_le(std::istream& is) {
  uint64_t v = 0;
  for (size_t i = 0; i < sizeof(T); ++i) {
    int c = is.get();
    if (c == EOF) throw std::runtime_error("codebook file truncated");
    v |= static_cast<uint64_t>(static_cast<uint8_t>(c)) << (8 * i);
  }
  return static_cast<T>(v);
}

}  // namespace detail

inline void save_codebook(const QuantCodebook& cb, std::ostream& os) {
  BigInt d = 1;
  for (const auto& l : cb.levels) d = lcm(d, BigInt(denominator(l)));
  uint64_t D = d.convert_to<uint64_t>();

  os.write("SCKQ", 4);
  detail::write_le<uint32_t>(os, static_cast<uint32_t>(cb.size()));
  detail::write_le<uint32_t>(os, static_cast<uint32_t>(cb.source_pmf_id.size()));
  os.write(cb.source_pmf_id.data(),
           static_cast<std::streamsize>(cb.source_pmf_id.size()));
  detail::write_le<uint64_t>(os, D);
  for (const auto& l : cb.levels)
    detail::write_le<int64_t>(os, numerator(Rational(l * D)).convert_to<int64_t>());
  for (const auto& t : cb.thresholds)
    detail::write_le<int64_t>(os, numerator(Rational(t * 2 * D)).convert_to<int64_t>());
}

inline QuantCodebook load_codebook(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (is.gcount() != 4 || std::string(magic, 4) != "SCKQ")
    throw std::runtime_error("not a codebook file");
  uint32_t L = detail::read_le<uint32_t>(is);
  uint32_t label_len = detail::read_le<uint32_t>(is);
  std::string label(label_len, '\0');
  is.read(label.data(), label_len);
  if (is.gcount() != static_cast<std::streamsize>(label_len))
    throw std::runtime_error("codebook file truncated");
  uint64_t D = detail::read_le<uint64_t>(is);
  if (D == 0) throw std::runtime_error("codebook file: zero denominator");

  QuantCodebook cb;
  cb.source_pmf_id = label;
  cb.levels.resize(L);
  for (auto& l : cb.levels)
    l = Rational(detail::read_le<int64_t>(is), D);
  cb.thresholds.resize(L > 0 ? L - 1 : 0);
  for (auto& t : cb.thresholds)
    t = Rational(detail::read_le<int64_t>(is), 2 * D);
  for (size_t i = 0; i + 1 < cb.levels.size(); ++i)
    if (!(cb.levels[i] < cb.levels[i + 1]))
      throw std::runtime_error("codebook file: levels not increasing");
  return cb;
}

}  // namespace sck

#endif  // SCK_QUANTIZATION_HPP
