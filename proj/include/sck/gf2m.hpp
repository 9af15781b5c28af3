/**
 * GF(2^m) arithmetic with log/antilog tables, plus polynomials over GF(2)
 * as bit vectors. Used by the BCH encoder/decoder.
 */

#ifndef SCK_GF2M_HPP
#define SCK_GF2M_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sck {

class GF2mField {
 public:
  /// modulus: primitive polynomial bitmask including the leading term,
  /// e.g. X^10 + X^3 + 1 -> 0x409.
  GF2mField(int m, uint32_t modulus) : m_(m), modulus_(modulus) {
    if (m < 2 || m > 16) throw std::domain_error("gf2m: m out of range");
    order_ = (1u << m) - 1;
    log_.assign(order_ + 1, 0);
    antilog_.assign(2 * order_, 0);
    uint32_t x = 1;
    for (uint32_t i = 0; i < order_; ++i) {
      antilog_[i] = x;
      if (x == 1 && i != 0)
        throw std::domain_error("gf2m: modulus is not primitive");
      log_[x] = i;
      x <<= 1;
      if (x >> m) x ^= modulus;
    }
    // duplicate table avoids a reduction after one addition of logs
    for (uint32_t i = 0; i < order_; ++i) antilog_[order_ + i] = antilog_[i];
  }

  int m() const { return m_; }
  uint32_t order() const { return order_; }  // 2^m - 1
  uint32_t modulus() const { return modulus_; }

  uint32_t mul(uint32_t a, uint32_t b) const {
    if (a == 0 || b == 0) return 0;
    return antilog_[log_[a] + log_[b]];
  }

  uint32_t inv(uint32_t a) const {
    if (a == 0) throw std::domain_error("gf2m: inverse of zero");
    return antilog_[order_ - log_[a]];
  }

  uint32_t pow_alpha(int64_t e) const {  // alpha^e
    int64_t r = e % order_;
    if (r < 0) r += order_;
    return antilog_[static_cast<size_t>(r)];
  }

  uint32_t log(uint32_t a) const {
    if (a == 0) throw std::domain_error("gf2m: log of zero");
    return log_[a];
  }

 private:
  int m_;
  uint32_t modulus_;
  uint32_t order_;
  std::vector<uint32_t> log_;
  std::vector<uint32_t> antilog_;
};

/// Dense polynomial over GF(2), LSB = constant term.
struct GF2Poly {
  std::vector<uint8_t> coeff;  // 0/1 per degree

  int degree() const {
    for (int i = static_cast<int>(coeff.size()) - 1; i >= 0; --i)
      if (coeff[i]) return i;
    return -1;
  }

  void trim() { coeff.resize(static_cast<size_t>(degree() + 1)); }

  static GF2Poly one() { return {{1}}; }

  GF2Poly operator*(const GF2Poly& o) const {
    if (degree() < 0 || o.degree() < 0) return {};
    GF2Poly r;
    r.coeff.assign(coeff.size() + o.coeff.size() - 1, 0);
    for (size_t i = 0; i < coeff.size(); ++i) {
      if (!coeff[i]) continue;
      for (size_t j = 0; j < o.coeff.size(); ++j) r.coeff[i + j] ^= o.coeff[j];
    }
    return r;
  }

  /// Remainder of this modulo d (both over GF(2)).
  GF2Poly mod(const GF2Poly& d) const {
    int dd = d.degree();
    if (dd < 0) throw std::domain_error("gf2poly: division by zero");
    GF2Poly r = *this;
    for (int i = r.degree(); i >= dd; --i) {
      if (!r.coeff[static_cast<size_t>(i)]) continue;
      for (int j = 0; j <= dd; ++j)
        r.coeff[static_cast<size_t>(i - dd + j)] ^= d.coeff[static_cast<size_t>(j)];
    }
    r.trim();
    return r;
  }
};

}  // namespace sck

#endif  // SCK_GF2M_HPP
