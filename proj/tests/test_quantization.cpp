#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "sck/quantization.hpp"

namespace {

using namespace sck;

double approx4(const Rational& r) {
  return std::round(r.convert_to<double>() * 10000) / 10000;
}

TEST_CASE("compress/decompress basics", "[quantization]") {
  // Compress(x, d) = round(2^d / q * x) mod 2^d, round half up
  CHECK(compress(0, 10) == 0);
  CHECK(compress(kQ - 1, 10) == 0);  // wraps to 0
  CHECK(decompress(0, 10) == 0);
  for (int d : {1, 4, 5, 10, 11}) {
    for (int x : {0, 1, 831, 832, 833, 1664, 1665, 2000, 3328}) {
      int idx = compress(x, d);
      CHECK(idx >= 0);
      CHECK(idx < (1 << d));
      // decompression error bounded by round(q / 2^(d+1))
      int err = decompress(idx, d) - x;
      err = ((err % kQ) + kQ) % kQ;
      int centered_err = err > kQ / 2 ? err - kQ : err;
      CHECK(std::abs(centered_err) <= (kQ + (1 << (d + 1)) - 1) / (1 << (d + 1)));
    }
  }
  CHECK_THROWS_AS(compress(-1, 10), std::domain_error);
  CHECK_THROWS_AS(compress(kQ, 10), std::domain_error);
}

TEST_CASE("compression error pmf and mse are exact", "[quantization]") {
  // d = 11: support {-1, 0, 1} with exact counts over Z_q
  ErrorPmf e11 = error_pmf_compress(11);
  REQUIRE(e11.support.size() == 3);
  CHECK(e11.support[0] == -1);
  CHECK(e11.support[2] == 1);
  CHECK(e11.probs[0] == Rational(641, 3329));
  CHECK(e11.probs[1] == Rational(2048, 3329));
  CHECK(e11.probs[2] == Rational(640, 3329));
  CHECK(mse_compress(11) == Rational(1281, 3329));
  CHECK(approx4(mse_compress(11)) == 0.3848);
  CHECK(approx4(mse_compress(10)) == 0.9240);

  Rational total = 0;
  for (const auto& p : e11.probs) total += p;
  CHECK(total == 1);
  CHECK(e11.mean() == Rational(-1, 3329));
}

TEST_CASE("lloyd-max reproduces the d=10 and d=11 codebook statistics",
          "[quantization]") {
  auto pmf = uniform_pmf(kQ);

  auto cb11 = lloyd_max(pmf, 1u << 11);
  CHECK(mse(cb11, pmf) == Rational(6405, 10 * 3329));  // 0.1924...
  CHECK(approx4(mse(cb11, pmf)) == 0.1924);
  ErrorPmf e11 = error_pmf(cb11, pmf);
  REQUIRE(e11.support.size() == 3);
  CHECK(e11.support[0] == Rational(-1, 2));
  CHECK(e11.support[1] == 0);
  CHECK(e11.support[2] == Rational(1, 2));
  CHECK(e11.probs[0] == Rational(1281, 3329));  // 0.3848
  CHECK(e11.probs[1] == Rational(767, 3329));   // 0.2304
  CHECK(e11.probs[2] == Rational(1281, 3329));

  auto cb10 = lloyd_max(pmf, 1u << 10);
  CHECK(approx4(mse(cb10, pmf)) == 0.8468);
  ErrorPmf e10 = error_pmf(cb10, pmf);
  REQUIRE(e10.support.size() == 7);
  CHECK(e10.support.front() == Rational(-3, 2));
  CHECK(approx4(e10.probs[0]) == 0.0772);
  CHECK(approx4(e10.probs[1]) == 0.2304);
  CHECK(approx4(e10.probs[3]) == 0.2304);
}

TEST_CASE("lloyd-max equals the dp optimal quantizer on small alphabets",
          "[quantization]") {
  for (int q : {7, 31, 101}) {
    auto pmf = uniform_pmf(q);
    for (size_t L : {2u, 4u, 8u, 16u}) {
      if (L > static_cast<size_t>(q)) continue;
      auto lm = lloyd_max(pmf, L);
      auto dp = dp_optimal_quantizer(pmf, L);
      INFO("q=" << q << " L=" << L);
      CHECK(mse(lm, pmf) == mse(dp, pmf));
    }
  }
}

TEST_CASE("dp optimal quantizer on a skewed pmf beats naive splits",
          "[quantization]") {
  // non-uniform source: mass concentrated at the ends
  DiscretePmf pmf;
  pmf.support = {0, 1, 2, 3, 4, 5, 6, 7};
  pmf.probs = {Rational(30, 100), Rational(5, 100), Rational(5, 100),
               Rational(10, 100), Rational(10, 100), Rational(5, 100),
               Rational(5, 100),  Rational(30, 100)};
  pmf.validate();
  auto dp = dp_optimal_quantizer(pmf, 2);
  auto lm = lloyd_max(pmf, 2);
  CHECK(mse(lm, pmf) == mse(dp, pmf));
  // optimum splits symmetrically at the middle
  CHECK(dp.levels.size() == 2);
  CHECK(mse(dp, pmf) < Rational(3));
}

TEST_CASE("quantize respects thresholds with ties to the lower cell",
          "[quantization]") {
  auto pmf = uniform_pmf(kQ);
  auto cb = lloyd_max(pmf, 16);
  for (int x = 0; x < kQ; ++x) {
    auto [idx, level] = cb.quantize(x);
    if (idx > 0) CHECK(Rational(x) > cb.thresholds[idx - 1]);
    if (idx + 1 < cb.levels.size()) CHECK(Rational(x) <= cb.thresholds[idx]);
    CHECK(level == cb.levels[idx]);
  }
}

TEST_CASE("quantizer mse never exceeds compression mse", "[quantization]") {
  auto pmf = uniform_pmf(kQ);
  for (int d : {4, 5, 10, 11}) {
    auto cb = lloyd_max(pmf, size_t{1} << d);
    CHECK(mse(cb, pmf) <= mse_compress(d));
  }
}

TEST_CASE("codebook serialization round trip", "[quantization]") {
  auto cb = lloyd_max(uniform_pmf(kQ), 32);
  std::stringstream ss;
  save_codebook(cb, ss);
  auto cb2 = load_codebook(ss);
  CHECK(cb2.levels == cb.levels);
  CHECK(cb2.thresholds == cb.thresholds);
  CHECK(cb2.source_pmf_id == cb.source_pmf_id);
}

TEST_CASE("int quantizer agrees with the codebook", "[quantization]") {
  IntQuantizer q(lloyd_max(uniform_pmf(kQ), 1u << 5));
  for (int x = 0; x < kQ; ++x) {
    auto [idx, level] = q.codebook().quantize(x);
    CHECK(q.index_of(static_cast<uint16_t>(x)) == idx);
    CHECK(Rational(q.twice_level(q.index_of(static_cast<uint16_t>(x))), 2) ==
          level);
  }
}

}  // namespace
