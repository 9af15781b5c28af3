// Command-line driver: key generation, encryption, decryption, codebook
// management, and reproduction of the analysis tables and simulations.
//
// Exit codes: 0 success, 2 usage error, 3 cryptographic failure
// (decode), 4 I/O error.

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sck/analysis.hpp"
#include "sck/pke.hpp"
#include "sck/tables.hpp"

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CryptoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path);
  return data;
}

void write_file(const std::string& path, const std::vector<uint8_t>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create " + path);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed: " + path);
}

sck::Seed parse_seed(const std::string& hex) {
  if (hex.size() != 64)
    throw CLI::ValidationError("--seed must be 64 hex characters");
  sck::Seed seed;
  for (size_t i = 0; i < 32; ++i) {
    uint8_t b = 0;
    auto res = std::from_chars(hex.data() + 2 * i, hex.data() + 2 * i + 2, b, 16);
    if (res.ec != std::errc{} || res.ptr != hex.data() + 2 * i + 2)
      throw CLI::ValidationError("--seed contains non-hex characters");
    seed[i] = b;
  }
  return seed;
}

// Randomized verbs refuse to run without an explicit entropy choice so
// that every invocation is reproducible by default.
struct SeedOpts {
  std::string hex;
  bool system_entropy = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", hex, "32-byte seed as 64 hex characters");
    cmd->add_flag("--system-entropy", system_entropy,
                  "draw the seed from the OS entropy source");
  }
  sck::Seed resolve() const {
    if (!hex.empty()) return parse_seed(hex);
    if (!system_entropy)
      throw CLI::ValidationError(
          "randomized command: pass --seed HEX or --system-entropy");
    std::random_device rd;
    sck::Seed seed;
    for (auto& b : seed) b = static_cast<uint8_t>(rd());
    return seed;
  }
};

// Codebooks are cached on disk keyed by (q, L) in the library's file
// format; --no-cache regenerates and rewrites.
struct CacheOpts {
  std::string dir = ".sck-cache";
  bool no_cache = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--cache-dir", dir, "codebook cache directory")
        ->capture_default_str();
    cmd->add_flag("--no-cache", no_cache, "regenerate codebooks from scratch");
  }

  sck::QuantCodebook load_or_build(int q, size_t levels) const {
    namespace fs = std::filesystem;
    fs::path path = fs::path(dir) / ("codebook-q" + std::to_string(q) + "-L" +
                                     std::to_string(levels) + ".sckq");
    if (!no_cache && fs::exists(path)) {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw IoError("cannot open " + path.string());
      return sck::load_codebook(in);
    }
    auto cb = sck::lloyd_max(sck::uniform_pmf(q), levels);
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot create " + path.string());
    sck::save_codebook(cb, out);
    if (!out) throw IoError("write failed: " + path.string());
    return cb;
  }

  sck::IntQuantizer quantizer(int d) const {
    return sck::IntQuantizer(load_or_build(sck::kQ, size_t{1} << d));
  }
};

struct TableOpts {
  std::string format = "md";
  std::string out;

  void attach(CLI::App* cmd) {
    cmd->add_option("--format", format, "output format: md or csv")
        ->check(CLI::IsMember({"md", "csv"}))
        ->capture_default_str();
    cmd->add_option("--out", out, "write to file instead of stdout");
  }
  void emit(const std::vector<sck::Table>& tables) const {
    std::ostringstream os;
    for (const auto& t : tables)
      format == "csv" ? sck::render_csv(t, os) : sck::render_markdown(t, os);
    if (out.empty()) {
      std::cout << os.str();
    } else {
      std::ofstream f(out);
      if (!f) throw IoError("cannot create " + out);
      f << os.str();
      if (!f) throw IoError("write failed: " + out);
    }
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Kyber CPA-PKE variants with quantized and coded ciphertexts"};
  app.require_subcommand(1);

  std::string ps_name = "KYBER1024";
  auto add_paramset = [&](CLI::App* cmd) {
    cmd->add_option("--paramset", ps_name, "parameter set name")
        ->capture_default_str();
  };

  // keygen
  auto* keygen = app.add_subcommand("keygen", "generate a keypair");
  SeedOpts kg_seed;
  std::string pk_path = "pk.bin", sk_path = "sk.bin";
  add_paramset(keygen);
  kg_seed.attach(keygen);
  keygen->add_option("--pk", pk_path, "public key output")->capture_default_str();
  keygen->add_option("--sk", sk_path, "secret key output")->capture_default_str();

  // encrypt
  auto* encrypt = app.add_subcommand("encrypt", "encrypt a message file");
  SeedOpts en_seed;
  CacheOpts en_cache;
  std::string en_pk, en_msg, en_ct = "ct.bin";
  add_paramset(encrypt);
  en_seed.attach(encrypt);
  en_cache.attach(encrypt);
  encrypt->add_option("--pk", en_pk, "public key file")->required();
  encrypt->add_option("--msg", en_msg, "plaintext file")->required();
  encrypt->add_option("--ct", en_ct, "ciphertext output")->capture_default_str();

  // decrypt
  auto* decrypt = app.add_subcommand("decrypt", "decrypt a ciphertext file");
  CacheOpts de_cache;
  std::string de_sk, de_ct, de_out = "msg.bin";
  add_paramset(decrypt);
  de_cache.attach(decrypt);
  decrypt->add_option("--sk", de_sk, "secret key file")->required();
  decrypt->add_option("--ct", de_ct, "ciphertext file")->required();
  decrypt->add_option("--out", de_out, "plaintext output")->capture_default_str();

  // codebook
  auto* codebook = app.add_subcommand("codebook", "generate a Lloyd-Max codebook");
  CacheOpts cb_cache;
  int cb_q = sck::kQ;
  size_t cb_levels = 0;
  std::string cb_out;
  codebook->add_option("--q", cb_q, "source alphabet size (uniform Z_q)")
      ->capture_default_str();
  codebook->add_option("--levels", cb_levels, "number of quantization levels")
      ->required();
  codebook->add_option("--out", cb_out, "also write the codebook here");
  cb_cache.attach(codebook);

  // tables
  auto* mse = app.add_subcommand("mse-table", "quantizer MSE comparison");
  TableOpts mse_fmt;
  mse_fmt.attach(mse);

  auto* pmf = app.add_subcommand("pmf-table", "quantization error PMFs");
  TableOpts pmf_fmt;
  std::vector<int> pmf_d = {11, 10};
  pmf->add_option("--d", pmf_d, "bit widths to tabulate")->capture_default_str();
  pmf_fmt.attach(pmf);

  auto* dfr = app.add_subcommand("dfr-table", "decryption failure rates");
  TableOpts dfr_fmt;
  unsigned dfr_prec = 256;
  dfr->add_option("--prec", dfr_prec, "working precision in bits")
      ->capture_default_str();
  dfr_fmt.attach(dfr);

  auto* bound = app.add_subcommand("bound-table", "capacity bound per PAM order");
  TableOpts bound_fmt;
  std::vector<int> bound_p = {2, 4, 8, 16};
  std::string bound_ps = "SC-KYBER1024-B-BCH-638";
  bound->add_option("--paramset", bound_ps, "parameter set name")
      ->capture_default_str();
  bound->add_option("--p", bound_p, "PAM orders")->capture_default_str();
  bound_fmt.attach(bound);

  auto* cer_cmd = app.add_subcommand("cer-table", "expansion rates and coded DFR");
  TableOpts cer_fmt;
  cer_fmt.attach(cer_cmd);

  // simulations
  auto* clt = app.add_subcommand("clt-check", "noise distribution vs normal");
  SeedOpts clt_seed;
  size_t clt_samples = 1000000;
  int clt_jobs = 1;
  add_paramset(clt);
  clt_seed.attach(clt);
  clt->add_option("--samples", clt_samples, "noise samples")->capture_default_str();
  clt->add_option("--jobs", clt_jobs, "worker count (results independent of it)")
      ->capture_default_str();

  auto* edfr = app.add_subcommand("empirical-dfr", "Monte-Carlo failure rate");
  SeedOpts ed_seed;
  size_t ed_trials = 1000000;
  int ed_jobs = 1;
  add_paramset(edfr);
  ed_seed.attach(edfr);
  edfr->add_option("--trials", ed_trials, "encrypt/decrypt trials")
      ->capture_default_str();
  edfr->add_option("--jobs", ed_jobs, "worker count (results independent of it)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*keygen) {
    const auto& ps = sck::param_set(ps_name);
    auto kp = sck::keygen(ps, kg_seed.resolve());
    write_file(pk_path, sck::serialize_pk(kp.pk, ps));
    write_file(sk_path, sck::serialize_sk(kp.sk, ps));
    std::cout << "wrote " << pk_path << " and " << sk_path << "\n";
  } else if (*encrypt) {
    const auto& ps = sck::param_set(ps_name);
    auto pk = sck::deserialize_pk(read_file(en_pk), ps);
    auto ek = sck::expand_key(pk, ps);
    auto m = sck::bits_from_bytes(read_file(en_msg), ps.message_bits());
    sck::Seed coins = en_seed.resolve();
    sck::Ciphertext ct;
    switch (ps.variant) {
      case sck::Variant::kOriginal:
        ct = sck::encrypt_original(ek, m, coins, ps);
        break;
      case sck::Variant::kLloydMax:
        ct = sck::encrypt_lm(ek, m, coins, ps, en_cache.quantizer(ps.d_u),
                             en_cache.quantizer(ps.d_v));
        break;
      case sck::Variant::kSemiCompressed:
        ct = sck::encrypt_sc(ek, m, coins, ps, sck::make_bch(*ps.code),
                             en_cache.quantizer(ps.d_u));
        break;
    }
    write_file(en_ct, sck::serialize_ct(ct, ps));
    std::cout << "wrote " << en_ct << "\n";
  } else if (*decrypt) {
    const auto& ps = sck::param_set(ps_name);
    auto sk = sck::deserialize_sk(read_file(de_sk), ps);
    auto ct = sck::deserialize_ct(read_file(de_ct), ps);
    sck::BitVec m;
    switch (ps.variant) {
      case sck::Variant::kOriginal:
        m = sck::decrypt_original(sk, ct, ps);
        break;
      case sck::Variant::kLloydMax:
        m = sck::decrypt_lm(sk, ct, ps, de_cache.quantizer(ps.d_u),
                            de_cache.quantizer(ps.d_v));
        break;
      case sck::Variant::kSemiCompressed: {
        auto dec = sck::decrypt_sc(sk, ct, ps, sck::make_bch(*ps.code),
                                   de_cache.quantizer(ps.d_u));
        if (!dec) throw CryptoError("BCH decoding failed");
        m = *dec;
        break;
      }
    }
    write_file(de_out, sck::bytes_from_bits(m));
    std::cout << "wrote " << de_out << "\n";
  } else if (*codebook) {
    auto cb = cb_cache.load_or_build(cb_q, cb_levels);
    if (!cb_out.empty()) {
      std::ofstream out(cb_out, std::ios::binary);
      if (!out) throw IoError("cannot create " + cb_out);
      sck::save_codebook(cb, out);
    }
    std::cout << "codebook q=" << cb_q << " L=" << cb.size()
              << " mse=" << sck::mse(cb, sck::uniform_pmf(cb_q)).convert_to<double>()
              << "\n";
  } else if (*mse) {
    mse_fmt.emit({sck::mse_table()});
  } else if (*pmf) {
    std::vector<sck::Table> tables;
    for (int d : pmf_d)
      for (auto& t : sck::pmf_tables(d)) tables.push_back(std::move(t));
    pmf_fmt.emit(tables);
  } else if (*dfr) {
    dfr_fmt.emit({sck::dfr_table(dfr_prec)});
  } else if (*bound) {
    bound_fmt.emit({sck::bound_table(sck::param_set(bound_ps), bound_p)});
  } else if (*cer_cmd) {
    cer_fmt.emit({sck::cer_table()});
  } else if (*clt) {
    const auto& ps = sck::param_set(ps_name);
    (void)clt_jobs;
    auto nm = sck::noise_model(ps);
    double s = std::sqrt(nm.sigma_g2.convert_to<double>());
    auto y = sck::simulate_noise(ps, clt_samples, clt_seed.resolve());
    double mean = 0, var = 0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    for (double v : y) var += (v - mean) * (v - mean);
    var /= static_cast<double>(y.size());
    for (auto& v : y) v /= s;
    double ks = sck::ks_statistic_normal(y);
    std::cout << "samples=" << y.size() << " mean=" << mean
              << " variance=" << var << " predicted=" << s * s << " ks=" << ks
              << "\n";
  } else if (*edfr) {
    const auto& ps = sck::param_set(ps_name);
    auto res = sck::empirical_dfr(ps, ed_trials, ed_seed.resolve(), ed_jobs);
    std::cout << "trials=" << res.trials << " failures=" << res.failures
              << " rate=" << res.rate << " wilson99=[" << res.wilson_lo << ","
              << res.wilson_hi << "]\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const CryptoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
