#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include "stochtaylor/coeffs.hpp"
#include "stochtaylor/errors.hpp"

namespace stochtaylor {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

namespace {

std::string rational_text(const mpq_class& v) { return v.get_num().get_str() + "/" + v.get_den().get_str(); }

mpq_class parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) throw IoError("malformed rational '" + text + "'");
  mpq_class v;
  try {
    v = mpq_class(mpz_class(text.substr(0, slash)), mpz_class(text.substr(slash + 1)));
  } catch (const std::invalid_argument&) {
    throw IoError("malformed rational '" + text + "'");
  }
  if (v.get_den() == 0) throw IoError("zero denominator in table file");
  v.canonicalize();
  return v;
}

std::string header_value(const std::string& token, const std::string& key) {
  if (token.rfind(key + "=", 0) != 0) throw IoError("table header lacks '" + key + "='");
  return token.substr(key.size() + 1);
}

}  // namespace

void save_table(const CoefficientTable& table, const std::string& path) {
  std::ostringstream body;
  body << "FLTABLE v1 family=" << table.family().str() << " qmax=" << table.q_max() << "\n";
  for (size_t off = 0; off < table.size(); ++off) {
    const auto j = table.index_of(off);
    for (int r = table.k() - 1; r >= 0; --r) body << j[r] << (r > 0 ? "," : "");
    body << " " << rational_text(table.barred_at(off)) << "\n";
  }
  body << "NORMSQ " << rational_text(table.norm_sq_unit()) << "\n";
  const std::string prior = body.str();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << prior << "SHA256 " << sha256_hex(prior) << "\n";
  if (!out) throw IoError("write to '" + path + "' failed");
}

CoefficientTable load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();

  const auto first_nl = data.find('\n');
  if (first_nl == std::string::npos) throw ChecksumError("table file '" + path + "' is truncated");
  std::istringstream header(data.substr(0, first_nl));
  std::string magic, version, fam_tok, q_tok;
  header >> magic >> version >> fam_tok >> q_tok;
  if (magic != "FLTABLE") throw IoError("'" + path + "' is not a coefficient table");
  if (version != "v1") throw VersionError("unsupported table version '" + version + "' (reader handles v1)");

  const auto sha_pos = data.rfind("SHA256 ");
  if (sha_pos == std::string::npos || (sha_pos > 0 && data[sha_pos - 1] != '\n'))
    throw ChecksumError("table file '" + path + "' has no checksum line");
  std::string stored = data.substr(sha_pos + 7);
  while (!stored.empty() && (stored.back() == '\n' || stored.back() == '\r')) stored.pop_back();
  const std::string prior = data.substr(0, sha_pos);
  if (sha256_hex(prior) != stored) throw ChecksumError("checksum mismatch in '" + path + "'");

  const WeightFamily family = WeightFamily::parse(header_value(fam_tok, "family"));
  int q_max = 0;
  try {
    q_max = std::stoi(header_value(q_tok, "qmax"));
  } catch (const std::logic_error&) {
    throw IoError("bad qmax in '" + path + "'");
  }
  if (q_max < 0 || q_max > kMaxTableQ) throw IoError("qmax out of range in '" + path + "'");

  size_t total = 1;
  for (int r = 0; r < family.k(); ++r) total *= static_cast<size_t>(q_max + 1);
  std::vector<mpq_class> entries(total);
  std::vector<char> seen(total, 0);
  std::istringstream lines(prior.substr(first_nl + 1));
  std::string line;
  mpq_class norm;
  bool have_norm = false;
  std::vector<int> j(family.k());
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    if (sp == std::string::npos) throw IoError("malformed table line '" + line + "'");
    const std::string idx = line.substr(0, sp);
    const std::string val = line.substr(sp + 1);
    if (idx == "NORMSQ") {
      norm = parse_rational(val);
      have_norm = true;
      continue;
    }
    std::istringstream parts(idx);
    std::string part;
    int r = family.k() - 1;
    while (std::getline(parts, part, ',')) {
      if (r < 0) throw IoError("too many indices in '" + line + "'");
      try {
        j[r--] = std::stoi(part);
      } catch (const std::logic_error&) {
        throw IoError("bad index in '" + line + "'");
      }
    }
    if (r != -1) throw IoError("too few indices in '" + line + "'");
    size_t off = 0;
    for (int s = family.k() - 1; s >= 0; --s) {
      if (j[s] < 0 || j[s] > q_max) throw IoError("index out of range in '" + line + "'");
      off = off * static_cast<size_t>(q_max + 1) + static_cast<size_t>(j[s]);
    }
    entries[off] = parse_rational(val);
    seen[off] = 1;
  }
  if (!have_norm) throw IoError("table file '" + path + "' has no NORMSQ line");
  for (char s : seen)
    if (!s) throw IoError("table file '" + path + "' is missing entries");
  return CoefficientTable(family, q_max, std::move(entries), norm);
}

}  // namespace stochtaylor
