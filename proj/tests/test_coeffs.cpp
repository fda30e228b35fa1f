#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stochtaylor/coeffs.hpp"
#include "stochtaylor/errors.hpp"

using namespace stochtaylor;

namespace {

WeightFamily fam(const char* s) { return WeightFamily::parse(s); }

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("stochtaylor_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("family set") {
  CHECK(scheme_families().size() == 20);
  CHECK(order_families(2.0).size() == 7);
  CHECK(order_families(2.5).size() == 12);
  CHECK(order_families(3.0).size() == 20);
  CHECK(fam("010").str() == "010");
  CHECK(fam("010").delta_power() == 5);
  CHECK(fam("000000").delta_power() == 6);
  CHECK_THROWS_AS(require_supported(fam("012")), ArgumentError);
  CHECK_THROWS_AS(WeightFamily::parse("0a"), ArgumentError);
}

TEST_CASE("barred coefficients at small indices") {
  const int j000[] = {0, 0, 0};
  CHECK(barred_coefficient(fam("000"), j000) == mpq_class(4, 3));
  // (j_1, j_2) ordering: (0, 1) has P_1 at the outer level.
  const int outer1[] = {0, 1};
  const int inner1[] = {1, 0};
  CHECK(barred_coefficient(fam("00"), outer1) == mpq_class(2, 3));
  CHECK(barred_coefficient(fam("00"), inner1) == mpq_class(-2, 3));
  const int j00[] = {0, 0};
  CHECK(barred_coefficient(fam("00"), j00) == 2);
  const int j0[] = {0};
  CHECK(barred_coefficient(fam("0"), j0) == 2);
  CHECK_THROWS_AS(barred_coefficient(fam("3"), j0), ArgumentError);
}

TEST_CASE("scaling rule") {
  const int outer1[] = {0, 1};
  CHECK(scale_coefficient(fam("00"), outer1, 0.3) == doctest::Approx(0.3 / (2.0 * std::sqrt(3.0))).epsilon(1e-15));
  const int j000[] = {0, 0, 0};
  CHECK(scale_coefficient(fam("000"), j000, 0.25) == doctest::Approx(std::pow(0.25, 1.5) / 6.0).epsilon(1e-15));
  const int j00[] = {0, 0};
  CHECK(scale_coefficient(fam("00"), j00, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(scale_coefficient(fam("00"), j00, 0.0), ArgumentError);
  CHECK_THROWS_AS(scale_coefficient(fam("00"), j00, -1.0), ArgumentError);

  // One-level families: I_l = C_0 zeta_0 + C_1 zeta_1 + ... must match the closed displays.
  const double d = 0.5;
  const int a0[] = {0}, a1[] = {1}, a2[] = {2};
  CHECK(scale_coefficient(fam("1"), a0, d) == doctest::Approx(-std::pow(d, 1.5) / 2.0).epsilon(1e-15));
  CHECK(scale_coefficient(fam("1"), a1, d) == doctest::Approx(-std::pow(d, 1.5) / (2.0 * std::sqrt(3.0))).epsilon(1e-15));
  CHECK(scale_coefficient(fam("2"), a0, d) == doctest::Approx(std::pow(d, 2.5) / 3.0).epsilon(1e-15));
  CHECK(scale_coefficient(fam("2"), a1, d) == doctest::Approx(std::pow(d, 2.5) / 3.0 * std::sqrt(3.0) / 2.0).epsilon(1e-15));
  CHECK(scale_coefficient(fam("2"), a2, d) == doctest::Approx(std::pow(d, 2.5) / 3.0 / (2.0 * std::sqrt(5.0))).epsilon(1e-14));
}

TEST_CASE("squared norms") {
  CHECK(norm_squared(fam("0")) == 1);
  CHECK(norm_squared(fam("00")) == mpq_class(1, 2));
  CHECK(norm_squared(fam("000")) == mpq_class(1, 6));
  CHECK(norm_squared(fam("0000")) == mpq_class(1, 24));
  CHECK(norm_squared(fam("11")) == mpq_class(1, 18));
  CHECK(norm_squared(fam("1")) == mpq_class(1, 3));
  CHECK(norm_squared(fam("2")) == mpq_class(1, 5));
  CHECK(norm_squared(fam("000000")) == mpq_class(1, 720));
  // Hand integration of the squared kernel over the simplex.
  CHECK(norm_squared(fam("01")) == mpq_class(1, 4));
  CHECK(norm_squared(fam("10")) == mpq_class(1, 12));
  CHECK(norm_squared(fam("00000")) == mpq_class(1, 120));
  CHECK(norm_squared(fam("02")) == mpq_class(1, 6));
  CHECK(norm_squared(fam("20")) == mpq_class(1, 30));
  CHECK(norm_squared(fam("001")) == mpq_class(1, 10));
  CHECK(norm_squared(fam("010")) == mpq_class(1, 20));
  CHECK(norm_squared(fam("100")) == mpq_class(1, 60));
  CHECK(norm_squared(fam("0001")) == mpq_class(1, 36));
  CHECK(norm_squared(fam("1000")) == mpq_class(1, 360));
}

TEST_CASE("integration by parts identity for (00)") {
  for (int a = 0; a <= 12; ++a) {
    for (int b = 0; b <= 12; ++b) {
      const int ab[] = {a, b}, ba[] = {b, a};
      const mpq_class lhs = barred_coefficient(fam("00"), ab) + barred_coefficient(fam("00"), ba);
      CHECK(lhs == (a == 0 && b == 0 ? 4 : 0));
    }
  }
}

TEST_CASE("table construction and Parseval residuals") {
  auto t0 = build_table(fam("00"), 0);
  REQUIRE(t0.size() == 1);
  CHECK(t0.barred_at(0) == 2);

  auto t = build_table(fam("000"), 6);
  CHECK(t.size() == 343);
  CHECK(t.norm_sq_unit() == mpq_class(1, 6));
  CHECK(t.residual_unit(6).get_d() == doctest::Approx(0.019553857606871314).epsilon(1e-14));

  auto t4 = build_table(fam("0000"), 2);
  CHECK(t4.size() == 81);
  CHECK(t4.residual_unit(2).get_d() == doctest::Approx(0.022913992272758504).epsilon(1e-14));

  for (const auto& f : scheme_families()) {
    auto tab = build_table(f, std::min(4, table_q_cap(f)));
    const auto& sums = tab.parseval_partial_sums();
    for (size_t q = 1; q < sums.size(); ++q) CHECK(sums[q] >= sums[q - 1]);
    CHECK(sums.back() <= tab.norm_sq_unit());
    CHECK(tab.residual_unit(0) >= tab.residual_unit(tab.q_max()));
  }
}

TEST_CASE("table caps") {
  CHECK(table_q_cap(fam("000")) == 64);
  CHECK(table_q_cap(fam("0000")) == 24);
  CHECK(table_q_cap(fam("00000")) == 12);
  CHECK(table_q_cap(fam("000000")) == 8);
  CHECK_THROWS_AS(build_table(fam("000000"), 9), ArgumentError);
  CHECK_THROWS_AS(build_table(fam("00000"), 13), ArgumentError);
}

TEST_CASE("table file round trip and corruption") {
  const auto dir = scratch_dir("coeffs_io");
  const auto path = dir / "t.fltable";
  auto t = build_table(fam("000"), 6);
  save_table(t, path.string());
  const std::string text = slurp(path);
  CHECK(text.rfind("FLTABLE v1 family=000 qmax=6\n", 0) == 0);
  CHECK(text.find("\nNORMSQ 1/6\n") != std::string::npos);
  CHECK(text.find("\nSHA256 ") != std::string::npos);
  CHECK(text.find("\n0,0,0 4/3\n") != std::string::npos);

  auto back = load_table(path.string());
  CHECK(back == t);
  CHECK(back.family() == fam("000"));
  CHECK(back.q_max() == 6);

  spit(dir / "trunc.fltable", text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(load_table((dir / "trunc.fltable").string()), ChecksumError);

  std::string tampered = text;
  tampered.replace(tampered.find("0,0,0 4/3"), 9, "0,0,0 5/3");
  spit(dir / "tampered.fltable", tampered);
  CHECK_THROWS_AS(load_table((dir / "tampered.fltable").string()), ChecksumError);

  // A well-formed version-2 file with a valid digest must still be refused.
  std::string body = text.substr(0, text.find("SHA256 "));
  body.replace(0, 10, "FLTABLE v2");
  spit(dir / "v2.fltable", body + "SHA256 " + sha256_hex(body) + "\n");
  CHECK_THROWS_AS(load_table((dir / "v2.fltable").string()), VersionError);

  CHECK_THROWS_AS(load_table((dir / "missing.fltable").string()), IoError);
  CHECK_THROWS_AS(save_table(t, (dir / "no" / "such" / "dir" / "x").string()), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("table cache honours the table directory") {
  const auto dir = scratch_dir("coeffs_cache");
  ::setenv("STOCHTAYLOR_TABLE_DIR", dir.c_str(), 1);
  clear_table_cache();
  auto t = get_table(fam("001"), 3);
  CHECK(t->q_max() >= 3);
  CHECK(std::filesystem::exists(dir / table_file_name(fam("001"), t->q_max())));
  clear_table_cache();
  auto again = get_table(fam("001"), 3);
  CHECK(*again == *t);
  ::unsetenv("STOCHTAYLOR_TABLE_DIR");
  clear_table_cache();
  std::filesystem::remove_all(dir);
}

TEST_CASE("banded pair coefficients agree with the generic engine") {
  for (const char* name : {"00", "01", "10", "02", "20", "11"}) {
    for (int a = 0; a <= 8; ++a) {
      for (int b = 0; b <= 8; ++b) {
        const int j[] = {a, b};
        CHECK(barred_coefficient_pair(fam(name), a, b) == barred_coefficient(fam(name), j));
      }
    }
  }
}
