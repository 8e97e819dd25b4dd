#include "qmf/config.hpp"
#include "qmf/csv.hpp"
#include "qmf/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <stdexcept>

using namespace qmf;

TEST_CASE("Kolmogorov survival function") {
  // Reference values from scipy.special.kolmogorov.
  CHECK(kolmogorov_sf(0.3) == doctest::Approx(0.9999906941986655).epsilon(1e-10));
  CHECK(kolmogorov_sf(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-10));
  CHECK(kolmogorov_sf(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-10));
  CHECK(kolmogorov_sf(1.36) == doctest::Approx(0.049485876755377876).epsilon(1e-10));
  CHECK(kolmogorov_sf(2.0) == doctest::Approx(0.0006709252557796953).epsilon(1e-10));
  CHECK(kolmogorov_sf(0.0) == 1.0);
}

TEST_CASE("two-sample KS") {
  const std::vector<double> a = {0.1, 0.4, 0.35, 0.8, 1.2, -0.3, 0.05, 0.9};
  const std::vector<double> b = {0.2, 0.25, 1.5, 1.7, 0.6, 1.1, 2.2};
  const KsResult r = ks_two_sample(a, b);
  CHECK(r.statistic == doctest::Approx(0.44642857142857145).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.3379478585819567).epsilon(1e-9));
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  CHECK_THROWS(ks_two_sample({}, b));
}

TEST_CASE("binomial helpers") {
  CHECK(binomial_sigma(0.25, 100) == doctest::Approx(std::sqrt(0.25 * 0.75 / 100)));
  CHECK(binomial_z(30, 100, 0.25) == doctest::Approx(0.05 / std::sqrt(0.25 * 0.75 / 100)));
}

TEST_CASE("config parsing") {
  const Config c = Config::parse(
      "# comment\n"
      "kind = ber-sweep\n"
      "snr_db = 1, 2.5 3\n"
      "; another comment\n"
      "[links]\n"
      "sr_offset_db = 10   # trailing\n"
      "flag = true\n");
  CHECK(c.get("kind") == "ber-sweep");
  CHECK(c.get_list("snr_db") == std::vector<double>{1.0, 2.5, 3.0});
  CHECK(c.get_double("links.sr_offset_db", 0.0) == 10.0);
  CHECK(c.get_bool("links.flag", false));
  CHECK(c.get_int("missing", 7) == 7);
  CHECK_THROWS(c.get("missing"));
  CHECK(c.entries().front().first == "kind");

  try {
    Config::parse("a = 1\nthis line is broken\n");
    FAIL("expected a parse error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find('2') != std::string::npos);
  }
}

TEST_CASE("config hash is order independent") {
  const Config a = Config::parse("x = 1\ny = 2\n");
  const Config b = Config::parse("y = 2\nx = 1\n");
  const Config c = Config::parse("x = 1\ny = 3\n");
  CHECK(a.canonical() == "x=1\ny=2\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("double formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5e-7}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("CSV round trip") {
  CsvTable t;
  t.meta = {{"kind", "ber-sweep"}, {"seed", "3"}};
  t.header = {"a", "b", "c"};
  t.rows = {{"1", "x,y", "say \"hi\""}, {"2", "", "z"}};
  const std::string text = to_csv(t);
  const CsvTable back = parse_csv(text);
  CHECK(back.meta == t.meta);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(back.column("c") == 2);
  CHECK_THROWS(back.column("d"));

  CsvTable empty;
  empty.header = {"a", "b"};
  CHECK(to_csv(empty) == "a,b\n");

  const auto path = (std::filesystem::temp_directory_path() / "qmf_csv_test.csv").string();
  write_csv(t, path);
  CHECK(read_csv(path).rows == t.rows);
  std::remove(path.c_str());
  CHECK_THROWS(read_csv(path));
}
