#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "armorsim/csv.hpp"

using namespace armorsim;

TEST_CASE("numbers round-trip exactly through text") {
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  for (int i = 0; i < 20000; ++i) {
    const double v = std::ldexp(mant(gen), expo(gen));
    REQUIRE(csv::parse_number(csv::number(v)) == v);
  }
  for (double v : {0.0, -0.0, 1.0 / 3.0, 5e-324, std::numeric_limits<double>::max(), 567.0, 2.47e7})
    CHECK(csv::parse_number(csv::number(v)) == v);
}

TEST_CASE("parse_number rejects trailing garbage") {
  CHECK_THROWS_AS(csv::parse_number("12abc"), InvalidInput);
  CHECK_THROWS_AS(csv::parse_number(""), InvalidInput);
  CHECK(csv::parse_number(" 1.5 ") == 1.5);
}

TEST_CASE("split handles quoted fields") {
  const auto f = csv::split("1,\"a, b\",,\"say \"\"hi\"\"\"");
  REQUIRE(f.size() == 4);
  CHECK(f[0] == "1");
  CHECK(f[1] == "a, b");
  CHECK(f[2].empty());
  CHECK(f[3] == "say \"hi\"");
}

TEST_CASE("tables read with header and rows") {
  std::istringstream in("a,b\n1,2\n\n3,4\n");
  const auto t = csv::read(in);
  REQUIRE(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][1] == "4");
}
