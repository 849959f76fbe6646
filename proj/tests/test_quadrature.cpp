#include <catch_amalgamated.hpp>

#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "armorsim/jet_model.hpp"
#include "armorsim/quadrature.hpp"

using namespace armorsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double oracle(const std::function<double(double)>& f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, a, b);
}

}  // namespace

TEST_CASE("adaptive Gauss-Kronrod agrees with an independent tanh-sinh rule") {
  const std::vector<std::pair<const char*, std::function<double(double)>>> cases{
      {"polynomial", [](double x) { return 3 * x * x - x + 2; }},
      {"oscillatory", [](double x) { return std::sin(20 * x) * std::exp(-x); }},
      {"log endpoint", [](double x) { return std::log1p(1.0 / x); }},
      {"inverse sqrt", [](double x) { return 1.0 / std::sqrt(x); }},
      {"plastic work integrand",
       [](double x) {
         const double l = std::log1p(1.0 / x);
         return std::sqrt(l * l + 3 * std::pow(std::log(1.7), 2));
       }},
  };
  for (const auto& [name, f] : cases) {
    INFO(name);
    const auto r = quad::integrate(f, 0.0, 1.0);
    CHECK_THAT(r.value, WithinAbs(oracle(f, 0.0, 1.0), 1e-9));
    CHECK(r.error <= 1e-9);
  }
}

TEST_CASE("quadrature on a general interval") {
  const auto r = quad::integrate([](double x) { return std::cos(x); }, -1.0, 2.5);
  CHECK_THAT(r.value, WithinRel(std::sin(2.5) + std::sin(1.0), 1e-12));
  CHECK(quad::integrate([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
}

TEST_CASE("integral of ln(1 + 1/x) over [0, 1] is 2 ln 2") {
  const auto r = quad::integrate([](double x) { return std::log1p(1.0 / x); }, 0.0, 1.0);
  CHECK_THAT(r.value, WithinRel(2 * std::log(2.0), 1e-8));
}

TEST_CASE("plastic-work ratio against a direct integral in x") {
  // Oracle: Boost tanh-sinh on the untransformed integrand.
  for (double lambda : {0.05, 0.3, 1.0, 2.5, 40.0})
    for (double lambda_z : {1.0, 1.2, 3.0}) {
      INFO("lambda=" << lambda << " lambda_z=" << lambda_z);
      auto f = [&](double x) {
        const double l = std::log1p(1.0 / x);
        const double a = std::log(lambda_z);
        return std::sqrt(l * l + 3 * a * a);
      };
      const double direct =
          boost::math::quadrature::tanh_sinh<double>().integrate(f, 0.0, lambda) /
          (lambda * std::sqrt(3.0));
      CHECK_THAT(jet::plastic_work_ratio(lambda, lambda_z), WithinRel(direct, 1e-9));
    }
  CHECK_THAT(jet::plastic_work_ratio(1.0, 1.0), WithinRel(2 * std::log(2.0) / std::sqrt(3.0), 1e-12));
}

TEST_CASE("plastic-work ratio rejects nonpositive stretch") {
  CHECK_THROWS_AS(jet::plastic_work_ratio(0.0, 1.0), ModelBreakdown);
  CHECK_THROWS_AS(jet::plastic_work_ratio(1.0, -1.0), ModelBreakdown);
}
