#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "contactgas/bessel.hpp"

using namespace contactgas;

namespace {
// reference values from an independent arbitrary-precision evaluation
struct Golden {
  double mu, z, value;
};
const Golden kGolden[] = {
    {0.0, 0.001, 7.02368880056238134},
    {0.0, 0.01, 4.72124473016109497},
    {0.0, 0.1, 2.42706902470201661},
    {0.0, 0.5, 0.924419071227665862},
    {0.0, 1.0, 0.421024438240708333},
    {0.0, 1.9999, 0.113907860256893616},
    {0.0, 2.0, 0.113893872749533436},
    {0.0, 2.0001, 0.113879887080441396},
    {0.0, 3.0, 0.0347395043862792481},
    {0.0, 5.0, 0.00369109833404259427},
    {0.0, 8.0, 0.000146470705222815387},
    {0.0, 12.0, 2.2008253973114914e-6},
    {0.0, 20.0, 5.74123781533652429e-10},
    {0.0, 30.0, 2.13247749646305637e-14},
    {0.0, 50.0, 3.41016774978949551e-23},
    {0.0, 100.0, 4.65662822917590202e-45},
    {1.0, 0.001, 999.996238156085574},
    {1.0, 0.01, 99.9738941182962476},
    {1.0, 0.1, 9.85384478087060613},
    {1.0, 0.5, 1.65644112000330089},
    {1.0, 1.0, 0.601907230197234575},
    {1.0, 2.0, 0.139865881816522427},
    {1.0, 3.0, 0.0401564311281941844},
    {1.0, 5.0, 0.00404461344545216421},
    {1.0, 8.0, 0.000155369211805001134},
    {1.0, 12.0, 2.29075746476718782e-6},
    {1.0, 20.0, 5.88305796955703818e-10},
    {1.0, 30.0, 2.16773200189154942e-14},
    {1.0, 50.0, 3.44410222671755561e-23},
    {1.0, 100.0, 4.67985373563690929e-45},
    {2.0, 1e-6, 1999999999999.5},
    {5.0, 0.37, 54905.0057225663673},
    {5.0, 2.7, 1.74457107752441204},
    {8.0, 1.0, 622552.122958667775},
    {8.0, 29.0, 1.73393688941142934e-13},
    {11.0, 0.05, 7.60966956004104193e+23},
    {17.0, 4.2, 26499101.4217295517},
    {3.5, 1.0, 17.0595346645720987},
    {6.5, 0.8, 53976.6452968411499},
    {9.5, 13.0, 1.97927930981149816e-5},
    {12.5, 2.2, 18720416.0905478643},
    {18.0, 7.7, 2201.29183232594389},
    {15.5, 40.0, 1.57647127094636482e-17},
};
}  // namespace

TEST_CASE("macdonald function against high-precision reference") {
  for (const auto& g : kGolden) {
    const double v = bessel_k(g.mu, g.z).value;
    CHECK(v == doctest::Approx(g.value).epsilon(1e-10));
  }
}

TEST_CASE("half order closed form") {
  const double expect = std::sqrt(M_PI / 2.0) * std::exp(-1.0);
  const KernelEval e = bessel_k(0.5, 1.0);
  CHECK(e.value == doctest::Approx(expect).epsilon(1e-12));
  CHECK(e.regime == BesselRegime::closed_half_integer);
}

TEST_CASE("regimes") {
  CHECK(bessel_k(2.0, 1.0).regime == BesselRegime::series);
  CHECK(bessel_k(2.0, 5.0).regime == BesselRegime::asymptotic);
  CHECK(bessel_k(7.5, 0.3).regime == BesselRegime::closed_half_integer);
}

TEST_CASE("small and large argument windows") {
  // K_mu(z) z^mu -> 2^{mu-1} Gamma(mu) as z -> 0
  const double mu = 2.0, z = 1e-6;
  const double lim = std::pow(2.0, mu - 1.0) * std::tgamma(mu);
  CHECK(bessel_k(mu, z).value * std::pow(z, mu) ==
        doctest::Approx(lim).epsilon(1e-4));
  // K_mu(z) sqrt(2z/pi) e^z -> 1 + (4mu^2-1)/(8z) as z -> inf (log route,
  // since e^z alone overflows at z = 1e3)
  const double zl = 1e3;
  const double asym = 1.0 + (4.0 * mu * mu - 1.0) / (8.0 * zl);
  const double scaled =
      std::exp(bessel_k_log(mu, zl) + 0.5 * std::log(2.0 * zl / M_PI) + zl);
  CHECK(scaled == doctest::Approx(asym).epsilon(1e-4));
}

TEST_CASE("weighted monotonicity") {
  for (double mu : {0.5, 1.0, 3.5, 5.0}) {
    for (double z : {0.1, 0.9, 4.0}) {
      const double f1 = bessel_k(mu, z).value * std::pow(z, mu);
      const double f2 = bessel_k(mu, 2 * z).value * std::pow(2 * z, mu);
      CHECK(f1 >= f2);
    }
  }
}

TEST_CASE("log form consistent with direct values") {
  for (const auto& g : kGolden) {
    CHECK(bessel_k_log(g.mu, g.z) ==
          doctest::Approx(std::log(g.value)).epsilon(1e-10));
  }
  // far beyond double range
  const double lk = bessel_k_log(17.0, 1e-30);
  CHECK(lk > 700.0);
  CHECK(std::isfinite(lk));
}

TEST_CASE("domain and overflow errors") {
  CHECK_THROWS_AS(bessel_k(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(bessel_k(1.0, -2.0), std::domain_error);
  CHECK_THROWS_AS(bessel_k(0.3, 1.0), std::domain_error);  // unsupported order
  CHECK_THROWS_AS(bessel_k(17.0, 1e-30), std::overflow_error);
}
