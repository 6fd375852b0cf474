#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "procdrift/stationarity.hpp"

using namespace procdrift;

namespace {

struct AdfReference {
  const char* name;
  std::vector<double> data;
  double statistic;
  double p_value;
  int lags;
  int nobs;
};

// statsmodels adfuller(x, maxlag=floor((n-1)^(1/3)), regression="c", autolag="AIC")
const std::vector<AdfReference> kReference = {
    {"white noise",
     {-0.2112, -0.5177, 0.1496, -1.7899, 0.2845, -0.3217, -0.7261, 0.0985, -1.9515, -0.1584,
      -0.7313, 0.4097, 0.4424, -0.9279, -0.9332, -1.4700, -0.7877, 0.3194, 0.8573, 0.2288,
      0.0348, -0.8674, 0.1958, -0.8157, 0.2396, -0.2026, 0.8560, 0.2025, 1.3688, -0.4082,
      0.7559, 0.2252, 1.6966, -1.9621, 0.8743, -1.0237, -0.8686, -0.0184, -1.5106, -1.1946},
     -2.8000776799, 0.0582626729, 1, 38},
    {"random walk",
     {-0.5055, -0.8280, -2.7317, -3.6053, -3.7512, -3.8832, -4.5455, -4.5496, -5.0629, -3.8894,
      -4.6986, -4.6395, -5.1291, -4.2745, -5.2461, -4.3695, -5.5648, -6.9318, -7.4802, -7.3881,
      -8.9091, -9.4133, -9.4173, -9.4528, -8.5773, -7.7930, -7.4602, -6.5467, -5.6070, -6.7162,
      -4.5309, -4.5798, -5.1858, -4.5856, -5.0742, -4.4471, -5.6485, -4.9231, -6.1870, -5.8112,
      -6.0245, -6.5259, -6.3729, -6.9482, -7.7201, -7.3252, -5.3940, -6.3918, -5.2366, -4.1550},
     -1.9425271430, 0.3123268975, 3, 46},
    {"ar1",
     {0.0000, 0.1902, 0.6382, -0.5279, 0.7624, 1.3354, 2.4997, 1.8896, 2.0798, 3.0600,
      2.0390, 0.7232, -1.0170, -0.3238, -1.4615, 0.2208, 0.2797, 0.9788, 0.7500, 1.6883,
      0.5567, 0.3841, 1.6306, -0.2800, 0.0245, 0.9900, -0.4695, -0.9814, -1.8388, 0.0775,
      -0.1429, -0.4009, -1.6531, -2.0556, -0.3068, -0.3736, -0.6250, 0.4169, -0.6557, 1.2199,
      0.3637, -0.2948, -0.4420, -0.2279, 0.5644, -0.3602, -1.0401, -0.5859, -0.0126, 0.8697,
      0.0451, 0.9940, -0.4235, 1.1317, -0.4131, -0.3341, -0.0052, 1.0101, 2.0662, 1.2890},
     -3.9841589861, 0.0014957691, 0, 59},
    {"trend",
     {0.1896, -0.0534, 0.0899, 0.0620, 0.1715, 0.0477, 0.0616, 0.3283, 0.3350, 0.3133,
      0.2155, 0.3735, 0.3876, 0.4948, 0.4233, 0.2671, 0.4355, 0.4830, 0.5935, 0.5181,
      0.4656, 0.7150, 0.6671, 0.5474, 0.6193, 0.8062, 0.6079, 0.8682, 0.8023, 0.8133,
      0.9438, 0.8433, 0.9199, 1.1064, 0.8869, 1.1822},
     0.2428110677, 0.9745630701, 3, 32},
    {"short",
     {0.9977, 0.8676, 0.1914, 0.1802, 0.8561, 0.7985, 0.0538, 0.7819, 0.2828, 0.5577,
      0.3841, 0.4960},
     -4.4931213683, 0.0002023448, 2, 9},
};

std::vector<double> white_noise(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> z;
  std::vector<double> x(n);
  for (auto& v : x) v = z(rng);
  return x;
}

}  // namespace

TEST_CASE("adf reference values") {
  for (const auto& ref : kReference) {
    CAPTURE(ref.name);
    auto r = adf_test(ref.data);
    CHECK(r.lags == ref.lags);
    CHECK(r.nobs == ref.nobs);
    CHECK(r.statistic == doctest::Approx(ref.statistic).epsilon(1e-7));
    CHECK(r.p_value == doctest::Approx(ref.p_value).epsilon(1e-5));
    CHECK_FALSE(r.degenerate);
  }
}

TEST_CASE("mackinnon p-values") {
  CHECK(mackinnon_p_value(-2.8621) == doctest::Approx(0.05).epsilon(0.02));
  CHECK(mackinnon_p_value(-3.4304) == doctest::Approx(0.01).epsilon(0.05));
  CHECK(mackinnon_p_value(-30.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(mackinnon_p_value(5.0) == doctest::Approx(1.0));
  double prev = 0;
  for (double s = -8; s < 3; s += 0.25) {
    const double p = mackinnon_p_value(s);
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("adf verdicts over seeded runs") {
  std::mt19937_64 rng(2024);
  int noise_rejects = 0, walk_keeps = 0;
  for (int rep = 0; rep < 200; ++rep) {
    auto x = white_noise(rng, 60);
    if (adf_test(x).p_value < 0.05) ++noise_rejects;
    auto steps = white_noise(rng, 60);
    std::vector<double> walk(60);
    double acc = 0;
    for (int i = 0; i < 60; ++i) walk[i] = acc += steps[i];
    if (adf_test(walk).p_value > 0.05) ++walk_keeps;
  }
  CHECK(noise_rejects >= 180);
  CHECK(walk_keeps >= 180);
}

TEST_CASE("adf edge cases") {
  std::vector<double> flat(20, 0.3);
  auto r = adf_test(flat);
  CHECK(r.degenerate);
  CHECK(r.p_value == 0.0);
  CHECK_THROWS_AS(adf_test(std::vector<double>(7, 1.0)), std::invalid_argument);
}

TEST_CASE("acf of a cosine") {
  std::vector<double> x(60);
  for (int t = 0; t < 60; ++t) x[t] = std::cos(2 * std::numbers::pi * t / 10);
  auto acf = autocorrelation(x, 25);
  REQUIRE(acf.size() == 26);
  CHECK(acf[0].r == 1.0);
  CHECK(acf[10].significant);
  CHECK(acf[20].significant);
  CHECK(acf[10].r > 0);
  CHECK(acf[20].r > 0);
  CHECK(acf[5].r < 0);
  CHECK(acf[5].significant);
  double mean = 0, denom = 0;
  for (double v : x) mean += v / 60;
  for (double v : x) denom += (v - mean) * (v - mean);
  for (int k = 1; k <= 25; ++k) {
    double num = 0;
    for (int t = 0; t + k < 60; ++t) num += (x[t] - mean) * (x[t + k] - mean);
    CHECK(acf[k].r == doctest::Approx(num / denom).epsilon(1e-9));
  }
  const double band = 1.96 / std::sqrt(60.0);
  for (const auto& l : acf) CHECK(l.significant == (std::abs(l.r) > band));
}

TEST_CASE("acf of noise") {
  std::mt19937_64 rng(77);
  int clean = 0;
  for (int rep = 0; rep < 200; ++rep) {
    auto acf = autocorrelation(white_noise(rng, 100), 1);
    clean += !acf[1].significant;
  }
  CHECK(clean >= 180);
}

TEST_CASE("acf edge cases") {
  std::vector<double> flat(10, 0.5);
  auto acf = autocorrelation(flat, 4);
  CHECK(acf[0].r == 1.0);
  for (int k = 1; k <= 4; ++k) {
    CHECK(acf[k].r == 0.0);
    CHECK_FALSE(acf[k].significant);
  }
  CHECK_THROWS(autocorrelation(flat, 10));
}
