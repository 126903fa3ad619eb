#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "xva/closeout.hpp"
#include "xva/driver.hpp"
#include "xva/model.hpp"

using namespace xva;

namespace {

// Seller generator written out term by term from the wealth dynamics.
double f_seller_oracle(double v, double z, double zi, double zc, double vh, const MarketConfig& c) {
  const double coll = c.alpha * vh;
  const double y = v + zi + zc - coll;
  const double rf = y > 0 ? c.r_f_plus : (y < 0 ? c.r_f_minus : 0.0);
  const double stock = z / c.sigma;  // dollar stock position
  const double rr = stock > 0 ? c.r_r_minus : (stock < 0 ? c.r_r_plus : 0.0);
  const double rc = coll > 0 ? c.r_c_plus : (coll < 0 ? c.r_c_minus : 0.0);
  return -(rf * y + (c.r_D - rr) * stock - c.r_D * (zi + zc) + rc * coll);
}

DriverInputs random_inputs(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng), u(rng), u(rng), u(rng)};
}

double l1(const DriverInputs& a, const DriverInputs& b) {
  return std::abs(a.v - b.v) + std::abs(a.z - b.z) + std::abs(a.z_I - b.z_I) + std::abs(a.z_C - b.z_C);
}

}  // namespace

TEST_CASE("rate functions") {
  const auto cfg = benchmark_config();
  CHECK(rate_fund(-0.02, cfg) == 0.08);
  CHECK(rate_fund(0.5, cfg) == 0.05);
  CHECK(rate_fund(0.0, cfg) == 0.0);
  CHECK(rate_repo(0.0, cfg) == 0.0);
  CHECK(rate_repo(-1.0, cfg) == cfg.r_r_minus);
  CHECK(rate_coll(0.0, cfg) == 0.0);
  CHECK(rate_coll(1.0, cfg) == cfg.r_c_plus);
}

TEST_CASE("seller and buyer generators at a reference point") {
  const auto cfg = benchmark_config();
  const DriverInputs in{0.1, 0.04, -0.01, -0.02, 0.1};
  const double oracle = f_seller_oracle(0.1, 0.04, -0.01, -0.02, 0.1, cfg);
  CHECK(oracle == doctest::Approx(0.0084).epsilon(1e-12));
  CHECK(f_seller(in, cfg) == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(f_buyer(in, cfg) == doctest::Approx(-f_seller_oracle(-0.1, -0.04, 0.01, 0.02, -0.1, cfg)).epsilon(1e-14));
  CHECK(f_buyer(in, cfg) == doctest::Approx(0.0078).epsilon(1e-12));
  CHECK(driver(Side::seller, in, cfg) == f_seller(in, cfg));
  CHECK(driver(Side::buyer, in, cfg) == f_buyer(in, cfg));
}

TEST_CASE("generators vanish at the origin") {
  const auto cfg = benchmark_config();
  CHECK(f_seller(DriverInputs{}, cfg) == 0.0);
  CHECK(f_buyer(DriverInputs{}, cfg) == 0.0);
}

TEST_CASE("equal rates and no collateral collapse to -r v") {
  MarketConfig cfg = benchmark_config();
  const double r = 0.03;
  for (const auto& name : {"r_D", "r_f_plus", "r_f_minus", "r_r_plus", "r_r_minus", "r_c_plus", "r_c_minus"})
    cfg.set(name, r);
  cfg.alpha = 0.0;
  for (double v : {-0.7, 0.0, 0.25}) CHECK(f_seller(DriverInputs{v, 0, 0, 0, 0.4}, cfg) == doctest::Approx(-r * v));
}

TEST_CASE("generator matches the term-by-term oracle on random inputs") {
  std::mt19937_64 rng(11);
  const auto cfg = benchmark_config();
  for (int i = 0; i < 2000; ++i) {
    const auto in = random_inputs(rng);
    CHECK(f_seller(in, cfg) == doctest::Approx(f_seller_oracle(in.v, in.z, in.z_I, in.z_C, in.v_hat, cfg)).epsilon(1e-13));
  }
}

TEST_CASE("buyer is the exact reflection of the seller") {
  std::mt19937_64 rng(3);
  const auto cfg = benchmark_config();
  for (int i = 0; i < 5000; ++i) {
    const auto in = random_inputs(rng);
    const DriverInputs neg{-in.v, -in.z, -in.z_I, -in.z_C, -in.v_hat};
    CHECK(f_buyer(in, cfg) + f_seller(neg, cfg) == 0.0);
  }
}

TEST_CASE("symmetric rates make buyer and seller coincide") {
  std::mt19937_64 rng(5);
  auto cfg = benchmark_config();
  cfg.r_f_minus = cfg.r_f_plus;
  cfg.r_r_minus = cfg.r_r_plus = 0.03;
  cfg.r_c_minus = cfg.r_c_plus;
  for (int i = 0; i < 2000; ++i) {
    const auto in = random_inputs(rng);
    CHECK(f_buyer(in, cfg) == doctest::Approx(f_seller(in, cfg)).epsilon(1e-14));
  }
}

TEST_CASE("Lipschitz bound") {
  std::mt19937_64 rng(13);
  const auto cfg = benchmark_config();
  const double bound = driver_lipschitz_bound(cfg);
  CHECK(bound == doctest::Approx(0.08 + 0.04 / 0.2 + 0.04 / 0.2 + 0.02));
  for (int i = 0; i < 20000; ++i) {
    auto a = random_inputs(rng);
    auto b = random_inputs(rng);
    b.v_hat = a.v_hat;
    for (Side side : {Side::seller, Side::buyer}) {
      const double df = std::abs(driver(side, a, cfg) - driver(side, b, cfg));
      CHECK(df <= bound * l1(a, b) * (1 + 1e-12) + 1e-15);
    }
  }
}

TEST_CASE("jump part of the generator is nondecreasing in each default integrand") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> step(0.0, 0.5);
  const auto cfg = benchmark_config();
  auto f1 = [&](Side side, const DriverInputs& in) {
    return driver(side, in, cfg) + cfg.h_I_Q * in.z_I + cfg.h_C_Q * in.z_C;
  };
  for (int i = 0; i < 5000; ++i) {
    const auto in = random_inputs(rng);
    for (Side side : {Side::seller, Side::buyer}) {
      auto up_I = in;
      up_I.z_I += step(rng);
      auto up_C = in;
      up_C.z_C += step(rng);
      CHECK(f1(side, up_I) >= f1(side, in) - 1e-15);
      CHECK(f1(side, up_C) >= f1(side, in) - 1e-15);
    }
  }
}

TEST_CASE("closeout values") {
  CHECK(closeout_I(0.0843, 0.9, 0.5) == doctest::Approx(0.080085).epsilon(1e-12));
  CHECK(closeout_C(0.0843, 0.9, 0.5) == 0.0843);
  CHECK(closeout_C(-1.0, 0.9, 0.5) == doctest::Approx(-0.95).epsilon(1e-12));
  CHECK(collateral(0.0843, 0.9) == doctest::Approx(0.07587).epsilon(1e-12));
  CHECK(collateral(0.3, 0.0) == 0.0);
  CHECK(collateral(0.3, 1.0) == 0.3);
}

TEST_CASE("closeout ordering and collapse") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.0, 1.0), v(-2.0, 2.0);
  for (int i = 0; i < 10000; ++i) {
    const double vh = v(rng), a = u(rng), li = u(rng), lc = u(rng);
    CHECK(closeout_I(vh, a, li) <= vh);
    CHECK(vh <= closeout_C(vh, a, lc));
    CHECK(closeout_I(vh, 1.0, li) == vh);
    CHECK(closeout_C(vh, 1.0, lc) == vh);
    CHECK(closeout_I(vh, a, 0.0) == vh);
    CHECK(closeout_C(vh, a, 0.0) == vh);
  }
}

TEST_CASE("side names") {
  CHECK(to_string(Side::seller) == "seller");
  CHECK(parse_side("buyer") == Side::buyer);
  CHECK_THROWS_AS(parse_side("dealer"), std::invalid_argument);
}
