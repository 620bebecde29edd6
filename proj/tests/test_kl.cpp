#include <doctest.h>

#include "dense_vba.hpp"
#include "pgvba/majorize.hpp"
#include "pgvba/vba.hpp"
#include "test_util.hpp"

using namespace pgvba;
using testutil::DenseVba;

TEST_CASE("KL upper bound decreases across every update step") {
  const auto blur = make_blur(BlurKernel::uniform(3), 4, 4);
  const auto tv = make_tv(4, 4);
  Rng rng(7);
  std::vector<double> y(16);
  for (double& v : y) v = 10.0 * rng.uniform();
  DenseVba vba(*blur, *tv, DataTerm::make(y, NoiseModel{NoiseFamily::kGaussian, 1.0, 1e-3}), 0.5,
               1e-3, 1e-3);
  vba.init(y);

  double prev = vba.bound();
  for (int k = 0; k < 20; ++k) {
    if (k > 0) {
      vba.step_qx();
      const double after_qx = vba.bound();
      CHECK(after_qx <= prev + 1e-8 * std::max(1.0, std::abs(prev)));
      prev = after_qx;
    }
    vba.step_w();
    const double after_w = vba.bound();
    CHECK(after_w <= prev + 1e-8 * std::max(1.0, std::abs(prev)));
    // Gaussian family: w is already optimal, so the w step is a no-op.
    CHECK(std::abs(after_w - prev) <= 1e-10 * std::max(1.0, std::abs(prev)));
    prev = after_w;

    vba.step_lambda();
    const double after_lambda = vba.bound();
    CHECK(after_lambda <= prev + 1e-8 * std::max(1.0, std::abs(prev)));
    prev = after_lambda;

    vba.step_b();
    const double after_b = vba.bound();
    CHECK(after_b <= prev + 1e-8 * std::max(1.0, std::abs(prev)));
    prev = after_b;
  }
}

TEST_CASE("bound shifts by M*c when phi is shifted by c") {
  const auto blur = make_blur(BlurKernel::uniform(3), 4, 4);
  const auto tv = make_tv(4, 4);
  Rng rng(3);
  std::vector<double> y(16);
  for (double& v : y) v = 1.0 + 9.0 * rng.uniform();
  DenseVba vba(*blur, *tv, DataTerm::make(y, NoiseModel{NoiseFamily::kSPoiss, 1.0, 1e-3}), 0.5,
               1e-3, 1e-3);
  vba.init(y);
  vba.step_w();

  // Adding a constant c to every phi_i shifts varsigma_i by c/mu_i, hence the
  // bound by sum_i mu_i (c/mu_i) = M*c; differences between states cancel.
  std::vector<double> vs(16), vs_shifted(16);
  const double c = 0.37;
  for (std::size_t i = 0; i < 16; ++i) {
    vs[i] = varsigma_numeric(vba.w()(static_cast<long>(i)), vba.data().y[i], vba.data().model);
    vs_shifted[i] = vs[i] + c / vba.data().mu[i];
  }
  const double b1 = vba.bound(vs);
  const double b1s = vba.bound(vs_shifted);
  CHECK(b1s - b1 == doctest::Approx(16.0 * c).epsilon(1e-9));

  vba.step_lambda();
  vba.step_b();
  const double b2 = vba.bound(vs);
  const double b2s = vba.bound(vs_shifted);
  CHECK(b2s - b2 == doctest::Approx(16.0 * c).epsilon(1e-9));
  CHECK(b1 - b2 == doctest::Approx(b1s - b2s).epsilon(1e-9));
}

TEST_CASE("bound rejects unusable inputs") {
  const auto blur = make_blur(BlurKernel::uniform(3), 4, 4);
  const auto tv = make_tv(4, 4);
  Rng rng(5);
  std::vector<double> y(16);
  for (double& v : y) v = 5.0 * rng.uniform();
  const auto data = DataTerm::make(y, NoiseModel{NoiseFamily::kGaussian, 1.0, 1e-3});

  const std::vector<double> m(16, 0.0);
  const std::vector<double> w(16, 0.0);
  const std::vector<double> lambda(16, 1.0);
  std::vector<double> sigma(16 * 16, 0.0);
  for (int i = 0; i < 16; ++i) sigma[static_cast<std::size_t>(i) * 16 + i] = 1.0;

  const double a = 16.0 / (2.0 * 0.5) + 1e-3;
  CHECK_NOTHROW(kl_upper_bound(*blur, *tv, data, m, sigma, a, 1.0, w, lambda, 0.5, 1e-3, 1e-3));
  // Non-canonical Gamma shape.
  CHECK_THROWS(kl_upper_bound(*blur, *tv, data, m, sigma, a + 1.0, 1.0, w, lambda, 0.5, 1e-3, 1e-3));
  // Indefinite covariance.
  sigma[0] = -1.0;
  CHECK_THROWS(kl_upper_bound(*blur, *tv, data, m, sigma, a, 1.0, w, lambda, 0.5, 1e-3, 1e-3));
}
