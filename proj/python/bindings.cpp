// Python bindings for the restoration core: degradation, inference, and
// metrics on numpy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "pgvba/metrics.hpp"
#include "pgvba/simulate.hpp"
#include "pgvba/vba.hpp"

namespace py = pybind11;
using namespace pgvba;

namespace {

Image image_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  Image img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + img.size(), img.data.begin());
  return img;
}

py::array_t<double> array_from_image(const Image& img) {
  py::array_t<double> out({img.height, img.width});
  std::copy(img.data.begin(), img.data.end(), out.mutable_data());
  return out;
}

NoiseModel make_model(const std::string& family, double sigma2, double eps) {
  NoiseModel m;
  m.family = parse_family(family);
  m.sigma = std::sqrt(sigma2);
  m.eps_floor = eps;
  return m;
}

py::dict restore(const py::array_t<double, py::array::c_style | py::array::forcecast>& y_arr,
                 const std::string& kernel, double sigma2, const std::string& family,
                 const std::string& prior, double kappa, double eps, double alpha, double beta,
                 const std::string& cov, int ns, double stop_tol, int max_iters,
                 std::uint64_t seed, py::object ground_truth, py::object nltv_reference) {
  const Image y = image_from_array(y_arr);
  const auto blur = make_blur(parse_kernel(kernel), y.width, y.height);

  std::unique_ptr<AnalysisOperator> prior_op;
  if (prior == "tv") prior_op = make_tv(y.width, y.height);
  else if (prior == "hessian") prior_op = make_hessian(y.width, y.height);
  else if (prior == "sltv") prior_op = make_sltv(y.width, y.height);
  else if (prior == "nltv") {
    if (nltv_reference.is_none())
      throw std::invalid_argument("nltv prior needs nltv_reference");
    const Image ref = image_from_array(nltv_reference.cast<py::array_t<double>>());
    prior_op = make_nltv(y.width, y.height, ref);
  } else {
    throw std::invalid_argument("unknown prior '" + prior + "'");
  }

  VbaConfig config;
  config.kappa = kappa;
  config.hyper_alpha = alpha;
  config.hyper_beta = beta;
  config.cov_mode = cov == "mc" ? CovMode::kMonteCarlo : CovMode::kDiagonal;
  config.num_samples = ns;
  config.stop_tol = stop_tol;
  config.max_outer_iters = max_iters;
  config.master_seed = seed;

  Image gt;
  std::span<const double> gt_span;
  if (!ground_truth.is_none()) {
    gt = image_from_array(ground_truth.cast<py::array_t<double>>());
    gt_span = gt.span();
  }

  VbaResult result;
  {
    py::gil_scoped_release release;
    result = run(y.span(), *blur, *prior_op, make_model(family, sigma2, eps), config, gt_span);
  }

  Image restored(y.width, y.height);
  restored.data = result.mean;

  py::array_t<double> trace({static_cast<py::ssize_t>(result.trace.rows.size()),
                             static_cast<py::ssize_t>(5)});
  auto t = trace.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < t.shape(0); ++i) {
    const auto& row = result.trace.rows[static_cast<std::size_t>(i)];
    t(i, 0) = row.iter;
    t(i, 1) = row.seconds;
    t(i, 2) = row.gamma;
    t(i, 3) = row.rel_change;
    t(i, 4) = row.snr ? *row.snr : std::numeric_limits<double>::quiet_NaN();
  }

  py::dict out;
  out["x"] = array_from_image(restored);
  out["gamma"] = result.gamma.mean();
  out["iterations"] = result.iterations;
  out["converged"] = result.converged;
  out["trace"] = trace;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Variational Bayesian restoration under mixed Poisson-Gaussian noise";

  m.def("synthetic_phantom",
        [](int width, int height, double x_plus) {
          return array_from_image(synthetic_phantom(width, height, x_plus));
        },
        py::arg("width"), py::arg("height"), py::arg("x_plus") = 1.0);

  m.def("degrade",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           const std::string& kernel, double sigma2, double x_plus, std::uint64_t seed) {
          DegradeSpec spec;
          spec.kernel = parse_kernel(kernel);
          spec.sigma2 = sigma2;
          spec.x_plus = x_plus;
          spec.seed = seed;
          return array_from_image(degrade(image_from_array(x), spec));
        },
        py::arg("x"), py::arg("kernel"), py::arg("sigma2"), py::arg("x_plus") = 1.0,
        py::arg("seed") = 0);

  m.def("restore", &restore, py::arg("y"), py::arg("kernel"), py::arg("sigma2"),
        py::arg("family") = "spoiss", py::arg("prior") = "tv", py::arg("kappa") = 0.5,
        py::arg("eps") = 1e-3, py::arg("alpha") = 1e-3, py::arg("beta") = 1e-3,
        py::arg("cov") = "diag", py::arg("ns") = 160, py::arg("stop_tol") = 1e-6,
        py::arg("max_iters") = 500, py::arg("seed") = 0,
        py::arg("ground_truth") = py::none(), py::arg("nltv_reference") = py::none());

  m.def("snr",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& ref,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& est) {
          return snr_db(image_from_array(ref), image_from_array(est));
        },
        py::arg("reference"), py::arg("estimate"));

  m.def("ssim",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& ref,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& est,
           double dynamic_range) {
          return ssim(image_from_array(ref), image_from_array(est), dynamic_range);
        },
        py::arg("reference"), py::arg("estimate"), py::arg("dynamic_range"));

  m.def("nltv_weights",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& ref,
           int patch_radius, double bandwidth) {
          const Image img = image_from_array(ref);
          NltvParams params;
          params.patch_radius = patch_radius;
          params.bandwidth = bandwidth;
          auto w = nltv_weights(img, params);
          py::array_t<double> out(
              {static_cast<py::ssize_t>(img.size()), static_cast<py::ssize_t>(49)});
          std::copy(w.begin(), w.end(), out.mutable_data());
          return out;
        },
        py::arg("reference"), py::arg("patch_radius") = 2, py::arg("bandwidth") = 0.0);

  // Scalar likelihood machinery, mostly for cross-checking from python.
  m.def("phi",
        [](double v, double y, const std::string& family, double sigma2, double eps) {
          return phi(v, y, make_model(family, sigma2, eps));
        },
        py::arg("v"), py::arg("y"), py::arg("family"), py::arg("sigma2"), py::arg("eps") = 1e-3);
  m.def("dphi",
        [](double v, double y, const std::string& family, double sigma2, double eps) {
          return dphi(v, y, make_model(family, sigma2, eps));
        },
        py::arg("v"), py::arg("y"), py::arg("family"), py::arg("sigma2"), py::arg("eps") = 1e-3);
  m.def("exact_pg_nll_pixel", &exact_pg_nll_pixel, py::arg("intensity"), py::arg("y"),
        py::arg("sigma"));
}
