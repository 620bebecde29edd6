// Command-line front end: forward degradation, variational restoration,
// quality metrics, and NLTV weight precomputation.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "pgvba/image_io.hpp"
#include "pgvba/metrics.hpp"
#include "pgvba/simulate.hpp"
#include "pgvba/vba.hpp"

namespace {

using namespace pgvba;

std::string meta_path_for(const std::string& image_path) { return image_path + ".meta"; }

void cmd_degrade(const std::string& input, const std::string& output,
                 const std::string& kernel_spec, double sigma2, double x_plus,
                 std::uint64_t seed) {
  DegradeSpec spec;
  spec.kernel = parse_kernel(kernel_spec);
  spec.sigma2 = sigma2;
  spec.x_plus = x_plus;
  spec.seed = seed;

  const Image x = read_image(input);
  const Image y = degrade(x, spec);
  write_image(output, y);

  Metadata meta;
  meta["kernel"] = kernel_spec;
  meta["sigma2"] = std::to_string(sigma2);
  meta["x_plus"] = std::to_string(x_plus);
  meta["seed"] = std::to_string(seed);
  meta["width"] = std::to_string(y.width);
  meta["height"] = std::to_string(y.height);
  write_metadata(meta_path_for(output), meta);
}

struct RestoreOptions {
  std::string input, output, meta, family = "spoiss", prior = "tv", cov = "diag";
  std::string trace_path, ground_truth, nltv_weights, nltv_ref;
  double sigma2 = -1.0;  // <0: take from metadata
  double kappa = 0.5, eps = 1e-3, alpha = 1e-3, beta = 1e-3, stop_tol = 1e-6;
  int ns = 160, max_iters = 500;
  std::uint64_t seed = 0;
};

void cmd_restore(const RestoreOptions& opt) {
  const Image y = read_image(opt.input);

  std::string kernel_spec;
  double sigma2 = opt.sigma2;
  const std::string meta_path = opt.meta.empty() ? meta_path_for(opt.input) : opt.meta;
  {
    const Metadata meta = read_metadata(meta_path);
    if (auto it = meta.find("kernel"); it != meta.end()) kernel_spec = it->second;
    if (sigma2 < 0.0) {
      auto it = meta.find("sigma2");
      if (it == meta.end())
        throw std::runtime_error("restore: sigma2 missing from metadata; pass --sigma2");
      sigma2 = std::stod(it->second);
    }
  }
  if (kernel_spec.empty()) throw std::runtime_error("restore: kernel missing from metadata");

  const auto blur = make_blur(parse_kernel(kernel_spec), y.width, y.height);

  std::unique_ptr<AnalysisOperator> prior;
  if (opt.prior == "tv") {
    prior = make_tv(y.width, y.height);
  } else if (opt.prior == "hessian") {
    prior = make_hessian(y.width, y.height);
  } else if (opt.prior == "sltv") {
    prior = make_sltv(y.width, y.height);
  } else if (opt.prior == "nltv") {
    if (!opt.nltv_weights.empty()) {
      WeightFile wf = read_weights(opt.nltv_weights);
      if (wf.width != y.width || wf.height != y.height || wf.directions != 49)
        throw std::runtime_error("restore: weight tensor shape mismatch");
      prior = make_nltv_from_weights(y.width, y.height, std::move(wf.weights));
    } else if (!opt.nltv_ref.empty()) {
      const Image ref = read_image(opt.nltv_ref);
      prior = make_nltv(y.width, y.height, ref);
    } else {
      throw std::runtime_error("restore: nltv prior needs --nltv-weights or --nltv-ref");
    }
  } else {
    throw std::runtime_error("restore: unknown prior '" + opt.prior + "'");
  }

  NoiseModel noise;
  noise.family = parse_family(opt.family);
  noise.sigma = std::sqrt(sigma2);
  noise.eps_floor = opt.eps;

  VbaConfig config;
  config.kappa = opt.kappa;
  config.hyper_alpha = opt.alpha;
  config.hyper_beta = opt.beta;
  config.cov_mode = opt.cov == "mc" ? CovMode::kMonteCarlo : CovMode::kDiagonal;
  config.num_samples = opt.ns;
  config.stop_tol = opt.stop_tol;
  config.max_outer_iters = opt.max_iters;
  config.master_seed = opt.seed;

  Image gt;
  std::span<const double> gt_span;
  if (!opt.ground_truth.empty()) {
    gt = read_image(opt.ground_truth);
    if (!gt.same_shape(y)) throw std::runtime_error("restore: ground truth shape mismatch");
    gt_span = gt.span();
  }

  const VbaResult result = run(y.span(), *blur, *prior, noise, config, gt_span);

  Image restored(y.width, y.height);
  restored.data = result.mean;
  write_image(opt.output, restored);

  if (!opt.trace_path.empty()) {
    std::ofstream trace(opt.trace_path);
    if (!trace) throw std::runtime_error("restore: cannot open trace file");
    result.trace.write_csv(trace);
    if (!trace) throw std::runtime_error("restore: trace write failed");
  }

  std::printf("gamma=%.10g\n", result.gamma.mean());
  std::printf("iterations=%d\n", result.iterations);
  std::printf("converged=%d\n", result.converged ? 1 : 0);
  if (!gt_span.empty()) std::printf("snr=%.6g\n", snr_db(gt, restored));
}

void cmd_metrics(const std::string& reference, const std::string& estimate, double x_plus) {
  const Image ref = read_image(reference);
  const Image est = read_image(estimate);
  std::printf("snr=%g\n", snr_db(ref, est));
  std::printf("ssim=%g\n", ssim(ref, est, x_plus));
}

void cmd_nltv_weights(const std::string& reference, const std::string& output, int patch_radius,
                      double bandwidth) {
  const Image ref = read_image(reference);
  NltvParams params;
  params.patch_radius = patch_radius;
  params.bandwidth = bandwidth;
  WeightFile wf;
  wf.width = ref.width;
  wf.height = ref.height;
  wf.directions = 49;
  wf.weights = nltv_weights(ref, params);
  write_weights(output, wf);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational Bayesian image restoration under mixed Poisson-Gaussian noise"};
  app.require_subcommand(1);

  // degrade
  std::string d_input, d_output, d_kernel = "uniform:5";
  double d_sigma2 = 0.0, d_xplus = 1.0;
  std::uint64_t d_seed = 0;
  auto* deg = app.add_subcommand("degrade", "Blur an image and add Poisson-Gaussian noise");
  deg->add_option("input", d_input, "clean input image (.pgm or .pfm)")->required();
  deg->add_option("output", d_output, "degraded output image")->required();
  deg->add_option("--kernel", d_kernel, "blur kernel, e.g. uniform:5 or gaussian:25:1.6");
  deg->add_option("--sigma2", d_sigma2, "Gaussian noise variance");
  deg->add_option("--xplus", d_xplus, "intensity scale recorded in the metadata");
  deg->add_option("--seed", d_seed, "noise seed");
  deg->callback([&] { cmd_degrade(d_input, d_output, d_kernel, d_sigma2, d_xplus, d_seed); });

  // restore
  RestoreOptions r;
  auto* res = app.add_subcommand("restore", "Restore a degraded image");
  res->add_option("input", r.input, "degraded image")->required();
  res->add_option("output", r.output, "restored output image")->required();
  res->add_option("--meta", r.meta, "metadata sidecar (default: <input>.meta)");
  res->add_option("--family", r.family, "likelihood family")
      ->check(CLI::IsMember({"gaussian", "cauchy", "anscombe", "gast", "spoiss", "wl2"}));
  res->add_option("--prior", r.prior, "analysis prior")
      ->check(CLI::IsMember({"tv", "hessian", "sltv", "nltv"}));
  res->add_option("--sigma2", r.sigma2, "noise variance (overrides metadata)");
  res->add_option("--kappa", r.kappa, "prior exponent in (0,1]");
  res->add_option("--eps", r.eps, "curvature floor");
  res->add_option("--alpha", r.alpha, "Gamma hyperprior shape");
  res->add_option("--beta", r.beta, "Gamma hyperprior rate");
  res->add_option("--cov", r.cov, "covariance approximation")->check(CLI::IsMember({"diag", "mc"}));
  res->add_option("--ns", r.ns, "Monte-Carlo sample count");
  res->add_option("--stop-tol", r.stop_tol, "relative-change stopping tolerance");
  res->add_option("--max-iters", r.max_iters, "outer iteration cap");
  res->add_option("--seed", r.seed, "sampler master seed");
  res->add_option("--trace", r.trace_path, "write per-iteration CSV trace here");
  res->add_option("--ground-truth", r.ground_truth, "reference image for the SNR trace column");
  res->add_option("--nltv-weights", r.nltv_weights, "precomputed NLTV weight tensor");
  res->add_option("--nltv-ref", r.nltv_ref, "reference image to compute NLTV weights from");
  res->callback([&] { cmd_restore(r); });

  // metrics
  std::string m_ref, m_est;
  double m_xplus = 1.0;
  auto* met = app.add_subcommand("metrics", "Print SNR and SSIM of an estimate");
  met->add_option("reference", m_ref)->required();
  met->add_option("estimate", m_est)->required();
  met->add_option("--xplus", m_xplus, "dynamic range for SSIM");
  met->callback([&] { cmd_metrics(m_ref, m_est, m_xplus); });

  // nltv-weights
  std::string n_ref, n_out;
  int n_patch = 2;
  double n_bw = 0.0;
  auto* nlw = app.add_subcommand("nltv-weights", "Precompute NLTV patch-similarity weights");
  nlw->add_option("reference", n_ref)->required();
  nlw->add_option("output", n_out)->required();
  nlw->add_option("--patch-radius", n_patch, "patch radius (2 = 5x5 patches)");
  nlw->add_option("--bandwidth", n_bw, "similarity bandwidth (0 = 10% of dynamic range)");
  nlw->callback([&] { cmd_nltv_weights(n_ref, n_out, n_patch, n_bw); });

  // phantom
  std::string p_out;
  int p_w = 64, p_h = 64;
  double p_xplus = 1.0;
  auto* pha = app.add_subcommand("phantom", "Write a synthetic piecewise-constant test image");
  pha->add_option("output", p_out)->required();
  pha->add_option("--width", p_w);
  pha->add_option("--height", p_h);
  pha->add_option("--xplus", p_xplus, "intensity scale");
  pha->callback([&] { write_image(p_out, synthetic_phantom(p_w, p_h, p_xplus)); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
