#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "dashapp/experiment.hpp"
#include "dashapp/verification.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

dashapp::TheoryInputs inputs_from_json(const std::string& text) {
  const json j = json::parse(text);
  dashapp::TheoryInputs in;
  if (j.contains("omega")) in.omega = j["omega"];
  if (j.contains("n")) in.n = j["n"];
  if (j.contains("p_a")) in.p_a = j["p_a"];
  if (j.contains("p_aa")) in.p_aa = j["p_aa"];
  if (j.contains("L")) in.L = j["L"];
  if (j.contains("L_hat")) in.L_hat = j["L_hat"];
  if (j.contains("L_max")) in.L_max = j["L_max"];
  if (j.contains("L_sigma")) in.L_sigma = j["L_sigma"];
  if (j.contains("sigma_sq")) in.sigma_sq = j["sigma_sq"];
  if (j.contains("m")) in.m = j["m"];
  if (j.contains("B")) in.B = j["B"];
  if (j.contains("epsilon")) in.epsilon = j["epsilon"];
  if (j.contains("mu")) in.mu = static_cast<double>(j["mu"]);
  if (j.contains("d")) in.d = j["d"];
  if (j.contains("zeta_C")) in.zeta_C = j["zeta_C"];
  if (j.contains("delta0")) in.delta0 = j["delta0"];
  return in;
}

json params_to_json(const dashapp::TheoryParams& tp) {
  json out;
  out["a"] = tp.a;
  out["b"] = tp.b;
  out["gamma_max"] = tp.gamma_max;
  if (tp.p_page) out["p_page"] = *tp.p_page;
  if (tp.p_mega) out["p_mega"] = *tp.p_mega;
  if (tp.B_init) out["B_init"] = *tp.B_init;
  if (tp.B_prime) out["B_prime"] = *tp.B_prime;
  if (tp.T_bound) out["T_bound"] = *tp.T_bound;
  if (tp.rate_factor) out["rate_factor"] = *tp.rate_factor;
  out["notes"] = tp.notes;
  return out;
}

std::string theory_params_json(const std::string& variant,
                               const std::string& inputs_json) {
  const dashapp::Variant v = dashapp::variant_from_name(variant);
  const dashapp::TheoryInputs in = inputs_from_json(inputs_json);
  dashapp::TheoryParams tp;
  switch (v) {
    case dashapp::Variant::Gradient:
      tp = dashapp::params_gradient(in);
      break;
    case dashapp::Variant::Page:
      tp = dashapp::params_page(in);
      break;
    case dashapp::Variant::FiniteMvr:
      tp = dashapp::params_finite_mvr(in);
      break;
    case dashapp::Variant::Mvr:
      tp = dashapp::params_mvr(in);
      break;
    case dashapp::Variant::SyncMvr:
      tp = dashapp::params_sync_mvr(in);
      break;
  }
  return params_to_json(tp).dump();
}

std::string pl_params_json(const std::string& variant,
                           const std::string& inputs_json) {
  const dashapp::TheoryParams tp = dashapp::params_pl(
      inputs_from_json(inputs_json), dashapp::variant_from_name(variant));
  return params_to_json(tp).dump();
}

std::string complexity_json(const std::string& variant,
                            const std::string& inputs_json) {
  const auto cx = dashapp::complexity_randk(
      inputs_from_json(inputs_json), dashapp::variant_from_name(variant));
  json out;
  out["comm"] = cx.comm_complexity;
  out["oracle"] = cx.oracle_complexity;
  out["K"] = cx.K;
  out["B_cap"] = cx.B_cap;
  return out.dump();
}

std::string run_config_json(const std::string& config_text,
                            const std::string& output_dir) {
  std::istringstream in(config_text);
  const dashapp::ExperimentConfig c = dashapp::parse_experiment_config(in);
  const auto res = dashapp::run_experiment(c, output_dir);
  std::ifstream summary(res.summary_path);
  std::ostringstream buf;
  buf << summary.rdbuf();
  return buf.str();
}

std::string verify_json(std::uint64_t seed) {
  json rows = json::array();
  for (const auto& r : dashapp::verify_standard_battery(seed)) {
    rows.push_back(
        {{"name", r.name}, {"abs_diff", r.abs_diff}, {"pass", r.pass}});
  }
  return rows.dump();
}

std::string synthetic_libsvm(int n, int m, int d, double density,
                             double flip_prob, std::uint64_t seed) {
  dashapp::SyntheticSpec spec;
  spec.n = n;
  spec.m = m;
  spec.d = d;
  spec.density = density;
  spec.flip_prob = flip_prob;
  return dashapp::serialize_libsvm(dashapp::make_synthetic_dataset(spec, seed));
}

std::vector<double> rand_k_compress(const std::vector<double>& x, int K,
                                    std::uint64_t seed) {
  const Eigen::VectorXd v =
      Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
  auto comp = dashapp::Compressor::rand_k(static_cast<int>(x.size()), K);
  dashapp::Rng rng(seed);
  const Eigen::VectorXd out = comp.compress(v, rng).to_dense();
  return {out.data(), out.data() + out.size()};
}

}  // namespace

PYBIND11_MODULE(_dashapp, m) {
  m.doc() =
      "core bindings: theory parameter calculators, experiment runner, "
      "verification battery, dataset helpers";
  m.attr("__version__") = "0.1.0";
  m.def("theory_params_json", &theory_params_json, py::arg("variant"),
        py::arg("inputs_json"));
  m.def("pl_params_json", &pl_params_json, py::arg("variant"),
        py::arg("inputs_json"));
  m.def("complexity_json", &complexity_json, py::arg("variant"),
        py::arg("inputs_json"));
  m.def("run_config_json", &run_config_json, py::arg("config_text"),
        py::arg("output_dir"));
  m.def("verify_json", &verify_json, py::arg("seed") = 1);
  m.def("canonicalize_libsvm", &dashapp::canonicalize_libsvm,
        py::arg("text"), py::arg("d_hint") = 0);
  m.def("synthetic_libsvm", &synthetic_libsvm, py::arg("n"), py::arg("m"),
        py::arg("d"), py::arg("density") = 0.4, py::arg("flip_prob") = 0.1,
        py::arg("seed") = 1);
  m.def("rand_k_compress", &rand_k_compress, py::arg("x"), py::arg("K"),
        py::arg("seed"));
  m.def("rand_k_omega", [](int d, int K) {
    dashapp::Rng rng(0);
    return dashapp::Compressor::rand_k(d, K).omega();
  });
}
