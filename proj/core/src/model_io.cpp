#include "srml/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "srml/errors.hpp"

namespace srml::harness {

using nlohmann::json;

std::string to_string(LossKind k) { return k == LossKind::Squared ? "squared" : "logistic"; }
std::string to_string(RegKind k) { return k == RegKind::L1 ? "l1" : "l2"; }
std::string to_string(RhoPolicy p) { return p == RhoPolicy::Fixed ? "fixed" : "auto"; }

LossKind loss_from_string(const std::string& s) {
  if (s == "squared") return LossKind::Squared;
  if (s == "logistic") return LossKind::Logistic;
  throw ParseError("unknown loss kind '" + s + "'");
}

RegKind reg_from_string(const std::string& s) {
  if (s == "l1") return RegKind::L1;
  if (s == "l2") return RegKind::L2;
  throw ParseError("unknown regularizer kind '" + s + "'");
}

RhoPolicy rho_policy_from_string(const std::string& s) {
  if (s == "fixed") return RhoPolicy::Fixed;
  if (s == "auto") return RhoPolicy::FromLipschitz;
  throw ParseError("unknown rho policy '" + s + "'");
}

namespace {

json config_to_json(const SolverConfig& c) {
  json j;
  j["lambda"] = c.lambda;
  j["c"] = c.c;
  j["rho"] = c.rho;
  j["reg"] = to_string(c.reg_kind);
  j["primal_tol"] = c.primal_tol;
  j["dual_tol"] = c.dual_tol;
  j["max_outer_iters"] = c.max_outer_iters;
  j["max_inner_iters"] = c.max_inner_iters;
  if (c.inner_step_size) j["inner_step_size"] = *c.inner_step_size;
  j["rho_policy"] = to_string(c.rho_policy);
  j["rho_margin"] = c.rho_margin;
  j["closed_form_w"] = c.closed_form_w;
  return j;
}

SolverConfig config_from_json(const json& j) {
  SolverConfig c;
  c.lambda = j.at("lambda").get<double>();
  c.c = j.at("c").get<double>();
  c.rho = j.at("rho").get<double>();
  c.reg_kind = reg_from_string(j.at("reg").get<std::string>());
  c.primal_tol = j.at("primal_tol").get<double>();
  c.dual_tol = j.at("dual_tol").get<double>();
  c.max_outer_iters = j.at("max_outer_iters").get<int>();
  c.max_inner_iters = j.at("max_inner_iters").get<int>();
  if (j.contains("inner_step_size")) c.inner_step_size = j.at("inner_step_size").get<double>();
  c.rho_policy = rho_policy_from_string(j.at("rho_policy").get<std::string>());
  c.rho_margin = j.at("rho_margin").get<double>();
  c.closed_form_w = j.at("closed_form_w").get<bool>();
  return c;
}

}  // namespace

void save_model(const std::string& path, const ModelFile& model) {
  json j;
  j["format"] = "srml-model";
  j["version"] = model.version;
  j["d"] = model.weights.rows();
  j["T"] = model.weights.cols();
  j["loss"] = to_string(model.loss);
  j["config"] = config_to_json(model.config);
  j["task_ids"] = model.task_ids;
  json cols = json::array();
  for (Eigen::Index t = 0; t < model.weights.cols(); ++t) {
    json col = json::array();
    for (Eigen::Index i = 0; i < model.weights.rows(); ++i) col.push_back(model.weights(i, t));
    cols.push_back(std::move(col));
  }
  j["weights"] = std::move(cols);

  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("short write to '" + path + "'");
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("'" + path + "': " + e.what());
  }
  try {
    if (j.value("format", "") != "srml-model") {
      throw IoError("'" + path + "' is not a model file");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw VersionMismatch("model format version " + std::to_string(version) +
                            ", expected " + std::to_string(kModelFormatVersion));
    }
    ModelFile m;
    m.version = version;
    m.loss = loss_from_string(j.at("loss").get<std::string>());
    m.config = config_from_json(j.at("config"));
    m.task_ids = j.at("task_ids").get<std::vector<std::string>>();
    const auto d = j.at("d").get<Eigen::Index>();
    const auto T = j.at("T").get<Eigen::Index>();
    m.weights.resize(d, T);
    const json& cols = j.at("weights");
    if (static_cast<Eigen::Index>(cols.size()) != T) throw IoError("weight column count mismatch");
    for (Eigen::Index t = 0; t < T; ++t) {
      const json& col = cols[static_cast<std::size_t>(t)];
      if (static_cast<Eigen::Index>(col.size()) != d) throw IoError("weight row count mismatch");
      for (Eigen::Index i = 0; i < d; ++i) {
        m.weights(i, t) = col[static_cast<std::size_t>(i)].get<double>();
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw IoError("'" + path + "': " + e.what());
  }
}

}  // namespace srml::harness
