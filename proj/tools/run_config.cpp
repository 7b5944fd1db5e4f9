#include "run_config.hpp"

#include <functional>
#include <map>
#include <string>

#include "socnav/errors.hpp"

namespace socnav::cli {

namespace {

template <typename T>
void read(const Json& node, const std::string& key, T& dest) {
  try {
    dest = node.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(key, e.what());
  }
}

}  // namespace

Json to_json(const EnvConfig& e) {
  Json j;
  j["arena"] = e.arena;
  j["step_length"] = e.step_length;
  j["success_threshold"] = e.success_threshold;
  j["max_steps"] = e.max_steps;
  j["n_headings"] = e.n_headings;
  j["gamma"] = e.gamma;
  j["sigma"] = e.sigma;
  j["terminal_c"] = e.terminal_c;
  j["alpha"] = e.alpha;
  j["literal_social_sign"] = e.literal_social_sign;
  j["m_agent"] = e.slm.m_agent;
  j["n_agent"] = e.slm.n_agent;
  j["m_person"] = e.slm.m_person;
  j["n_person"] = e.slm.n_person;
  j["a"] = e.slm.a;
  j["b"] = e.slm.b;
  j["c"] = e.slm.c;
  j["k_cap"] = e.slm.k_cap;
  j["enable_hrsc"] = e.slm.enable_hrsc;
  j["enable_hisc"] = e.slm.enable_hisc;
  j["enable_cac"] = e.slm.enable_cac;
  return j;
}

Json to_json(const TrainConfig& t) {
  Json j;
  j["total_env_steps"] = t.total_env_steps;
  j["n_steps"] = t.n_steps;
  j["value_loss_coef"] = t.value_loss_coef;
  j["entropy_coef"] = t.entropy_coef;
  j["grad_clip_norm"] = t.grad_clip_norm;
  j["learning_rate"] = t.learning_rate;
  j["rmsprop_rho"] = t.rmsprop_rho;
  j["rmsprop_epsilon"] = t.rmsprop_epsilon;
  j["hidden"] = t.hidden;
  j["log_interval"] = t.log_interval;
  return j;
}

void apply_json(const Json& node, EnvConfig& e) {
  const std::map<std::string, std::function<void()>> fields = {
      {"arena", [&] { read(node, "arena", e.arena); }},
      {"step_length", [&] { read(node, "step_length", e.step_length); }},
      {"success_threshold", [&] { read(node, "success_threshold", e.success_threshold); }},
      {"max_steps", [&] { read(node, "max_steps", e.max_steps); }},
      {"n_headings", [&] { read(node, "n_headings", e.n_headings); }},
      {"gamma", [&] { read(node, "gamma", e.gamma); }},
      {"sigma", [&] { read(node, "sigma", e.sigma); }},
      {"terminal_c", [&] { read(node, "terminal_c", e.terminal_c); }},
      {"alpha", [&] { read(node, "alpha", e.alpha); }},
      {"literal_social_sign", [&] { read(node, "literal_social_sign", e.literal_social_sign); }},
      {"m_agent", [&] { read(node, "m_agent", e.slm.m_agent); }},
      {"n_agent", [&] { read(node, "n_agent", e.slm.n_agent); }},
      {"m_person", [&] { read(node, "m_person", e.slm.m_person); }},
      {"n_person", [&] { read(node, "n_person", e.slm.n_person); }},
      {"a", [&] { read(node, "a", e.slm.a); }},
      {"b", [&] { read(node, "b", e.slm.b); }},
      {"c", [&] { read(node, "c", e.slm.c); }},
      {"k_cap", [&] { read(node, "k_cap", e.slm.k_cap); }},
      {"enable_hrsc", [&] { read(node, "enable_hrsc", e.slm.enable_hrsc); }},
      {"enable_hisc", [&] { read(node, "enable_hisc", e.slm.enable_hisc); }},
      {"enable_cac", [&] { read(node, "enable_cac", e.slm.enable_cac); }},
  };
  for (const auto& [key, value] : node.items()) {
    auto it = fields.find(key);
    if (it == fields.end()) throw ParseError("env." + key, "unknown setting");
    it->second();
  }
}

void apply_json(const Json& node, TrainConfig& t) {
  const std::map<std::string, std::function<void()>> fields = {
      {"total_env_steps", [&] { read(node, "total_env_steps", t.total_env_steps); }},
      {"n_steps", [&] { read(node, "n_steps", t.n_steps); }},
      {"value_loss_coef", [&] { read(node, "value_loss_coef", t.value_loss_coef); }},
      {"entropy_coef", [&] { read(node, "entropy_coef", t.entropy_coef); }},
      {"grad_clip_norm", [&] { read(node, "grad_clip_norm", t.grad_clip_norm); }},
      {"learning_rate", [&] { read(node, "learning_rate", t.learning_rate); }},
      {"rmsprop_rho", [&] { read(node, "rmsprop_rho", t.rmsprop_rho); }},
      {"rmsprop_epsilon", [&] { read(node, "rmsprop_epsilon", t.rmsprop_epsilon); }},
      {"hidden", [&] { read(node, "hidden", t.hidden); }},
      {"log_interval", [&] { read(node, "log_interval", t.log_interval); }},
  };
  for (const auto& [key, value] : node.items()) {
    auto it = fields.find(key);
    if (it == fields.end()) throw ParseError("train." + key, "unknown setting");
    it->second();
  }
}

}  // namespace socnav::cli
