#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "subspace_doa/experiment.hpp"

namespace sdoa {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view to_string(AngleReference ref) {
  return ref == AngleReference::axis ? "axis" : "broadside";
}

AngleReference parse_reference(const std::string& s) {
  if (s == "axis") return AngleReference::axis;
  if (s == "broadside") return AngleReference::broadside;
  throw std::invalid_argument("angle_reference must be 'axis' or 'broadside', got '" + s + "'");
}

UpdateRule parse_rule(const std::string& s) {
  auto rule = parse_update_rule(s);
  if (!rule) throw std::invalid_argument("unknown update rule '" + s + "'");
  return *rule;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be a JSON object");
  std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!keys.count(item.key())) {
      throw std::invalid_argument("unknown field '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << content;
  os.close();
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  json sources = json::array();
  for (const auto& s : c.sources) {
    sources.push_back(
        {{"doa_deg", s.doa_deg}, {"normalized_freq", s.normalized_freq}, {"amplitude", s.amplitude}});
  }
  json variants = json::array();
  for (const auto& v : c.variants) {
    json jv = {{"label", v.label}};
    if (v.rule) jv["rule"] = std::string(to_string(*v.rule));
    if (v.eta) jv["eta"] = *v.eta;
    if (v.num_snapshots) jv["num_snapshots"] = *v.num_snapshots;
    variants.push_back(std::move(jv));
  }
  return {
      {"name", c.name},
      {"geometry",
       {{"num_sensors", c.geometry.num_sensors},
        {"spacing_wavelengths", c.geometry.spacing_wavelengths},
        {"angle_reference", std::string(to_string(c.geometry.reference))}}},
      {"sources", std::move(sources)},
      {"num_snapshots", c.num_snapshots},
      {"noise", {{"sigma", c.noise.sigma}, {"seed", c.noise.seed}}},
      {"rule", std::string(to_string(c.rule))},
      {"learning",
       {{"eta", c.learning.eta},
        {"beta", c.learning.beta},
        {"max_epochs", c.learning.max_epochs},
        {"convergence_tol", c.learning.convergence_tol},
        {"divergence_norm_cap", c.learning.divergence_norm_cap},
        {"num_neurons", c.learning.num_neurons},
        {"stop_on_convergence", c.learning.stop_on_convergence}}},
      {"grid",
       {{"start_deg", c.grid.start_deg}, {"stop_deg", c.grid.stop_deg}, {"step_deg", c.grid.step_deg}}},
      {"num_trials", c.num_trials},
      {"trace_stride", c.trace_stride},
      {"output_dir", c.output_dir},
      {"variants", std::move(variants)},
  };
}

ExperimentConfig config_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"name", "geometry", "sources", "num_snapshots", "noise", "rule", "learning",
                       "grid", "num_trials", "trace_stride", "output_dir", "variants"},
                      "config");
  ExperimentConfig c;
  try {
    read_opt(j, "name", c.name);
    if (j.contains("geometry")) {
      const auto& g = j.at("geometry");
      reject_unknown_keys(g, {"num_sensors", "spacing_wavelengths", "angle_reference"}, "geometry");
      read_opt(g, "num_sensors", c.geometry.num_sensors);
      read_opt(g, "spacing_wavelengths", c.geometry.spacing_wavelengths);
      if (g.contains("angle_reference")) {
        c.geometry.reference = parse_reference(g.at("angle_reference").get<std::string>());
      }
    }
    if (!j.contains("sources")) throw std::invalid_argument("config needs a 'sources' list");
    for (const auto& s : j.at("sources")) {
      reject_unknown_keys(s, {"doa_deg", "normalized_freq", "amplitude"}, "source");
      SourceSpec src;
      src.doa_deg = s.at("doa_deg").get<double>();
      src.normalized_freq = s.at("normalized_freq").get<double>();
      read_opt(s, "amplitude", src.amplitude);
      c.sources.push_back(src);
    }
    read_opt(j, "num_snapshots", c.num_snapshots);
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      reject_unknown_keys(n, {"sigma", "seed"}, "noise");
      read_opt(n, "sigma", c.noise.sigma);
      read_opt(n, "seed", c.noise.seed);
    }
    if (j.contains("rule")) c.rule = parse_rule(j.at("rule").get<std::string>());
    if (j.contains("learning")) {
      const auto& l = j.at("learning");
      reject_unknown_keys(l,
                          {"eta", "beta", "max_epochs", "convergence_tol", "divergence_norm_cap",
                           "num_neurons", "stop_on_convergence"},
                          "learning");
      read_opt(l, "eta", c.learning.eta);
      read_opt(l, "beta", c.learning.beta);
      read_opt(l, "max_epochs", c.learning.max_epochs);
      read_opt(l, "convergence_tol", c.learning.convergence_tol);
      read_opt(l, "divergence_norm_cap", c.learning.divergence_norm_cap);
      read_opt(l, "num_neurons", c.learning.num_neurons);
      read_opt(l, "stop_on_convergence", c.learning.stop_on_convergence);
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      reject_unknown_keys(g, {"start_deg", "stop_deg", "step_deg"}, "grid");
      read_opt(g, "start_deg", c.grid.start_deg);
      read_opt(g, "stop_deg", c.grid.stop_deg);
      read_opt(g, "step_deg", c.grid.step_deg);
    }
    read_opt(j, "num_trials", c.num_trials);
    read_opt(j, "trace_stride", c.trace_stride);
    read_opt(j, "output_dir", c.output_dir);
    if (j.contains("variants")) {
      for (const auto& v : j.at("variants")) {
        reject_unknown_keys(v, {"label", "rule", "eta", "num_snapshots"}, "variant");
        ExperimentVariant arm;
        arm.label = v.at("label").get<std::string>();
        if (v.contains("rule")) arm.rule = parse_rule(v.at("rule").get<std::string>());
        if (v.contains("eta")) arm.eta = v.at("eta").get<double>();
        if (v.contains("num_snapshots")) arm.num_snapshots = v.at("num_snapshots").get<int>();
        c.variants.push_back(std::move(arm));
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const ExperimentReport& report) {
  json records = json::array();
  for (const auto& r : report.records) {
    records.push_back({{"variant", r.variant},
                       {"trial", r.trial},
                       {"seed", r.seed},
                       {"status", std::string(to_string(r.status))},
                       {"converged", r.converged},
                       {"iterations", r.iterations},
                       {"direction_errors", r.direction_errors},
                       {"peak_angles_deg", r.peak_angles_deg},
                       {"peak_values", r.peak_values},
                       {"angle_rmse", r.angle_rmse}});
  }
  json summaries = json::array();
  for (const auto& s : report.summaries) {
    summaries.push_back({{"variant", s.variant},
                         {"trials", s.trials},
                         {"median_rmse", s.median_rmse},
                         {"mean_rmse", s.mean_rmse},
                         {"convergence_rate", s.convergence_rate},
                         {"diverged", s.diverged}});
  }
  return {{"name", report.config.name},
          {"records", std::move(records)},
          {"summaries", std::move(summaries)},
          {"files", report.files}};
}

std::vector<std::filesystem::path> emit_outputs(ExperimentReport& report,
                                                const std::filesystem::path& dir) {
  if (report.records.empty()) {
    throw std::invalid_argument("cannot emit an empty report");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  const std::vector<std::string> names = {"spectrum.csv", "trace.csv", "report.json",
                                          "config.json"};
  report.files = names;

  std::ostringstream spectrum;
  spectrum << "theta_deg,power,method,trial,variant\n";
  for (const auto& a : report.artifacts) {
    if (!a.spectrum) continue;
    for (std::size_t i = 0; i < a.spectrum->values.size(); ++i) {
      spectrum << fmt17(a.spectrum->grid.angle(i)) << ',' << fmt17(a.spectrum->values[i]) << ','
               << a.method << ',' << a.trial << ',' << a.variant << '\n';
    }
  }

  std::ostringstream trace;
  trace << "iter,neuron,direction_error,norm_dev,trial,variant\n";
  for (const auto& a : report.artifacts) {
    for (const auto& rec : a.trace.records) {
      for (std::size_t j = 0; j < rec.direction_error.size(); ++j) {
        trace << rec.iteration << ',' << j << ',' << fmt17(rec.direction_error[j]) << ','
              << fmt17(rec.norm_dev[j]) << ',' << a.trial << ',' << a.variant << '\n';
      }
    }
  }

  json config = to_json(report.config);
  config.erase("output_dir");

  std::vector<std::filesystem::path> paths;
  for (const auto& n : names) paths.push_back(dir / n);
  write_file(paths[0], spectrum.str());
  write_file(paths[1], trace.str());
  write_file(paths[2], to_json(report).dump(2) + "\n");
  write_file(paths[3], config.dump(2) + "\n");
  return paths;
}

}  // namespace sdoa
