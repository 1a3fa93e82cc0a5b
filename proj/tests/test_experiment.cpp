#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "subspace_doa/experiment.hpp"

using namespace sdoa;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  auto c = preset("fig5");
  c.num_trials = 2;
  c.learning.max_epochs = 40;
  c.learning.stop_on_convergence = false;
  c.grid = {0.0, 180.0, 2.0};
  c.trace_stride = 7;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sdoa_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("presets") {
  for (const auto& name : preset_names()) {
    const auto c = preset(name);
    CHECK_NOTHROW(c.validate());
    CHECK(c.name == name);
    CHECK(c.geometry.num_sensors == 8);
    CHECK(c.geometry.reference == AngleReference::axis);
    REQUIRE(c.sources.size() == 2);
    CHECK(c.sources[0].doa_deg == 60.0);
    CHECK(c.sources[1].doa_deg == 100.0);
    CHECK(c.noise.sigma == 0.009);
  }
  CHECK_THROWS_AS(preset("fig3"), std::invalid_argument);
  CHECK_THROWS_AS(preset(""), std::invalid_argument);

  const auto sweep = preset("fig2-lr-sweep").resolved_variants();
  REQUIRE(sweep.size() == 2);
  CHECK(*sweep[0].eta == 0.01);
  CHECK(*sweep[1].eta == 0.1);

  const auto compare = preset("fig8-9-noise-compare").resolved_variants();
  REQUIRE(compare.size() == 2);
  CHECK(*compare[0].rule == UpdateRule::gha);
  CHECK(*compare[1].rule == UpdateRule::mca_stabilized);
  CHECK(*compare[0].num_snapshots == *compare[1].num_snapshots);

  const auto base = small_config();
  auto plain = base;
  plain.variants.clear();
  const auto arms = plain.resolved_variants();
  REQUIRE(arms.size() == 1);
  CHECK(arms[0].label == "base");
  CHECK(*arms[0].rule == plain.rule);
}

TEST_CASE("derive_seed") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("run_experiment smoke with zero epochs") {
  auto c = small_config();
  c.num_trials = 1;
  c.learning.max_epochs = 0;
  auto report = run_experiment(c);
  REQUIRE(report.records.size() == 1);
  CHECK(report.records[0].iterations == 0);
  CHECK(report.records[0].status == TrialStatus::budget_exhausted);
  CHECK(report.records[0].direction_errors.size() == 6);

  const auto dir = scratch_dir("smoke");
  const auto paths = emit_outputs(report, dir);
  REQUIRE(paths.size() == 4);
  for (const auto& p : paths) CHECK(fs::exists(p));
  CHECK(report.files == std::vector<std::string>{"spectrum.csv", "trace.csv", "report.json",
                                                 "config.json"});
  CHECK(lines_of(slurp(dir / "trace.csv")).size() == 1);
  CHECK(lines_of(slurp(dir / "spectrum.csv")).size() == 1 + c.grid.size());
  fs::remove_all(dir);
}

TEST_CASE("run_experiment output formats") {
  auto report = run_experiment(small_config());
  const auto dir = scratch_dir("formats");
  emit_outputs(report, dir);

  const auto spectrum = lines_of(slurp(dir / "spectrum.csv"));
  CHECK(spectrum.front() == "theta_deg,power,method,trial,variant");
  CHECK(spectrum.size() == 1 + 2 * report.config.grid.size());
  CHECK(spectrum[1].find(",mca,0,L=5") != std::string::npos);

  const auto trace = lines_of(slurp(dir / "trace.csv"));
  CHECK(trace.front() == "iter,neuron,direction_error,norm_dev,trial,variant");
  // 200 presentations, stride 7: rows 7, 14, ..., 196 and the final 200.
  CHECK(trace.size() == 1 + 2 * (28 + 1) * 6);
  CHECK(trace[1].rfind("7,0,", 0) == 0);

  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(j.at("records").size() == 2);
  CHECK(j.at("summaries").size() == 1);
  CHECK(j.at("files").size() == 4);

  const auto cfg = nlohmann::json::parse(slurp(dir / "config.json"));
  CHECK_FALSE(cfg.contains("output_dir"));
  CHECK(config_from_json(cfg).num_trials == 2);
  fs::remove_all(dir);
}

TEST_CASE("run_experiment is deterministic and trial-prefix stable") {
  const auto c = small_config();
  auto a = run_experiment(c);
  auto b = run_experiment(c);
  const auto da = scratch_dir("det_a");
  const auto db = scratch_dir("det_b");
  emit_outputs(a, da);
  emit_outputs(b, db);
  for (const char* f : {"spectrum.csv", "trace.csv", "report.json", "config.json"}) {
    CHECK(slurp(da / f) == slurp(db / f));
  }

  auto more = c;
  more.num_trials = 3;
  const auto longer = run_experiment(more);
  REQUIRE(longer.records.size() == 3);
  for (int t = 0; t < 2; ++t) {
    CHECK(longer.records[t].seed == a.records[t].seed);
    CHECK(longer.records[t].direction_errors == a.records[t].direction_errors);
    CHECK(longer.records[t].peak_angles_deg == a.records[t].peak_angles_deg);
    CHECK(longer.artifacts[t].spectrum->values == a.artifacts[t].spectrum->values);
  }

  auto reseeded = c;
  reseeded.noise.seed = 2;
  CHECK(run_experiment(reseeded).records[0].seed != a.records[0].seed);
  fs::remove_all(da);
  fs::remove_all(db);
}

TEST_CASE("summaries recompute from records") {
  auto c = small_config();
  c.num_trials = 3;
  c.variants = {{"a", std::nullopt, std::nullopt, 2}, {"b", UpdateRule::gha, 0.05, std::nullopt}};
  const auto report = run_experiment(c);
  REQUIRE(report.records.size() == 6);
  CHECK(report.records[0].variant == "a");
  CHECK(report.records[3].variant == "b");
  CHECK(report.artifacts[3].method == "pca");
  CHECK(report.records[3].direction_errors.size() == 2);

  const auto again = summarize(report.records);
  REQUIRE(again.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(again[k].variant == report.summaries[k].variant);
    CHECK(again[k].median_rmse == report.summaries[k].median_rmse);
    CHECK(again[k].mean_rmse == report.summaries[k].mean_rmse);
    CHECK(again[k].convergence_rate == report.summaries[k].convergence_rate);
  }
  std::vector<double> rmse;
  for (int t = 0; t < 3; ++t) rmse.push_back(report.records[t].angle_rmse);
  std::sort(rmse.begin(), rmse.end());
  CHECK(report.summary("a").median_rmse == rmse[1]);
  CHECK(report.summary("a").trials == 3);
  CHECK_THROWS_AS(report.summary("zzz"), std::out_of_range);
}

TEST_CASE("summarize examples") {
  std::vector<TrialRecord> records(4);
  const double rmse[] = {4.0, 1.0, 3.0, 90.0};
  for (int t = 0; t < 4; ++t) {
    records[t].variant = "v";
    records[t].trial = t;
    records[t].angle_rmse = rmse[t];
    records[t].converged = t < 2;
    records[t].status = t == 3 ? TrialStatus::diverged : TrialStatus::budget_exhausted;
  }
  const auto s = summarize(records);
  REQUIRE(s.size() == 1);
  CHECK(s[0].median_rmse == 3.5);
  CHECK(s[0].mean_rmse == 24.5);
  CHECK(s[0].convergence_rate == 0.5);
  CHECK(s[0].diverged == 1);
}

TEST_CASE("diverged trials are recorded") {
  auto c = small_config();
  c.sources = {{60.0, 0.35, 30.0}, {100.0, 0.36, 30.0}};
  c.learning.eta = 0.9;
  const auto report = run_experiment(c);
  CHECK(report.all_diverged());
  for (const auto& r : report.records) {
    CHECK(r.status == TrialStatus::diverged);
    CHECK(r.peak_angles_deg.empty());
    CHECK(r.angle_rmse == 90.0);
  }
  CHECK(report.summaries[0].diverged == 2);
}

TEST_CASE("config JSON round trip and validation") {
  const auto original = preset("fig8-9-noise-compare");
  const auto j = to_json(original);
  const auto back = config_from_json(j);
  CHECK(to_json(back) == j);

  auto bad_key = j;
  bad_key["learning"]["momentum"] = 0.5;
  CHECK_THROWS_AS(config_from_json(bad_key), std::invalid_argument);

  auto bad_eta = j;
  bad_eta["learning"]["eta"] = 1.5;
  CHECK_THROWS_AS(config_from_json(bad_eta), std::invalid_argument);

  auto bad_rule = j;
  bad_rule["rule"] = "oja";
  CHECK_THROWS_AS(config_from_json(bad_rule), std::invalid_argument);

  auto no_sources = j;
  no_sources.erase("sources");
  CHECK_THROWS_AS(config_from_json(no_sources), std::invalid_argument);

  auto wrong_type = j;
  wrong_type["num_trials"] = "many";
  CHECK_THROWS_AS(config_from_json(wrong_type), std::invalid_argument);

  auto dup = j;
  dup["variants"][1]["label"] = "pca";
  CHECK_THROWS_AS(config_from_json(dup), std::invalid_argument);

  auto too_many = j;
  too_many["learning"]["num_neurons"] = 8;
  CHECK_THROWS_AS(config_from_json(too_many), std::invalid_argument);

  const auto minimal = config_from_json(nlohmann::json::parse(
      R"({"sources": [{"doa_deg": 30, "normalized_freq": 0.2}]})"));
  CHECK(minimal.geometry.num_sensors == 8);
  CHECK(minimal.sources[0].amplitude == 1.0);
  CHECK(minimal.geometry.reference == AngleReference::broadside);
}

TEST_CASE("emit_outputs rejects an empty report") {
  ExperimentReport empty;
  CHECK_THROWS_AS(emit_outputs(empty, scratch_dir("empty")), std::invalid_argument);
}

TEST_CASE("learning-rate sweep trace has one row per presentation") {
  auto c = preset("fig2");
  c.learning.max_epochs = 20;
  const auto report = run_experiment(c);
  REQUIRE(report.artifacts.size() == 2);
  for (const auto& a : report.artifacts) {
    REQUIRE(a.trace.records.size() == 100);
    for (std::size_t i = 0; i < a.trace.records.size(); ++i) {
      CHECK(a.trace.records[i].iteration == i + 1);
      CHECK(a.trace.records[i].direction_error.size() == 1);
    }
  }
}
