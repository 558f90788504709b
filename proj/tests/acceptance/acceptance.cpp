// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "gsal/evaluation.hpp"
#include "gsal/fixation_maps.hpp"
#include "gsal/io.hpp"
#include "gsal/pairwise_model.hpp"
#include "gsal/prf_ident.hpp"
#include "gsal/synthetic.hpp"
#include "oracles.hpp"
#include "random_data.hpp"

namespace fs = std::filesystem;
using namespace gsal;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

// 1. Analytic gradient against central differences.
Verdict gradient_fidelity() {
  const auto t0 = Clock::now();
  const Dimensions dims{15, 4};
  double worst = 0.0;
  for (std::uint64_t draw = 0; draw < 20; ++draw) {
    const auto truth = synthetic::standard_normal_truth(dims, 1000 + draw);
    synthetic::TrialOptions opt;
    opt.trials_per_subject = 50;  // N = 200
    const auto rows = encode_trials(synthetic::sample_trials(truth, opt, 2000 + draw).trials, dims);
    // Evaluate away from the generating parameters.
    const auto theta = synthetic::standard_normal_truth(dims, 3000 + draw).parameters();
    const auto g = gradient(theta, rows, 1.0);
    const auto fd = oracle::central_difference(
        [&](const std::vector<double>& t) { return objective(t, rows, 1.0); }, theta, 1e-5);
    double diff = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) diff = std::max(diff, std::abs(g[j] - fd[j]));
    worst = std::max(worst, diff / oracle::max_abs(g));
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-6 && secs < 5.0,
          "max relative error " + num(worst) + " (< 1e-6), " + num(secs) + " s (< 5 s)"};
}

// 2. Recovery of a known model.
Verdict synthetic_recovery() {
  const auto t0 = Clock::now();
  const Dimensions dims{20, 5};
  const auto truth = synthetic::standard_normal_truth(dims, 42);
  synthetic::TrialOptions opt;
  opt.trials_per_subject = 1000;  // N = 5000
  const auto train = synthetic::sample_trials(truth, opt, 43);
  const auto held_out = synthetic::sample_trials(truth, opt, 44);
  FitConfig cfg;
  cfg.C = 1.0;
  const auto fitted = fit(encode_trials(train.trials, dims), dims, cfg);
  const double tau = kendall_tau(fitted.model.w, truth.w);
  const double acc = accuracy(fitted.model, held_out.trials);
  const double bayes = synthetic::bayes_rate(held_out.p_right);
  const double secs = seconds_since(t0);
  return {fitted.converged && tau >= 0.9 && std::abs(acc - bayes) <= 0.03 && secs < 30.0,
          "tau " + num(tau) + " (>= 0.9), held-out accuracy " + num(acc) + " vs Bayes rate " +
              num(bayes) + " (±0.03), " + num(secs) + " s (< 30 s)"};
}

// 3. AUC and Kendall τ against pair enumeration.
Verdict metric_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(7);
  int auc_bad = 0;
  int tau_bad = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng() % 299;
    const int levels = 1 + static_cast<int>(rng() % 50);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(rng() % levels) / 7.0;
      labels[i] = rng() % 2 ? 1 : -1;
    }
    labels[0] = 1;
    labels[1] = -1;
    if (auc(scores, labels) != oracle::auc_pairs(scores, labels)) ++auc_bad;
  }
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng() % 299;
    const int la = 1 + static_cast<int>(rng() % 50);
    const int lb = 1 + static_cast<int>(rng() % 50);
    std::vector<double> a(n);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<double>(rng() % la) - 10.0;
      b[i] = static_cast<double>(rng() % lb) * 0.25;
    }
    if (kendall_tau(a, b) != oracle::kendall_pairs(a, b)) ++tau_bad;
  }
  const double secs = seconds_since(t0);
  return {auc_bad == 0 && tau_bad == 0 && secs < 10.0,
          std::to_string(auc_bad) + " AUC and " + std::to_string(tau_bad) +
              " Kendall mismatches in 100+100 instances, " + num(secs) + " s (< 10 s)"};
}

// 4. KLD bounds and density normalization.
Verdict kld_properties() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u;
  double worst_self = 0.0;
  double lowest = 0.0;
  double worst_sum = 0.0;
  const auto random_map = [&](std::size_t w, std::size_t h) {
    Grid g(w, h, 0.5);
    for (double& v : g.values()) v = u(rng) < 0.2 ? 0.0 : u(rng);
    g.values()[rng() % g.size()] += 0.5;
    return g.normalized();
  };
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t w = 5 + rng() % 60;
    const std::size_t h = 5 + rng() % 60;
    const auto f = random_map(w, h);
    const auto s = random_map(w, h);
    worst_self = std::max(worst_self, kld(f, f, 1e-12));
    lowest = std::min(lowest, kld(f, s, 1e-12));

    std::vector<Fixation> fix;
    const std::size_t count = 1 + rng() % 40;
    for (std::size_t i = 0; i < count; ++i) {
      fix.push_back({0, 0, u(rng) * 0.5 * w, u(rng) * 0.5 * h, 200.0, 200.0, 1});
    }
    const auto d = fixation_density(fix, {w, h, 0.5});
    worst_sum = std::max(worst_sum, std::abs(d.sum() - 1.0));
  }
  return {worst_self <= 1e-6 && lowest >= -1e-6 && worst_sum <= 1e-12,
          "max kld(F,F) " + num(worst_self) + ", min kld(F,S) " + num(lowest) +
              ", max |sum-1| " + num(worst_sum)};
}

// 5. Noise-free identification and its decay with noise.
Verdict prf_closure() {
  const auto t0 = Clock::now();
  const auto selection = filter_voxels(synthetic::random_voxels(500, 9));
  std::vector<Grid> maps;
  for (std::uint64_t k = 0; k < 45; ++k) maps.push_back(synthetic::random_feature_map(538, 500 + k));
  const auto predicted = predict_profiles(maps, selection.voxels);
  const double clean = identify(correlation_matrix(predicted, predicted)).accuracy;

  const double etas[] = {0.0, 0.1, 0.5, 1.0};
  std::vector<double> means;
  for (double eta : etas) {
    double acc = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto measured = synthetic::add_noise(predicted, eta, 900 + s);
      acc += identify(correlation_matrix(measured, predicted)).accuracy;
    }
    means.push_back(acc / 20.0);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < means.size(); ++i) monotone = monotone && means[i] <= means[i - 1];
  std::string curve;
  for (std::size_t i = 0; i < means.size(); ++i) curve += (i ? ", " : "") + num(means[i]);
  // Not part of the criterion: heavier noise, to show where accuracy starts to drop.
  std::string heavy;
  for (double eta : {3.0, 10.0}) {
    double acc = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      acc += identify(correlation_matrix(synthetic::add_noise(predicted, eta, 900 + s), predicted)).accuracy;
    }
    heavy += (heavy.empty() ? "" : ", ") + num(acc / 20.0);
  }
  const double secs = seconds_since(t0);
  return {selection.voxels.size() == 500 && clean == 1.0 && monotone && secs < 60.0,
          std::to_string(selection.voxels.size()) + " voxels, accuracy at noise 0: " + num(clean) +
              ", mean accuracy over eta {0, 0.1, 0.5, 1}: " + curve + " (eta 3, 10: " + heavy + "), " +
              num(secs) + " s (< 60 s)"};
}

// 6. Deterministic fits, unaffected by logging.
Verdict determinism() {
  const Dimensions dims{30, 8};
  const auto truth = synthetic::standard_normal_truth(dims, 11);
  const auto rows = encode_trials(synthetic::sample_trials(truth, {}, 12).trials, dims);
  FitConfig cfg;
  cfg.C = 3.0;
  const auto a = fit(rows, dims, cfg);
  const auto b = fit(rows, dims, cfg);
  const bool identical = a.model.parameters() == b.model.parameters() &&
                         a.objective == b.objective && a.iterations == b.iterations;

  std::ostringstream verbose_log;
  FitConfig verbose = cfg;
  verbose.observer = [&](const IterationLog& it) {
    verbose_log << it.iteration << ' ' << it.objective << ' ' << it.step << '\n';
  };
  int sparse_lines = 0;
  FitConfig sparse = cfg;
  sparse.observer = [&](const IterationLog& it) {
    if (it.iteration % 25 == 0) ++sparse_lines;
  };
  const auto v = fit(rows, dims, verbose);
  const auto s = fit(rows, dims, sparse);
  const double spread = std::max(std::abs(v.objective - a.objective), std::abs(s.objective - a.objective));
  return {identical && spread <= 1e-6,
          std::string("repeat fit ") + (identical ? "bit-identical" : "differs") +
              ", objective spread across logging settings " + num(spread) + " (<= 1e-6)"};
}

// 7. save → load → save gives the same bytes.
Verdict round_trips(const fs::path& dir) {
  fs::create_directories(dir);
  std::mt19937_64 rng(13);
  int bad = 0;
  const auto bytes = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  for (int rep = 0; rep < 50; ++rep) {
    const auto t = gen::trials(rng);
    io::save_trials(dir / "a.csv", t);
    io::save_trials(dir / "b.csv", io::load_trials(dir / "a.csv"));
    bad += bytes(dir / "a.csv") != bytes(dir / "b.csv");

    const auto v = gen::voxels(rng);
    io::save_voxels(dir / "a.csv", v);
    io::save_voxels(dir / "b.csv", io::load_voxels(dir / "a.csv"));
    bad += bytes(dir / "a.csv") != bytes(dir / "b.csv");

    const auto g = gen::grid(rng);
    io::save_grid(dir / "a.grid", g);
    const auto g2 = io::load_grid(dir / "a.grid");
    io::save_grid(dir / "b.grid", g2);
    bad += bytes(dir / "a.grid") != bytes(dir / "b.grid") || !(g2 == g);

    const auto m = gen::model(rng);
    io::save_model(dir / "a.txt", m);
    io::save_model(dir / "b.txt", io::load_model(dir / "a.txt"));
    bad += bytes(dir / "a.txt") != bytes(dir / "b.txt");
  }
  fs::remove_all(dir);
  return {bad == 0, std::to_string(bad) + " mismatches over 50 instances of 4 formats"};
}

// 8. Scripted CLI pipeline.
Verdict cli_pipeline(const fs::path& dir) {
  const auto t0 = Clock::now();
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto q = [&](const std::string& name) { return "'" + (dir / name).string() + "'"; };
  const std::string cli = std::string("'") + GSAL_CLI + "' ";
  const std::string synth = std::string("'") + GSAL_SYNTH + "' ";
  const std::string quiet = " >>" + q("pipeline.log") + " 2>&1";
  const std::vector<std::pair<std::string, std::string>> steps{
      {"synthesize trials", synth + "trials --images 20 --subjects 10 --trials-per-subject 200 --seed 1 --out " + q("trials.csv")},
      {"synthesize pRF data", synth + "prf --maps 45 --voxels 500 --pixels 128 --noise 0.5 --seed 1 --out " + q("prf")},
      {"fit", cli + "fit --trials " + q("trials.csv") + " --c 1.0 --out " + q("model.txt")},
      {"cv", cli + "cv --trials " + q("trials.csv") + " --folds 5 --seed 1 --out " + q("cv.csv")},
      {"eval", cli + "eval --trials " + q("trials.csv") + " --outer-folds 5 --folds 4 --seed 1 --out " + q("eval.csv")},
      {"identify", cli + "identify --measured " + q("prf/measured.csv") + " --voxels " + q("prf/voxels.csv") +
                       " --maps " + q("prf/maps") + " --area V1 --out-dir " + q("identify")},
      {"rsa", cli + "rsa --measured " + q("prf/measured.csv") + " --voxels " + q("prf/voxels.csv") +
                  " --maps " + q("prf/maps") + " --area V1 --out-dir " + q("rsa")},
  };
  for (const auto& [name, cmd] : steps) {
    const int raw = std::system((cmd + quiet).c_str());
    if (!WIFEXITED(raw) || WEXITSTATUS(raw) != 0) {
      return {false, "step '" + name + "' failed, see " + (dir / "pipeline.log").string()};
    }
  }
  const char* artifacts[] = {"trials.csv", "prf/voxels.csv", "prf/measured.csv", "prf/maps/44.grid",
                             "model.txt", "cv.csv", "eval.csv", "identify/correlation.csv",
                             "identify/confidence.csv", "identify/identification.csv",
                             "rsa/measured_rdm.csv", "rsa/predicted_rdm.csv"};
  for (const char* a : artifacts) {
    if (!fs::exists(dir / a) || fs::file_size(dir / a) == 0) return {false, std::string("missing ") + a};
  }
  const double secs = seconds_since(t0);
  fs::remove_all(dir);
  return {secs < 120.0, std::to_string(steps.size()) + " steps exit 0, " +
                            std::to_string(std::size(artifacts)) + " artifacts present, " +
                            num(secs) + " s (< 120 s)"};
}

}  // namespace

int main() {
  const fs::path scratch = fs::temp_directory_path() / "gsal_acceptance";
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 gradient fidelity", gradient_fidelity},
      {"2 synthetic recovery", synthetic_recovery},
      {"3 metric oracles", metric_oracles},
      {"4 KLD properties", kld_properties},
      {"5 pRF closure", prf_closure},
      {"6 convex determinism", determinism},
      {"7 format round-trips", [&] { return round_trips(scratch / "formats"); }},
      {"8 end-to-end CLI", [&] { return cli_pipeline(scratch / "pipeline"); }},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Verdict o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << 8 - failures << "/8" << std::endl;
  return failures ? 1 : 0;
}
