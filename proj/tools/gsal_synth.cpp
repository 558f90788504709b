// gsal-synth: seeded synthetic datasets for trying out the pipelines.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "gsal/error.hpp"
#include "gsal/io.hpp"
#include "gsal/prf_ident.hpp"
#include "gsal/synthetic.hpp"

namespace fs = std::filesystem;
using namespace gsal;

int main(int argc, char** argv) {
  CLI::App app{"Synthetic trials and pRF datasets"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out;

  std::size_t images = 20;
  std::size_t subjects = 5;
  int per_subject = 200;
  double task_p = 0.5;
  double familiar_p = 0.5;
  std::string truth_path;
  auto* trials = app.add_subcommand("trials", "Pairwise trials drawn from a random model");
  trials->add_option("--images", images)->check(CLI::Range(2, 1000000));
  trials->add_option("--subjects", subjects)->check(CLI::Range(1, 1000000));
  trials->add_option("--trials-per-subject", per_subject)->check(CLI::PositiveNumber);
  trials->add_option("--task-probability", task_p)->check(CLI::Range(0.0, 1.0));
  trials->add_option("--familiar-probability", familiar_p)->check(CLI::Range(0.0, 1.0));
  trials->add_option("--seed", seed);
  trials->add_option("--truth", truth_path, "Also write the generating model here");
  trials->add_option("--out", out, "Trials CSV")->required();

  std::size_t maps = 45;
  std::size_t voxels = 500;
  std::size_t pixels = 538;
  double noise = 0.0;
  std::string area = "V1";
  auto* prf = app.add_subcommand("prf", "Feature maps, voxels and noisy measured responses");
  prf->add_option("--maps", maps)->check(CLI::Range(2, 100000));
  prf->add_option("--voxels", voxels)->check(CLI::Range(2, 10000000));
  prf->add_option("--pixels", pixels)->check(CLI::Range(8, 100000));
  prf->add_option("--noise", noise, "Noise SD as a fraction of each profile's SD")
      ->check(CLI::NonNegativeNumber);
  prf->add_option("--area", area);
  prf->add_option("--seed", seed);
  prf->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*trials) {
      const auto truth = synthetic::standard_normal_truth({images, subjects}, seed);
      synthetic::TrialOptions options{per_subject, task_p, familiar_p};
      const auto sampled = synthetic::sample_trials(truth, options, seed + 1);
      io::save_trials(out, sampled.trials);
      if (!truth_path.empty()) io::save_model(truth_path, truth);
      std::cout << "trials," << sampled.trials.size() << "\nbayes_rate,"
                << io::format_double(synthetic::bayes_rate(sampled.p_right)) << '\n';
    } else {
      const fs::path dir(out);
      fs::create_directories(dir / "maps");
      const auto vs = synthetic::random_voxels(voxels, seed, area);
      std::vector<Grid> feature_maps;
      io::MeasuredTable table;
      for (std::size_t k = 0; k < maps; ++k) {
        feature_maps.push_back(synthetic::random_feature_map(pixels, seed * 1000003 + k + 1));
        io::save_grid(dir / "maps" / (std::to_string(k) + ".grid"), feature_maps.back());
        table.image_ids.push_back(static_cast<int>(k));
      }
      const auto clean = predict_profiles(feature_maps, vs);
      for (const auto& p : synthetic::add_noise(clean, noise, seed + 7)) table.responses.push_back(p.values);
      io::save_voxels(dir / "voxels.csv", vs);
      io::save_measured(dir / "measured.csv", table);
      std::cout << "maps," << maps << "\nvoxels," << voxels << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
