// gsal: command-line front end.
//
// Exit status: 0 success, 1 usage error, 2 data error.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gsal/error.hpp"
#include "gsal/evaluation.hpp"
#include "gsal/fixation_maps.hpp"
#include "gsal/io.hpp"
#include "gsal/pairwise_model.hpp"
#include "gsal/prf_ident.hpp"

namespace fs = std::filesystem;
using namespace gsal;
using io::format_double;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

// Writes to `path`, or to standard output when the path is empty.
template <typename Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  auto out = open_out(path);
  fn(out);
  if (!out) throw Error("failed writing " + path);
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (auto field : io::split_csv(text)) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || end != field.data() + field.size() || !std::isfinite(v)) {
      throw UsageError(flag + ": not a number list: '" + text + "'");
    }
    out.push_back(v);
  }
  return out;
}

BinRect parse_rect(const std::string& text, const std::string& flag) {
  const auto v = parse_list(text, flag);
  if (v.size() != 4 || std::any_of(v.begin(), v.end(), [](double x) {
        return x < 0.0 || x != std::floor(x);
      })) {
    throw UsageError(flag + ": expected x0,y0,x1,y1 as bin indices");
  }
  return {static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1]),
          static_cast<std::size_t>(v[2]), static_cast<std::size_t>(v[3])};
}

fs::path map_path(const fs::path& dir, int image_id) {
  return dir / (std::to_string(image_id) + ".grid");
}

// Image ids of every <id>.grid in the directory, ascending.
std::vector<int> list_map_ids(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("map directory " + dir.string() + " not found");
  std::vector<int> ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".grid") continue;
    const std::string stem = entry.path().stem().string();
    int id = 0;
    const auto [end, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), id);
    if (ec == std::errc() && end == stem.data() + stem.size() && id >= 0) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  if (ids.empty()) throw EmptyInputError("no <image_id>.grid files in " + dir.string());
  return ids;
}

std::vector<Grid> load_maps(const fs::path& dir, const std::vector<int>& ids) {
  std::vector<Grid> maps;
  maps.reserve(ids.size());
  for (int id : ids) {
    try {
      maps.push_back(io::load_grid(map_path(dir, id)));
    } catch (const ParseError& e) {
      throw Error(map_path(dir, id).string() + ": " + e.what());
    }
  }
  return maps;
}

VoxelSelection select_voxels(const std::vector<PrfVoxel>& all, const std::string& area) {
  const auto in_area = select_area(all, area);
  const auto kept = filter_voxels(in_area.voxels);
  VoxelSelection sel;
  for (std::size_t i = 0; i < kept.indices.size(); ++i) {
    sel.indices.push_back(in_area.indices[kept.indices[i]]);
    sel.voxels.push_back(kept.voxels[i]);
  }
  if (sel.empty()) {
    throw EmptyInputError("no voxels of area " + area + " survive the inclusion filter");
  }
  std::cerr << "voxels: " << all.size() << " in file, " << in_area.voxels.size() << " in " << area
            << ", " << sel.voxels.size() << " kept\n";
  return sel;
}

std::vector<ResponseProfile> measured_profiles(const io::MeasuredTable& table,
                                               const VoxelSelection& sel,
                                               std::size_t voxel_count) {
  std::vector<ResponseProfile> out;
  for (std::size_t r = 0; r < table.responses.size(); ++r) {
    if (table.responses[r].size() != voxel_count) {
      throw DimensionError("measured row for image " + std::to_string(table.image_ids[r]) +
                           " has " + std::to_string(table.responses[r].size()) +
                           " voxels, voxel file has " + std::to_string(voxel_count));
    }
    ResponseProfile p;
    for (auto i : sel.indices) p.values.push_back(table.responses[r][i]);
    out.push_back(std::move(p));
  }
  return out;
}

void write_rdm(std::ostream& out, const std::vector<int>& ids, const Rdm& d) {
  out << "image_id";
  for (int id : ids) out << ',' << id;
  out << '\n';
  for (std::size_t k = 0; k < d.size(); ++k) {
    out << ids[k];
    for (std::size_t l = 0; l < d.size(); ++l) out << ',' << format_double(d.at(k, l));
    out << '\n';
  }
}

std::string optional_text(const std::optional<double>& v) {
  return v ? format_double(*v) : "NA";
}

void warn_nonconverged(int count) {
  if (count > 0) std::cerr << "warning: " << count << " fits stopped at the iteration limit\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global salience, fixation maps and pRF image identification"};
  app.require_subcommand(1);

  // fit
  std::string trials_path;
  std::string out_path;
  double C = 1.0;
  double tol = 1e-8;
  int max_iter = 10000;
  auto* fit = app.add_subcommand("fit", "Fit the pairwise global-salience model");
  fit->add_option("--trials", trials_path, "Trials CSV")->required();
  fit->add_option("--c", C, "Regularization constant C")->check(CLI::PositiveNumber);
  fit->add_option("--tol", tol, "Gradient tolerance")->check(CLI::PositiveNumber);
  fit->add_option("--max-iter", max_iter, "Iteration limit")->check(CLI::PositiveNumber);
  fit->add_option("--out", out_path, "Model file")->required();

  // cv
  int folds = 5;
  std::uint64_t seed = 0;
  std::string grid_text;
  auto* cv = app.add_subcommand("cv", "Choose C by subject-wise cross-validation");
  cv->add_option("--trials", trials_path, "Trials CSV")->required();
  cv->add_option("--folds", folds, "Number of subject folds")->check(CLI::Range(2, 1000000));
  cv->add_option("--seed", seed, "Fold shuffle seed");
  cv->add_option("--grid", grid_text, "Comma-separated C values (default: 10 log-spaced values)");
  cv->add_option("--tol", tol)->check(CLI::PositiveNumber);
  cv->add_option("--max-iter", max_iter)->check(CLI::PositiveNumber);
  cv->add_option("--out", out_path, "Write the table here instead of standard output");

  // eval
  int outer_folds = 25;
  std::string report_path;
  auto* eval = app.add_subcommand("eval", "Nested leave-subjects-out evaluation");
  eval->add_option("--trials", trials_path, "Trials CSV")->required();
  eval->add_option("--outer-folds", outer_folds, "Outer folds (subjects are paired)")
      ->check(CLI::Range(2, 1000000));
  eval->add_option("--folds", folds, "Inner folds for choosing C")->check(CLI::Range(2, 1000000));
  eval->add_option("--seed", seed, "Shuffle seed for outer and inner folds");
  eval->add_option("--grid", grid_text, "Comma-separated C values");
  eval->add_option("--tol", tol)->check(CLI::PositiveNumber);
  eval->add_option("--max-iter", max_iter)->check(CLI::PositiveNumber);
  eval->add_option("--out", report_path, "Per-fold metrics CSV")->required();

  // bootstrap
  std::string values_path;
  std::string column;
  int resamples = 10000;
  auto* boot = app.add_subcommand("bootstrap", "Percentile bootstrap of a mean");
  boot->add_option("--values", values_path, "CSV with a header row")->required();
  boot->add_option("--column", column, "Column name (default: first column)");
  boot->add_option("--resamples", resamples)->check(CLI::PositiveNumber);
  boot->add_option("--seed", seed);
  boot->add_option("--out", out_path, "Resampled means, one per line");

  // density
  std::string fixations_path;
  int image_id = 0;
  std::size_t width_bins = 0;
  std::size_t height_bins = 0;
  double deg_per_bin = 0.0;
  double sigma_deg = 1.0;
  double anticipatory_ms = 80.0;
  double min_duration_ms = 50.0;
  bool first_only = false;
  auto* density = app.add_subcommand("density", "Fixation density map for one image");
  density->add_option("--fixations", fixations_path, "Fixations CSV")->required();
  density->add_option("--image", image_id, "Image id")->required();
  density->add_option("--width", width_bins, "Map width in bins")->required()->check(CLI::PositiveNumber);
  density->add_option("--height", height_bins, "Map height in bins")->required()->check(CLI::PositiveNumber);
  density->add_option("--deg-per-bin", deg_per_bin)->required()->check(CLI::PositiveNumber);
  density->add_option("--sigma", sigma_deg, "Smoothing σ in degrees")->check(CLI::PositiveNumber);
  density->add_option("--anticipatory-ms", anticipatory_ms, "Latency below which a saccade is anticipatory");
  density->add_option("--min-duration-ms", min_duration_ms);
  density->add_flag("--first", first_only, "Use only each subject's first fixation");
  density->add_option("--out", out_path, "Density grid")->required();

  // kld
  std::string fixation_map_path;
  std::string salience_path;
  double eps = 1e-12;
  auto* kl = app.add_subcommand("kld", "KL divergence of a salience map from a fixation density");
  kl->add_option("--fixation-map", fixation_map_path)->required();
  kl->add_option("--salience", salience_path)->required();
  kl->add_option("--eps", eps)->check(CLI::PositiveNumber);

  // mass
  std::string left_text;
  std::string right_text;
  auto* mass = app.add_subcommand("mass", "Salience mass inside the left and right image regions");
  mass->add_option("--salience", salience_path)->required();
  mass->add_option("--left", left_text, "x0,y0,x1,y1 in bins, half-open")->required();
  mass->add_option("--right", right_text, "x0,y0,x1,y1 in bins, half-open")->required();

  // contrast
  std::string luminance_path;
  std::size_t radius = 5;
  bool whole_image = false;
  auto* contrast = app.add_subcommand("contrast", "Local RMS contrast map");
  contrast->add_option("--luminance", luminance_path)->required();
  contrast->add_option("--radius", radius, "Window radius in pixels");
  contrast->add_flag("--whole-image", whole_image, "Do not restrict to the stimulus disc");
  contrast->add_option("--out", out_path)->required();

  // predict-profiles
  std::string voxels_path;
  std::string maps_dir;
  std::string area = "V1";
  double window_sigmas = 2.0;
  auto* predict = app.add_subcommand("predict-profiles", "Predicted voxel responses per feature map");
  predict->add_option("--voxels", voxels_path)->required();
  predict->add_option("--maps", maps_dir, "Directory of <image_id>.grid feature maps")->required();
  predict->add_option("--area", area);
  predict->add_option("--window-sigmas", window_sigmas)->check(CLI::PositiveNumber);
  predict->add_option("--out", out_path)->required();

  // identify
  std::string measured_path;
  std::string out_dir;
  auto* ident = app.add_subcommand("identify", "Identify images from measured responses");
  ident->add_option("--measured", measured_path)->required();
  ident->add_option("--voxels", voxels_path)->required();
  ident->add_option("--maps", maps_dir)->required();
  ident->add_option("--area", area);
  ident->add_option("--window-sigmas", window_sigmas)->check(CLI::PositiveNumber);
  ident->add_option("--out-dir", out_dir, "correlation.csv, identification.csv, confidence.csv")
      ->required();

  // rsa
  auto* rsa = app.add_subcommand("rsa", "Kendall τ between measured and predicted RDMs");
  rsa->add_option("--measured", measured_path)->required();
  rsa->add_option("--voxels", voxels_path)->required();
  rsa->add_option("--maps", maps_dir)->required();
  rsa->add_option("--area", area);
  rsa->add_option("--window-sigmas", window_sigmas)->check(CLI::PositiveNumber);
  rsa->add_option("--out-dir", out_dir, "measured_rdm.csv, predicted_rdm.csv");

  // rank
  std::string model_path;
  auto* rank = app.add_subcommand("rank", "Images ordered by global salience");
  rank->add_option("--model", model_path)->required();
  rank->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const auto grid_or_default = [&] {
      return grid_text.empty() ? default_C_grid() : parse_list(grid_text, "--grid");
    };

    if (*fit) {
      const auto trials = io::load_trials(trials_path);
      const auto dims = infer_dimensions(trials);
      FitConfig config;
      config.C = C;
      config.tol = tol;
      config.max_iter = max_iter;
      const auto result = gsal::fit(encode_trials(trials, dims), dims, config);
      if (!result.converged) {
        std::cerr << "warning: not converged after " << result.iterations
                  << " iterations, gradient norm " << result.grad_inf_norm << '\n';
      }
      io::save_model(out_path, result.model);
      std::cout << "iterations," << result.iterations << "\nobjective,"
                << format_double(result.objective) << "\nconverged,"
                << (result.converged ? 1 : 0) << '\n';
    } else if (*cv) {
      const auto trials = io::load_trials(trials_path);
      const auto grid = grid_or_default();
      CvConfig config{folds, seed, tol, max_iter};
      const auto sel = cv_select_C(trials, infer_dimensions(trials), grid, config);
      warn_nonconverged(sel.nonconverged_fits);
      emit(out_path, [&](std::ostream& out) {
        out << "C,mean_accuracy,selected\n";
        for (std::size_t i = 0; i < sel.grid.size(); ++i) {
          out << format_double(sel.grid[i]) << ',' << format_double(sel.mean_accuracy[i]) << ','
              << (sel.grid[i] == sel.best_C ? 1 : 0) << '\n';
        }
      });
    } else if (*eval) {
      const auto trials = io::load_trials(trials_path);
      const auto plan = make_leave2out_plan(distinct_subjects(trials), outer_folds, seed);
      CvConfig inner{folds, seed, tol, max_iter};
      const auto rep = evaluate_nested(trials, infer_dimensions(trials), plan, grid_or_default(), inner);
      warn_nonconverged(rep.nonconverged_fits);
      emit(report_path, [&](std::ostream& out) {
        out << "fold,set,auc,tjur_r2,accuracy,baseline_accuracy,selected_C\n";
        for (std::size_t f = 0; f < rep.test.folds.size(); ++f) {
          const auto& te = rep.test.folds[f];
          const auto& tr = rep.train.folds[f];
          out << f + 1 << ",test," << format_double(te.auc) << ',' << format_double(te.tjur_r2)
              << ',' << format_double(te.accuracy) << ',' << format_double(rep.baseline_accuracy[f])
              << ',' << format_double(rep.selected_C[f]) << '\n';
          out << f + 1 << ",train," << format_double(tr.auc) << ',' << format_double(tr.tjur_r2)
              << ',' << format_double(tr.accuracy) << ",," << format_double(rep.selected_C[f])
              << '\n';
        }
      });
      const auto row = [](const char* name, const MetricReport& m) {
        std::cout << std::left << std::setw(8) << name << std::right << std::fixed
                  << std::setprecision(4) << std::setw(10) << m.mean.auc << " ±" << std::setw(7)
                  << m.sd.auc << std::setw(10) << m.mean.tjur_r2 << " ±" << std::setw(7)
                  << m.sd.tjur_r2 << std::setw(10) << m.mean.accuracy << " ±" << std::setw(7)
                  << m.sd.accuracy << '\n';
      };
      std::cout << std::left << std::setw(8) << "set" << std::right << std::setw(19) << "AUC"
                << std::setw(19) << "Tjur R2" << std::setw(19) << "accuracy" << '\n';
      row("test", rep.test);
      row("train", rep.train);
      std::cout << std::left << std::setw(8) << "baseline" << std::right << std::setw(48) << ""
                << std::setw(10) << rep.baseline_mean << " ±" << std::setw(7) << rep.baseline_sd
                << '\n';
    } else if (*boot) {
      std::ifstream in(values_path, std::ios::binary);
      if (!in) throw Error("cannot open " + values_path + " for reading");
      std::string line;
      std::size_t line_no = 1;
      if (!std::getline(in, line)) throw ParseError(1, "header", "empty file");
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto header = io::split_csv(line);
      std::size_t col = 0;
      if (!column.empty()) {
        const auto it = std::find(header.begin(), header.end(), column);
        if (it == header.end()) throw ParseError(1, "header", "no column named '" + column + "'");
        col = static_cast<std::size_t>(it - header.begin());
      }
      const std::string col_name(header[col]);
      std::vector<double> values;
      while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = io::split_csv(line);
        if (f.size() <= col) throw ParseError(line_no, col_name, "missing field");
        values.push_back(io::parse_double(f[col], line_no, col_name));
      }
      const auto r = percentile_bootstrap(values, resamples, seed);
      std::cout << "n," << values.size() << "\nmean," << format_double(r.mean) << "\nmedian,"
                << format_double(r.median) << "\nstandard_error," << format_double(r.standard_error)
                << "\nci_low," << format_double(r.ci_low) << "\nci_high," << format_double(r.ci_high)
                << "\np_value," << format_double(r.p_value) << '\n';
      if (!out_path.empty()) {
        emit(out_path, [&](std::ostream& out) {
          out << "resampled_mean\n";
          for (double v : r.resampled_means) out << format_double(v) << '\n';
        });
      }
    } else if (*density) {
      const auto all = io::load_fixations(fixations_path);
      std::vector<Fixation> image;
      std::copy_if(all.begin(), all.end(), std::back_inserter(image),
                   [&](const Fixation& f) { return f.image_id == image_id; });
      FilterConfig config;
      config.anticipatory_latency_ms = anticipatory_ms;
      config.min_duration_ms = min_duration_ms;
      const ImageExtent extent{static_cast<double>(width_bins) * deg_per_bin,
                               static_cast<double>(height_bins) * deg_per_bin};
      // Duration statistics are taken over the whole recording, not one image.
      config.duration_stats = filter_fixations(all, extent, config).report.duration;
      auto filtered = filter_fixations(image, extent, config);
      const auto& rep = filtered.report;
      std::cerr << "fixations: " << image.size() << " for image " << image_id << ", discarded "
                << rep.anticipatory << " anticipatory, " << rep.too_short << " short, "
                << rep.too_long << " long, " << rep.outside_image << " outside\n";
      if (first_only) filtered.kept = first_fixations(filtered.kept, image_id);
      const auto d = fixation_density(filtered.kept, {width_bins, height_bins, deg_per_bin}, sigma_deg);
      io::save_grid(out_path, d);
    } else if (*kl) {
      const auto f = io::load_grid(fixation_map_path);
      const auto s = io::load_grid(salience_path);
      std::cout << format_double(kld(f, s, eps)) << '\n';
    } else if (*mass) {
      const auto s = io::load_grid(salience_path);
      const auto m = salience_mass(s, parse_rect(left_text, "--left"), parse_rect(right_text, "--right"));
      std::cout << "m_left,m_right,delta\n"
                << format_double(m.m_left) << ',' << format_double(m.m_right) << ','
                << format_double(m.delta()) << '\n';
    } else if (*contrast) {
      const auto lum = io::load_grid(luminance_path, false);
      io::save_grid(out_path, rms_contrast_map(lum, radius, !whole_image));
    } else if (*predict) {
      const auto all = io::load_voxels(voxels_path);
      const auto sel = select_voxels(all, area);
      const auto ids = list_map_ids(maps_dir);
      const auto maps = load_maps(maps_dir, ids);
      const auto prof = predict_profiles(maps, sel.voxels, {window_sigmas});
      io::MeasuredTable table;
      table.image_ids = ids;
      for (const auto& p : prof) table.responses.push_back(p.values);
      io::save_measured(out_path, table);
    } else if (*ident || *rsa) {
      const auto table = io::load_measured(measured_path);
      const auto all = io::load_voxels(voxels_path);
      const auto sel = select_voxels(all, area);
      const auto maps = load_maps(maps_dir, table.image_ids);
      const auto measured = measured_profiles(table, sel, all.size());
      const auto predicted = predict_profiles(maps, sel.voxels, {window_sigmas});
      const auto& ids = table.image_ids;

      if (*ident) {
        const auto corr = correlation_matrix(measured, predicted);
        const auto id = identify(corr);
        const auto conf = confidence(corr);
        const fs::path dir(out_dir);
        emit((dir / "correlation.csv").string(), [&](std::ostream& out) {
          out << "image_id";
          for (int i : ids) out << ',' << i;
          out << '\n';
          for (std::size_t k = 0; k < corr.size(); ++k) {
            out << ids[k];
            for (std::size_t l = 0; l < corr.size(); ++l) out << ',' << optional_text(corr.at(k, l));
            out << '\n';
          }
        });
        emit((dir / "identification.csv").string(), [&](std::ostream& out) {
          out << "image_id,correct,confidence\n";
          for (std::size_t k = 0; k < ids.size(); ++k) {
            out << ids[k] << ',' << (id.correct[k] ? 1 : 0) << ',' << optional_text(conf[k]) << '\n';
          }
        });
        emit((dir / "confidence.csv").string(), [&](std::ostream& out) {
          out << "image_id,confidence\n";
          for (std::size_t k = 0; k < ids.size(); ++k) {
            out << ids[k] << ',' << optional_text(conf[k]) << '\n';
          }
        });
        std::cout << "images," << ids.size() << "\nvoxels," << sel.voxels.size() << "\naccuracy,"
                  << format_double(id.accuracy) << '\n';
      } else {
        const auto dm = rdm(measured);
        const auto dp = rdm(predicted);
        if (!out_dir.empty()) {
          const fs::path dir(out_dir);
          emit((dir / "measured_rdm.csv").string(), [&](std::ostream& out) { write_rdm(out, ids, dm); });
          emit((dir / "predicted_rdm.csv").string(), [&](std::ostream& out) { write_rdm(out, ids, dp); });
        }
        std::cout << "kendall_tau," << format_double(rsa_kendall(dm, dp)) << '\n';
      }
    } else if (*rank) {
      const auto model = io::load_model(model_path);
      const auto ranked = rank_images(model);
      emit(out_path, [&](std::ostream& out) {
        out << "rank,image_id,score\n";
        for (std::size_t i = 0; i < ranked.size(); ++i) {
          out << i + 1 << ',' << ranked[i].image_id << ',' << format_double(ranked[i].score) << '\n';
        }
      });
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::cout.flush();
  return std::cout ? 0 : 2;
}
