#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gsal/fixation_maps.hpp"
#include "gsal/grid.hpp"
#include "gsal/pairwise_model.hpp"
#include "gsal/prf_ident.hpp"

namespace gsal::io {

inline constexpr std::string_view kTrialsHeader =
    "subject_id,left_image,right_image,task_target_side,familiar_side,outcome";
inline constexpr std::string_view kFixationsHeader =
    "subject_id,image_id,x_deg,y_deg,duration_ms,latency_ms,ordinal";
inline constexpr std::string_view kVoxelsHeader =
    "area,x_c,y_c,sigma,t_value,variance_explained";

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text, std::size_t line, const std::string& field);
long long parse_integer(std::string_view text, std::size_t line, const std::string& field);

std::string_view to_string(Side side);
std::string_view to_string(Outcome outcome);

std::vector<Trial> read_trials(std::istream& in);
void write_trials(std::ostream& out, const std::vector<Trial>& trials);
std::vector<Trial> load_trials(const std::filesystem::path& path);
void save_trials(const std::filesystem::path& path, const std::vector<Trial>& trials);

std::vector<Fixation> read_fixations(std::istream& in);
void write_fixations(std::ostream& out, const std::vector<Fixation>& fixations);
std::vector<Fixation> load_fixations(const std::filesystem::path& path);
void save_fixations(const std::filesystem::path& path, const std::vector<Fixation>& fixations);

std::vector<PrfVoxel> read_voxels(std::istream& in);
void write_voxels(std::ostream& out, const std::vector<PrfVoxel>& voxels);
std::vector<PrfVoxel> load_voxels(const std::filesystem::path& path);
void save_voxels(const std::filesystem::path& path, const std::vector<PrfVoxel>& voxels);

/// Measured responses: one row per image, one column per voxel in
/// voxel-file order. Header `image_id,v0,v1,...`.
struct MeasuredTable {
  std::vector<int> image_ids;
  std::vector<std::vector<double>> responses;

  bool operator==(const MeasuredTable&) const = default;
};

MeasuredTable read_measured(std::istream& in);
void write_measured(std::ostream& out, const MeasuredTable& table);
MeasuredTable load_measured(const std::filesystem::path& path);
void save_measured(const std::filesystem::path& path, const MeasuredTable& table);

/// `GRID w h deg_per_bin` followed by h lines of w space-separated values.
Grid read_grid(std::istream& in, bool require_nonnegative = true);
void write_grid(std::ostream& out, const Grid& grid);
Grid load_grid(const std::filesystem::path& path, bool require_nonnegative = true);
void save_grid(const std::filesystem::path& path, const Grid& grid);

/// key=value lines: M, K, C, w=[...], tau, phi, s=[...].
GlobalSalienceModel read_model(std::istream& in);
void write_model(std::ostream& out, const GlobalSalienceModel& model);
GlobalSalienceModel load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const GlobalSalienceModel& model);

/// Comma-separated fields of one line; no quoting.
std::vector<std::string_view> split_csv(std::string_view line);

}  // namespace gsal::io
