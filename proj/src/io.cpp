#include "gsal/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gsal/error.hpp"

namespace gsal::io {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error("failed writing " + path.string());
}

// Reads the next line, dropping a trailing CR. Returns false at end of input.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
  if (!std::getline(in, line)) return false;
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

// Data lines after the header; blank lines are skipped.
template <typename Fn>
void for_each_record(std::istream& in, std::string_view header, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw ParseError(1, "header", "empty file");
  if (line != header) {
    throw ParseError(1, "header", "expected '" + std::string(header) + "', got '" + line + "'");
  }
  while (next_line(in, line, line_no)) {
    if (line.empty()) continue;
    fn(split_csv(line), line_no);
  }
}

void expect_fields(const std::vector<std::string_view>& fields, std::size_t n, std::size_t line) {
  if (fields.size() != n) {
    throw ParseError(line, "row",
                     "expected " + std::to_string(n) + " fields, got " +
                         std::to_string(fields.size()));
  }
}

int parse_id(std::string_view text, std::size_t line, const std::string& field) {
  const long long v = parse_integer(text, line, field);
  if (v < 0 || v > 1'000'000'000) throw ParseError(line, field, "id out of range");
  return static_cast<int>(v);
}

Side parse_side(std::string_view text, std::size_t line, const std::string& field) {
  if (text == "none") return Side::none;
  if (text == "left") return Side::left;
  if (text == "right") return Side::right;
  throw ParseError(line, field, "expected none|left|right, got '" + std::string(text) + "'");
}

Outcome parse_outcome(std::string_view text, std::size_t line) {
  if (text == "left_first") return Outcome::left_first;
  if (text == "right_first") return Outcome::right_first;
  throw ParseError(line, "outcome",
                   "expected left_first|right_first, got '" + std::string(text) + "'");
}

std::vector<double> parse_array(std::string_view text, std::size_t line, const std::string& key) {
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
    throw ParseError(line, key, "expected a bracketed array");
  }
  text = text.substr(1, text.size() - 2);
  std::vector<double> values;
  if (text.empty()) return values;
  for (auto part : split_csv(text)) values.push_back(parse_double(part, line, key));
  return values;
}

std::string format_array(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  out += ']';
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::size_t line, const std::string& field) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw ParseError(line, field, "not a number: '" + std::string(text) + "'");
  }
  if (!std::isfinite(v)) throw ParseError(line, field, "non-finite value");
  return v;
}

long long parse_integer(std::string_view text, std::size_t line, const std::string& field) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw ParseError(line, field, "not an integer: '" + std::string(text) + "'");
  }
  return v;
}

std::string_view to_string(Side side) {
  switch (side) {
    case Side::left:
      return "left";
    case Side::right:
      return "right";
    case Side::none:
      break;
  }
  return "none";
}

std::string_view to_string(Outcome outcome) {
  return outcome == Outcome::right_first ? "right_first" : "left_first";
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

// --- trials ---

std::vector<Trial> read_trials(std::istream& in) {
  std::vector<Trial> trials;
  for_each_record(in, kTrialsHeader, [&](const auto& f, std::size_t line) {
    expect_fields(f, 6, line);
    Trial t;
    t.subject_id = parse_id(f[0], line, "subject_id");
    t.left_image = parse_id(f[1], line, "left_image");
    t.right_image = parse_id(f[2], line, "right_image");
    t.task_target_side = parse_side(f[3], line, "task_target_side");
    t.familiar_side = parse_side(f[4], line, "familiar_side");
    t.outcome = parse_outcome(f[5], line);
    if (t.left_image == t.right_image) {
      throw ParseError(line, "right_image", "left and right image are the same");
    }
    trials.push_back(t);
  });
  return trials;
}

void write_trials(std::ostream& out, const std::vector<Trial>& trials) {
  out << kTrialsHeader << '\n';
  for (const auto& t : trials) {
    out << t.subject_id << ',' << t.left_image << ',' << t.right_image << ','
        << to_string(t.task_target_side) << ',' << to_string(t.familiar_side) << ','
        << to_string(t.outcome) << '\n';
  }
}

std::vector<Trial> load_trials(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_trials(in);
}

void save_trials(const std::filesystem::path& path, const std::vector<Trial>& trials) {
  auto out = open_out(path);
  write_trials(out, trials);
  finish(out, path);
}

// --- fixations ---

std::vector<Fixation> read_fixations(std::istream& in) {
  std::vector<Fixation> fixations;
  for_each_record(in, kFixationsHeader, [&](const auto& f, std::size_t line) {
    expect_fields(f, 7, line);
    Fixation x;
    x.subject_id = parse_id(f[0], line, "subject_id");
    x.image_id = parse_id(f[1], line, "image_id");
    x.x_deg = parse_double(f[2], line, "x_deg");
    x.y_deg = parse_double(f[3], line, "y_deg");
    x.duration_ms = parse_double(f[4], line, "duration_ms");
    x.latency_ms = parse_double(f[5], line, "latency_ms");
    x.ordinal = static_cast<int>(parse_integer(f[6], line, "ordinal"));
    if (!(x.duration_ms > 0.0)) throw ParseError(line, "duration_ms", "must be positive");
    if (x.ordinal < 1) throw ParseError(line, "ordinal", "must be at least 1");
    fixations.push_back(x);
  });
  return fixations;
}

void write_fixations(std::ostream& out, const std::vector<Fixation>& fixations) {
  out << kFixationsHeader << '\n';
  for (const auto& x : fixations) {
    out << x.subject_id << ',' << x.image_id << ',' << format_double(x.x_deg) << ','
        << format_double(x.y_deg) << ',' << format_double(x.duration_ms) << ','
        << format_double(x.latency_ms) << ',' << x.ordinal << '\n';
  }
}

std::vector<Fixation> load_fixations(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_fixations(in);
}

void save_fixations(const std::filesystem::path& path, const std::vector<Fixation>& fixations) {
  auto out = open_out(path);
  write_fixations(out, fixations);
  finish(out, path);
}

// --- voxels ---

std::vector<PrfVoxel> read_voxels(std::istream& in) {
  std::vector<PrfVoxel> voxels;
  for_each_record(in, kVoxelsHeader, [&](const auto& f, std::size_t line) {
    expect_fields(f, 6, line);
    PrfVoxel v;
    v.area = std::string(f[0]);
    if (v.area.empty()) throw ParseError(line, "area", "empty area label");
    v.x_c = parse_double(f[1], line, "x_c");
    v.y_c = parse_double(f[2], line, "y_c");
    v.sigma = parse_double(f[3], line, "sigma");
    v.t_value = parse_double(f[4], line, "t_value");
    v.variance_explained = parse_double(f[5], line, "variance_explained");
    if (!(v.sigma > 0.0)) throw ParseError(line, "sigma", "must be positive");
    voxels.push_back(std::move(v));
  });
  return voxels;
}

void write_voxels(std::ostream& out, const std::vector<PrfVoxel>& voxels) {
  out << kVoxelsHeader << '\n';
  for (const auto& v : voxels) {
    out << v.area << ',' << format_double(v.x_c) << ',' << format_double(v.y_c) << ','
        << format_double(v.sigma) << ',' << format_double(v.t_value) << ','
        << format_double(v.variance_explained) << '\n';
  }
}

std::vector<PrfVoxel> load_voxels(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_voxels(in);
}

void save_voxels(const std::filesystem::path& path, const std::vector<PrfVoxel>& voxels) {
  auto out = open_out(path);
  write_voxels(out, voxels);
  finish(out, path);
}

// --- measured responses ---

MeasuredTable read_measured(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw ParseError(1, "header", "empty file");
  const auto header = split_csv(line);
  if (header.empty() || header[0] != "image_id") {
    throw ParseError(1, "header", "first column must be image_id");
  }
  const std::size_t columns = header.size() - 1;
  MeasuredTable table;
  while (next_line(in, line, line_no)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    expect_fields(f, columns + 1, line_no);
    table.image_ids.push_back(parse_id(f[0], line_no, "image_id"));
    std::vector<double> row;
    row.reserve(columns);
    for (std::size_t c = 0; c < columns; ++c) {
      row.push_back(parse_double(f[c + 1], line_no, std::string(header[c + 1])));
    }
    table.responses.push_back(std::move(row));
  }
  return table;
}

void write_measured(std::ostream& out, const MeasuredTable& table) {
  if (table.image_ids.size() != table.responses.size()) {
    throw DimensionError("measured table: id and row counts differ");
  }
  const std::size_t columns = table.responses.empty() ? 0 : table.responses.front().size();
  out << "image_id";
  for (std::size_t c = 0; c < columns; ++c) out << ",v" << c;
  out << '\n';
  for (std::size_t r = 0; r < table.responses.size(); ++r) {
    if (table.responses[r].size() != columns) throw DimensionError("ragged measured table");
    out << table.image_ids[r];
    for (double v : table.responses[r]) out << ',' << format_double(v);
    out << '\n';
  }
}

MeasuredTable load_measured(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_measured(in);
}

void save_measured(const std::filesystem::path& path, const MeasuredTable& table) {
  auto out = open_out(path);
  write_measured(out, table);
  finish(out, path);
}

// --- grids ---

Grid read_grid(std::istream& in, bool require_nonnegative) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw ParseError(1, "header", "empty file");
  std::istringstream hs(line);
  std::string tag;
  std::string ws;
  std::string hs_;
  std::string ds;
  std::string extra;
  if (!(hs >> tag >> ws >> hs_ >> ds) || tag != "GRID" || (hs >> extra)) {
    throw ParseError(1, "header", "expected 'GRID w h deg_per_bin'");
  }
  const long long w = parse_integer(ws, 1, "width");
  const long long h = parse_integer(hs_, 1, "height");
  const double deg = parse_double(ds, 1, "deg_per_bin");
  if (w <= 0 || h <= 0) throw ParseError(1, "header", "grid dimensions must be positive");
  if (!(deg > 0.0)) throw ParseError(1, "deg_per_bin", "must be positive");

  const auto width = static_cast<std::size_t>(w);
  const auto height = static_cast<std::size_t>(h);
  std::vector<double> values;
  values.reserve(width * height);
  for (std::size_t row = 0; row < height; ++row) {
    if (!next_line(in, line, line_no)) {
      throw ParseError(line_no + 1, "row " + std::to_string(row),
                       "expected " + std::to_string(height) + " data lines, got " +
                           std::to_string(row));
    }
    std::size_t count = 0;
    std::size_t pos = 0;
    const std::string_view sv(line);
    while (pos < sv.size()) {
      const auto next = sv.find(' ', pos);
      const auto token = sv.substr(pos, next == std::string_view::npos ? sv.npos : next - pos);
      const std::string field = "column " + std::to_string(count);
      const double v = parse_double(token, line_no, field);
      if (require_nonnegative && v < 0.0) throw ParseError(line_no, field, "negative value");
      values.push_back(v);
      ++count;
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
    if (count != width) {
      throw ParseError(line_no, "row " + std::to_string(row),
                       "expected " + std::to_string(width) + " values, got " +
                           std::to_string(count));
    }
  }
  while (next_line(in, line, line_no)) {
    if (!line.empty()) throw ParseError(line_no, "trailer", "unexpected data after grid");
  }
  return Grid(width, height, deg, std::move(values));
}

void write_grid(std::ostream& out, const Grid& grid) {
  out << "GRID " << grid.width() << ' ' << grid.height() << ' '
      << format_double(grid.deg_per_bin()) << '\n';
  std::string row;
  for (std::size_t y = 0; y < grid.height(); ++y) {
    row.clear();
    for (std::size_t x = 0; x < grid.width(); ++x) {
      if (x) row += ' ';
      row += format_double(grid.at(x, y));
    }
    out << row << '\n';
  }
}

Grid load_grid(const std::filesystem::path& path, bool require_nonnegative) {
  auto in = open_in(path);
  return read_grid(in, require_nonnegative);
}

void save_grid(const std::filesystem::path& path, const Grid& grid) {
  auto out = open_out(path);
  write_grid(out, grid);
  finish(out, path);
}

// --- model ---

GlobalSalienceModel read_model(std::istream& in) {
  static constexpr std::string_view kKeys[] = {"M", "K", "C", "w", "tau", "phi", "s"};
  std::string line;
  std::size_t line_no = 0;
  std::size_t next_key = 0;
  long long m = 0;
  long long k = 0;
  GlobalSalienceModel model;
  while (next_line(in, line, line_no)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "line", "expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string_view value = std::string_view(line).substr(eq + 1);
    if (next_key >= std::size(kKeys) || key != kKeys[next_key]) {
      throw ParseError(line_no, key,
                       next_key < std::size(kKeys)
                           ? "expected key '" + std::string(kKeys[next_key]) + "'"
                           : "unexpected key");
    }
    ++next_key;
    if (key == "M") {
      m = parse_integer(value, line_no, key);
    } else if (key == "K") {
      k = parse_integer(value, line_no, key);
    } else if (key == "C") {
      model.C = parse_double(value, line_no, key);
    } else if (key == "w") {
      model.w = parse_array(value, line_no, key);
    } else if (key == "tau") {
      model.tau = parse_double(value, line_no, key);
    } else if (key == "phi") {
      model.phi = parse_double(value, line_no, key);
    } else {
      model.s = parse_array(value, line_no, key);
    }
  }
  if (next_key != std::size(kKeys)) {
    throw ParseError(line_no, std::string(kKeys[next_key]), "missing key");
  }
  if (m < 0 || static_cast<std::size_t>(m) != model.w.size()) {
    throw ParseError(line_no, "w", "length does not match M=" + std::to_string(m));
  }
  if (k < 0 || static_cast<std::size_t>(k) != model.s.size()) {
    throw ParseError(line_no, "s", "length does not match K=" + std::to_string(k));
  }
  return model;
}

void write_model(std::ostream& out, const GlobalSalienceModel& model) {
  out << "M=" << model.w.size() << '\n'
      << "K=" << model.s.size() << '\n'
      << "C=" << format_double(model.C) << '\n'
      << "w=" << format_array(model.w) << '\n'
      << "tau=" << format_double(model.tau) << '\n'
      << "phi=" << format_double(model.phi) << '\n'
      << "s=" << format_array(model.s) << '\n';
}

GlobalSalienceModel load_model(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_model(in);
}

void save_model(const std::filesystem::path& path, const GlobalSalienceModel& model) {
  auto out = open_out(path);
  write_model(out, model);
  finish(out, path);
}

}  // namespace gsal::io
