#include "cfmimo/csv.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cfmimo/config.hpp"

#ifndef CFMIMO_VERSION_STRING
#define CFMIMO_VERSION_STRING "unknown"
#endif

namespace cfmimo {
namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory " + path.parent_path().string() +
                    ": " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

double parse_field(std::string_view field, int line_no) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ConfigError("CSV line " + std::to_string(line_no) +
                      ": bad number '" + std::string(field) + "'");
  }
  return value;
}

// Keeps trailing zeros so every cell carries 17 significant digits.
std::string format_cell(double value) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%#.17g", value);
  return buf;
}

}  // namespace

std::string code_version() { return CFMIMO_VERSION_STRING; }

std::filesystem::path manifest_path_for(const std::filesystem::path& csv_path) {
  std::filesystem::path out = csv_path;
  out.replace_extension(".manifest");
  return out;
}

std::filesystem::path resolve_output_path(const std::string& configured) {
  const std::filesystem::path path(configured);
  const char* dir = std::getenv(kOutputDirEnv);
  if (dir == nullptr || *dir == '\0') return path;
  return std::filesystem::path(dir) / path.filename();
}

std::string render_csv(const std::vector<SweepRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const SweepRow& r : rows) {
    out += format_cell(r.snr_db);
    out += ',';
    out += format_cell(r.alpha);
    out += ',';
    out += to_string(r.precoder);
    out += ',';
    out += format_cell(r.mean_sum_rate);
    out += ',';
    out += format_cell(r.std_err);
    out += ',';
    out += format_cell(r.mean_iterations);
    out += ',';
    out += format_cell(r.flops);
    out += '\n';
  }
  return out;
}

std::string render_manifest(const SweepResult& result) {
  std::ostringstream out;
  out << "format=cfmimo-sweep-manifest/1\n";
  out << "code_version=" << code_version() << '\n';
  out << "metric=sum-rate bound log2 det(R_UC + I_n) [bit/s/Hz]\n";
  out << "snr_definition=10*log10(rho_f/sigma_w2)\n";
  out << "master_seed=" << result.config.master_seed << '\n';
  for (const auto& [key, value] : to_key_values(result.config)) {
    if (key == "workers" || key == "output_path") continue;  // never affect results
    out << "config." << key << '=' << value << '\n';
  }
  for (const CellCount& c : result.cells) {
    const std::string prefix = "cell.alpha=" + format_double(c.alpha) +
                               ".snr_db=" + format_double(c.snr_db) + "." +
                               std::string(to_string(c.precoder));
    out << prefix << ".recorded=" << c.recorded << '\n';
    out << prefix << ".skipped=" << c.skipped << '\n';
    if (!c.first_skip_reason.empty()) {
      out << prefix << ".first_skip_reason=" << c.first_skip_reason << '\n';
    }
  }
  return out.str();
}

void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
  write_file(path, render_csv(result.rows));
  write_file(manifest_path_for(path), render_manifest(result));
}

std::vector<SweepRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ConfigError("CSV header mismatch");
  }
  std::vector<SweepRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 7) {
      throw ConfigError("CSV line " + std::to_string(line_no) +
                        ": expected 7 fields");
    }
    SweepRow r;
    r.snr_db = parse_field(fields[0], line_no);
    r.alpha = parse_field(fields[1], line_no);
    r.precoder = parse_precoder_kind(fields[2]);
    r.mean_sum_rate = parse_field(fields[3], line_no);
    r.std_err = parse_field(fields[4], line_no);
    r.mean_iterations = parse_field(fields[5], line_no);
    r.flops = parse_field(fields[6], line_no);
    rows.push_back(r);
  }
  return rows;
}

std::vector<SweepRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

}  // namespace cfmimo
