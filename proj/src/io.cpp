#include "chainorder/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "chainorder/error.hpp"

namespace chainorder {

namespace {

std::string read_lines_error(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  return path.string() + ":" + std::to_string(line) + ": " + what;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) fail(ErrorCode::io, "failed writing '" + path.string() + "'");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_size(std::string_view s, std::size_t& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "dim=" << data.dim() << ",kind=" << kind_name(data.kind()) << ",n=" << data.size() << "\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto r = data.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) os << ',';
      if (data.kind() == StateKind::binary)
        os << (r[j] == 1.0 ? '1' : '0');
      else
        os << format_double(r[j]);
    }
    os << '\n';
  }
  auto out = open_output(path);
  out << os.str();
  finish(out, path);
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::parse, read_lines_error(path, 1, "empty file, expected a header"));

  std::size_t dim = 0, n = 0;
  std::string kind;
  bool have_dim = false, have_kind = false, have_n = false;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      const auto eq = field.find('=');
      if (eq == std::string::npos)
        fail(ErrorCode::parse, read_lines_error(path, 1, "missing header `dim=<p>,kind=<kind>,n=<count>`"));
      const std::string key(trim(std::string_view(field).substr(0, eq)));
      const std::string_view value = trim(std::string_view(field).substr(eq + 1));
      if (key == "dim") {
        have_dim = parse_size(value, dim);
      } else if (key == "kind") {
        kind = std::string(value);
        have_kind = kind == "continuous" || kind == "binary";
      } else if (key == "n") {
        have_n = parse_size(value, n);
      } else {
        fail(ErrorCode::parse, read_lines_error(path, 1, "unknown header field '" + key + "'"));
      }
    }
  }
  if (!have_dim || !have_kind || !have_n || dim == 0)
    fail(ErrorCode::parse, read_lines_error(path, 1, "header must give dim>=1, kind=continuous|binary and n"));

  const StateKind k = parse_kind(kind);
  std::vector<double> values;
  values.reserve(dim * n);
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::size_t cols = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view cell = rest.substr(0, comma);
      double v;
      if (!parse_double(cell, v))
        fail(ErrorCode::parse, read_lines_error(path, line_no, "cannot parse '" + std::string(trim(cell)) + "'"));
      if (k == StateKind::binary && v != 0.0 && v != 1.0)
        fail(ErrorCode::parse, read_lines_error(path, line_no, "binary dataset value is not 0 or 1"));
      values.push_back(v);
      ++cols;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols != dim)
      fail(ErrorCode::parse, read_lines_error(path, line_no, "expected " + std::to_string(dim) + " values, found " +
                                                                 std::to_string(cols)));
    ++rows;
  }
  if (rows != n)
    fail(ErrorCode::parse, read_lines_error(path, line_no, "header announces " + std::to_string(n) + " rows, file has " +
                                                               std::to_string(rows)));
  return Dataset(k, dim, std::move(values));
}

void write_index_file(const std::filesystem::path& path, std::span<const std::size_t> indices,
                      const std::vector<std::pair<std::string, std::string>>& header) {
  std::ostringstream os;
  for (const auto& [key, value] : header) os << "# " << key << '=' << value << '\n';
  for (std::size_t i : indices) os << i << '\n';
  auto out = open_output(path);
  out << os.str();
  finish(out, path);
}

IndexFile read_index_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  IndexFile f;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const std::string_view body = trim(t.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string_view::npos)
        f.header[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
      continue;
    }
    std::size_t v;
    if (!parse_size(t, v))
      fail(ErrorCode::parse, read_lines_error(path, line_no, "expected a non-negative index, found '" +
                                                                 std::string(t) + "'"));
    f.indices.push_back(v);
  }
  return f;
}

void write_history_csv(const TrainHistory& history, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "step,log_likelihood,grad_norm\n";
  for (const TrainRecord& r : history.records)
    os << r.step << ',' << format_double(r.log_likelihood) << ',' << format_double(r.grad_norm) << '\n';
  auto out = open_output(path);
  out << os.str();
  finish(out, path);
}

TrainHistory read_history_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "step,log_likelihood,grad_norm")
    fail(ErrorCode::parse, read_lines_error(path, 1, "missing header `step,log_likelihood,grad_norm`"));
  TrainHistory h;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    TrainRecord r;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c) || !parse_size(a, r.step) ||
        !parse_double(b, r.log_likelihood) || !parse_double(c, r.grad_norm))
      fail(ErrorCode::parse, read_lines_error(path, line_no, "malformed history row"));
    h.records.push_back(r);
  }
  return h;
}

}  // namespace chainorder
