#include "gmc/score_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_set>

namespace gmc {

namespace {

// Splits one CSV line on commas. No quoting: ids are plain tokens here.
std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_finite(const std::string& field, const char* column,
                    std::size_t line_no) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw score_parse_error(line_no, std::string(column) + " value '" + field +
                                         "' is not a number");
  if (!std::isfinite(value))
    throw score_parse_error(line_no, std::string(column) + " value '" + field +
                                         "' is not finite");
  return value;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::vector<double> ScoreFile::preds() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const ScoreRecord& r : rows) out.push_back(r.pred);
  return out;
}

std::vector<double> ScoreFile::gts() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const ScoreRecord& r : rows) out.push_back(r.gt);
  return out;
}

ScoreFile parse_score_file(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw score_parse_error(1, "empty input, expected header 'id,pred,gt'");
  if (strip_cr(line) != "id,pred,gt")
    throw score_parse_error(1, "expected header 'id,pred,gt', got '" +
                                   strip_cr(line) + "'");

  ScoreFile file;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 3)
      throw score_parse_error(
          line_no, "expected 3 fields, got " + std::to_string(fields.size()));
    ScoreRecord rec;
    rec.id = fields[0];
    if (rec.id.empty()) throw score_parse_error(line_no, "empty id");
    if (!seen.insert(rec.id).second)
      throw score_parse_error(line_no, "duplicate id '" + rec.id + "'");
    rec.pred = parse_finite(fields[1], "pred", line_no);
    rec.gt = parse_finite(fields[2], "gt", line_no);
    file.rows.push_back(std::move(rec));
  }
  return file;
}

ScoreFile load_score_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw score_parse_error(0, "cannot open '" + path + "'");
  return parse_score_file(in);
}

}  // namespace gmc
