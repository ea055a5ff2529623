#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmc {

/// Parse failure for a score CSV; `line` is 1-based (line 1 is the header).
class score_parse_error : public std::runtime_error {
 public:
  score_parse_error(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ScoreRecord {
  std::string id;
  double pred = 0.0;
  double gt = 0.0;
};

/// Contents of a `id,pred,gt` CSV. Ids are unique; pred/gt are finite.
struct ScoreFile {
  std::vector<ScoreRecord> rows;

  std::vector<double> preds() const;
  std::vector<double> gts() const;
  std::size_t size() const { return rows.size(); }
};

/// Reads a score CSV from a stream. Requires the exact header `id,pred,gt`,
/// three fields per row, finite numeric pred/gt, and unique ids. Trailing
/// blank lines are ignored; any other malformation throws score_parse_error
/// with the offending line number.
ScoreFile parse_score_file(std::istream& in);

/// Convenience wrapper; throws score_parse_error (line 0) if the file cannot
/// be opened.
ScoreFile load_score_file(const std::string& path);

}  // namespace gmc
