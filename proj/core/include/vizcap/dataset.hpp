#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vizcap {

enum class ColumnKind { kNumeric, kCategorical };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kCategorical;
  std::size_t index = 0;
};

// Parsed tabular dataset. Immutable after construction, so it is shared
// between analyses (and threads) through shared_ptr<const DataTable>.
class DataTable {
 public:
  DataTable(std::string source_name, std::vector<ColumnSpec> columns,
            std::vector<std::vector<std::string>> rows);

  const std::string& source_name() const noexcept { return source_name_; }
  const std::vector<ColumnSpec>& columns() const noexcept { return columns_; }
  std::size_t row_count() const noexcept { return rows_.size(); }
  std::size_t column_count() const noexcept { return columns_.size(); }

  // Throws Error(kSelection) when the name is unknown.
  const ColumnSpec& column(std::string_view name) const;
  std::optional<std::size_t> find_column(std::string_view name) const;

  const std::string& cell(std::size_t row, std::size_t col) const { return rows_[row][col]; }
  // Parsed value of a numeric column; nullopt for an empty cell.
  std::optional<double> number(std::size_t row, std::size_t col) const;
  // True when every present value of a numeric column has a zero fractional part.
  bool integral(std::size_t col) const { return integral_[col]; }

  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }

 private:
  std::string source_name_;
  std::vector<ColumnSpec> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::vector<std::optional<double>>> numbers_;  // per column, numeric only
  std::vector<bool> integral_;
};

struct CsvOptions {
  bool has_header = true;
  std::string source_name = "dataset";
};

// Throws ParseError (location = 1-based data row) on ragged rows and
// Error(kEmptyDataset) when there are no data rows.
std::shared_ptr<const DataTable> LoadCsv(std::string_view bytes, const CsvOptions& options = {});
std::shared_ptr<const DataTable> LoadCsvFile(const std::string& path, const CsvOptions& options = {});
std::string ToCsv(const DataTable& table);

// Finite decimal literal (surrounding blanks allowed); nullopt otherwise.
std::optional<double> ParseNumber(std::string_view text);

enum class Axis { kX, kY };

struct ValueRange {
  double min = 0.0;
  double max = 0.0;
  bool integral = true;  // every value on the axis is a whole number
  friend bool operator==(const ValueRange&, const ValueRange&) = default;
};

struct AxisSelection {
  std::shared_ptr<const DataTable> table;
  std::string x;
  std::string y;
  std::optional<std::string> label;
  std::string title;
  // Rows with both x and y present, ascending.
  std::vector<std::size_t> usable_rows;
};

// Validates the axis pair and collects the usable rows. An empty title
// becomes "<x> VS <y>".
AxisSelection SelectAxes(std::shared_ptr<const DataTable> table, const std::string& x,
                         const std::string& y, const std::optional<std::string>& label = std::nullopt,
                         const std::string& title = "");

ValueRange ColumnRange(const AxisSelection& selection, Axis axis);

// All column names except x and y, in file order.
std::vector<std::string> OtherColumns(const AxisSelection& selection);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// The usable rows of a selection as points with their table row and label.
struct PointSet {
  std::vector<Point> points;
  std::vector<std::size_t> rows;
  std::vector<std::string> labels;  // label column value, or "row <i>"

  std::size_t size() const noexcept { return points.size(); }
};

PointSet CollectPoints(const AxisSelection& selection);

}  // namespace vizcap
