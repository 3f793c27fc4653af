#include "vizcap/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "vizcap/csv.hpp"
#include "vizcap/error.hpp"

namespace vizcap {

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool IsBlank(std::string_view s) { return Trim(s).empty(); }

}  // namespace

std::optional<double> ParseNumber(std::string_view text) {
  text = Trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  // from_chars also accepts "inf"/"nan" spellings; only digits, sign, point and exponent pass.
  for (char c : text) {
    const bool ok = (c >= '0' && c <= '9') || c == '.' || c == '-' || c == 'e' || c == 'E' || c == '+';
    if (!ok) return std::nullopt;
  }
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

DataTable::DataTable(std::string source_name, std::vector<ColumnSpec> columns,
                     std::vector<std::vector<std::string>> rows)
    : source_name_(std::move(source_name)), columns_(std::move(columns)), rows_(std::move(rows)) {
  std::unordered_set<std::string> names;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name.empty()) {
      throw Error(ErrorCode::kValidation, "column " + std::to_string(i) + " has an empty name");
    }
    if (!names.insert(columns_[i].name).second) {
      throw Error(ErrorCode::kValidation, "duplicate column name '" + columns_[i].name + "'");
    }
    columns_[i].index = i;
  }
  numbers_.resize(columns_.size());
  integral_.assign(columns_.size(), false);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].size() != columns_.size()) {
      throw ParseError("row " + std::to_string(r + 1) + " has " + std::to_string(rows_[r].size()) +
                           " cells, expected " + std::to_string(columns_.size()),
                       r + 1);
    }
  }
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].kind != ColumnKind::kNumeric) continue;
    auto& parsed = numbers_[c];
    parsed.reserve(rows_.size());
    bool whole = true;
    for (const auto& row : rows_) {
      if (IsBlank(row[c])) {
        parsed.emplace_back(std::nullopt);
        continue;
      }
      const auto value = ParseNumber(row[c]);
      if (!value) {
        throw Error(ErrorCode::kType, "column '" + columns_[c].name + "' has non-numeric cell '" +
                                          row[c] + "'");
      }
      whole = whole && std::trunc(*value) == *value;
      parsed.emplace_back(value);
    }
    integral_[c] = whole;
  }
}

const ColumnSpec& DataTable::column(std::string_view name) const {
  const auto index = find_column(name);
  if (!index) {
    throw Error(ErrorCode::kSelection, "unknown column '" + std::string(name) + "'");
  }
  return columns_[*index];
}

std::optional<std::size_t> DataTable::find_column(std::string_view name) const {
  for (const auto& col : columns_) {
    if (col.name == name) return col.index;
  }
  return std::nullopt;
}

std::optional<double> DataTable::number(std::size_t row, std::size_t col) const {
  if (columns_[col].kind != ColumnKind::kNumeric) return std::nullopt;
  return numbers_[col][row];
}

std::shared_ptr<const DataTable> LoadCsv(std::string_view bytes, const CsvOptions& options) {
  auto records = csv::ParseRecords(bytes);
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "dataset '" + options.source_name + "' is empty");
  }
  std::vector<ColumnSpec> columns;
  std::size_t first_row = 0;
  if (options.has_header) {
    for (auto& name : records.front()) {
      columns.push_back({std::string(Trim(name)), ColumnKind::kCategorical, columns.size()});
    }
    first_row = 1;
  } else {
    for (std::size_t i = 0; i < records.front().size(); ++i) {
      columns.push_back({"col_" + std::to_string(i), ColumnKind::kCategorical, i});
    }
  }
  std::vector<std::vector<std::string>> rows(std::make_move_iterator(records.begin() + first_row),
                                             std::make_move_iterator(records.end()));
  if (rows.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "dataset '" + options.source_name + "' has no data rows");
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != columns.size()) {
      throw ParseError("ragged row " + std::to_string(r + 1) + ": " + std::to_string(rows[r].size()) +
                           " cells, expected " + std::to_string(columns.size()),
                       r + 1);
    }
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    bool any_value = false;
    bool all_numeric = true;
    for (const auto& row : rows) {
      if (IsBlank(row[c])) continue;
      any_value = true;
      if (!ParseNumber(row[c])) {
        all_numeric = false;
        break;
      }
    }
    columns[c].kind = (any_value && all_numeric) ? ColumnKind::kNumeric : ColumnKind::kCategorical;
  }
  return std::make_shared<const DataTable>(options.source_name, std::move(columns), std::move(rows));
}

std::shared_ptr<const DataTable> LoadCsvFile(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return LoadCsv(buffer.str(), options);
}

std::string ToCsv(const DataTable& table) {
  std::vector<csv::Record> records;
  records.reserve(table.row_count() + 1);
  csv::Record header;
  for (const auto& col : table.columns()) header.push_back(col.name);
  records.push_back(std::move(header));
  for (const auto& row : table.rows()) records.push_back(row);
  return csv::WriteRecords(records);
}

AxisSelection SelectAxes(std::shared_ptr<const DataTable> table, const std::string& x,
                         const std::string& y, const std::optional<std::string>& label,
                         const std::string& title) {
  if (!table) throw Error(ErrorCode::kSelection, "no table");
  if (x == y) {
    throw Error(ErrorCode::kSelection, "x and y must be different columns (both '" + x + "')");
  }
  const auto& xc = table->column(x);
  const auto& yc = table->column(y);
  for (const auto* col : {&xc, &yc}) {
    if (col->kind != ColumnKind::kNumeric) {
      throw Error(ErrorCode::kType, "axis column '" + col->name + "' is not numeric");
    }
  }
  if (label) {
    const auto& lc = table->column(*label);
    if (lc.kind != ColumnKind::kCategorical) {
      throw Error(ErrorCode::kType, "label column '" + lc.name + "' is not categorical");
    }
  }
  AxisSelection selection;
  selection.x = x;
  selection.y = y;
  selection.label = label;
  selection.title = title.empty() ? x + " VS " + y : title;
  for (std::size_t r = 0; r < table->row_count(); ++r) {
    if (table->number(r, xc.index) && table->number(r, yc.index)) {
      selection.usable_rows.push_back(r);
    }
  }
  if (selection.usable_rows.size() < 3) {
    throw Error(ErrorCode::kInsufficientData,
                "need at least 3 rows with both '" + x + "' and '" + y + "', found " +
                    std::to_string(selection.usable_rows.size()));
  }
  selection.table = std::move(table);
  return selection;
}

ValueRange ColumnRange(const AxisSelection& selection, Axis axis) {
  const auto& table = *selection.table;
  const auto col = table.column(axis == Axis::kX ? selection.x : selection.y).index;
  ValueRange range;
  range.min = std::numeric_limits<double>::infinity();
  range.max = -std::numeric_limits<double>::infinity();
  for (const auto r : selection.usable_rows) {
    const double v = *table.number(r, col);
    range.min = std::min(range.min, v);
    range.max = std::max(range.max, v);
    range.integral = range.integral && std::trunc(v) == v;
  }
  return range;
}

std::vector<std::string> OtherColumns(const AxisSelection& selection) {
  std::vector<std::string> names;
  for (const auto& col : selection.table->columns()) {
    if (col.name != selection.x && col.name != selection.y) names.push_back(col.name);
  }
  return names;
}

PointSet CollectPoints(const AxisSelection& selection) {
  const auto& table = *selection.table;
  const auto xc = table.column(selection.x).index;
  const auto yc = table.column(selection.y).index;
  const std::optional<std::size_t> lc =
      selection.label ? std::optional(table.column(*selection.label).index) : std::nullopt;
  PointSet set;
  set.points.reserve(selection.usable_rows.size());
  for (const auto r : selection.usable_rows) {
    set.points.push_back({*table.number(r, xc), *table.number(r, yc)});
    set.rows.push_back(r);
    set.labels.push_back(lc ? table.cell(r, *lc) : "row " + std::to_string(r));
  }
  return set;
}

}  // namespace vizcap
