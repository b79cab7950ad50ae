#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace brc {

/// Six significant digits, '.' decimal separator regardless of locale.
std::string format_number(double value);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void comment(std::string_view text);
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& out_;
};

}  // namespace brc
