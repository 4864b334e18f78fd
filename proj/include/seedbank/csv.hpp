#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace seedbank {

/// Shortest decimal that parses back to the same double. inf/nan spelled
/// "inf", "-inf", "nan".
std::string format_double(double v);

/// Minimal CSV row writer: fields are numbers or plain tokens (no quoting
/// needed for anything this project writes).
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  CsvWriter& field(double v);
  CsvWriter& field(std::int64_t v);
  CsvWriter& field(std::uint64_t v);
  CsvWriter& field(int v) { return field(static_cast<std::int64_t>(v)); }
  CsvWriter& field(std::string_view v);
  CsvWriter& empty_field() { return field(std::string_view{}); }
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

}  // namespace seedbank
