#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trajzone::csv {

using Row = std::vector<std::string>;

/// Streaming RFC-4180 reader: quoted fields, doubled quotes, embedded
/// newlines, CRLF or LF line endings.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Next record, or nullopt at end of input.
  std::optional<Row> next();

 private:
  std::istream& in_;
};

std::vector<Row> read_all(std::istream& in);

/// Quotes a field only when it contains a delimiter, quote or line break.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);

/// Strict parse of a whole field as a double; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);

}  // namespace trajzone::csv
