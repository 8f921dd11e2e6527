#pragma once

#include <stdexcept>
#include <string>

namespace wbc {

/// Malformed structured-text document. `what()` carries the line number and
/// the dotted field path of the offending entry.
class ParseError : public std::runtime_error
{
public:
  ParseError(const std::string& message, int line, std::string field)
      : std::runtime_error(format(message, line, field)), line_(line), field_(std::move(field))
  {
  }

  int line() const { return line_; }
  const std::string& field() const { return field_; }

private:
  static std::string format(const std::string& message, int line, const std::string& field)
  {
    std::string out;
    if (line > 0)
      out += "line " + std::to_string(line) + ": ";
    if (!field.empty())
      out += "field '" + field + "': ";
    return out + message;
  }

  int line_;
  std::string field_;
};

/// Reads a whole file; throws ParseError when it cannot be opened.
std::string read_text_file(const std::string& path);

/// Number formatted with enough digits to reparse to the identical double.
std::string format_double(double value);

}  // namespace wbc
