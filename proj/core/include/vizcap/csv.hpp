#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vizcap::csv {

using Record = std::vector<std::string>;

// RFC-4180 style reader: comma delimiter, optional double-quoted fields with
// "" escapes, embedded newlines inside quotes, LF or CRLF record endings.
// Lines that are completely empty are skipped. Throws ParseError (location =
// 1-based physical line) on an unterminated quote or invalid UTF-8.
std::vector<Record> ParseRecords(std::string_view text);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string EscapeField(std::string_view field);
std::string WriteRecords(const std::vector<Record>& records);

bool IsValidUtf8(std::string_view text);

}  // namespace vizcap::csv
