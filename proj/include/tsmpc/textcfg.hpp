#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsmpc::textcfg {

// Line-oriented sectioned text: "[name]" opens a section, "#" starts a
// comment, every other non-blank line is a row of whitespace-separated
// tokens. Whitespace around "=" is collapsed first, so "key = value" and
// "key=value" tokenize identically.
struct Row {
  std::vector<std::string> tokens;
  std::size_t line_no = 0;
};

struct Section {
  std::string name;
  std::vector<Row> rows;
};

std::vector<Section> parse(std::istream& in, const std::string& origin);

// Splits "key=value" tokens; returns false when the token has no '='.
bool split_kv(const std::string& token, std::string& key, std::string& value);

double parse_double(const std::string& text, const std::string& context);
long long parse_int(const std::string& text, const std::string& context);

std::vector<std::string> split_list(const std::string& text, char sep);

}  // namespace tsmpc::textcfg
