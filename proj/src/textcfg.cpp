#include "tsmpc/textcfg.hpp"

#include <cctype>
#include <charconv>
#include <istream>
#include <sstream>

#include "tsmpc/error.hpp"

namespace tsmpc::textcfg {

namespace {

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::string collapse_equals(const std::string& line) {
  std::string out;
  out.reserve(line.size());
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '=') {
      while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
      out.push_back('=');
      while (i + 1 < line.size() && std::isspace(static_cast<unsigned char>(line[i + 1]))) ++i;
    } else {
      out.push_back(line[i]);
    }
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::vector<Section> parse(std::istream& in, const std::string& origin) {
  std::vector<Section> sections;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      require(body.back() == ']', Errc::parse_error,
              origin + ":" + std::to_string(line_no) + ": unterminated section header");
      sections.push_back({trim(body.substr(1, body.size() - 2)), {}});
      continue;
    }
    require(!sections.empty(), Errc::parse_error,
            origin + ":" + std::to_string(line_no) + ": content before any [section]");
    Row row;
    row.line_no = line_no;
    std::istringstream toks(collapse_equals(body));
    std::string tok;
    while (toks >> tok) row.tokens.push_back(tok);
    sections.back().rows.push_back(std::move(row));
  }
  return sections;
}

bool split_kv(const std::string& token, std::string& key, std::string& value) {
  const auto pos = token.find('=');
  if (pos == std::string::npos) return false;
  key = token.substr(0, pos);
  value = token.substr(pos + 1);
  return true;
}

double parse_double(const std::string& text, const std::string& context) {
  double v = 0.0;
  const auto* begin = text.data();
  const auto* end = begin + text.size();
  const auto res = std::from_chars(begin, end, v);
  require(res.ec == std::errc() && res.ptr == end, Errc::parse_error,
          context + ": not a number: '" + text + "'");
  return v;
}

long long parse_int(const std::string& text, const std::string& context) {
  long long v = 0;
  const auto* begin = text.data();
  const auto* end = begin + text.size();
  const auto res = std::from_chars(begin, end, v);
  require(res.ec == std::errc() && res.ptr == end, Errc::parse_error,
          context + ": not an integer: '" + text + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace tsmpc::textcfg
