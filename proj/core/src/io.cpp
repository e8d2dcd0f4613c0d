#include "pagecusum/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pagecusum/errors.hpp"

namespace pagecusum {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("failed to format double");
  return std::string(buf.data(), end);
}

double parse_double(std::string_view text, std::string_view what) {
  const std::string_view t = trim(text);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || end != t.data() + t.size()) {
    throw ValidationError(std::string(what) + ": cannot parse '" + std::string(text) + "' as a number");
  }
  return value;
}

long long parse_integer(std::string_view text, std::string_view what) {
  const std::string_view t = trim(text);
  long long value = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || end != t.data() + t.size()) {
    throw ValidationError(std::string(what) + ": cannot parse '" + std::string(text) + "' as an integer");
  }
  return value;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::vector<double> read_value_column(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<double> values;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    if (line_no == 1 && t == "x") continue;
    values.push_back(parse_double(t, path.string() + ":" + std::to_string(line_no)));
  }
  return values;
}

std::string format_value_column(const std::vector<double>& values) {
  std::string out = "x\n";
  for (double v : values) {
    out += format_double(v);
    out += '\n';
  }
  return out;
}

KeyValueConfig KeyValueConfig::parse(std::string_view text, const std::set<std::string>& allowed) {
  KeyValueConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!allowed.contains(key)) throw ValidationError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (cfg.values_.contains(key)) throw ValidationError("config: duplicate key '" + key + "'");
    if (value.empty()) throw ValidationError("config: empty value for '" + key + "'");
    cfg.values_.emplace(key, value);
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path, const std::set<std::string>& allowed) {
  return parse(read_text_file(path), allowed);
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  return parse_double(*v, key);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return get_double(key).value_or(fallback);
}

std::optional<long long> KeyValueConfig::get_integer(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  return parse_integer(*v, key);
}

long long KeyValueConfig::get_integer(const std::string& key, long long fallback) const {
  return get_integer(key).value_or(fallback);
}

}  // namespace pagecusum
