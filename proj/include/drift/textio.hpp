#pragma once

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace drift {

/// Formats a double as decimal with 9 significant digits (data-file fields).
inline std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

/// Formats a double so that parsing reproduces the exact bit pattern
/// (run logs, which must replay losslessly).
inline std::string fmt_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Writes `content` to `path` atomically (temp file in the same directory,
/// then rename).
inline void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw std::runtime_error("rename failed: " + tmp + " -> " + path + ": " + ec.message());
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Line-oriented reader for the structured text formats used by config,
/// library, and table files. Lines are `key = v1 v2 ...`; '#' starts a
/// comment; `[section]` lines switch sections in config files.
class TextReader {
 public:
  explicit TextReader(std::string content, std::string origin = "<memory>")
      : origin_(std::move(origin)) {
    std::istringstream ss(content);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      const auto last = line.find_last_not_of(" \t\r");
      lines_.push_back({line.substr(first, last - first + 1), lineno});
    }
  }

  static TextReader from_file(const std::string& path) {
    return TextReader(read_file(path), path);
  }

  bool done() const { return pos_ >= lines_.size(); }
  const std::string& peek() const {
    if (done()) fail("unexpected end of file");
    return lines_[pos_].text;
  }
  int line_number() const { return done() ? -1 : lines_[pos_].number; }
  std::string next() {
    if (done()) fail("unexpected end of file");
    return lines_[pos_++].text;
  }

  /// Consumes the next line, which must be `key = ...`, and returns the
  /// value tokens.
  std::vector<std::string> expect(const std::string& key) {
    const std::string line = next();
    std::string k;
    std::vector<std::string> vals;
    if (!split_kv(line, k, vals) || k != key)
      fail("expected '" + key + " = ...', got '" + line + "'");
    return vals;
  }

  double expect_double(const std::string& key) {
    const auto v = expect(key);
    if (v.size() != 1) fail("expected one value for '" + key + "'");
    return parse_double(v[0]);
  }

  long expect_int(const std::string& key) {
    const auto v = expect(key);
    if (v.size() != 1) fail("expected one value for '" + key + "'");
    return parse_int(v[0]);
  }

  std::string expect_string(const std::string& key) {
    const auto v = expect(key);
    if (v.size() != 1) fail("expected one value for '" + key + "'");
    return v[0];
  }

  std::vector<double> expect_doubles(const std::string& key) {
    const auto v = expect(key);
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& s : v) out.push_back(parse_double(s));
    return out;
  }

  /// Next line split into whitespace tokens parsed as doubles (data rows).
  std::vector<double> next_row() {
    const std::string line = next();
    std::istringstream ss(line);
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) out.push_back(parse_double(tok));
    return out;
  }

  double parse_double(const std::string& s) const {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE)
      fail("not a number: '" + s + "'");
    return v;
  }

  long parse_int(const std::string& s) const {
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE)
      fail("not an integer: '" + s + "'");
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream ss;
    ss << origin_;
    if (!done()) ss << ":" << lines_[pos_ < lines_.size() ? pos_ : lines_.size() - 1].number;
    ss << ": " << msg;
    throw std::runtime_error(ss.str());
  }

  static bool split_kv(const std::string& line, std::string& key,
                       std::vector<std::string>& vals) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) return false;
    std::istringstream ks(line.substr(0, eq));
    if (!(ks >> key)) return false;
    std::string extra;
    if (ks >> extra) return false;
    std::istringstream vs(line.substr(eq + 1));
    std::string tok;
    vals.clear();
    while (vs >> tok) vals.push_back(tok);
    return true;
  }

 private:
  struct Line {
    std::string text;
    int number;
  };
  std::string origin_;
  std::vector<Line> lines_;
  size_t pos_ = 0;
};

/// Key/value config file with [section] headers. Lookup key is
/// "section.key"; keys before any section header use the bare name.
class Config {
 public:
  Config() = default;
  explicit Config(TextReader reader) : origin_("<memory>") { load(reader); }

  static Config from_file(const std::string& path) {
    Config c;
    c.origin_ = path;
    TextReader r = TextReader::from_file(path);
    c.load(r);
    return c;
  }

  bool has(const std::string& key) const {
    return find(key) != nullptr;
  }

  double get_double(const std::string& key) const {
    return one(key).parse_double(value(key)[0]);
  }
  double get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }
  long get_int(const std::string& key) const {
    return one(key).parse_int(value(key)[0]);
  }
  long get_int(const std::string& key, long fallback) const {
    return has(key) ? get_int(key) : fallback;
  }
  std::string get_string(const std::string& key) const {
    if (value(key).size() != 1) raise("expected one value for '" + key + "'");
    return value(key)[0];
  }
  std::string get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
  }
  std::vector<double> get_doubles(const std::string& key) const {
    TextReader scratch("");
    std::vector<double> out;
    for (const auto& s : value(key)) out.push_back(scratch.parse_double(s));
    return out;
  }
  std::vector<double> get_doubles(const std::string& key,
                                  const std::vector<double>& fallback) const {
    return has(key) ? get_doubles(key) : fallback;
  }

  const std::string& origin() const { return origin_; }

 private:
  void load(TextReader& r) {
    std::string section;
    while (!r.done()) {
      const std::string line = r.next();
      if (line.size() >= 2 && line.front() == '[' && line.back() == ']') {
        section = line.substr(1, line.size() - 2);
        continue;
      }
      std::string key;
      std::vector<std::string> vals;
      if (!TextReader::split_kv(line, key, vals))
        r.fail("expected 'key = value' or '[section]', got '" + line + "'");
      entries_.push_back({section.empty() ? key : section + "." + key, vals});
    }
  }

  const std::vector<std::string>* find(const std::string& key) const {
    for (const auto& e : entries_)
      if (e.key == key) return &e.values;
    return nullptr;
  }
  const std::vector<std::string>& value(const std::string& key) const {
    const auto* v = find(key);
    if (!v) raise("missing key '" + key + "'");
    return *v;
  }
  TextReader one(const std::string& key) const {
    if (value(key).size() != 1) raise("expected one value for '" + key + "'");
    return TextReader("");
  }
  [[noreturn]] void raise(const std::string& msg) const {
    throw std::runtime_error(origin_ + ": " + msg);
  }

  struct Entry {
    std::string key;
    std::vector<std::string> values;
  };
  std::string origin_;
  std::vector<Entry> entries_;
};

}  // namespace drift
