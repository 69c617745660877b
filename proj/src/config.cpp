#include "satqkd/config.hpp"

#include <sstream>

#include "satqkd/util.hpp"

namespace satqkd {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

ConfigDoc ConfigDoc::parse(std::string_view text) {
  ConfigDoc doc;
  std::string current;  // global (unnamed) section until a header appears
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(
        pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++lineno;

    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ValidationError("config",
                              "malformed section header at line " +
                                  std::to_string(lineno) + ": " + line);
      }
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      doc.set(current, "", "");  // ensure section exists even if empty
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config", "expected `key = value` at line " +
                                          std::to_string(lineno) + ": " + line);
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    // strip trailing inline comment
    std::size_t hash = value.find('#');
    if (hash != std::string::npos) value = trim(value.substr(0, hash));
    if (key.empty()) {
      throw ValidationError(
          "config", "empty key at line " + std::to_string(lineno));
    }
    doc.set(current, key, value);
  }
  return doc;
}

ConfigDoc::Section* ConfigDoc::find(const std::string& name) {
  for (auto& s : sections_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const ConfigDoc::Section* ConfigDoc::find(const std::string& name) const {
  for (const auto& s : sections_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::optional<std::string> ConfigDoc::get(const std::string& section,
                                          const std::string& key) const {
  const Section* s = find(section);
  if (!s) return std::nullopt;
  for (const auto& [k, v] : s->entries) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void ConfigDoc::set(const std::string& section, const std::string& key,
                    const std::string& value) {
  Section* s = find(section);
  if (!s) {
    sections_.push_back({section, {}});
    s = &sections_.back();
  }
  if (key.empty()) return;
  for (auto& [k, v] : s->entries) {
    if (k == key) {
      v = value;
      return;
    }
  }
  s->entries.emplace_back(key, value);
}

std::vector<std::string> ConfigDoc::keys(const std::string& section) const {
  std::vector<std::string> out;
  if (const Section* s = find(section)) {
    out.reserve(s->entries.size());
    for (const auto& [k, v] : s->entries) out.push_back(k);
  }
  return out;
}

std::vector<std::string> ConfigDoc::sections() const {
  std::vector<std::string> out;
  out.reserve(sections_.size());
  for (const auto& s : sections_) out.push_back(s.name);
  return out;
}

std::string ConfigDoc::serialize() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& s : sections_) {
    if (!first) os << "\n";
    first = false;
    if (!s.name.empty()) os << "[" << s.name << "]\n";
    for (const auto& [k, v] : s.entries) os << k << " = " << v << "\n";
  }
  return os.str();
}

}  // namespace satqkd
