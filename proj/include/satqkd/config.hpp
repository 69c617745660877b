#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace satqkd {

// Minimal INI-style document: [section] headers, key = value lines,
// '#' or ';' comments, blank lines ignored. Section and key order preserved
// on serialize so round trips are stable.
class ConfigDoc {
 public:
  static ConfigDoc parse(std::string_view text);  // throws ValidationError

  std::optional<std::string> get(const std::string& section,
                                 const std::string& key) const;
  void set(const std::string& section, const std::string& key,
           const std::string& value);

  // All keys present in a section, in file order.
  std::vector<std::string> keys(const std::string& section) const;
  std::vector<std::string> sections() const;

  std::string serialize() const;

 private:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
  };
  std::vector<Section> sections_;
  Section* find(const std::string& name);
  const Section* find(const std::string& name) const;
};

}  // namespace satqkd
