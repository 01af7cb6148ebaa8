#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mk::cli {

// Writes to a sibling temporary file and renames it over the target.
void atomic_write(const std::string& path, const std::string& content);

std::string num(double v);

// "[name]" followed by "key = value" lines.
class Section {
 public:
  explicit Section(std::string name) : name_(std::move(name)) {}
  Section& add(const std::string& key, const std::string& value);
  Section& add(const std::string& key, double value);
  Section& add(const std::string& key, long value);
  Section& add(const std::string& key, int value) { return add(key, static_cast<long>(value)); }
  Section& add(const std::string& key, const char* value) { return add(key, std::string(value)); }
  Section& add(const std::string& key, bool value);
  std::string str() const;

 private:
  std::string name_;
  std::vector<std::pair<std::string, std::string>> rows_;
};

std::string config_section(const std::string& resolved, unsigned long long seed);

}  // namespace mk::cli
