#include "mourrekit/cli/report.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "mourrekit/errors.hpp"

namespace mk::cli {

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = fs::path(path + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw mk::Error("cannot open " + tmp.string() + " for writing");
    os << content;
    os.flush();
    if (!os) throw mk::Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw mk::Error("rename to " + path + " failed: " + ec.message());
}

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Section& Section::add(const std::string& key, const std::string& value) {
  rows_.emplace_back(key, value);
  return *this;
}
Section& Section::add(const std::string& key, double value) { return add(key, num(value)); }
Section& Section::add(const std::string& key, long value) { return add(key, std::to_string(value)); }
Section& Section::add(const std::string& key, bool value) { return add(key, std::string(value ? "true" : "false")); }

std::string Section::str() const {
  std::ostringstream os;
  os << '[' << name_ << "]\n";
  for (const auto& [k, v] : rows_) os << k << " = " << v << "\n";
  return os.str();
}

std::string config_section(const std::string& resolved, unsigned long long seed) {
  std::ostringstream os;
  os << "[run]\nseed = " << seed << "\n\n[config]\n" << resolved;
  if (!resolved.empty() && resolved.back() != '\n') os << '\n';
  return os.str();
}

}  // namespace mk::cli
