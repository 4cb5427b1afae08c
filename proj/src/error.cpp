#include "homobl/error.hpp"

namespace homobl {

namespace {

std::string join_messages(const std::vector<std::string>& m) {
  if (m.size() == 1) return m.front();
  std::string out = std::to_string(m.size()) + " configuration errors:";
  for (const auto& s : m) out += "\n  " + s;
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> messages)
    : Error(join_messages(messages)), messages_(std::move(messages)) {}

}  // namespace homobl
