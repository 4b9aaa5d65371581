#pragma once

#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace redspider {

using elem_id = std::uint32_t;

// Process-global symbol table. Interning is global so that constants keep the
// same id across structures and unions identify them automatically.
class interner {
 public:
  static interner& instance() {
    static interner it;
    return it;
  }

  elem_id intern(std::string_view name) {
    std::lock_guard<std::mutex> lock(mu_);
    auto found = index_.find(std::string(name));
    if (found != index_.end()) return found->second;
    elem_id id = static_cast<elem_id>(names_.size());
    names_.emplace_back(name);
    index_.emplace(names_.back(), id);
    return id;
  }

  const std::string& name(elem_id id) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (id >= names_.size()) throw std::out_of_range("unknown element id");
    return names_[id];
  }

 private:
  interner() = default;
  mutable std::mutex mu_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, elem_id> index_;
};

inline elem_id intern(std::string_view name) {
  return interner::instance().intern(name);
}

inline const std::string& name_of(elem_id id) {
  return interner::instance().name(id);
}

enum class hue { green, red };

inline hue other(hue c) { return c == hue::green ? hue::red : hue::green; }

inline const char* hue_prefix(hue c) { return c == hue::green ? "G:" : "R:"; }

}  // namespace redspider
