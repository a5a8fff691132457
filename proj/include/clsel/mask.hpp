#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace clsel {

// Binary composition rule over M sub-likelihood components. Equality and
// hashing are bitwise; the all-zero mask is representable but treated as
// degenerate by the estimator.
class ComponentMask {
 public:
  ComponentMask() = default;
  explicit ComponentMask(int size);

  static ComponentMask all_ones(int size);
  static ComponentMask from_string(const std::string& bits);
  static ComponentMask from_indices(int size, const std::vector<int>& active);
  // Bit m of value becomes component m; used by exhaustive enumeration.
  static ComponentMask from_integer(int size, std::uint64_t value);

  int size() const { return size_; }
  bool test(int m) const;
  void set(int m, bool value);
  int count() const;
  bool any() const { return count() > 0; }
  std::vector<int> active() const;
  std::string to_string() const;
  std::size_t hash() const;

  friend bool operator==(const ComponentMask& a, const ComponentMask& b) {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }
  friend bool operator!=(const ComponentMask& a, const ComponentMask& b) {
    return !(a == b);
  }

 private:
  int size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct ComponentMaskHash {
  std::size_t operator()(const ComponentMask& m) const { return m.hash(); }
};

}  // namespace clsel
