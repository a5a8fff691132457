#include "clsel/mask.hpp"

#include <bit>

#include "clsel/errors.hpp"

namespace clsel {

namespace {
constexpr int kWordBits = 64;
int word_count(int size) { return (size + kWordBits - 1) / kWordBits; }
}  // namespace

ComponentMask::ComponentMask(int size) : size_(size) {
  if (size < 0) throw ParameterError("mask size must be non-negative");
  words_.assign(word_count(size), 0);
}

ComponentMask ComponentMask::all_ones(int size) {
  ComponentMask m(size);
  for (int i = 0; i < size; ++i) m.set(i, true);
  return m;
}

ComponentMask ComponentMask::from_string(const std::string& bits) {
  ComponentMask m(static_cast<int>(bits.size()));
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      m.set(static_cast<int>(i), true);
    } else if (bits[i] != '0') {
      throw ParameterError("mask string must contain only '0' and '1'");
    }
  }
  return m;
}

ComponentMask ComponentMask::from_indices(int size,
                                          const std::vector<int>& active) {
  ComponentMask m(size);
  for (int a : active) m.set(a, true);
  return m;
}

ComponentMask ComponentMask::from_integer(int size, std::uint64_t value) {
  if (size > 64) throw ParameterError("from_integer supports at most 64 bits");
  ComponentMask m(size);
  for (int i = 0; i < size; ++i) m.set(i, (value >> i) & 1u);
  return m;
}

bool ComponentMask::test(int m) const {
  if (m < 0 || m >= size_) throw ParameterError("mask index out of range");
  return (words_[m / kWordBits] >> (m % kWordBits)) & 1u;
}

void ComponentMask::set(int m, bool value) {
  if (m < 0 || m >= size_) throw ParameterError("mask index out of range");
  const std::uint64_t bit = 1ULL << (m % kWordBits);
  if (value) {
    words_[m / kWordBits] |= bit;
  } else {
    words_[m / kWordBits] &= ~bit;
  }
}

int ComponentMask::count() const {
  int c = 0;
  for (auto w : words_) c += std::popcount(w);
  return c;
}

std::vector<int> ComponentMask::active() const {
  std::vector<int> out;
  out.reserve(count());
  for (int m = 0; m < size_; ++m) {
    if (test(m)) out.push_back(m);
  }
  return out;
}

std::string ComponentMask::to_string() const {
  std::string s(size_, '0');
  for (int m = 0; m < size_; ++m) {
    if (test(m)) s[m] = '1';
  }
  return s;
}

std::size_t ComponentMask::hash() const {
  // FNV-1a over the words plus the size.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xFFu;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::uint64_t>(size_));
  for (auto w : words_) mix(w);
  return static_cast<std::size_t>(h);
}

}  // namespace clsel
