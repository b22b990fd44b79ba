#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "queueformer/errors.hpp"

namespace qf {

// Symbols are indices into an Alphabet. The blank is a real symbol like any
// other; only its index is distinguished.
using Symbol = std::int32_t;

class Alphabet {
 public:
  // Symbol names in order. Must contain "0", "1" and "_" (the blank).
  static Alphabet from_names(const std::vector<std::string>& names) {
    Alphabet a;
    for (const auto& name : names) {
      if (name.empty()) throw ValidationError("empty symbol name");
      if (a.index_.count(name)) throw ValidationError("duplicate symbol '" + name + "'");
      a.index_.emplace(name, static_cast<Symbol>(a.names_.size()));
      a.names_.push_back(name);
    }
    a.zero_ = a.lookup_required("0");
    a.one_ = a.lookup_required("1");
    a.blank_ = a.lookup_required("_");
    return a;
  }

  // The minimal alphabet {0, 1, _}.
  static Alphabet binary() { return from_names({"0", "1", "_"}); }

  int size() const { return static_cast<int>(names_.size()); }
  Symbol zero() const { return zero_; }
  Symbol one() const { return one_; }
  Symbol blank() const { return blank_; }

  const std::string& name(Symbol s) const {
    if (s < 0 || s >= size()) throw IndexOutOfRange("symbol index " + std::to_string(s));
    return names_[static_cast<std::size_t>(s)];
  }

  bool has(const std::string& name) const { return index_.count(name) > 0; }

  Symbol symbol(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ValidationError("unknown symbol '" + name + "'");
    return it->second;
  }

  // True when this is exactly {0,1,_} in some order (required by the
  // transformer builder, whose embedding is a 3-way one-hot).
  bool is_binary_blank() const { return size() == 3; }

  const std::vector<std::string>& names() const { return names_; }

  // Maps a 0/1 input string to symbols.
  std::vector<Symbol> encode_bits(const std::string& bits) const {
    std::vector<Symbol> out;
    out.reserve(bits.size());
    for (char c : bits) {
      if (c == '0') {
        out.push_back(zero_);
      } else if (c == '1') {
        out.push_back(one_);
      } else {
        throw ValidationError(std::string("input contains non-binary character '") + c + "'");
      }
    }
    return out;
  }

  bool operator==(const Alphabet& other) const { return names_ == other.names_; }

 private:
  Symbol lookup_required(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ValidationError("alphabet must contain '" + name + "'");
    return it->second;
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, Symbol> index_;
  Symbol zero_ = 0, one_ = 0, blank_ = 0;
};

}  // namespace qf
