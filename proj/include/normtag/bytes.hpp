#pragma once

// Little-endian byte-stream helpers shared by the binary model formats.

#include <cstring>
#include <string>

#include "normtag/error.hpp"

namespace normtag::bytes {

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

inline void put_string(std::string& out, const std::string& s) {
  put<uint32_t>(out, static_cast<uint32_t>(s.size()));
  out += s;
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size())
      throw Error(ErrorCode::Truncated, "payload ends early at byte " + std::to_string(pos_));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string get_string() {
    const uint32_t n = get<uint32_t>();
    if (pos_ + n > bytes_.size())
      throw Error(ErrorCode::Truncated, "payload ends early at byte " + std::to_string(pos_));
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }
  size_t position() const { return pos_; }

 private:
  const std::string& bytes_;
  size_t pos_ = 0;
};

}  // namespace normtag::bytes
