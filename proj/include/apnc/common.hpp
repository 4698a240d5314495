#pragma once

#include <bit>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace apnc {

// All persisted binary formats are little-endian; refuse to build elsewhere.
static_assert(std::endian::native == std::endian::little,
              "apnc binary formats require a little-endian host");

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void concat_into(std::ostringstream&) {}

template <typename T, typename... Rest>
void concat_into(std::ostringstream& os, const T& head, const Rest&... rest) {
  os << head;
  concat_into(os, rest...);
}
}  // namespace detail

template <typename... Parts>
std::string concat(const Parts&... parts) {
  std::ostringstream os;
  detail::concat_into(os, parts...);
  return os.str();
}

template <typename... Parts>
[[noreturn]] void fail(const Parts&... parts) {
  throw Error(concat(parts...));
}

template <typename... Parts>
void require(bool cond, const Parts&... parts) {
  if (!cond) fail(parts...);
}

}  // namespace apnc
