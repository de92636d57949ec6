#pragma once

#include <stdexcept>
#include <string>

namespace augsurv {

// All library failures surface as this type; the message is user-facing.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace augsurv
