#pragma once

#include <stdexcept>
#include <string>

namespace sgc {

// Raised by the binary readers (checkpoints, tensor files). kind() lets
// callers tell a wrong-format file from a damaged one without string-matching
// the message; what() always names the offending path.
class IoError : public std::runtime_error {
 public:
  enum class Kind {
    kOpen,               // file missing or unreadable
    kBadMagic,           // not this format at all
    kBadVersion,         // recognized format, unsupported version
    kTruncated,          // ended mid-record
    kDimensionOverflow,  // header sizes exceed sane bounds
    kParse,              // malformed header or field contents
  };

  IoError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace sgc
