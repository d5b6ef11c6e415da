#pragma once

#include <stdexcept>
#include <string>

namespace specfuse {

// Precondition on a numeric argument violated (empty support, zero mass, bad
// parameter combination, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// 1-based index outside its valid range.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Malformed or truncated file contents. Messages carry a byte offset or a
// line number where one is known.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem failure (open/read/write). Messages carry the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A request would exceed a configured size cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace specfuse
