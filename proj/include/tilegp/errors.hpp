#pragma once

#include <stdexcept>
#include <string>

namespace tilegp {

/// Thrown when a Cholesky factorization meets a nonpositive pivot.
/// Carries the index of the diagonal tile that failed.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& msg, int tile_index)
      : std::runtime_error(msg), tile_index_(tile_index) {}
  int tile_index() const { return tile_index_; }

 private:
  int tile_index_;
};

}  // namespace tilegp
