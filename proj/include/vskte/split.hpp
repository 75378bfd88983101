#pragma once

#include <string>

#include "vskte/types.hpp"

namespace vskte {

enum class SplitMode { alternating, contiguous };

SplitMode parse_split_mode(const std::string& name);
const char* to_string(SplitMode mode);

// Rounds are 0-based. Alternating puts the 1st, 3rd, 5th... rounds in fold 0.
struct FoldSplit {
  SplitMode mode = SplitMode::alternating;
  IndexList folds[2];

  static FoldSplit make(SplitMode mode, std::size_t T);
  FoldSplit swapped() const;
  const IndexList& operator[](int r) const { return folds[r]; }
};

}  // namespace vskte
