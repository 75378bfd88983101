#include "vskte/split.hpp"

#include "vskte/errors.hpp"

namespace vskte {

SplitMode parse_split_mode(const std::string& name) {
  if (name == "alternating") return SplitMode::alternating;
  if (name == "contiguous") return SplitMode::contiguous;
  fail(ErrorKind::input, "unknown split mode '" + name + "' (alternating, contiguous)");
}

const char* to_string(SplitMode mode) {
  return mode == SplitMode::alternating ? "alternating" : "contiguous";
}

FoldSplit FoldSplit::make(SplitMode mode, std::size_t T) {
  if (T < 4) fail(ErrorKind::input, "fold split needs at least 4 rounds");
  FoldSplit s;
  s.mode = mode;
  for (std::size_t t = 0; t < T; ++t) {
    int r = mode == SplitMode::alternating ? static_cast<int>(t % 2) : (t < T / 2 ? 0 : 1);
    s.folds[r].push_back(t);
  }
  return s;
}

FoldSplit FoldSplit::swapped() const {
  FoldSplit s = *this;
  std::swap(s.folds[0], s.folds[1]);
  return s;
}

}  // namespace vskte
