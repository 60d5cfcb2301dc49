#include "dpreg/dataset.hpp"

#include <numeric>

namespace dpreg {

std::vector<std::vector<int>> split_rows(int n, int T, RandomStream& rng) {
  if (T < 1) throw InvalidParameter("split_rows: T must be >= 1");
  if (T > n) throw InvalidParameter("split_rows: T must not exceed n");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);

  const int base = n / T;
  const int extra = n % T;  // first n mod T splits take one extra row
  std::vector<std::vector<int>> splits(T);
  int pos = 0;
  for (int t = 0; t < T; ++t) {
    const int size = base + (t < extra ? 1 : 0);
    splits[t].assign(perm.begin() + pos, perm.begin() + pos + size);
    pos += size;
  }
  return splits;
}

}  // namespace dpreg
