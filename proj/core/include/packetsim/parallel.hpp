#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace packetsim {

int max_threads();
void set_max_threads(int n);

// Runs body(i) for i in [0, n) on up to max_threads() workers.
// Items must be independent; exceptions are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Blockwise reduction with a schedule-independent combine order. Items are
// folded into fixed-size blocks in index order and blocks are later combined
// in block order, so floating-point results are bit-identical for any thread
// count. `item` has signature void(std::size_t i, Partial& acc).
template <class Partial, class MakePartial, class Item>
std::vector<Partial> blockwise_partials(std::size_t n, std::size_t block,
                                        MakePartial make, Item item) {
  if (block == 0) block = 1;
  const std::size_t nblocks = (n + block - 1) / block;
  std::vector<Partial> partials;
  partials.reserve(nblocks);
  for (std::size_t b = 0; b < nblocks; ++b) partials.push_back(make());
  parallel_for(nblocks, [&](std::size_t b) {
    const std::size_t lo = b * block;
    const std::size_t hi = lo + block < n ? lo + block : n;
    for (std::size_t i = lo; i < hi; ++i) item(i, partials[b]);
  });
  return partials;
}

}  // namespace packetsim
