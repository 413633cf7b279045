#include "likelihood.hpp"

namespace clpm {

DyadTable::DyadTable(const EventList& events) : num_nodes_(events.num_nodes()) {
  const std::size_t n = num_nodes_;
  const std::size_t dyads = n < 2 ? 0 : n * (n - 1) / 2;
  std::vector<std::size_t> counts(dyads, 0);
  for (const auto& e : events.events()) ++counts[dyad_index(e.a, e.b, n)];
  start_.assign(dyads + 1, 0);
  for (std::size_t d = 0; d < dyads; ++d) start_[d + 1] = start_[d] + counts[d];
  times_.resize(events.size());
  std::vector<std::size_t> cursor(start_.begin(), start_.end() - 1);
  // Events arrive time-sorted, so each dyad's slice ends up sorted too.
  for (const auto& e : events.events()) times_[cursor[dyad_index(e.a, e.b, n)]++] = e.time;
}

std::span<const double> DyadTable::times(NodeId a, NodeId b) const {
  if (a > b) std::swap(a, b);
  const std::size_t d = dyad_index(a, b, num_nodes_);
  return {times_.data() + start_[d], start_[d + 1] - start_[d]};
}

}  // namespace clpm
