#include "simnet/sim/time_event_set.h"

#include <stdexcept>

namespace simnet::sim {

void TimeEventSet::Insert(TimeEvent event) {
  if (!events_.insert(std::move(event)).second) {
    throw std::logic_error("duplicate (expiry, seq) in TimeEventSet");
  }
}

bool TimeEventSet::Erase(const EventKey& key) {
  auto it = events_.find(key);
  if (it == events_.end()) return false;
  events_.erase(it);
  return true;
}

bool TimeEventSet::Contains(const EventKey& key) const {
  return events_.find(key) != events_.end();
}

const TimeEvent* TimeEventSet::Head() const {
  return events_.empty() ? nullptr : &*events_.begin();
}

TimeEvent TimeEventSet::PopHead() {
  if (events_.empty()) throw std::logic_error("PopHead on empty TimeEventSet");
  auto node = events_.extract(events_.begin());
  return std::move(node.value());
}

}  // namespace simnet::sim
