#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "flowplan/graph.hpp"

namespace flowplan {

// Binary min-heap addressable by vertex id, with decrease-key.  Ties on the
// key are broken toward the smaller id so extraction order is deterministic.
template <typename Key>
class AddressableHeap {
 public:
  explicit AddressableHeap(std::size_t capacity) : pos_(capacity, kAbsent) {}

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  bool contains(VertexId v) const { return pos_[static_cast<std::size_t>(v)] != kAbsent; }
  Key key(VertexId v) const { return heap_[pos_at(v)].key; }

  void insert(VertexId v, Key k) {
    if (contains(v)) throw std::logic_error("heap: insert of contained vertex");
    pos_[static_cast<std::size_t>(v)] = static_cast<std::int32_t>(heap_.size());
    heap_.push_back({k, v});
    sift_up(heap_.size() - 1);
  }

  void decrease_key(VertexId v, Key k) {
    const std::size_t i = pos_at(v);
    if (heap_[i].key < k) throw std::logic_error("heap: decrease_key would increase the key");
    heap_[i].key = k;
    sift_up(i);
  }

  std::pair<VertexId, Key> extract_min() {
    if (heap_.empty()) throw std::logic_error("heap: extract_min on empty heap");
    const Node top = heap_.front();
    pos_[static_cast<std::size_t>(top.id)] = kAbsent;
    if (heap_.size() > 1) {
      heap_.front() = heap_.back();
      pos_[static_cast<std::size_t>(heap_.front().id)] = 0;
    }
    heap_.pop_back();
    if (!heap_.empty()) sift_down(0);
    return {top.id, top.key};
  }

 private:
  struct Node {
    Key key;
    VertexId id;
  };
  static constexpr std::int32_t kAbsent = -1;

  std::size_t pos_at(VertexId v) const {
    const auto p = pos_[static_cast<std::size_t>(v)];
    if (p == kAbsent) throw std::logic_error("heap: vertex not contained");
    return static_cast<std::size_t>(p);
  }

  static bool less(const Node& a, const Node& b) {
    return a.key < b.key || (a.key == b.key && a.id < b.id);
  }

  void place(std::size_t i, const Node& n) {
    heap_[i] = n;
    pos_[static_cast<std::size_t>(n.id)] = static_cast<std::int32_t>(i);
  }

  void sift_up(std::size_t i) {
    const Node n = heap_[i];
    while (i > 0) {
      const std::size_t parent = (i - 1) / 2;
      if (!less(n, heap_[parent])) break;
      place(i, heap_[parent]);
      i = parent;
    }
    place(i, n);
  }

  void sift_down(std::size_t i) {
    const Node n = heap_[i];
    const std::size_t count = heap_.size();
    while (true) {
      std::size_t child = 2 * i + 1;
      if (child >= count) break;
      if (child + 1 < count && less(heap_[child + 1], heap_[child])) ++child;
      if (!less(heap_[child], n)) break;
      place(i, heap_[child]);
      i = child;
    }
    place(i, n);
  }

  std::vector<Node> heap_;
  std::vector<std::int32_t> pos_;
};

}  // namespace flowplan
