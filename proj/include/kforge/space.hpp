#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "kforge/base.hpp"

namespace kforge {

// splitmix64 step; the stream of a seeded sampler is part of the
// scenario-file contract, so the algorithm is pinned here.
std::uint64_t splitmix64_next(std::uint64_t& state);

// Draws `count` distinct n-bit values: each draw consumes ceil(n/64)
// stream words, little-endian word order, top word masked to n bits;
// duplicate values are skipped.
std::vector<Natural> sample_points(unsigned n_bits, std::size_t count,
                                   std::uint64_t seed);

class SampleSpace;
using SpacePtr = std::shared_ptr<const SampleSpace>;

class SampleSpace : public std::enable_shared_from_this<SampleSpace> {
 public:
  enum class Mode { Exhaustive, Sampled, Explicit };

  static SpacePtr exhaustive(unsigned n_bits);
  static SpacePtr sampled(unsigned n_bits, std::size_t count, std::uint64_t seed);
  static SpacePtr explicit_points(unsigned n_bits, std::vector<Natural> points);

  unsigned n_bits() const { return n_bits_; }
  std::size_t size() const { return points_.size(); }
  const Natural& point(std::size_t i) const { return points_[i]; }
  const std::vector<Natural>& points() const { return points_; }
  Mode mode() const { return mode_; }
  std::uint64_t seed() const { return seed_; }
  // Per-point weights; uniform (all 1) in this version.
  std::uint64_t weight(std::size_t) const { return 1; }

  std::string describe() const;

 private:
  SampleSpace() = default;
  unsigned n_bits_ = 0;
  Mode mode_ = Mode::Explicit;
  std::uint64_t seed_ = 0;
  std::vector<Natural> points_;
};

class Event {
 public:
  static Event none(SpacePtr space);
  static Event all(SpacePtr space);
  static Event from_bits(SpacePtr space, boost::dynamic_bitset<> bits);
  static Event from_indices(SpacePtr space, const std::vector<std::size_t>& idx);
  template <class Pred>  // Pred(index) -> bool
  static Event from_predicate(SpacePtr space, Pred&& pred) {
    boost::dynamic_bitset<> bits(space->size());
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (pred(i)) bits.set(i);
    return from_bits(std::move(space), std::move(bits));
  }

  const SpacePtr& space() const { return space_; }
  std::size_t size() const { return bits_.size(); }
  std::size_t count() const { return bits_.count(); }
  bool test(std::size_t i) const { return bits_.test(i); }
  bool empty() const { return bits_.none(); }
  bool full() const { return bits_.all(); }
  const boost::dynamic_bitset<>& bits() const { return bits_; }

  bool operator==(const Event& o) const {
    return space_ == o.space_ && bits_ == o.bits_;
  }
  bool operator!=(const Event& o) const { return !(*this == o); }

 private:
  Event(SpacePtr space, boost::dynamic_bitset<> bits)
      : space_(std::move(space)), bits_(std::move(bits)) {}
  SpacePtr space_;
  boost::dynamic_bitset<> bits_;
};

Event meet(const Event& u, const Event& v);
Event join(const Event& u, const Event& v);
Event complement(const Event& u);
Event difference(const Event& u, const Event& v);
Event sym_difference(const Event& u, const Event& v);
bool subset(const Event& u, const Event& v);

Rational measure(const Event& u);
Rational distance(const Event& u, const Event& v);
bool le_mod_eps(const Event& u, const Event& v, const Rational& eps);
bool eq_mod_eps(const Event& u, const Event& v, const Rational& eps);

// Hex encoding of the membership vector, fixed width ceil(N/4) digits,
// most significant nibble first; bit i = sample index i.
std::string event_hex(const Event& u);
boost::dynamic_bitset<> bits_from_hex(const std::string& hex, std::size_t n);

}  // namespace kforge
