#include "kforge/space.hpp"

#include <set>
#include <sstream>

namespace kforge {

std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::vector<Natural> sample_points(unsigned n_bits, std::size_t count,
                                   std::uint64_t seed) {
  if (n_bits == 0) throw Error("sample space needs n_bits >= 1");
  if (n_bits < 64 && count > (std::size_t(1) << n_bits))
    throw Error("cannot draw " + std::to_string(count) + " distinct " +
                std::to_string(n_bits) + "-bit points");
  std::uint64_t state = seed;
  std::size_t words = (n_bits + 63) / 64;
  unsigned top_bits = n_bits % 64;
  std::vector<Natural> out;
  std::set<Natural> seen;
  out.reserve(count);
  while (out.size() < count) {
    Natural v = 0;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t word = splitmix64_next(state);
      if (w + 1 == words && top_bits != 0)
        word &= (~std::uint64_t(0)) >> (64 - top_bits);
      v |= Natural(word) << (64 * w);
    }
    if (seen.insert(v).second) out.push_back(std::move(v));
  }
  return out;
}

SpacePtr SampleSpace::exhaustive(unsigned n_bits) {
  if (n_bits == 0) throw Error("sample space needs n_bits >= 1");
  if (n_bits > 20) throw Error("exhaustive space too large (n_bits > 20)");
  auto s = std::shared_ptr<SampleSpace>(new SampleSpace());
  s->n_bits_ = n_bits;
  s->mode_ = Mode::Exhaustive;
  std::size_t n = std::size_t(1) << n_bits;
  s->points_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) s->points_.emplace_back(i);
  return s;
}

SpacePtr SampleSpace::sampled(unsigned n_bits, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error("sample space needs at least one point");
  auto s = std::shared_ptr<SampleSpace>(new SampleSpace());
  s->n_bits_ = n_bits;
  s->mode_ = Mode::Sampled;
  s->seed_ = seed;
  s->points_ = sample_points(n_bits, count, seed);
  return s;
}

SpacePtr SampleSpace::explicit_points(unsigned n_bits, std::vector<Natural> points) {
  if (n_bits == 0) throw Error("sample space needs n_bits >= 1");
  if (points.empty()) throw Error("sample space needs at least one point");
  Natural limit = Natural(1) << n_bits;
  std::set<Natural> seen;
  for (const auto& p : points) {
    if (p >= limit) throw Error("point " + p.str() + " exceeds " +
                                std::to_string(n_bits) + " bits");
    if (!seen.insert(p).second) throw Error("duplicate point " + p.str());
  }
  auto s = std::shared_ptr<SampleSpace>(new SampleSpace());
  s->n_bits_ = n_bits;
  s->mode_ = Mode::Explicit;
  s->points_ = std::move(points);
  return s;
}

std::string SampleSpace::describe() const {
  std::ostringstream os;
  os << "n_bits=" << n_bits_ << " N=" << points_.size();
  switch (mode_) {
    case Mode::Exhaustive: os << " exhaustive"; break;
    case Mode::Sampled: os << " sampled seed=" << seed_; break;
    case Mode::Explicit: os << " explicit"; break;
  }
  return os.str();
}

Event Event::none(SpacePtr space) {
  boost::dynamic_bitset<> bits(space->size());
  return Event(std::move(space), std::move(bits));
}

Event Event::all(SpacePtr space) {
  boost::dynamic_bitset<> bits(space->size());
  bits.set();
  return Event(std::move(space), std::move(bits));
}

Event Event::from_bits(SpacePtr space, boost::dynamic_bitset<> bits) {
  if (bits.size() != space->size()) throw Error("event length does not match space");
  return Event(std::move(space), std::move(bits));
}

Event Event::from_indices(SpacePtr space, const std::vector<std::size_t>& idx) {
  boost::dynamic_bitset<> bits(space->size());
  for (auto i : idx) {
    if (i >= bits.size()) throw Error("sample index out of range");
    bits.set(i);
  }
  return Event(std::move(space), std::move(bits));
}

static void require_same_space(const Event& u, const Event& v) {
  if (u.space() != v.space()) throw Error("events on different sample spaces");
}

Event meet(const Event& u, const Event& v) {
  require_same_space(u, v);
  return Event::from_bits(u.space(), u.bits() & v.bits());
}

Event join(const Event& u, const Event& v) {
  require_same_space(u, v);
  return Event::from_bits(u.space(), u.bits() | v.bits());
}

Event complement(const Event& u) {
  return Event::from_bits(u.space(), ~u.bits());
}

Event difference(const Event& u, const Event& v) {
  require_same_space(u, v);
  return Event::from_bits(u.space(), u.bits() & ~v.bits());
}

Event sym_difference(const Event& u, const Event& v) {
  require_same_space(u, v);
  return Event::from_bits(u.space(), u.bits() ^ v.bits());
}

bool subset(const Event& u, const Event& v) {
  require_same_space(u, v);
  return u.bits().is_subset_of(v.bits());
}

Rational measure(const Event& u) {
  return Rational(Natural(u.count()), Natural(u.size()));
}

Rational distance(const Event& u, const Event& v) {
  return measure(sym_difference(u, v));
}

bool le_mod_eps(const Event& u, const Event& v, const Rational& eps) {
  if (eps < 0 || eps > 1) throw Error("eps must lie in [0,1]");
  return measure(difference(u, v)) <= eps;
}

bool eq_mod_eps(const Event& u, const Event& v, const Rational& eps) {
  if (eps < 0 || eps > 1) throw Error("eps must lie in [0,1]");
  return distance(u, v) <= eps;
}

std::string event_hex(const Event& u) {
  std::size_t n = u.size();
  std::size_t digits = (n + 3) / 4;
  std::string out(digits, '0');
  static const char* hexdig = "0123456789abcdef";
  for (std::size_t d = 0; d < digits; ++d) {
    unsigned nib = 0;
    for (unsigned b = 0; b < 4; ++b) {
      std::size_t i = d * 4 + b;
      if (i < n && u.test(i)) nib |= (1u << b);
    }
    out[digits - 1 - d] = hexdig[nib];
  }
  return out;
}

boost::dynamic_bitset<> bits_from_hex(const std::string& hex, std::size_t n) {
  boost::dynamic_bitset<> bits(n);
  std::size_t digits = hex.size();
  for (std::size_t d = 0; d < digits; ++d) {
    char c = hex[digits - 1 - d];
    unsigned nib;
    if (c >= '0' && c <= '9') nib = c - '0';
    else if (c >= 'a' && c <= 'f') nib = 10 + (c - 'a');
    else if (c >= 'A' && c <= 'F') nib = 10 + (c - 'A');
    else throw Error(std::string("bad hex digit '") + c + "'");
    for (unsigned b = 0; b < 4; ++b) {
      if (!(nib & (1u << b))) continue;
      std::size_t i = d * 4 + b;
      if (i >= n) throw Error("hex bit-vector longer than space");
      bits.set(i);
    }
  }
  return bits;
}

}  // namespace kforge
