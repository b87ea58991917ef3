#pragma once

// Base dynamics over a subshift of finite type: admissible bi-infinite
// sequences stored in eventually-periodic form, the left shift, the
// e^{-s} metric, enumeration of sigma^n-fixed words and the closing
// (shadowing) construction with its verification report.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dsplit/common.hpp"

namespace dsplit {

using Word = std::vector<int>;

inline std::string word_to_string(const Word& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] >= 0 && w[i] <= 9) {
      out += static_cast<char>('0' + w[i]);
    } else {
      if (!out.empty() && out.back() != ',') out += ',';
      out += std::to_string(w[i]);
      out += ',';
    }
  }
  if (!out.empty() && out.back() == ',') out.pop_back();
  return out;
}

struct ClosingConstants {
  double c = 2.718281828459045235360287;  // e
  double theta = 1.0;                     // nats per step, matching d = e^{-s}
};

// Transition structure of the subshift plus the frozen closing constants.
// Construction rejects non-irreducible matrices; the connection bound l is
// the exact graph value (max over ordered symbol pairs of the shortest
// admissible connecting-word length).
class SftSystem {
 public:
  SftSystem(int alphabet_size, std::vector<std::vector<int>> transitions,
            ClosingConstants closing = {}, std::optional<int> enumeration_cutoff = {})
      : alphabet_(alphabet_size), closing_(closing) {
    if (alphabet_ < 1) throw DomainError("SftSystem: alphabet size must be positive");
    if (static_cast<int>(transitions.size()) != alphabet_)
      throw DomainError("SftSystem: transition matrix must be square of alphabet size");
    allowed_.assign(alphabet_ * alphabet_, 0);
    for (int a = 0; a < alphabet_; ++a) {
      if (static_cast<int>(transitions[a].size()) != alphabet_)
        throw DomainError("SftSystem: transition matrix must be square of alphabet size");
      for (int b = 0; b < alphabet_; ++b) {
        if (transitions[a][b] != 0 && transitions[a][b] != 1)
          throw DomainError("SftSystem: transition entries must be 0 or 1");
        allowed_[a * alphabet_ + b] = static_cast<unsigned char>(transitions[a][b]);
      }
    }
    if (!(closing_.c > 0.0) || !(closing_.theta > 0.0))
      throw DomainError("SftSystem: closing constants must be positive");
    compute_paths();  // also checks irreducibility
    if (enumeration_cutoff) {
      if (*enumeration_cutoff < 1) throw DomainError("SftSystem: enumeration cutoff must be >= 1");
      n_max_ = *enumeration_cutoff;
    } else {
      // Keep alphabet^n at or below 2^18 words by default.
      n_max_ = std::max(1, static_cast<int>(18.0 * std::log(2.0) / std::log(std::max(2, alphabet_))));
    }
    std::string tag = std::to_string(alphabet_) + ";";
    for (unsigned char v : allowed_) tag += static_cast<char>('0' + v);
    fingerprint_ = fnv1a64(tag);
  }

  static SftSystem full_shift(int alphabet_size) {
    return SftSystem(alphabet_size,
                     std::vector<std::vector<int>>(alphabet_size, std::vector<int>(alphabet_size, 1)));
  }

  static SftSystem golden_mean() { return SftSystem(2, {{1, 1}, {1, 0}}); }

  int alphabet_size() const { return alphabet_; }
  bool allowed(int a, int b) const { return allowed_[a * alphabet_ + b] != 0; }
  int connection_bound() const { return connection_bound_; }
  const ClosingConstants& closing_constants() const { return closing_; }
  int enumeration_cutoff() const { return n_max_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  std::vector<std::vector<int>> transition_matrix() const {
    std::vector<std::vector<int>> m(alphabet_, std::vector<int>(alphabet_, 0));
    for (int a = 0; a < alphabet_; ++a)
      for (int b = 0; b < alphabet_; ++b) m[a][b] = allowed(a, b) ? 1 : 0;
    return m;
  }

  // Shortest word w with a -> w[0] -> ... -> w[j-1] -> b admissible; empty
  // when a -> b is itself allowed. Length is at most connection_bound().
  Word connector(int a, int b) const {
    check_symbol(a);
    check_symbol(b);
    Word w;
    int cur = a;
    while (!allowed(cur, b)) {
      const int nxt = next_hop_[cur * alphabet_ + b];
      if (nxt < 0) throw InvariantViolation("SftSystem: no connecting word (matrix not irreducible?)");
      w.push_back(nxt);
      cur = nxt;
      if (static_cast<int>(w.size()) > alphabet_ + 1)
        throw InvariantViolation("SftSystem: connector search exceeded alphabet bound");
    }
    return w;
  }

  bool word_admissible(const Word& w) const {
    for (int s : w)
      if (s < 0 || s >= alphabet_) return false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (!allowed(w[i], w[i + 1])) return false;
    return true;
  }

  bool cyclically_admissible(const Word& w) const {
    if (w.empty()) return false;
    return word_admissible(w) && allowed(w.back(), w.front());
  }

  void check_symbol(int s) const {
    if (s < 0 || s >= alphabet_) throw DomainError("SftSystem: symbol out of range");
  }

 private:
  void compute_paths() {
    // BFS from every symbol; dist[a][b] = least number of edges on a path
    // a -> ... -> b (>= 1), next_hop the first intermediate symbol.
    dist_.assign(alphabet_ * alphabet_, -1);
    next_hop_.assign(alphabet_ * alphabet_, -1);
    for (int a = 0; a < alphabet_; ++a) {
      std::vector<int> frontier;
      for (int b = 0; b < alphabet_; ++b) {
        if (allowed(a, b)) {
          dist_[a * alphabet_ + b] = 1;
          frontier.push_back(b);
        }
      }
      int d = 1;
      while (!frontier.empty()) {
        std::vector<int> next;
        for (int u : frontier) {
          for (int v = 0; v < alphabet_; ++v) {
            if (allowed(u, v) && dist_[a * alphabet_ + v] < 0) {
              dist_[a * alphabet_ + v] = d + 1;
              next.push_back(v);
            }
          }
        }
        frontier = std::move(next);
        ++d;
      }
    }
    connection_bound_ = 0;
    for (int a = 0; a < alphabet_; ++a) {
      for (int b = 0; b < alphabet_; ++b) {
        const int d = dist_[a * alphabet_ + b];
        if (d < 0)
          throw DomainError("SftSystem: transition matrix is not irreducible");
        connection_bound_ = std::max(connection_bound_, d - 1);
      }
    }
    // next_hop: first step of a shortest path toward b, skipping the case
    // where the direct edge exists (no intermediate symbol needed).
    for (int a = 0; a < alphabet_; ++a) {
      for (int b = 0; b < alphabet_; ++b) {
        if (allowed(a, b)) continue;
        const int need = dist_[a * alphabet_ + b];
        for (int m = 0; m < alphabet_; ++m) {
          if (allowed(a, m) && dist_[m * alphabet_ + b] == need - 1) {
            next_hop_[a * alphabet_ + b] = m;
            break;
          }
        }
      }
    }
  }

  int alphabet_;
  std::vector<unsigned char> allowed_;
  std::vector<int> dist_;
  std::vector<int> next_hop_;
  int connection_bound_ = 0;
  ClosingConstants closing_;
  int n_max_ = 18;
  std::uint64_t fingerprint_ = 0;
};

namespace detail {

inline Word rotate_left(Word w) {
  if (w.size() > 1) std::rotate(w.begin(), w.begin() + 1, w.end());
  return w;
}

inline Word rotate_right(Word w) {
  if (w.size() > 1) std::rotate(w.begin(), w.end() - 1, w.end());
  return w;
}

// Shortest u with w = u^k.
inline Word primitive_root(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p <= n; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = (w[i] == w[i % p]);
    if (ok) return Word(w.begin(), w.begin() + p);
  }
  return w;
}

inline long long positive_mod(long long a, long long m) {
  const long long r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace detail

// One admissible bi-infinite sequence, stored eventually-periodically:
// ... L L L | center | R R R ...  with the first center symbol sitting at
// coordinate `center_start`. Canonical form: both periods primitive, center
// minimal (nothing absorbable into either tail), and for purely periodic
// sequences the stored word starts at coordinate 0. Two representations of
// the same sequence canonicalize to identical objects.
class Point {
 public:
  static Point make(const SftSystem& sys, Word left_period, Word center, Word right_period,
                    long long origin_offset) {
    Point p;
    p.left_ = std::move(left_period);
    p.center_ = std::move(center);
    p.right_ = std::move(right_period);
    p.center_start_ = -origin_offset;
    p.fingerprint_ = sys.fingerprint();
    p.validate(sys);
    p.canonicalize();
    return p;
  }

  // Purely periodic point with coordinate i = word[i mod n].
  static Point periodic(const SftSystem& sys, const Word& word) {
    if (word.empty()) throw DomainError("Point: empty periodic word");
    if (!sys.cyclically_admissible(word))
      throw DomainError("Point: word is not cyclically admissible");
    return make(sys, word, {}, word, 0);
  }

  int symbol(long long i) const {
    const long long rel = i - center_start_;
    if (rel >= 0 && rel < static_cast<long long>(center_.size()))
      return center_[static_cast<std::size_t>(rel)];
    if (rel >= static_cast<long long>(center_.size())) {
      const long long m = static_cast<long long>(right_.size());
      return right_[static_cast<std::size_t>(detail::positive_mod(rel - center_.size(), m))];
    }
    const long long m = static_cast<long long>(left_.size());
    const long long t = -rel - 1;  // 0 for the symbol just left of the center
    return left_[static_cast<std::size_t>(m - 1 - detail::positive_mod(t, m))];
  }

  Word window(long long lo, long long hi) const {  // inclusive coordinates
    Word w;
    w.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long long i = lo; i <= hi; ++i) w.push_back(symbol(i));
    return w;
  }

  const Word& left_period() const { return left_; }
  const Word& center() const { return center_; }
  const Word& right_period() const { return right_; }
  long long origin_offset() const { return -center_start_; }
  long long center_start() const { return center_start_; }
  std::uint64_t system_fingerprint() const { return fingerprint_; }

  bool same_system(const Point& other) const { return fingerprint_ == other.fingerprint_; }

  bool operator==(const Point& other) const {
    return fingerprint_ == other.fingerprint_ && center_start_ == other.center_start_ &&
           left_ == other.left_ && center_ == other.center_ && right_ == other.right_;
  }
  bool operator!=(const Point& other) const { return !(*this == other); }

  // Canonical serialization; doubles as a deterministic ordering key.
  std::string key() const {
    std::ostringstream os;
    os << "L" << word_to_string(left_) << "|C" << word_to_string(center_) << "|R"
       << word_to_string(right_) << "|s" << center_start_;
    return os.str();
  }

  bool purely_periodic() const { return center_.empty() && left_ == right_; }

  // First coordinate governed by the right tail / first left-tail coordinate.
  long long right_extent() const { return center_start_ + static_cast<long long>(center_.size()); }
  long long left_extent() const { return center_start_; }

 private:
  friend Point shift(const Point& x, long long m);

  Point() = default;

  void validate(const SftSystem& sys) const {
    if (left_.empty() || right_.empty()) throw DomainError("Point: periods must be nonempty");
    if (!sys.cyclically_admissible(left_)) throw DomainError("Point: left period inadmissible");
    if (!sys.cyclically_admissible(right_)) throw DomainError("Point: right period inadmissible");
    for (int s : center_) sys.check_symbol(s);
    for (std::size_t i = 0; i + 1 < center_.size(); ++i)
      if (!sys.allowed(center_[i], center_[i + 1])) throw DomainError("Point: center inadmissible");
    const int first_after_left = center_.empty() ? right_.front() : center_.front();
    if (!sys.allowed(left_.back(), first_after_left))
      throw DomainError("Point: left junction inadmissible");
    if (!center_.empty() && !sys.allowed(center_.back(), right_.front()))
      throw DomainError("Point: right junction inadmissible");
  }

  void canonicalize() {
    left_ = detail::primitive_root(left_);
    right_ = detail::primitive_root(right_);
    // Absorb center symbols into the right tail, then into the left tail.
    while (!center_.empty() && center_.back() == right_.back()) {
      center_.pop_back();
      right_ = detail::rotate_right(right_);
    }
    while (!center_.empty() && center_.front() == left_.front()) {
      center_.erase(center_.begin());
      left_ = detail::rotate_left(left_);
      ++center_start_;
    }
    if (!center_.empty()) return;
    // Empty center: slide the tail boundary left as far as it goes. If the
    // two tails ever coincide the sequence is purely periodic.
    const long long budget =
        std::lcm(static_cast<long long>(left_.size()), static_cast<long long>(right_.size())) + 1;
    for (long long step = 0; step <= budget; ++step) {
      if (left_ == right_) {
        anchor_periodic_phase();
        return;
      }
      if (left_.back() == right_.back()) {
        left_ = detail::rotate_right(left_);
        right_ = detail::rotate_right(right_);
        --center_start_;
      } else {
        return;
      }
    }
    throw InvariantViolation("Point: boundary slide did not terminate");
  }

  // Purely periodic: rotate so the stored word starts at coordinate 0.
  void anchor_periodic_phase() {
    const long long m = static_cast<long long>(right_.size());
    const long long rot = detail::positive_mod(-center_start_, m);
    Word w(right_.size());
    for (long long t = 0; t < m; ++t)
      w[static_cast<std::size_t>(t)] = right_[static_cast<std::size_t>((t + rot) % m)];
    left_ = w;
    right_ = std::move(w);
    center_start_ = 0;
  }

  Word left_, center_, right_;
  long long center_start_ = 0;
  std::uint64_t fingerprint_ = 0;
};

// sigma^m: coordinate i of the result is coordinate i+m of x.
inline Point shift(const Point& x, long long m) {
  Point p = x;
  p.center_start_ -= m;
  p.canonicalize();
  return p;
}

// min{|i| : x_i != y_i}, or -1 when the sequences are identical.
inline long long separation_index(const Point& x, const Point& y) {
  if (!x.same_system(y)) throw DomainError("separation_index: points from different systems");
  if (x == y) return -1;
  const long long right_from = std::max(x.right_extent(), y.right_extent());
  const long long left_from = std::min(x.left_extent(), y.left_extent());
  const long long lr = std::lcm(static_cast<long long>(x.right_period().size()),
                                static_cast<long long>(y.right_period().size()));
  const long long ll = std::lcm(static_cast<long long>(x.left_period().size()),
                                static_cast<long long>(y.left_period().size()));
  // Beyond these coordinates both pairs of tails are jointly periodic, so a
  // difference (which exists: canonical forms differ) must show before them.
  const long long bound =
      std::max(std::llabs(right_from) + lr, std::llabs(left_from) + ll) + 2;
  for (long long s = 0; s <= bound; ++s) {
    if (x.symbol(s) != y.symbol(s) || x.symbol(-s) != y.symbol(-s)) return s;
  }
  throw InvariantViolation("separation_index: unequal points with no differing coordinate");
}

// d(x, y) = e^{-s} with s the separation index; 0 iff equal.
inline double point_distance(const Point& x, const Point& y) {
  const long long s = separation_index(x, y);
  return s < 0 ? 0.0 : std::exp(-static_cast<double>(s));
}

// A sigma^n-fixed word; period n is the return time, not necessarily prime.
struct PeriodicOrbit {
  Word word;

  int period() const { return static_cast<int>(word.size()); }
  Point point(const SftSystem& sys) const { return Point::periodic(sys, word); }

  bool operator==(const PeriodicOrbit& o) const { return word == o.word; }
};

// Uniform measure (1/n) sum of point masses along an orbit.
struct PeriodicMeasure {
  PeriodicOrbit orbit;

  double weight() const { return 1.0 / orbit.period(); }
  std::vector<Point> support(const SftSystem& sys) const {
    std::vector<Point> pts;
    const Point base = orbit.point(sys);
    for (int j = 0; j < orbit.period(); ++j) pts.push_back(shift(base, j));
    return pts;
  }
};

// All cyclically admissible words of length n, lexicographic; the count
// equals trace of the n-th power of the transition matrix.
inline std::vector<PeriodicOrbit> enumerate_periodic(const SftSystem& sys, int n) {
  if (n < 1) throw DomainError("enumerate_periodic: n must be >= 1");
  if (n > sys.enumeration_cutoff())
    throw ResourceLimitError("enumerate_periodic: n exceeds enumeration cutoff " +
                             std::to_string(sys.enumeration_cutoff()));
  std::vector<PeriodicOrbit> out;
  Word w(n, 0);
  const int a = sys.alphabet_size();
  // Iterative DFS in lexicographic order.
  std::vector<int> stack;
  stack.reserve(n);
  std::function<void(int)> rec = [&](int depth) {
    if (depth == n) {
      if (sys.allowed(w[n - 1], w[0])) out.push_back(PeriodicOrbit{w});
      return;
    }
    for (int s = 0; s < a; ++s) {
      if (depth > 0 && !sys.allowed(w[depth - 1], s)) continue;
      w[depth] = s;
      rec(depth + 1);
    }
  };
  rec(0);
  return out;
}

// Orbits of exact length n up to rotation, represented by the
// lexicographically least rotation. Words that are proper powers (period a
// strict divisor of n) are dropped.
inline std::vector<PeriodicOrbit> distinct_orbits(const SftSystem& sys, int n) {
  std::vector<PeriodicOrbit> all = enumerate_periodic(sys, n);
  std::vector<PeriodicOrbit> out;
  for (const auto& o : all) {
    if (static_cast<int>(detail::primitive_root(o.word).size()) != n) continue;
    bool least = true;
    Word r = o.word;
    for (int k = 1; k < n && least; ++k) {
      r = detail::rotate_left(r);
      if (r < o.word) least = false;
    }
    if (least) out.push_back(o);
  }
  return out;
}

struct ClosingRow {
  int i = 0;
  double distance = 0.0;      // d(f^i x, f^i p)
  double bound = 0.0;         // c e^{-theta min(i, n-i)} d(f^n x, x)
  bool ok = false;
};

struct ClosingReport {
  std::vector<ClosingRow> rows;
  bool verified = false;
  int connector_length = 0;
  double return_distance = 0.0;  // d(f^n x, x)
};

struct ClosingResult {
  PeriodicOrbit orbit;
  int j = 0;  // connector length, 0 <= j <= connection bound
  ClosingReport report;
};

// Periodizes x_0 .. x_{n-1} followed by a shortest connecting word back to
// x_0 and verifies the shadowing inequality
//   d(f^i x, f^i p) <= c e^{-theta min(i, n-i)} d(f^n x, x),  i = 0..n,
// against the frozen system constants. Comparison happens in log scale so
// the verdict does not depend on exp rounding.
inline ClosingResult close_orbit(const SftSystem& sys, const Point& x, int n) {
  if (n < 1) throw DomainError("close_orbit: n must be >= 1");
  if (x.system_fingerprint() != sys.fingerprint())
    throw DomainError("close_orbit: point does not belong to this system");
  Word word = x.window(0, n - 1);
  const Word conn = sys.connector(word.back(), word.front());
  const int j = static_cast<int>(conn.size());
  Word full = word;
  full.insert(full.end(), conn.begin(), conn.end());
  if (!sys.cyclically_admissible(full))
    throw InvariantViolation("close_orbit: constructed word not cyclically admissible");

  ClosingResult result;
  result.orbit = PeriodicOrbit{full};
  result.j = j;

  const Point p = result.orbit.point(sys);
  const long long r = separation_index(shift(x, n), x);
  const double log_c = std::log(sys.closing_constants().c);
  const double theta = sys.closing_constants().theta;

  result.report.connector_length = j;
  result.report.return_distance = r < 0 ? 0.0 : std::exp(-static_cast<double>(r));
  result.report.verified = true;
  for (int i = 0; i <= n; ++i) {
    const long long s = separation_index(shift(x, i), shift(p, i));
    const double lhs_log = s < 0 ? kNegInf : -static_cast<double>(s);
    const double rhs_log =
        log_c - theta * std::min<double>(i, n - i) + (r < 0 ? kNegInf : -static_cast<double>(r));
    ClosingRow row;
    row.i = i;
    row.distance = s < 0 ? 0.0 : std::exp(-static_cast<double>(s));
    row.bound = (r < 0) ? 0.0
                        : sys.closing_constants().c *
                              std::exp(-theta * std::min<double>(i, n - i)) *
                              result.report.return_distance;
    row.ok = lhs_log <= rhs_log;
    result.report.verified = result.report.verified && row.ok;
    result.report.rows.push_back(row);
  }
  return result;
}

// Random eventually-periodic point: random admissible cyclic tails around a
// random center, anchored at a random offset. Used by the samplers.
inline Point random_point(const SftSystem& sys, Rng& rng, int max_center_len = 8) {
  const int a = sys.alphabet_size();
  auto random_walk = [&](int from, int len) {
    Word w;
    int cur = from;
    for (int i = 0; i < len; ++i) {
      std::vector<int> succ;
      for (int s = 0; s < a; ++s)
        if (sys.allowed(cur, s)) succ.push_back(s);
      cur = succ[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(succ.size()) - 1))];
      w.push_back(cur);
    }
    return w;
  };
  auto random_cycle = [&](int from) {
    Word w{from};
    const int extra = rng.uniform_int(0, 3);
    Word tail = random_walk(from, extra);
    w.insert(w.end(), tail.begin(), tail.end());
    Word conn = sys.connector(w.back(), w.front());
    w.insert(w.end(), conn.begin(), conn.end());
    return w;
  };

  const Word left = random_cycle(rng.uniform_int(0, a - 1));
  const int center_len = rng.uniform_int(0, max_center_len);
  Word center = random_walk(left.back(), center_len);
  const int last = center.empty() ? left.back() : center.back();
  std::vector<int> succ;
  for (int s = 0; s < a; ++s)
    if (sys.allowed(last, s)) succ.push_back(s);
  const int right_start =
      succ[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(succ.size()) - 1))];
  const Word right = random_cycle(right_start);
  const long long offset = rng.uniform_int(-2, std::max(0, center_len));
  return Point::make(sys, left, center, right, offset);
}

}  // namespace dsplit
