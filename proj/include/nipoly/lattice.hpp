#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace nipoly {

// Lattice point; x1 grows east, x2 grows north.
struct Point {
  std::int64_t x1 = 0;
  std::int64_t x2 = 0;
  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

inline constexpr Point kEast{1, 0};
inline constexpr Point kNorth{0, 1};
inline Point operator+(Point a, Point b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
inline Point operator-(Point a, Point b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
inline Point operator*(std::int64_t s, Point a) { return {s * a.x1, s * a.x2}; }

// Coordinatewise partial order.
inline bool precedes(Point a, Point b) { return a.x1 <= b.x1 && a.x2 <= b.x2; }
inline std::int64_t l1_distance(Point a, Point b) {
  return (b.x1 > a.x1 ? b.x1 - a.x1 : a.x1 - b.x1) + (b.x2 > a.x2 ? b.x2 - a.x2 : a.x2 - b.x2);
}

// Ordered tuple of distinct points. Construction validates distinctness.
class KPoint {
 public:
  KPoint() = default;
  explicit KPoint(std::vector<Point> pts);
  std::size_t k() const { return pts_.size(); }
  const Point& operator[](std::size_t i) const { return pts_[i]; }
  const std::vector<Point>& points() const { return pts_; }
  friend bool operator==(const KPoint&, const KPoint&) = default;

 private:
  std::vector<Point> pts_;
};

// One staircase path per component, endpoints included.
using Path = std::vector<Point>;
struct KPath {
  std::vector<Path> components;
};

// Each x_{i+1} is strictly north-west of x_i, or directly above it.
bool is_nice(const KPoint& v);

// x, x+e2, ..., x+(k-1)e2.
KPoint stack_up(Point x, int k);
// x-(k-1)e2, ..., x-e2, x: the k points ending at x, ordered south to north so
// that stack_up(a,k) -> stack_down(b,k) pairs components in order.
KPoint stack_down(Point x, int k);
// x, x+(-e1+e2), ..., x+(k-1)(-e1+e2).
KPoint stack_diag(Point x, int k);

// Structural checks: staircase steps, endpoints, pairwise disjointness.
bool is_valid_kpath(const KPath& p, const KPoint& xs, const KPoint& ys);

// Visits every non-intersecting k-path xs -> ys (component i joins xs[i] to
// ys[i]) in lexicographic order: component 1 first, each path ordered by its
// step sequence with east before north. Throws CapExceededError once more
// than `cap` k-paths would be produced.
void for_each_kpath(const KPoint& xs, const KPoint& ys, std::int64_t cap,
                    const std::function<void(const KPath&)>& visit);
std::vector<KPath> enumerate_kpaths(const KPoint& xs, const KPoint& ys, std::int64_t cap);
std::int64_t count_kpaths(const KPoint& xs, const KPoint& ys, std::int64_t cap);

// log of the number of k-paths (1,1)^k -> (n,m)_k in an n-wide, m-tall box.
double macmahon_log_count(std::int64_t n, std::int64_t m, std::int64_t k);

struct KrattenthalerReport {
  bool exact_equal = false;   // integer determinant equals the rational product
  double log_det = 0.0;
  double log_product = 0.0;
  bool log_equal = false;     // |log_det - log_product| < 1e-9
  bool ok() const { return exact_equal && log_equal; }
};
// det_{i,j<=k} C(a+b, a+j-i) against prod_{r<=k,s<=a,t<=b} (r+s+t-1)/(r+s+t-2).
KrattenthalerReport krattenthaler_check(int k, int a, int b);

}  // namespace nipoly
