#include "nipoly/lattice.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "nipoly/errors.hpp"
#include "nipoly/special.hpp"

namespace nipoly {

KPoint::KPoint(std::vector<Point> pts) : pts_(std::move(pts)) {
  if (pts_.empty()) throw DomainError("KPoint: k must be at least 1");
  std::vector<Point> sorted = pts_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("KPoint: points must be distinct");
  }
}

bool is_nice(const KPoint& v) {
  for (std::size_t i = 0; i + 1 < v.k(); ++i) {
    const Point a = v[i];
    const Point b = v[i + 1];
    const bool north_west = b.x1 < a.x1 && b.x2 > a.x2;
    if (!north_west && b != a + kNorth) return false;
  }
  return true;
}

namespace {
void require_k(int k) {
  if (k < 1) throw DomainError("stacked k-point: k must be at least 1");
}
}  // namespace

KPoint stack_up(Point x, int k) {
  require_k(k);
  std::vector<Point> pts;
  for (int i = 0; i < k; ++i) pts.push_back(x + i * kNorth);
  return KPoint(std::move(pts));
}

KPoint stack_down(Point x, int k) {
  require_k(k);
  std::vector<Point> pts;
  for (int i = 1; i <= k; ++i) pts.push_back(x - (k - i) * kNorth);
  return KPoint(std::move(pts));
}

KPoint stack_diag(Point x, int k) {
  require_k(k);
  std::vector<Point> pts;
  for (int i = 0; i < k; ++i) pts.push_back(x + i * Point{-1, 1});
  return KPoint(std::move(pts));
}

bool is_valid_kpath(const KPath& p, const KPoint& xs, const KPoint& ys) {
  if (p.components.size() != xs.k() || xs.k() != ys.k()) return false;
  std::vector<Point> all;
  for (std::size_t c = 0; c < p.components.size(); ++c) {
    const Path& path = p.components[c];
    if (path.empty() || path.front() != xs[c] || path.back() != ys[c]) return false;
    for (std::size_t s = 1; s < path.size(); ++s) {
      const Point d = path[s] - path[s - 1];
      if (d != kEast && d != kNorth) return false;
    }
    all.insert(all.end(), path.begin(), path.end());
  }
  std::sort(all.begin(), all.end());
  return std::adjacent_find(all.begin(), all.end()) == all.end();
}

namespace {

class Enumerator {
 public:
  Enumerator(const KPoint& xs, const KPoint& ys, std::int64_t cap,
             const std::function<void(const KPath&)>& visit)
      : xs_(xs), ys_(ys), cap_(cap), visit_(visit) {
    lo_ = xs[0];
    Point hi = xs[0];
    for (std::size_t i = 0; i < xs.k(); ++i) {
      for (Point p : {xs[i], ys[i]}) {
        lo_.x1 = std::min(lo_.x1, p.x1);
        lo_.x2 = std::min(lo_.x2, p.x2);
        hi.x1 = std::max(hi.x1, p.x1);
        hi.x2 = std::max(hi.x2, p.x2);
      }
    }
    width_ = hi.x1 - lo_.x1 + 1;
    height_ = hi.x2 - lo_.x2 + 1;
    used_.assign(static_cast<std::size_t>(width_ * height_), 0);
    current_.components.resize(xs.k());
  }

  void run() { component(0); }

 private:
  std::size_t index(Point p) const {
    return static_cast<std::size_t>((p.x2 - lo_.x2) * width_ + (p.x1 - lo_.x1));
  }

  void component(std::size_t c) {
    if (c == xs_.k()) {
      if (++produced_ > cap_) {
        throw CapExceededError("k-path enumeration exceeded cap of " + std::to_string(cap_));
      }
      visit_(current_);
      return;
    }
    if (!precedes(xs_[c], ys_[c]) || used_[index(xs_[c])]) return;
    Path& path = current_.components[c];
    path.clear();
    path.push_back(xs_[c]);
    used_[index(xs_[c])] = 1;
    extend(c);
    used_[index(xs_[c])] = 0;
  }

  void extend(std::size_t c) {
    Path& path = current_.components[c];
    const Point at = path.back();
    if (at == ys_[c]) {
      component(c + 1);
      return;
    }
    for (Point step : {kEast, kNorth}) {
      const Point next = at + step;
      if (!precedes(next, ys_[c]) || used_[index(next)]) continue;
      used_[index(next)] = 1;
      path.push_back(next);
      extend(c);
      // The recursive call may have reused later components; this one is intact.
      current_.components[c].pop_back();
      used_[index(next)] = 0;
    }
  }

  const KPoint& xs_;
  const KPoint& ys_;
  std::int64_t cap_;
  const std::function<void(const KPath&)>& visit_;
  Point lo_;
  std::int64_t width_ = 0;
  std::int64_t height_ = 0;
  std::vector<char> used_;
  KPath current_;
  std::int64_t produced_ = 0;
};

}  // namespace

void for_each_kpath(const KPoint& xs, const KPoint& ys, std::int64_t cap,
                    const std::function<void(const KPath&)>& visit) {
  if (xs.k() != ys.k()) throw DomainError("for_each_kpath: k-points differ in size");
  Enumerator(xs, ys, cap, visit).run();
}

std::vector<KPath> enumerate_kpaths(const KPoint& xs, const KPoint& ys, std::int64_t cap) {
  std::vector<KPath> out;
  for_each_kpath(xs, ys, cap, [&](const KPath& p) { out.push_back(p); });
  return out;
}

std::int64_t count_kpaths(const KPoint& xs, const KPoint& ys, std::int64_t cap) {
  std::int64_t n = 0;
  for_each_kpath(xs, ys, cap, [&](const KPath&) { ++n; });
  return n;
}

double macmahon_log_count(std::int64_t n, std::int64_t m, std::int64_t k) {
  if (k < 0 || k > std::min(n, m)) throw DomainError("macmahon_log_count: need 0 <= k <= min(n,m)");
  auto H = [](std::int64_t x) { return log_superfactorial(x); };
  return H(m + n - k) + H(k) + H(m - k) + H(n - k) - H(m) - H(n) - H(m + n - 2 * k);
}

KrattenthalerReport krattenthaler_check(int k, int a, int b) {
  using boost::multiprecision::cpp_int;
  if (k < 1 || a < 0 || b < 0) throw DomainError("krattenthaler_check: need k >= 1, a,b >= 0");
  auto binom = [](int n, int r) -> cpp_int {
    if (r < 0 || r > n) return 0;
    cpp_int v = 1;
    for (int i = 1; i <= r; ++i) v = v * (n - r + i) / i;
    return v;
  };
  std::vector<std::vector<cpp_int>> M(k, std::vector<cpp_int>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) M[i][j] = binom(a + b, a + j - i);
  // Bareiss fraction-free elimination.
  cpp_int prev = 1;
  int sign = 1;
  bool singular = false;
  for (int p = 0; p < k; ++p) {
    if (M[p][p] == 0) {
      int r = p + 1;
      while (r < k && M[r][p] == 0) ++r;
      if (r == k) {
        singular = true;
        break;
      }
      std::swap(M[p], M[r]);
      sign = -sign;
    }
    for (int i = p + 1; i < k; ++i)
      for (int j = p + 1; j < k; ++j) M[i][j] = (M[i][j] * M[p][p] - M[i][p] * M[p][j]) / prev;
    prev = M[p][p];
  }
  const cpp_int det = singular ? cpp_int(0) : sign * M[k - 1][k - 1];
  cpp_int num = 1, den = 1;
  double log_prod = 0.0;
  for (int r = 1; r <= k; ++r)
    for (int s = 1; s <= a; ++s)
      for (int t = 1; t <= b; ++t) {
        num *= r + s + t - 1;
        den *= r + s + t - 2;
        log_prod += std::log(static_cast<double>(r + s + t - 1)) - std::log(static_cast<double>(r + s + t - 2));
      }
  KrattenthalerReport rep;
  rep.exact_equal = det * den == num;
  rep.log_product = log_prod;
  rep.log_det = det > 0 ? std::log(det.convert_to<double>()) : -std::numeric_limits<double>::infinity();
  rep.log_equal = std::fabs(rep.log_det - rep.log_product) < 1e-9;
  return rep;
}

}  // namespace nipoly
