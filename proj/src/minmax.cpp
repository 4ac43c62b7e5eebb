#include "hj/minmax.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "hj/errors.hpp"
#include "hj/parallel.hpp"

namespace hj {

namespace {

class UnionFind {
public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0u); }

  std::uint32_t find(std::uint32_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }
  bool same(std::uint32_t a, std::uint32_t b) { return find(a) == find(b); }

private:
  std::vector<std::uint32_t> parent_;
};

double abs_max(SlopeInterval r) { return std::max(std::abs(r.lo), std::abs(r.hi)); }

// Interior breakpoints of f strictly inside (a, b), framed by a and b.
std::vector<double> framed(std::span<const double> bp, double a, double b) {
  std::vector<double> out{a};
  for (double z : bp)
    if (z > a && z < b) out.push_back(z);
  out.push_back(b);
  return out;
}

// ---------------------------------------------------------------- grid pass

struct GridOutcome {
  PassResult result;
  bool valid = false;
};

GridOutcome grid_once(const PLFunction& v, const PLFunction& H, double t, double x,
                      const FiberBox& box) {
  const int nx = box.n_x0, ny = box.n_y0;
  const double hx = (box.x0_hi - box.x0_lo) / (nx - 1);
  const double hy = (box.y0_hi - box.y0_lo) / (ny - 1);
  std::vector<double> X(static_cast<std::size_t>(nx)), Y(static_cast<std::size_t>(ny));
  std::vector<double> vX(X.size()), HY(Y.size());
  for (int i = 0; i < nx; ++i) {
    X[static_cast<std::size_t>(i)] = i == nx - 1 ? box.x0_hi : box.x0_lo + i * hx;
    vX[static_cast<std::size_t>(i)] = v(X[static_cast<std::size_t>(i)]);
  }
  for (int j = 0; j < ny; ++j) {
    Y[static_cast<std::size_t>(j)] = j == ny - 1 ? box.y0_hi : box.y0_lo + j * hy;
    HY[static_cast<std::size_t>(j)] = H(Y[static_cast<std::size_t>(j)]);
  }
  const std::size_t n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  std::vector<double> S(n);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      S[uj * static_cast<std::size_t>(nx) + ui] = vX[ui] - t * HY[uj] + (x - X[ui]) * Y[uj];
    }
  auto idx = [nx](int i, int j) {
    return static_cast<std::uint32_t>(j) * static_cast<std::uint32_t>(nx) +
           static_cast<std::uint32_t>(i);
  };

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);

  // ascending, 8-neighbour
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return S[a] < S[b] || (S[a] == S[b] && a < b);
  });
  std::vector<char> in(n, 0);
  UnionFind up(n);
  const std::uint32_t sa = idx(nx - 1, ny - 1), sb = idx(0, 0);
  std::uint32_t up_vertex = order.back();
  for (std::uint32_t k : order) {
    in[k] = 1;
    const int i = static_cast<int>(k % static_cast<std::uint32_t>(nx));
    const int j = static_cast<int>(k / static_cast<std::uint32_t>(nx));
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        const int a = i + di, b = j + dj;
        if ((di == 0 && dj == 0) || a < 0 || b < 0 || a >= nx || b >= ny) continue;
        if (in[idx(a, b)]) up.unite(k, idx(a, b));
      }
    if (in[sa] && in[sb] && up.same(sa, sb)) {
      up_vertex = k;
      break;
    }
  }

  // descending, 4-neighbour
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return S[a] > S[b] || (S[a] == S[b] && a < b);
  });
  std::fill(in.begin(), in.end(), 0);
  UnionFind down(n);
  const std::uint32_t sc = idx(nx - 1, 0), sd = idx(0, ny - 1);
  std::uint32_t down_vertex = order.back();
  for (std::uint32_t k : order) {
    in[k] = 1;
    const int i = static_cast<int>(k % static_cast<std::uint32_t>(nx));
    const int j = static_cast<int>(k / static_cast<std::uint32_t>(nx));
    const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
    for (const auto& q : nb) {
      if (q[0] < 0 || q[1] < 0 || q[0] >= nx || q[1] >= ny) continue;
      if (in[idx(q[0], q[1])]) down.unite(k, idx(q[0], q[1]));
    }
    if (in[sc] && in[sd] && down.same(sc, sd)) {
      down_vertex = k;
      break;
    }
  }

  GridOutcome out;
  PassResult& r = out.result;
  r.minmax_value = S[up_vertex];
  r.maxmin_value = S[down_vertex];
  r.saddle_i = static_cast<int>(up_vertex % static_cast<std::uint32_t>(nx));
  r.saddle_j = static_cast<int>(up_vertex / static_cast<std::uint32_t>(nx));
  r.saddle_x0 = X[static_cast<std::size_t>(r.saddle_i)];
  r.saddle_y0 = Y[static_cast<std::size_t>(r.saddle_j)];
  r.box = box;
  r.h = std::max(hx, hy);
  const double lx = v.lipschitz() + std::max(std::abs(box.y0_lo), std::abs(box.y0_hi));
  const double ly = std::max(std::abs(x - box.x0_lo), std::abs(x - box.x0_hi)) +
                    t * abs_max(slope_range_on(H, box.y0_lo, box.y0_hi));
  r.lipschitz = lx + ly;
  r.tol = r.h * r.lipschitz;

  auto on_boundary = [&](std::uint32_t k) {
    const int i = static_cast<int>(k % static_cast<std::uint32_t>(nx));
    const int j = static_cast<int>(k / static_cast<std::uint32_t>(nx));
    return i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
  };
  const bool seeds_deep = std::max(S[sa], S[sb]) < r.minmax_value &&
                          std::min(S[sc], S[sd]) > r.maxmin_value;
  out.valid = seeds_deep && !on_boundary(up_vertex) && !on_boundary(down_vertex);
  return out;
}

FiberBox enlarged(const FiberBox& b) {
  const double cx = 0.5 * (b.x0_lo + b.x0_hi), rx = b.x0_hi - b.x0_lo;
  const double cy = 0.5 * (b.y0_lo + b.y0_hi), ry = b.y0_hi - b.y0_lo;
  return {cx - rx, cx + rx, cy - ry, cy + ry, b.n_x0, b.n_y0};
}

// --------------------------------------------------------------- exact pass

struct CriticalPoint {
  double x0, y0, value;
};

// Clarke critical points of S_t(x, ., .) in the box; one representative per
// degenerate stratum.
std::vector<CriticalPoint> critical_points(const PLFunction& v, const PLFunction& H, double t,
                                           double x, double x0_lo, double x0_hi, double y0_lo,
                                           double y0_hi) {
  const std::vector<double> X = framed(v.breakpoints(), x0_lo, x0_hi);
  const std::vector<double> Y = framed(H.breakpoints(), y0_lo, y0_hi);
  constexpr double tol = 1e-12;
  std::vector<CriticalPoint> out;
  auto push = [&](double x0, double y0) {
    out.push_back({x0, y0, v(x0) - t * H(y0) + (x - x0) * y0});
  };
  auto speed_ok = [&](double x0, SlopeInterval dh) {
    if (t == 0.0) return std::abs(x - x0) <= tol;
    return dh.contains((x - x0) / t, tol);
  };
  for (std::size_t i = 0; i < X.size(); ++i) {
    const SlopeInterval dv = v.clarke(X[i]);
    for (std::size_t j = 0; j < Y.size(); ++j) {
      if (dv.contains(Y[j], tol) && speed_ok(X[i], H.clarke(Y[j]))) push(X[i], Y[j]);
      if (i + 1 < X.size() && j + 1 < Y.size()) {
        const double p = v.slope(v.slope_index(0.5 * (X[i] + X[i + 1])));
        const double q = H.slope(H.slope_index(0.5 * (Y[j] + Y[j + 1])));
        const double xs = x - t * q;
        if (xs > X[i] && xs < X[i + 1] && p > Y[j] && p < Y[j + 1]) push(xs, p);
        // degenerate strata along cell edges
        if (p > Y[j] - tol && p < Y[j + 1] + tol && std::abs(xs - X[i]) <= tol &&
            dv.lo < Y[j + 1] && dv.hi > Y[j])
          push(X[i], std::clamp(0.5 * (dv.lo + dv.hi), Y[j], Y[j + 1]));
        if (std::abs(p - Y[j]) <= tol) {
          const SlopeInterval dh = H.clarke(Y[j]);
          const double a = x - t * dh.hi, b = x - t * dh.lo;
          if (b > X[i] && a < X[i + 1]) push(std::clamp(0.5 * (a + b), X[i], X[i + 1]), Y[j]);
        }
      }
    }
  }
  return out;
}

struct MeshOutcome {
  ExactPass pass;
  bool valid = false;
};

struct Edge {
  double w;
  std::uint32_t a;
  std::uint32_t b;
  std::int32_t cell;  // -1 for a mesh edge
};

MeshOutcome mesh_once(const PLFunction& v, const PLFunction& H, double t, double x, double A,
                      double B, double C, double D, const std::vector<double>& hints,
                      bool with_maxmin) {
  const std::vector<double> X = framed(v.breakpoints(), A, B);
  const std::vector<double> Y = framed(H.breakpoints(), C, D);
  const std::size_t nx = X.size(), ny = Y.size();
  std::vector<double> vX(nx), HY(ny);
  for (std::size_t i = 0; i < nx; ++i) vX[i] = v(X[i]);
  for (std::size_t j = 0; j < ny; ++j) HY[j] = H(Y[j]);
  auto id = [nx](std::size_t i, std::size_t j) { return static_cast<std::uint32_t>(j * nx + i); };
  std::vector<double> S(nx * ny);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) S[id(i, j)] = vX[i] - t * HY[j] + (x - X[i]) * Y[j];

  // cell saddles
  struct Saddle {
    double x0, y0, value;
  };
  std::vector<Saddle> saddles;
  std::vector<std::int32_t> cell_saddle((nx - 1) * (ny - 1), -1);
  std::vector<double> vslope(nx - 1), hslope(ny - 1);
  for (std::size_t i = 0; i + 1 < nx; ++i)
    vslope[i] = v.slope(v.slope_index(0.5 * (X[i] + X[i + 1])));
  for (std::size_t j = 0; j + 1 < ny; ++j)
    hslope[j] = H.slope(H.slope_index(0.5 * (Y[j] + Y[j + 1])));
  for (std::size_t j = 0; j + 1 < ny; ++j) {
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const double p = vslope[i], q = hslope[j];
      const double xs = x - t * q, ys = p;
      if (!(xs > X[i] && xs < X[i + 1] && ys > Y[j] && ys < Y[j + 1])) continue;
      const double value =
          vX[i] + p * (xs - X[i]) - t * (HY[j] + q * (ys - Y[j])) + (x - xs) * ys;
      cell_saddle[j * (nx - 1) + i] = static_cast<std::int32_t>(saddles.size());
      saddles.push_back({xs, ys, value});
    }
  }

  auto on_rim = [&](std::uint32_t k) {
    const std::size_t i = k % nx, j = k / nx;
    return i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
  };
  auto flat = [&](const Edge& e) {
    return std::abs(S[e.a] - S[e.b]) <= 1e-10 * std::max(1.0, std::abs(S[e.a]));
  };
  // an edge whose critical point lies inside the box
  auto inside = [&](const Edge& e, bool ascending) {
    if (e.cell >= 0) return true;
    if (flat(e)) {
      const std::size_t ia = e.a % nx, ja = e.a / nx, ib = e.b % nx;
      return ja == e.b / nx ? (ja != 0 && ja != ny - 1) : (ia != 0 && ia != nx - 1 && ib == ia);
    }
    const bool a_top = ascending ? S[e.a] >= S[e.b] : S[e.a] <= S[e.b];
    return !on_rim(a_top ? e.a : e.b);
  };

  struct Pass {
    std::optional<Edge> bottleneck;
    bool valid = false;
  };
  auto run = [&](bool ascending, std::uint32_t s1, std::uint32_t s2) -> Pass {
    static thread_local std::vector<Edge> edges;
    edges.clear();
    auto w2 = [&](std::uint32_t a, std::uint32_t b) {
      return ascending ? std::max(S[a], S[b]) : std::min(S[a], S[b]);
    };
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t i = 0; i < nx; ++i) {
        if (i + 1 < nx) edges.push_back({w2(id(i, j), id(i + 1, j)), id(i, j), id(i + 1, j), -1});
        if (j + 1 < ny) edges.push_back({w2(id(i, j), id(i, j + 1)), id(i, j), id(i, j + 1), -1});
        if (i + 1 < nx && j + 1 < ny) {
          const std::int32_t c = cell_saddle[j * (nx - 1) + i];
          if (c < 0) continue;
          const double w = saddles[static_cast<std::size_t>(c)].value;
          if (ascending)
            edges.push_back({w, id(i, j), id(i + 1, j + 1), c});
          else
            edges.push_back({w, id(i + 1, j), id(i, j + 1), c});
        }
      }
    auto before = [ascending](const Edge& a, const Edge& b) {
      if (a.w != b.w) return ascending ? a.w < b.w : a.w > b.w;
      return a.a != b.a ? a.a < b.a : a.b < b.b;
    };
    Pass out;
    std::size_t k = edges.size();
    // a level hint c lets Kruskal unite everything strictly below the band
    // around c in one sweep and sort only the band
    for (double c : hints) {
      const double band = 1e-9 * std::max(1.0, std::abs(c));
      UnionFind uf(nx * ny);
      auto mid = std::partition(edges.begin(), edges.end(), [&](const Edge& e) {
        return ascending ? e.w < c - band : e.w > c + band;
      });
      for (auto it = edges.begin(); it != mid; ++it) uf.unite(it->a, it->b);
      if (uf.same(s1, s2)) continue;
      auto top = std::partition(mid, edges.end(), [&](const Edge& e) { return std::abs(e.w - c) <= band; });
      std::sort(mid, top, before);
      for (auto it = mid; it != top; ++it) {
        uf.unite(it->a, it->b);
        if (uf.same(s1, s2)) {
          k = static_cast<std::size_t>(it - edges.begin());
          break;
        }
      }
      if (k < edges.size()) break;
    }
    if (k == edges.size()) {
      // bottleneck by repeated median splits; same answer as sorting all edges
      UnionFind base(nx * ny);
      auto lo = edges.begin(), hi = edges.end();
      while (hi - lo > 32) {
        auto m = lo + (hi - lo) / 2;
        std::nth_element(lo, m, hi, before);
        UnionFind trial = base;
        for (auto it = lo; it != m; ++it) trial.unite(it->a, it->b);
        if (trial.same(s1, s2)) {
          hi = m;
        } else {
          base = std::move(trial);
          lo = m;
        }
      }
      std::sort(lo, hi, before);
      for (auto it = lo; it != hi; ++it) {
        base.unite(it->a, it->b);
        if (base.same(s1, s2)) {
          k = static_cast<std::size_t>(it - edges.begin());
          break;
        }
      }
    }
    if (k == edges.size()) return out;
    out.bottleneck = edges[k];
    if (inside(edges[k], ascending)) {
      out.valid = true;
      return out;
    }
    // the pass level may also be reached at an interior critical point
    const double w = edges[k].w, eps = 1e-9 * std::max(1.0, std::abs(w));
    for (const CriticalPoint& c : critical_points(v, H, t, x, A, B, C, D))
      if (std::abs(c.value - w) <= eps && c.x0 > A && c.x0 < B && c.y0 > C && c.y0 < D)
        out.valid = true;
    return out;
  };

  MeshOutcome out;
  ExactPass& r = out.pass;
  r.mesh_x0 = nx;
  r.mesh_y0 = ny;

  bool down_valid = true;
  r.maxmin_value = std::numeric_limits<double>::quiet_NaN();
  if (with_maxmin) {
    const Pass down = run(false, id(nx - 1, 0), id(0, ny - 1));
    if (!down.bottleneck) throw std::logic_error("minmax_exact: descending seeds never connect");
    r.maxmin_value = down.bottleneck->w;
    down_valid = down.valid;
  }

  const Pass upp = run(true, id(nx - 1, ny - 1), id(0, 0));
  if (!upp.bottleneck) throw std::logic_error("minmax_exact: ascending seeds never connect");
  const Edge& up = *upp.bottleneck;
  r.minmax_value = up.w;
  if (up.cell >= 0) {
    const Saddle& s = saddles[static_cast<std::size_t>(up.cell)];
    r.saddle = true;
    r.x0 = s.x0;
    r.y0 = s.y0;
  } else if (flat(up)) {
    // flat edge: a degenerate critical stratum; report its midpoint
    r.x0 = 0.5 * (X[up.a % nx] + X[up.b % nx]);
    r.y0 = 0.5 * (Y[up.a / nx] + Y[up.b / nx]);
  } else {
    const std::uint32_t k = S[up.a] >= S[up.b] ? up.a : up.b;
    r.x0 = X[k % nx];
    r.y0 = Y[k / nx];
  }
  out.valid = down_valid && upp.valid;
  r.slope = r.y0;
  r.intercept = v(r.x0) - r.x0 * r.y0 - t * H(r.y0);
  return out;
}

}  // namespace

double max_speed(const PLFunction& v, const PLFunction& H, double widen) {
  const SlopeInterval sr = v.slope_range();
  return abs_max(slope_range_on(H, sr.lo - widen, sr.hi + widen));
}

FiberBox fiber_box(const PLFunction& v, const PLFunction& H, double t, double x, int n_x0,
                   int n_y0, double margin) {
  const double L = v.lipschitz();
  const double M = abs_max(slope_range_on(H, -L - margin, L + margin));
  return {x - t * M - margin, x + t * M + margin, -L - margin, L + margin, n_x0, n_y0};
}

PassResult minmax_grid(const PLFunction& v, const PLFunction& H, double t, double x,
                       const FiberBox& box_in) {
  if (box_in.n_x0 < 2 || box_in.n_y0 < 2)
    throw std::invalid_argument("minmax_grid: resolution must be at least 2");
  if (t < 0.0) throw std::invalid_argument("minmax_grid: t must be nonnegative");
  FiberBox box = box_in;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    GridOutcome g = grid_once(v, H, t, x, box);
    if (g.valid) {
      g.result.enlargements = attempt;
      return g.result;
    }
    box = enlarged(box);
  }
  throw NumericalError("box too small");
}

PassResult minmax_grid(const PLFunction& v, const PLFunction& H, double t, double x,
                       int resolution) {
  return minmax_grid(v, H, t, x, fiber_box(v, H, t, x, resolution, resolution));
}

ExactPass minmax_exact(const PLFunction& v_in, const PLFunction& H_in, double t, double x,
                       const ExactOptions& options) {
  if (t < 0.0) throw std::invalid_argument("minmax_exact: t must be nonnegative");
  const PLFunction v = v_in.normalized();
  const PLFunction H = H_in.normalized();
  double dy = options.slope_margin, dx = options.x_margin;
  const SlopeInterval sr = v.slope_range();
  for (int attempt = 0; attempt <= options.max_enlargements; ++attempt) {
    const double M = abs_max(slope_range_on(H, sr.lo - dy, sr.hi + dy));
    const double A = x - t * M - dx, B = x + t * M + dx;
    const SlopeInterval local = slope_range_on(v, A, B);
    MeshOutcome m = mesh_once(v, H, t, x, A, B, local.lo - dy, local.hi + dy, options.hints,
                              options.maxmin);
    if (m.valid) {
      m.pass.enlargements = attempt;
      return m.pass;
    }
    dy *= 2.0;
    dx *= 2.0;
  }
  throw NumericalError("box too small");
}

double hopf_lax(const PLFunction& v, const PLFunction& H, double t, double x) {
  if (!H.is_convex()) throw std::invalid_argument("hopf_lax requires convex H");
  if (!(t > 0.0)) throw std::invalid_argument("hopf_lax requires t > 0");
  const ExtendedPL Hs = conjugate(H);
  // x0 = x - t*y with y in the domain of H*
  const double lo = x - t * Hs.hi(), hi = x - t * Hs.lo();
  auto objective = [&](double x0) {
    const double y = std::clamp((x - x0) / t, Hs.lo(), Hs.hi());
    return v(x0) + t * Hs(y);
  };
  double best = std::min(objective(lo), objective(hi));
  for (double z : v.breakpoints())
    if (z > lo && z < hi) best = std::min(best, objective(z));
  for (double y : Hs.core().breakpoints())
    if (y > Hs.lo() && y < Hs.hi()) best = std::min(best, objective(x - t * y));
  return best;
}

double hopf_conj(const PLFunction& v, const PLFunction& H, double t, double x) {
  if (!v.is_convex()) throw std::invalid_argument("hopf_conj requires convex v");
  const ExtendedPL vs = conjugate(v);
  auto objective = [&](double y) { return x * y - vs(y) - t * H(y); };
  double best = std::max(objective(vs.lo()), objective(vs.hi()));
  for (double y : vs.core().breakpoints())
    if (y > vs.lo() && y < vs.hi()) best = std::max(best, objective(y));
  for (double y : H.breakpoints())
    if (y > vs.lo() && y < vs.hi()) best = std::max(best, objective(y));
  return best;
}

std::vector<double> critical_values(const PLFunction& v, const PLFunction& H, double t, double x,
                                    double x0_lo, double x0_hi, double y0_lo, double y0_hi) {
  std::vector<double> out;
  for (const CriticalPoint& c : critical_points(v, H, t, x, x0_lo, x0_hi, y0_lo, y0_hi))
    out.push_back(c.value);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ------------------------------------------------------------- one step

namespace {

struct Sample {
  double value = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  bool done = false;  // interval to the next sample is resolved
};

double scale_of(double a) { return std::max(1.0, std::abs(a)); }

bool same_line(double s1, double c1, double s2, double c2, double x) {
  return std::abs(s1 - s2) <= 1e-12 * scale_of(s1) &&
         std::abs((s1 * x + c1) - (s2 * x + c2)) <= 1e-10 * scale_of(s1 * x + c1);
}

struct Window {
  double lo, hi;
  std::vector<double> kinks;
};

Window step_window(const PLFunction& v, const PLFunction& H, double tau, double margin) {
  Window w;
  w.kinks = v.kinks();
  const double reach = tau * max_speed(v, H) + margin;
  w.lo = w.kinks.front() - reach;
  w.hi = w.kinks.back() + reach;
  return w;
}

PLFunction step_exact(const PLFunction& v, const PLFunction& H, double tau, const StepPlan& plan,
                      StepStats* stats, const Window& w) {
  std::map<double, Sample> samples;
  auto evaluate = [&](const std::vector<double>& xs, const std::vector<std::vector<double>>& hints) {
    std::vector<ExactPass> res(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) {
      ExactOptions o = plan.exact;
      o.maxmin = false;
      if (!hints.empty()) o.hints = hints[i];
      res[i] = minmax_exact(v, H, tau, xs[i], o);
    });
    if (stats) stats->evaluations += xs.size();
    return res;
  };

  std::vector<double> init;
  const std::size_t n0 = std::max<std::size_t>(33, 2 * w.kinks.size() + 1);
  for (std::size_t i = 0; i < n0; ++i)
    init.push_back(w.lo + (w.hi - w.lo) * static_cast<double>(i) / static_cast<double>(n0 - 1));
  const double reach = tau * max_speed(v, H);
  for (double k : w.kinks)
    for (double z : {k - reach, k, k + reach}) init.push_back(z);
  std::sort(init.begin(), init.end());
  init.erase(std::unique(init.begin(), init.end(),
                         [](double a, double b) { return std::abs(a - b) <= 1e-12 * scale_of(a); }),
             init.end());
  {
    // anchors first, then the points between them with the anchor germs as hints
    constexpr std::size_t stride = 8;
    std::vector<double> anchors, rest;
    for (std::size_t i = 0; i < init.size(); ++i)
      (i % stride == 0 || i + 1 == init.size() ? anchors : rest).push_back(init[i]);
    const auto ra = evaluate(anchors, {});
    for (std::size_t i = 0; i < anchors.size(); ++i)
      samples[anchors[i]] = {ra[i].minmax_value, ra[i].slope, ra[i].intercept, false};
    std::vector<std::vector<double>> hints;
    for (double z : rest) {
      const auto hi = samples.upper_bound(z);
      const auto lo = std::prev(hi);
      hints.push_back({lo->second.slope * z + lo->second.intercept,
                       hi->second.slope * z + hi->second.intercept});
    }
    const auto rr = evaluate(rest, hints);
    for (std::size_t i = 0; i < rest.size(); ++i)
      samples[rest[i]] = {rr[i].minmax_value, rr[i].slope, rr[i].intercept, false};
  }

  for (int round = 0; round < plan.max_rounds; ++round) {
    std::vector<double> todo;
    std::vector<std::map<double, Sample>::iterator> left;
    std::vector<char> is_cross;
    for (auto it = samples.begin(); std::next(it) != samples.end(); ++it) {
      Sample& a = it->second;
      if (a.done) continue;
      const auto nx = std::next(it);
      const double xa = it->first, xb = nx->first;
      const Sample& b = nx->second;
      const double eps = 1e-11 * scale_of(xa);
      if (xb - xa <= eps) {
        a.done = true;
        continue;
      }
      const double mid = 0.5 * (xa + xb);
      if (same_line(a.slope, a.intercept, b.slope, b.intercept, mid)) {
        if (round == 0) {
          todo.push_back(mid);
          left.push_back(it);
          is_cross.push_back(0);
        } else {
          a.done = true;
        }
        continue;
      }
      if (std::abs(a.slope - b.slope) > 1e-12 * scale_of(a.slope)) {
        const double xi = (b.intercept - a.intercept) / (a.slope - b.slope);
        if (xi > xa + eps && xi < xb - eps) {
          todo.push_back(xi);
          left.push_back(it);
          is_cross.push_back(1);
          continue;
        }
        const bool at_a = std::abs(xi - xa) <= eps &&
                          std::abs(a.value - (b.slope * xa + b.intercept)) <= 1e-10 * scale_of(a.value);
        const bool at_b = std::abs(xi - xb) <= eps &&
                          std::abs(b.value - (a.slope * xb + a.intercept)) <= 1e-10 * scale_of(b.value);
        if (at_a || at_b) {
          // a kink at an end: probe right next to it before trusting the far germ
          const double probe = 1e-7 * scale_of(xa);
          if (xb - xa <= 2.0 * probe) {
            a.done = true;
          } else {
            todo.push_back(at_a ? xa + probe : xb - probe);
            left.push_back(it);
            is_cross.push_back(0);
          }
          continue;
        }
      }
      todo.push_back(mid);
      left.push_back(it);
      is_cross.push_back(0);
    }
    if (todo.empty()) break;
    std::vector<std::vector<double>> hints;
    for (std::size_t k = 0; k < todo.size(); ++k) {
      const Sample& a = left[k]->second;
      const Sample& b = std::next(left[k])->second;
      hints.push_back({a.slope * todo[k] + a.intercept, b.slope * todo[k] + b.intercept});
    }
    const auto res = evaluate(todo, hints);
    for (std::size_t k = 0; k < todo.size(); ++k) {
      Sample s{res[k].minmax_value, res[k].slope, res[k].intercept, false};
      Sample& a = left[k]->second;
      if (is_cross[k]) {
        const double expect = a.slope * todo[k] + a.intercept;
        if (std::abs(s.value - expect) <= 1e-10 * scale_of(expect)) {
          const Sample& b = std::next(left[k])->second;
          if (same_line(s.slope, s.intercept, a.slope, a.intercept, todo[k])) a.done = true;
          if (same_line(s.slope, s.intercept, b.slope, b.intercept, todo[k])) s.done = true;
        }
      }
      samples.emplace(todo[k], s);
    }
  }

  // group samples by germ and place vertices at germ intersections
  struct Group {
    double slope, intercept, first, last, first_value, last_value;
  };
  std::vector<Group> groups;
  for (const auto& [x, s] : samples) {
    if (!groups.empty() && same_line(groups.back().slope, groups.back().intercept, s.slope,
                                     s.intercept, x)) {
      groups.back().last = x;
      groups.back().last_value = s.value;
      continue;
    }
    groups.push_back({s.slope, s.intercept, x, x, s.value, s.value});
  }
  if (groups.size() == 1) return PLFunction::affine(groups[0].slope, groups[0].intercept);

  std::vector<std::pair<double, double>> pts;
  auto push = [&](double x, double y) {
    if (!pts.empty() && x <= pts.back().first + 1e-12 * scale_of(x)) return;
    pts.emplace_back(x, y);
  };
  for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
    const Group& a = groups[g];
    const Group& b = groups[g + 1];
    const double eps = 1e-11 * scale_of(a.last);
    if (std::abs(a.slope - b.slope) > 1e-12 * scale_of(a.slope)) {
      const double xi = (b.intercept - a.intercept) / (a.slope - b.slope);
      if (xi >= a.last - eps && xi <= b.first + eps) {
        push(xi, a.slope * xi + a.intercept);
        continue;
      }
    }
    if (b.first - a.last <= 1e-7 * scale_of(a.last)) {
      push(0.5 * (a.last + b.first), 0.5 * (a.last_value + b.first_value));
      continue;
    }
    push(a.last, a.last_value);
    push(b.first, b.first_value);
  }
  std::vector<double> xs, ys;
  for (auto& [x, y] : pts) {
    xs.push_back(x);
    ys.push_back(y);
  }
  return PLFunction(std::move(xs), std::move(ys), groups.front().slope, groups.back().slope)
      .normalized();
}

PLFunction step_grid(const PLFunction& v, const PLFunction& H, double tau, const StepPlan& plan,
                     StepStats* stats, const Window& w) {
  const int n = std::max(plan.samples, 3);
  std::vector<double> xs(static_cast<std::size_t>(n)), us(xs.size());
  std::vector<double> hs(xs.size());
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = w.lo + (w.hi - w.lo) * i / (n - 1);
  parallel_for(xs.size(), [&](std::size_t i) {
    const PassResult r = minmax_grid(v, H, tau, xs[i], plan.resolution);
    us[i] = r.minmax_value;
    hs[i] = r.h;
  });
  const double h = *std::max_element(hs.begin(), hs.end());
  if (stats) {
    stats->evaluations += xs.size();
    stats->h = std::max(stats->h, h);
  }

  std::vector<double> alphabet = v.slopes();
  alphabet.insert(alphabet.end(), H.breakpoints().begin(), H.breakpoints().end());
  std::sort(alphabet.begin(), alphabet.end());

  struct Run {
    double slope;
    bool snapped;
    std::size_t first, last;  // sample indices spanned
  };
  std::vector<Run> runs;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double s = (us[k + 1] - us[k]) / (xs[k + 1] - xs[k]);
    auto it = std::lower_bound(alphabet.begin(), alphabet.end(), s);
    double best = kInf, snap = s;
    for (auto c : {it, it == alphabet.begin() ? it : std::prev(it)}) {
      if (c == alphabet.end()) continue;
      if (std::abs(*c - s) < best) {
        best = std::abs(*c - s);
        snap = *c;
      }
    }
    const bool ok = best <= 10.0 * h;
    if (!ok && stats) ++stats->unsnapped;
    const double slope = ok ? snap : s;
    if (!runs.empty() && runs.back().snapped && ok && runs.back().slope == slope) {
      runs.back().last = k + 1;
      continue;
    }
    runs.push_back({slope, ok, k, k + 1});
  }
  std::vector<double> icpt(runs.size());
  for (std::size_t r = 0; r < runs.size(); ++r) {
    double acc = 0.0;
    for (std::size_t k = runs[r].first; k <= runs[r].last; ++k) acc += us[k] - runs[r].slope * xs[k];
    icpt[r] = acc / static_cast<double>(runs[r].last - runs[r].first + 1);
  }
  std::vector<double> px, py;
  auto push = [&](double x, double y) {
    if (!px.empty() && x <= px.back() + 1e-12 * scale_of(x)) return;
    px.push_back(x);
    py.push_back(y);
  };
  for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
    const Run& a = runs[r];
    const Run& b = runs[r + 1];
    if (a.slope != b.slope) {
      const double xi = (icpt[r + 1] - icpt[r]) / (a.slope - b.slope);
      if (xi >= xs[a.first] && xi <= xs[b.last]) {
        push(xi, a.slope * xi + icpt[r]);
        continue;
      }
    }
    push(xs[a.last], us[a.last]);
  }
  if (px.empty()) return PLFunction::affine(runs.front().slope, icpt.front());
  return PLFunction(std::move(px), std::move(py), runs.front().slope, runs.back().slope).normalized();
}

}  // namespace

PLFunction minmax_step(const PLFunction& v_in, const PLFunction& H, double tau,
                       const StepPlan& plan, StepStats* stats) {
  if (!(tau > 0.0)) throw std::invalid_argument("minmax_step: tau must be positive");
  const PLFunction v = v_in.normalized();
  if (v.kinks().empty()) {
    const double p = v.left_tail_slope();
    return PLFunction::affine(p, v(0.0) - tau * H(p));
  }
  const Window w = step_window(v, H, tau, plan.margin);
  return plan.engine == StepEngine::exact ? step_exact(v, H, tau, plan, stats, w)
                                          : step_grid(v, H, tau, plan, stats, w);
}

}  // namespace hj
