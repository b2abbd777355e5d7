#include "confdim/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>

namespace confdim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double rand_unit(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1p-53;  // distribution-free, bit-stable
}

long long rand_below(std::mt19937_64& rng, long long n) {
  return n <= 1 ? 0 : (long long)(rng() % (unsigned long long)n);
}

// --- restricted convex program ---------------------------------------------
// minimize sum rho_i^p subject to sum_{i in P_j} rho_i >= 1, rho >= 0.
// Solved through the concave dual
//   g(lambda) = sum_j lambda_j - (p-1) sum_i (s_i/p)^(p/(p-1)),  s = N^T lambda,
// by FISTA with backtracking plus a damped Newton polish; the primal density
// is rho_i = (s_i/p)^(1/(p-1)).

struct Restricted {
  const std::vector<std::vector<int>>* sets;
  int n = 0;
  double p = 2;

  std::vector<double> s_of(const std::vector<double>& lam) const {
    std::vector<double> s(n, 0.0);
    for (std::size_t j = 0; j < sets->size(); ++j)
      for (int i : (*sets)[j]) s[i] += lam[j];
    return s;
  }

  std::vector<double> rho_of_s(const std::vector<double>& s) const {
    std::vector<double> rho(n, 0.0);
    double inv = 1.0 / (p - 1.0);
    for (int i = 0; i < n; ++i) rho[i] = s[i] <= 0 ? 0.0 : std::pow(s[i] / p, inv);
    return rho;
  }

  double dual_value(const std::vector<double>& lam) const {
    auto s = s_of(lam);
    double acc = 0;
    for (double l : lam) acc += l;
    double e = p / (p - 1.0);
    for (int i = 0; i < n; ++i)
      if (s[i] > 0) acc -= (p - 1.0) * std::pow(s[i] / p, e);
    return acc;
  }

  void grad(const std::vector<double>& lam, std::vector<double>& g) const {
    auto rho = rho_of_s(s_of(lam));
    g.assign(sets->size(), 1.0);
    for (std::size_t j = 0; j < sets->size(); ++j)
      for (int i : (*sets)[j]) g[j] -= rho[i];
  }

  double min_weight(const std::vector<double>& rho) const {
    double w = kInf;
    for (const auto& set : *sets) {
      double acc = 0;
      for (int i : set) acc += rho[i];
      w = std::min(w, acc);
    }
    return w;
  }

  static double energy(const std::vector<double>& rho, double p) {
    double e = 0;
    for (double r : rho)
      if (r > 0) e += std::pow(r, p);
    return e;
  }
};

struct InnerSolution {
  std::vector<double> rho;  // admissible for the restricted family (rescaled)
  double value = 0;         // its energy
  double dual = 0;          // lower bound for the restricted optimum
  long iterations = 0;
};

// dense symmetric solve with partial pivoting; sizes stay small
bool dense_solve(std::vector<double> a, std::vector<double> b, int m,
                 std::vector<double>& out) {
  std::vector<int> piv(m);
  for (int k = 0; k < m; ++k) {
    int best = k;
    for (int r = k + 1; r < m; ++r)
      if (std::fabs(a[r * m + k]) > std::fabs(a[best * m + k])) best = r;
    if (std::fabs(a[best * m + k]) < 1e-14) return false;
    if (best != k) {
      for (int c = 0; c < m; ++c) std::swap(a[k * m + c], a[best * m + c]);
      std::swap(b[k], b[best]);
    }
    for (int r = k + 1; r < m; ++r) {
      double f = a[r * m + k] / a[k * m + k];
      if (f == 0) continue;
      for (int c = k; c < m; ++c) a[r * m + c] -= f * a[k * m + c];
      b[r] -= f * b[k];
    }
  }
  out.assign(m, 0.0);
  for (int r = m - 1; r >= 0; --r) {
    double v = b[r];
    for (int c = r + 1; c < m; ++c) v -= a[r * m + c] * out[c];
    out[r] = v / a[r * m + r];
  }
  return true;
}

// p = 2 path: active-set solve of the quadratic program.
bool active_set_quadratic(const Restricted& prob, InnerSolution& out) {
  const auto& sets = *prob.sets;
  int m = int(sets.size());
  if (m > 512) return false;
  std::vector<char> active(m, 0);
  int seed = 0;
  for (int j = 1; j < m; ++j)
    if (sets[j].size() < sets[seed].size()) seed = j;
  active[seed] = 1;
  std::vector<double> rho(prob.n, 0.0);
  for (int round = 0; round < 4 * m + 16; ++round) {
    std::vector<int> W;
    for (int j = 0; j < m; ++j)
      if (active[j]) W.push_back(j);
    int w = int(W.size());
    std::vector<double> G(w * w, 0.0);
    for (int a = 0; a < w; ++a)
      for (int b = a; b < w; ++b) {
        const auto& A = sets[W[a]];
        const auto& B = sets[W[b]];
        std::size_t ia = 0, ib = 0, inter = 0;
        while (ia < A.size() && ib < B.size()) {
          if (A[ia] == B[ib]) {
            ++inter;
            ++ia;
            ++ib;
          } else if (A[ia] < B[ib])
            ++ia;
          else
            ++ib;
        }
        G[a * w + b] = G[b * w + a] = double(inter) + (a == b ? 1e-12 : 0.0);
      }
    std::vector<double> rhs(w, 2.0), lamw;
    if (!dense_solve(G, rhs, w, lamw)) return false;
    bool neg = false;
    int drop = -1;
    for (int a = 0; a < w; ++a)
      if (lamw[a] < -1e-11) {
        neg = true;
        if (drop < 0 || lamw[a] < lamw[drop]) drop = a;
      }
    if (neg) {
      active[W[drop]] = 0;
      continue;
    }
    std::fill(rho.begin(), rho.end(), 0.0);
    for (int a = 0; a < w; ++a)
      for (int i : sets[W[a]]) rho[i] += lamw[a] / 2.0;
    int add = -1;
    double worst = 1.0 - 1e-12;
    for (int j = 0; j < m; ++j) {
      if (active[j]) continue;
      double acc = 0;
      for (int i : sets[j]) acc += rho[i];
      if (acc < worst) {
        worst = acc;
        add = j;
      }
    }
    if (add < 0) {
      double wmin = prob.min_weight(rho);
      if (wmin < 1.0 && wmin > 0)
        for (auto& r : rho) r /= wmin;
      out.rho = rho;
      out.value = Restricted::energy(rho, 2.0);
      out.dual = out.value;  // KKT point: duality gap zero up to roundoff
      out.iterations = round + 1;
      return true;
    }
    active[add] = 1;
  }
  return false;
}

// One damped-Newton pass on the dual over the working set of positive or
// ascending coordinates. The Newton system H d = g with
// H = N diag(rho'(s)) N^T is solved matrix-free by conjugate gradients.
// Returns true if it improved g.
bool newton_dual_step(const Restricted& prob, std::vector<double>& lam) {
  const auto& sets = *prob.sets;
  int m = int(sets.size());
  if (m > 4000) return false;
  std::vector<double> g;
  prob.grad(lam, g);
  std::vector<int> W;
  for (int j = 0; j < m; ++j)
    if (lam[j] > 0 || g[j] > 0) W.push_back(j);
  if (W.empty()) return false;
  int w = int(W.size());

  auto s = prob.s_of(lam);
  double smax = 0;
  for (double v : s) smax = std::max(smax, v);
  // p > 2 has unbounded dual curvature at s = 0; a relative floor keeps the
  // Newton system conditioned without touching coordinates that matter
  double sfloor = std::max(1e-12, 1e-6 * smax);
  double c1 = 1.0 / (prob.p * (prob.p - 1.0));
  double expo = (2.0 - prob.p) / (prob.p - 1.0);

  // vertices touched by the working set, with their curvature weights
  std::vector<int> verts;
  std::vector<int> mark(prob.n, -1);
  for (int a = 0; a < w; ++a)
    for (int i : sets[W[a]])
      if (mark[i] < 0) {
        mark[i] = int(verts.size());
        verts.push_back(i);
      }
  std::vector<double> wgt(verts.size());
  for (std::size_t t = 0; t < verts.size(); ++t) {
    double si = std::max(s[verts[t]], sfloor);
    wgt[t] = c1 * std::pow(si / prob.p, expo);
  }
  double ridge = 1e-12;
  std::vector<double> acc(verts.size());
  auto matvec = [&](const std::vector<double>& v, std::vector<double>& out) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int a = 0; a < w; ++a)
      for (int i : sets[W[a]]) acc[mark[i]] += v[a];
    for (std::size_t t = 0; t < verts.size(); ++t) acc[t] *= wgt[t];
    out.assign(w, 0.0);
    for (int a = 0; a < w; ++a) {
      double sum = 0;
      for (int i : sets[W[a]]) sum += acc[mark[i]];
      out[a] = sum + ridge * v[a];
    }
  };

  // Jacobi-preconditioned conjugate gradients on H d = g_W
  std::vector<double> diag(w, ridge);
  for (int a = 0; a < w; ++a)
    for (int i : sets[W[a]]) diag[a] += wgt[mark[i]];
  std::vector<double> rhs(w), d(w, 0.0), r(w), z(w), pvec(w), hp(w);
  for (int a = 0; a < w; ++a) rhs[a] = g[W[a]];
  r = rhs;
  double rhs_norm2 = 0;
  for (double v : rhs) rhs_norm2 += v * v;
  for (int a = 0; a < w; ++a) z[a] = r[a] / diag[a];
  pvec = z;
  double rz = 0;
  for (int a = 0; a < w; ++a) rz += r[a] * z[a];
  int cg_cap = std::min(2 * w + 20, 200);
  for (int cg = 0; cg < cg_cap; ++cg) {
    double rr = 0;
    for (double v : r) rr += v * v;
    if (rr <= 1e-16 * std::max(1e-30, rhs_norm2)) break;
    matvec(pvec, hp);
    double php = 0;
    for (int a = 0; a < w; ++a) php += pvec[a] * hp[a];
    if (php <= 0) break;
    double alpha = rz / php;
    for (int a = 0; a < w; ++a) {
      d[a] += alpha * pvec[a];
      r[a] -= alpha * hp[a];
    }
    double rz_new = 0;
    for (int a = 0; a < w; ++a) {
      z[a] = r[a] / diag[a];
      rz_new += r[a] * z[a];
    }
    double beta = rz_new / rz;
    rz = rz_new;
    for (int a = 0; a < w; ++a) pvec[a] = z[a] + beta * pvec[a];
  }

  double g0 = prob.dual_value(lam);
  std::vector<double> cand(lam);
  for (double t = 1.0; t > 1e-6; t *= 0.5) {
    for (int a = 0; a < w; ++a) cand[W[a]] = std::max(0.0, lam[W[a]] + t * d[a]);
    if (prob.dual_value(cand) > g0 + 1e-18) {
      lam = cand;
      return true;
    }
  }
  return false;
}

InnerSolution solve_restricted(const std::vector<std::vector<int>>& sets, int n, double p,
                               double inner_tol, long max_iter,
                               std::vector<double>* warm = nullptr) {
  Restricted prob{&sets, n, p};
  InnerSolution out;
  if (sets.empty()) {
    out.rho.assign(n, 0.0);
    return out;
  }
  if (p == 2.0 && !warm && active_set_quadratic(prob, out)) return out;

  int m = int(sets.size());
  std::vector<double> lam(m);
  if (warm && int(warm->size()) == m) {
    lam = *warm;
  } else {
    for (int j = 0; j < m; ++j) {
      double L = double(std::max<std::size_t>(sets[j].size(), 1));
      lam[j] = p * std::pow(L, 1.0 - p);
    }
    if (warm)
      for (int j = 0; j < int(warm->size()) && j < m; ++j) lam[j] = (*warm)[j];
  }
  std::vector<double> prev = lam, y(m), gy(m), cand(m);
  double t = 1.0, step = 1.0;
  double best_gap = kInf, best_value = kInf, best_dual = -kInf;
  std::vector<double> best_rho, best_lam = lam;
  long it = 0;

  auto evaluate = [&]() {
    auto rho = prob.rho_of_s(prob.s_of(lam));
    double wmin = prob.min_weight(rho);
    if (wmin <= 0) return false;
    auto scaled = rho;
    if (wmin < 1.0)
      for (auto& r : scaled) r /= wmin;
    double val = Restricted::energy(scaled, p);
    double dual = prob.dual_value(lam);
    double gap = val - dual;
    if (gap < best_gap) {
      best_gap = gap;
      best_rho = scaled;
      best_value = val;
      best_dual = dual;
      best_lam = lam;
    }
    return best_gap <= inner_tol * std::max(1.0, best_value);
  };

  bool done = false;
  double last_gap = kInf;
  int stagnant = 0;
  // warm starts usually sit in Newton's basin already
  if (evaluate()) done = true;
  while (!done && it < max_iter) {
    for (int nw = 0; nw < 50; ++nw) {
      if (!newton_dual_step(prob, lam)) break;
      ++it;
      if (evaluate()) {
        done = true;
        break;
      }
    }
    if (done) break;
    // FISTA burst
    long burst_end = std::min(max_iter, it + 400);
    for (; it < burst_end; ++it) {
      double tn = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
      double mom = (t - 1.0) / tn;
      for (int j = 0; j < m; ++j) y[j] = std::max(0.0, lam[j] + mom * (lam[j] - prev[j]));
      prob.grad(y, gy);
      double fy = prob.dual_value(y);
      for (int bt = 0; bt < 60; ++bt) {
        for (int j = 0; j < m; ++j) cand[j] = std::max(0.0, y[j] + step * gy[j]);
        double fc = prob.dual_value(cand);
        double quad = fy;
        for (int j = 0; j < m; ++j) {
          double d = cand[j] - y[j];
          quad += gy[j] * d - d * d / (2.0 * step);
        }
        if (fc >= quad - 1e-18) break;
        step *= 0.5;
      }
      double inner_prod = 0;
      for (int j = 0; j < m; ++j) inner_prod += (y[j] - cand[j]) * (cand[j] - lam[j]);
      prev = lam;
      lam = cand;
      t = inner_prod > 0 ? 1.0 : tn;  // gradient-mapping restart
      step *= 1.05;
      if (it % 32 == 0 && evaluate()) {
        done = true;
        ++it;
        break;
      }
    }
    if (done) break;
    if (evaluate()) break;
    lam = best_lam;
    if (best_gap > 0.75 * last_gap) ++stagnant;
    else stagnant = 0;
    last_gap = best_gap;
    if (stagnant >= 4) break;  // no further progress available
    prev = lam;
    t = 1.0;
  }
  if (best_rho.empty()) {
    auto rho = prob.rho_of_s(prob.s_of(lam));
    double wmin = prob.min_weight(rho);
    if (wmin > 0 && wmin < 1.0)
      for (auto& r : rho) r /= wmin;
    best_rho = rho;
    best_value = Restricted::energy(best_rho, p);
    best_dual = prob.dual_value(lam);
    best_lam = lam;
  }
  if (warm) *warm = best_lam;
  out.rho = std::move(best_rho);
  out.value = best_value;
  out.dual = best_dual;
  out.iterations = it;
  return out;
}

void validate_p(double p) {
  if (!(p > 1.0) || p > 8.0)
    throw std::invalid_argument("modulus exponent must lie in (1, 8]");
}

std::vector<std::vector<int>> active_of(const std::vector<std::vector<int>>& sets,
                                        const std::vector<double>& rho, double slack) {
  std::vector<std::vector<int>> out;
  for (const auto& set : sets) {
    double acc = 0;
    for (int i : set) acc += rho[i];
    if (acc <= 1.0 + slack) out.push_back(set);
  }
  return out;
}

}  // namespace

double Density::energy(double p) const {
  double e = 0;
  for (double w : weights)
    if (w > 0) e += std::pow(w, p);
  return e;
}

double Density::max_weight() const {
  double m = 0;
  for (double w : weights) m = std::max(m, w);
  return m;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::iteration_cap:
      return "iteration-cap";
    case SolveStatus::infeasible_empty_constraint:
      return "infeasible-empty-constraint";
    case SolveStatus::trivial_no_path:
      return "trivial-no-path";
  }
  return "unknown";
}

bool ModulusResult::is_infinite() const { return std::isinf(value); }

ModulusResult solve_modulus(const ConstraintSet& cs, double p, const SolveOptions& opt) {
  validate_p(p);
  ModulusResult res;
  res.p = p;
  std::size_t n = cs.vertex_count;
  for (const auto& set : cs.sets)
    for (int i : set) n = std::max(n, std::size_t(i) + 1);
  res.optimal_density.weights.assign(n, 0.0);
  if (cs.has_empty()) {
    res.value = kInf;
    res.status = SolveStatus::infeasible_empty_constraint;
    return res;
  }
  if (cs.sets.empty()) {
    res.value = 0;
    res.status = SolveStatus::trivial_no_path;
    return res;
  }
  auto sol = solve_restricted(cs.sets, int(n), p, opt.inner_tol, opt.max_inner_iterations);
  res.optimal_density.weights = sol.rho;
  res.value = sol.value;
  res.iterations = int(sol.iterations);
  res.bracket_low = sol.dual;
  res.bracket_high = sol.value;
  res.active_constraints = active_of(cs.sets, sol.rho, 1e-7);
  bool certified = sol.value - sol.dual <= opt.rel_tol * std::max(1.0, sol.value);
  res.status = certified ? SolveStatus::optimal : SolveStatus::iteration_cap;
  return res;
}

namespace {

// minimum-vertex-weight source->target path (Dijkstra with vertex costs)
struct Separation {
  double weight = kInf;
  std::vector<int> path;
};

Separation min_weight_path(const ConnectionProblem& pr, const std::vector<double>& rho) {
  const auto& adj = pr.graph->adj;
  std::size_t n = adj.size();
  std::vector<double> dist(n, kInf);
  std::vector<int> parent(n, -1);
  std::vector<char> done(n, 0), is_target(n, 0);
  for (int t : pr.target) is_target[t] = 1;
  using Node = std::pair<double, int>;
  std::priority_queue<Node, std::vector<Node>, std::greater<Node>> heap;
  for (int s : pr.source) {
    double d = rho[s];
    if (d < dist[s]) {
      dist[s] = d;
      heap.push({d, s});
    }
  }
  Separation out;
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (is_target[u]) {
      out.weight = d;
      for (int v = u; v != -1; v = parent[v]) out.path.push_back(v);
      std::reverse(out.path.begin(), out.path.end());
      return out;
    }
    for (int v : adj[u]) {
      double nd = d + rho[v];
      if (nd < dist[v]) {
        dist[v] = nd;
        parent[v] = u;
        heap.push({nd, v});
      }
    }
  }
  return out;
}

}  // namespace

ModulusResult solve_modulus(const ConnectionProblem& problem, double p, const SolveOptions& opt) {
  validate_p(p);
  ModulusResult res;
  res.p = p;
  std::size_t n = problem.graph->adj.size();
  res.optimal_density.weights.assign(n, 0.0);
  if (problem.trivially_infeasible || !problem.feasible_path_exists()) {
    res.value = 0;
    res.status = SolveStatus::trivial_no_path;
    return res;
  }

  std::vector<std::vector<int>> sets;      // every generated constraint
  std::map<std::vector<int>, int> seen;    // key -> index into sets
  std::vector<int> working;                // active subset fed to the inner solver
  std::vector<char> in_working;
  std::vector<double> rho(n, 0.0);

  // compressed vertex space over the working constraints
  std::vector<int> vert_of;      // compact -> global
  std::vector<int> compact_of;   // global -> compact (-1 when absent)
  compact_of.assign(n, -1);
  std::vector<double> warm;      // lambda aligned with `working`
  InnerSolution sol;

  auto gather_violated = [&](int limit) {
    std::vector<std::vector<int>> found;
    std::vector<double> bumped = rho;
    for (int t = 0; t < limit; ++t) {
      Separation sep = min_weight_path(problem, bumped);
      ++res.separation_calls;
      if (sep.path.empty() || sep.weight >= 1.0 - opt.separation_slack) break;
      std::vector<int> key = sep.path;
      std::sort(key.begin(), key.end());
      key.erase(std::unique(key.begin(), key.end()), key.end());
      double bump = (1.0 - sep.weight) / double(key.size()) + 1e-12;
      for (int v : key) bumped[v] += bump;
      auto it = seen.find(key);
      if (it != seen.end()) {
        if (!in_working[it->second]) {
          working.push_back(it->second);
          in_working[it->second] = 1;
          warm.push_back(0.0);
        }
        continue;
      }
      found.push_back(std::move(key));
    }
    return found;
  };

  auto solve_working = [&](double tol) {
    // compact vertex ids over the working sets
    vert_of.clear();
    std::vector<std::vector<int>> wsets(working.size());
    for (std::size_t a = 0; a < working.size(); ++a) {
      for (int v : sets[working[a]]) {
        if (compact_of[v] < 0) {
          compact_of[v] = int(vert_of.size());
          vert_of.push_back(v);
        }
        wsets[a].push_back(compact_of[v]);
      }
      std::sort(wsets[a].begin(), wsets[a].end());
    }
    sol = solve_restricted(wsets, int(vert_of.size()), p, tol, opt.max_inner_iterations, &warm);
    res.iterations += int(sol.iterations);
    std::fill(rho.begin(), rho.end(), 0.0);
    for (std::size_t c = 0; c < vert_of.size(); ++c) rho[vert_of[c]] = sol.rho[c];
    for (int v : vert_of) compact_of[v] = -1;
  };

  int round = 0;
  bool saturated = false;
  for (; round < opt.max_separation_rounds; ++round) {
    auto violated = gather_violated(24);
    if (violated.empty() && round > 0) break;
    if (violated.empty() && round == 0) {
      // rho = 0 must produce a violated path when one exists
      saturated = true;
      break;
    }
    for (auto& key : violated) {
      int idx = int(sets.size());
      seen.emplace(key, idx);
      sets.push_back(std::move(key));
      in_working.push_back(1);
      working.push_back(idx);
      warm.push_back(0.0);
    }
    solve_working(std::max(opt.inner_tol, 1e-7));
    // retire clearly slack constraints with zero multiplier
    if (working.size() > 64) {
      std::vector<int> keep;
      std::vector<double> keep_warm;
      for (std::size_t a = 0; a < working.size(); ++a) {
        const auto& set = sets[working[a]];
        double acc = 0;
        for (int v : set) acc += rho[v];
        if (warm[a] > 1e-12 || acc < 1.0 + 0.05) {
          keep.push_back(working[a]);
          keep_warm.push_back(warm[a]);
        } else {
          in_working[working[a]] = 0;
        }
      }
      working.swap(keep);
      warm.swap(keep_warm);
    }
  }
  (void)saturated;
  if (!working.empty()) solve_working(opt.inner_tol);

  Separation final_sep = min_weight_path(problem, rho);
  ++res.separation_calls;
  double w = final_sep.weight;
  std::vector<double> cert = rho;
  if (w > 0 && w < 1.0)
    for (auto& r : cert) r /= w;
  double value = Restricted::energy(cert, p);
  res.optimal_density.weights = cert;
  res.value = value;
  res.bracket_low = sol.dual;
  res.bracket_high = value;
  res.active_constraints = active_of(sets, cert, 1e-7);
  bool certified = w >= 1.0 - 1e-7 &&
                   value - sol.dual <= opt.rel_tol * std::max(1.0, value);
  res.status = round < opt.max_separation_rounds
                   ? (certified ? SolveStatus::optimal : SolveStatus::iteration_cap)
                   : SolveStatus::iteration_cap;
  return res;
}

// --- independent oracle ------------------------------------------------------

namespace {

struct Dykstra {
  const std::vector<std::vector<int>>* sets;
  double requirement = 1.0;
  std::vector<std::vector<double>> corrections;

  void reset(std::size_t m) { corrections.assign(m, {}); }

  // projection onto {rho >= 0} ∩ {sum_{P_j} rho >= requirement}
  void project(std::vector<double>& x) {
    const auto& S = *sets;
    for (auto& c : corrections) c.clear();
    for (int sweep = 0; sweep < 400; ++sweep) {
      double moved = 0;
      for (std::size_t j = 0; j < S.size(); ++j) {
        const auto& P = S[j];
        if (P.empty()) continue;
        auto& corr = corrections[j];
        if (corr.empty()) corr.assign(P.size(), 0.0);
        double acc = 0;
        for (std::size_t t = 0; t < P.size(); ++t) {
          x[P[t]] -= corr[t];  // undo previous correction
          acc += x[P[t]];
        }
        double deficit = requirement - acc;
        double adj = deficit > 0 ? deficit / double(P.size()) : 0.0;
        for (std::size_t t = 0; t < P.size(); ++t) {
          corr[t] = adj;
          x[P[t]] += adj;
          moved += std::fabs(adj);
        }
      }
      for (auto& v : x)
        if (v < 0) {
          moved += -v;
          v = 0;
        }
      if (moved < 1e-15) break;
    }
    for (auto& v : x)
      if (v < 0) v = 0;
  }
};

}  // namespace

double brute_force_modulus_requirement(const ConstraintSet& cs, double p, double requirement,
                                       std::uint64_t seed) {
  validate_p(p);
  std::size_t n = cs.vertex_count;
  for (const auto& set : cs.sets)
    for (int i : set) n = std::max(n, std::size_t(i) + 1);
  if (n > 14) throw std::invalid_argument("brute force capped at 14 vertices");
  if (cs.sets.size() > 64) throw std::invalid_argument("brute force capped at 64 constraints");
  if (cs.has_empty()) return kInf;
  if (cs.sets.empty()) return 0.0;

  Dykstra proj;
  proj.sets = &cs.sets;
  proj.requirement = requirement;
  proj.reset(cs.sets.size());

  auto energy = [&](const std::vector<double>& x) {
    double e = 0;
    for (double v : x)
      if (v > 0) e += std::pow(v, p);
    return e;
  };
  auto grad = [&](const std::vector<double>& x, std::vector<double>& g) {
    for (std::size_t i = 0; i < x.size(); ++i)
      g[i] = x[i] > 0 ? p * std::pow(x[i], p - 1.0) : 0.0;
  };
  auto min_weight = [&](const std::vector<double>& x) {
    double w = kInf;
    for (const auto& set : cs.sets) {
      double acc = 0;
      for (int i : set) acc += x[i];
      w = std::min(w, acc);
    }
    return w;
  };
  auto rescaled_energy = [&](const std::vector<double>& x) {
    double w = min_weight(x);
    if (w <= 0) return kInf;
    double f = w < requirement ? requirement / w : 1.0;
    double e = 0;
    for (double v : x)
      if (v > 0) e += std::pow(v * f, p);
    return e;
  };

  // KKT polish: Newton on the equality system of the active constraints over
  // the support discovered by projected gradient. Validated afterwards, so a
  // bad active-set guess cannot corrupt the answer.
  auto polish = [&](std::vector<double> x) -> double {
    std::vector<int> act;
    for (std::size_t j = 0; j < cs.sets.size(); ++j) {
      double acc = 0;
      for (int i : cs.sets[j]) acc += x[i];
      if (acc <= requirement * (1.0 + 1e-5)) act.push_back(int(j));
    }
    if (act.empty()) return rescaled_energy(x);
    std::vector<int> sup;
    for (std::size_t i = 0; i < n; ++i)
      if (x[i] > 1e-9 * requirement) sup.push_back(int(i));
    if (sup.empty()) return rescaled_energy(x);
    int ns = int(sup.size()), ma = int(act.size());
    std::vector<int> where(n, -1);
    for (int a = 0; a < ns; ++a) where[sup[a]] = a;
    std::vector<double> mu(ma, 0.0);
    for (int newton = 0; newton < 60; ++newton) {
      int dim = ns + ma;
      std::vector<double> K(dim * dim, 0.0), r(dim, 0.0), d;
      for (int a = 0; a < ns; ++a) {
        double xi = std::max(x[sup[a]], 1e-12);
        K[a * dim + a] = p * (p - 1.0) * std::pow(xi, p - 2.0);
        double sm = 0;
        for (int jb = 0; jb < ma; ++jb) {
          bool inset = std::binary_search(cs.sets[act[jb]].begin(), cs.sets[act[jb]].end(),
                                          sup[a]);
          if (inset) {
            K[a * dim + ns + jb] = -1.0;
            K[(ns + jb) * dim + a] = -1.0;
            sm += mu[jb];
          }
        }
        r[a] = -(p * std::pow(std::max(x[sup[a]], 0.0), p - 1.0) - sm);
      }
      for (int jb = 0; jb < ma; ++jb) {
        double acc = 0;
        for (int i : cs.sets[act[jb]])
          if (where[i] >= 0) acc += x[i];
        r[ns + jb] = acc - requirement;  // lower block row is -A
        K[(ns + jb) * dim + (ns + jb)] = 1e-13;
      }
      if (!dense_solve(K, r, dim, d)) break;
      double tstep = 1.0;
      for (int a = 0; a < ns; ++a)
        if (d[a] < 0 && x[sup[a]] + d[a] < 0) tstep = std::min(tstep, -x[sup[a]] / d[a] * 0.9);
      double moved = 0;
      for (int a = 0; a < ns; ++a) {
        x[sup[a]] = std::max(0.0, x[sup[a]] + tstep * d[a]);
        moved += std::fabs(d[a]);
      }
      for (int jb = 0; jb < ma; ++jb) mu[jb] += tstep * d[ns + jb];
      if (moved < 1e-15) break;
    }
    // validity: multipliers nonnegative-ish and nothing violated
    for (double m : mu)
      if (m < -1e-8) return rescaled_energy(x);
    return rescaled_energy(x);
  };

  double best = kInf;
  const int starts = 8;
  const long per_start = 125000;  // 8 starts within the 1e6 iteration budget
  for (int sidx = 0; sidx < starts; ++sidx) {
    std::mt19937_64 rng(seed * 1000003ULL + sidx);
    std::vector<double> x(n);
    for (auto& v : x) v = 1.5 * rand_unit(rng) * requirement;
    proj.project(x);
    std::vector<double> g(n), cand(n), xprev = x, yv(n);
    double step = 0.25, tmom = 1.0;
    double fx = energy(x);
    long stall = 0;
    for (long it = 0; it < per_start; ++it) {
      double tn = (1.0 + std::sqrt(1.0 + 4.0 * tmom * tmom)) / 2.0;
      double mom = (tmom - 1.0) / tn;
      for (std::size_t i = 0; i < n; ++i) yv[i] = x[i] + mom * (x[i] - xprev[i]);
      proj.project(yv);
      grad(yv, g);
      bool accepted = false;
      for (int bt = 0; bt < 30; ++bt) {
        for (std::size_t i = 0; i < n; ++i) cand[i] = yv[i] - step * g[i];
        proj.project(cand);
        double fc = energy(cand);
        if (fc < fx + 1e-18) {
          xprev = x;
          x = cand;
          double delta = fx - fc;
          fx = fc;
          tmom = tn;
          step *= 1.1;
          accepted = true;
          stall = delta < 1e-16 * std::max(1.0, fx) ? stall + 1 : 0;
          break;
        }
        step *= 0.5;
        tmom = 1.0;
        if (step < 1e-13) break;
      }
      if (!accepted || stall > 40) break;
    }
    best = std::min(best, polish(x));
    best = std::min(best, rescaled_energy(x));
  }
  return best;
}

double brute_force_modulus(const ConstraintSet& cs, double p, std::uint64_t seed,
                           long /*max_iterations*/) {
  return brute_force_modulus_requirement(cs, p, 1.0, seed);
}

// --- law suite ---------------------------------------------------------------

LawReport check_laws(std::uint64_t seed, int instances, double slack) {
  LawReport rep;
  std::mt19937_64 rng(seed);
  const double ps[3] = {1.5, 2.0, 3.0};
  for (int inst = 0; inst < instances; ++inst) {
    ++rep.instances;
    int n = 3 + int(rand_below(rng, 8));
    double p = ps[rand_below(rng, 3)];
    auto random_family = [&](int count) {
      ConstraintSet cs;
      cs.vertex_count = n;
      for (int j = 0; j < count; ++j) {
        int size = 1 + int(rand_below(rng, std::max(1, n - 1)));
        std::set<int> pick;
        while (int(pick.size()) < size) pick.insert(int(rand_below(rng, n)));
        cs.sets.emplace_back(pick.begin(), pick.end());
      }
      return cs;
    };
    ConstraintSet small = random_family(1 + int(rand_below(rng, 4)));
    ConstraintSet extra = random_family(1 + int(rand_below(rng, 4)));
    ConstraintSet grown = small;
    for (const auto& s : extra.sets) grown.sets.push_back(s);

    double mod_small = solve_modulus(small, p).value;
    double mod_grown = solve_modulus(grown, p).value;
    double mod_extra = solve_modulus(extra, p).value;

    if (mod_small > mod_grown + slack) {
      ++rep.violations;
      std::ostringstream os;
      os << "monotonicity violated at instance " << inst << ": " << mod_small << " > "
         << mod_grown;
      rep.notes.push_back(os.str());
    }
    if (mod_grown > mod_small + mod_extra + slack) {
      ++rep.violations;
      std::ostringstream os;
      os << "subadditivity violated at instance " << inst;
      rep.notes.push_back(os.str());
    }
    // majorization: every set of `small` contains its shrunken copy
    ConstraintSet shrunk;
    shrunk.vertex_count = n;
    for (const auto& s : small.sets) {
      std::vector<int> sub = s;
      while (sub.size() > 1 && rand_below(rng, 2) == 0) sub.erase(sub.begin() + rand_below(rng, sub.size()));
      shrunk.sets.push_back(sub);
    }
    double mod_shrunk = solve_modulus(shrunk, p).value;
    if (mod_small > mod_shrunk + slack) {
      ++rep.violations;
      std::ostringstream os;
      os << "majorization violated at instance " << inst << ": " << mod_small << " > "
         << mod_shrunk;
      rep.notes.push_back(os.str());
    }
  }
  return rep;
}

// --- exponent transfer --------------------------------------------------------

namespace {

ExponentTransferReport make_transfer(double base_value, double max_rho, double direct,
                                     double eps) {
  ExponentTransferReport r;
  r.base_value = base_value;
  r.max_density = max_rho;
  r.bound = std::pow(max_rho, eps) * base_value;
  if (eps == 0) r.bound = base_value;
  r.direct = direct;
  r.holds = r.direct <= r.bound + 1e-7;
  return r;
}

}  // namespace

ExponentTransferReport exponent_transfer(const ConstraintSet& cs, const ModulusResult& base,
                                         double eps) {
  if (base.status != SolveStatus::optimal)
    throw std::invalid_argument("exponent transfer needs an optimal base solve");
  if (eps < 0) throw std::invalid_argument("exponent shift must be nonnegative");
  double direct = eps == 0 ? base.value : solve_modulus(cs, base.p + eps).value;
  return make_transfer(base.value, base.optimal_density.max_weight(), direct, eps);
}

ExponentTransferReport exponent_transfer(const ConnectionProblem& problem,
                                         const ModulusResult& base, double eps) {
  if (base.status != SolveStatus::optimal)
    throw std::invalid_argument("exponent transfer needs an optimal base solve");
  if (eps < 0) throw std::invalid_argument("exponent shift must be nonnegative");
  double direct = eps == 0 ? base.value : solve_modulus(problem, base.p + eps).value;
  return make_transfer(base.value, base.optimal_density.max_weight(), direct, eps);
}

// --- KL vs BK -----------------------------------------------------------------

KlBkReport compare_kl_bk(const ConnectionProblem& problem, int witness_count, double p) {
  KlBkReport rep;
  ModulusResult kl = solve_modulus(problem, p);
  rep.mod_kl = kl.value;
  CurveFamilySpec fam = witness_family(problem, witness_count);
  rep.witnesses_found = int(fam.curves.size());
  if (fam.curves.empty()) {
    rep.mod_bk = 0;  // empty family: trivial modulus
    rep.ratio = 0;
    rep.holds = true;
    return rep;
  }
  ConstraintSet traces = trace_constraints(fam.curves, *problem.cover);
  ModulusResult bk = solve_modulus(traces, p);
  rep.mod_bk = bk.value;
  rep.ratio = rep.mod_kl > 0 ? rep.mod_bk / rep.mod_kl : 0.0;
  rep.holds = rep.mod_bk <= rep.mod_kl + 1e-7;
  return rep;
}

}  // namespace confdim
