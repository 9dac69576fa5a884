#include "brw/group_graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "brw/errors.hpp"

namespace brw {

std::string_view to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::RegularTree: return "RegularTree";
    case GroupKind::FreeGroup: return "FreeGroup";
    case GroupKind::IntegerLattice: return "IntegerLattice";
  }
  return "?";
}

GroupKind parse_group_kind(std::string_view name) {
  if (name == "RegularTree" || name == "regular_tree" || name == "tree") return GroupKind::RegularTree;
  if (name == "FreeGroup" || name == "free_group" || name == "free") return GroupKind::FreeGroup;
  if (name == "IntegerLattice" || name == "integer_lattice" || name == "lattice" || name == "Z")
    return GroupKind::IntegerLattice;
  throw DomainError("unknown group kind '" + std::string(name) + "'");
}

int GroupSpec::degree() const noexcept {
  switch (kind) {
    case GroupKind::RegularTree: return param;
    case GroupKind::FreeGroup: return 2 * param;
    case GroupKind::IntegerLattice: return 2 * param;
  }
  return 0;
}

void GroupSpec::validate() const {
  switch (kind) {
    case GroupKind::RegularTree:
      if (param < 3 || param > 1024) throw DomainError("RegularTree needs 3 <= d <= 1024");
      return;
    case GroupKind::FreeGroup:
      if (param < 2 || param > 512) throw DomainError("FreeGroup needs 2 <= k <= 512");
      return;
    case GroupKind::IntegerLattice:
      if (param < 1 || param > 8) throw DomainError("IntegerLattice needs 1 <= d <= 8");
      return;
  }
}

std::string to_string(const GroupSpec& g) {
  return std::string(to_string(g.kind)) + "(" + std::to_string(g.param) + ")";
}

std::size_t ElemHash::operator()(const Elem& x) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ x.w.size();
  for (int v : x.w) {
    h ^= static_cast<std::uint32_t>(v);
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

namespace {

int inverse_letter(const GroupSpec& g, int letter) noexcept {
  return g.kind == GroupKind::FreeGroup ? (letter ^ 1) : letter;
}

// Appends `letter` to a reduced word, cancelling if needed.
void push_letter(const GroupSpec& g, std::vector<int>& word, int letter) {
  if (!word.empty() && word.back() == inverse_letter(g, letter))
    word.pop_back();
  else
    word.push_back(letter);
}

}  // namespace

Elem identity(const GroupSpec& g) {
  if (g.kind == GroupKind::IntegerLattice) return Elem{std::vector<int>(static_cast<std::size_t>(g.param), 0)};
  return Elem{};
}

bool is_valid(const GroupSpec& g, const Elem& x) noexcept {
  if (g.kind == GroupKind::IntegerLattice) return x.w.size() == static_cast<std::size_t>(g.param);
  const int deg = g.degree();
  for (std::size_t i = 0; i < x.w.size(); ++i) {
    if (x.w[i] < 0 || x.w[i] >= deg) return false;
    if (i > 0 && x.w[i] == inverse_letter(g, x.w[i - 1])) return false;
  }
  return true;
}

void validate(const GroupSpec& g, const Elem& x) {
  if (!is_valid(g, x)) throw InvalidElement("not a normal form for " + to_string(g));
}

Elem step(const GroupSpec& g, const Elem& x, int gen) {
  if (gen < 0 || gen >= g.degree()) throw DomainError("generator index out of range");
  Elem y = x;
  if (g.kind == GroupKind::IntegerLattice)
    y.w[static_cast<std::size_t>(gen / 2)] += (gen % 2 == 0) ? 1 : -1;
  else
    push_letter(g, y.w, gen);
  return y;
}

std::vector<Elem> neighbors(const GroupSpec& g, const Elem& x) {
  validate(g, x);
  std::vector<Elem> out;
  out.reserve(static_cast<std::size_t>(g.degree()));
  for (int gen = 0; gen < g.degree(); ++gen) out.push_back(step(g, x, gen));
  return out;
}

Elem multiply(const GroupSpec& g, const Elem& x, const Elem& y) {
  validate(g, x);
  validate(g, y);
  Elem z = x;
  if (g.kind == GroupKind::IntegerLattice) {
    for (std::size_t i = 0; i < z.w.size(); ++i) z.w[i] += y.w[i];
    return z;
  }
  for (int letter : y.w) push_letter(g, z.w, letter);
  return z;
}

Elem inverse(const GroupSpec& g, const Elem& x) {
  validate(g, x);
  Elem y;
  if (g.kind == GroupKind::IntegerLattice) {
    y.w.reserve(x.w.size());
    for (int c : x.w) y.w.push_back(-c);
    return y;
  }
  y.w.assign(x.w.rbegin(), x.w.rend());
  for (int& letter : y.w) letter = inverse_letter(g, letter);
  return y;
}

std::int64_t norm(const GroupSpec& g, const Elem& x) {
  validate(g, x);
  if (g.kind != GroupKind::IntegerLattice) return static_cast<std::int64_t>(x.w.size());
  std::int64_t s = 0;
  for (int c : x.w) s += std::abs(static_cast<std::int64_t>(c));
  return s;
}

std::int64_t distance(const GroupSpec& g, const Elem& x, const Elem& y) {
  validate(g, x);
  validate(g, y);
  if (g.kind == GroupKind::IntegerLattice) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < x.w.size(); ++i)
      s += std::abs(static_cast<std::int64_t>(x.w[i]) - y.w[i]);
    return s;
  }
  std::size_t common = 0;
  while (common < x.w.size() && common < y.w.size() && x.w[common] == y.w[common]) ++common;
  return static_cast<std::int64_t>(x.w.size() + y.w.size() - 2 * common);
}

std::string to_string(const GroupSpec& g, const Elem& x) {
  std::string s;
  if (g.kind == GroupKind::IntegerLattice) {
    s = "(";
    for (std::size_t i = 0; i < x.w.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(x.w[i]);
    }
    return s + ")";
  }
  if (x.w.empty()) return "e";
  for (std::size_t i = 0; i < x.w.size(); ++i) {
    if (i) s += '.';
    if (g.kind == GroupKind::FreeGroup) {
      const int gen = x.w[i] / 2 + 1;
      s += std::to_string(x.w[i] % 2 == 0 ? gen : -gen);
    } else {
      s += std::to_string(x.w[i] + 1);
    }
  }
  return s;
}

namespace {

std::vector<int> parse_ints(std::string_view text, char sep) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(sep, pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view token = text.substr(pos, end - pos);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size())
      throw InvalidElement("malformed element text '" + std::string(text) + "'");
    out.push_back(value);
    pos = end + 1;
  }
  return out;
}

}  // namespace

Elem parse_elem(const GroupSpec& g, std::string_view text) {
  if (text == "e") return identity(g);
  Elem x;
  if (g.kind == GroupKind::IntegerLattice) {
    if (text.size() < 2 || text.front() != '(' || text.back() != ')')
      throw InvalidElement("lattice element must look like (x,y,...)");
    x.w = parse_ints(text.substr(1, text.size() - 2), ',');
  } else {
    for (int v : parse_ints(text, '.')) {
      if (g.kind == GroupKind::FreeGroup) {
        if (v == 0 || std::abs(v) > g.param) throw InvalidElement("free-group letter out of range");
        x.w.push_back(2 * (std::abs(v) - 1) + (v < 0 ? 1 : 0));
      } else {
        if (v < 1 || v > g.param) throw InvalidElement("tree letter out of range");
        x.w.push_back(v - 1);
      }
    }
  }
  validate(g, x);
  return x;
}

// ---------------------------------------------------------------------------
// Walk distributions

namespace {

// One step of the per-vertex radial recursion on the d-regular tree:
// u'(0) = u(1), u'(j) = u(j-1)/d + (d-1)/d * u(j+1).  `limit` bounds the
// distances that are kept.
void radial_step(std::vector<long double>& u, std::vector<long double>& next, int d, std::size_t limit) {
  const long double back = 1.0L / d;
  const long double out = static_cast<long double>(d - 1) / d;
  next.assign(limit + 1, 0.0L);
  for (std::size_t j = 0; j <= limit; ++j) {
    const long double inward = j + 1 < u.size() ? u[j + 1] : 0.0L;
    if (j == 0)
      next[0] = inward;
    else
      next[j] = (j - 1 < u.size() ? u[j - 1] : 0.0L) * back + inward * out;
  }
  u.swap(next);
}

struct Box {
  int dim;
  int radius;
  std::size_t side() const { return static_cast<std::size_t>(2 * radius + 1); }
  std::size_t cells() const {
    std::size_t c = 1;
    for (int i = 0; i < dim; ++i) c *= side();
    return c;
  }
  // Index of the point `offset`, or npos when it lies outside.
  std::size_t index(const std::vector<int>& offset) const {
    std::size_t idx = 0;
    for (int i = 0; i < dim; ++i) {
      const int c = offset[static_cast<std::size_t>(i)];
      if (c < -radius || c > radius) return static_cast<std::size_t>(-1);
      idx = idx * side() + static_cast<std::size_t>(c + radius);
    }
    return idx;
  }
};

// One lattice step from a box of radius r_old into a box of radius r_new.
std::vector<long double> lattice_step(const std::vector<long double>& old, const Box& from, const Box& to) {
  const int dim = from.dim;
  const long double w = 1.0L / (2 * dim);
  std::vector<long double> next(to.cells(), 0.0L);
  std::vector<int> point(static_cast<std::size_t>(dim));
  std::vector<int> probe(static_cast<std::size_t>(dim));
  for (std::size_t idx = 0; idx < old.size(); ++idx) {
    if (old[idx] == 0.0L) continue;
    std::size_t rest = idx;
    for (int i = dim - 1; i >= 0; --i) {
      point[static_cast<std::size_t>(i)] = static_cast<int>(rest % from.side()) - from.radius;
      rest /= from.side();
    }
    const long double share = old[idx] * w;
    for (int i = 0; i < dim; ++i) {
      for (int sign : {1, -1}) {
        probe = point;
        probe[static_cast<std::size_t>(i)] += sign;
        const std::size_t target = to.index(probe);
        if (target != static_cast<std::size_t>(-1)) next[target] += share;
      }
    }
  }
  return next;
}

void check_lattice_cost(const GroupSpec& g, int steps, int radius) {
  const Box box{g.param, radius};
  const long double cost = static_cast<long double>(box.cells()) * steps * g.degree();
  if (g.param > 3 || cost > 4e10L)
    throw DomainError("lattice walk distribution too large (d <= 3 and a moderate step count required)");
}

}  // namespace

long double sphere_size(const GroupSpec& g, int j) {
  if (j == 0) return 1.0L;
  const int d = g.degree();
  return static_cast<long double>(d) * std::pow(static_cast<long double>(d - 1), j - 1);
}

TransitionTable::TransitionTable(const GroupSpec& g, int max_steps) : group_(g), max_steps_(max_steps) {
  g.validate();
  if (max_steps < 0) throw DomainError("max_steps must be non-negative");
  std::size_t total = 0;
  for (int n = 0; n <= max_steps; ++n) {
    total += g.is_tree() ? static_cast<std::size_t>(n + 1) : Box{g.param, n}.cells();
    if (total > kMaxCells) throw DomainError("transition table exceeds the cell cap");
  }
  rows_.reserve(static_cast<std::size_t>(max_steps) + 1);
  if (g.is_tree()) {
    std::vector<long double> u{1.0L};
    std::vector<long double> scratch;
    rows_.push_back(u);
    for (int n = 1; n <= max_steps; ++n) {
      radial_step(u, scratch, g.degree(), static_cast<std::size_t>(n));
      rows_.push_back(u);
    }
  } else {
    rows_.push_back({1.0L});
    for (int n = 1; n <= max_steps; ++n)
      rows_.push_back(lattice_step(rows_.back(), Box{g.param, n - 1}, Box{g.param, n}));
  }
}

long double TransitionTable::row_value(int n, const std::vector<int>& offset) const {
  if (n < 0 || n > max_steps_) throw DomainError("step count outside the table");
  const auto& r = rows_[static_cast<std::size_t>(n)];
  if (group_.is_tree()) {
    const auto j = static_cast<std::size_t>(offset.at(0));
    return j < r.size() ? r[j] : 0.0L;
  }
  const std::size_t idx = Box{group_.param, n}.index(offset);
  return idx == static_cast<std::size_t>(-1) ? 0.0L : r[idx];
}

long double TransitionTable::probability(int n, const Elem& x, const Elem& y) const {
  if (group_.is_tree()) return row_value(n, {static_cast<int>(distance(group_, x, y))});
  validate(group_, x);
  validate(group_, y);
  std::vector<int> offset(x.w.size());
  for (std::size_t i = 0; i < offset.size(); ++i) offset[i] = y.w[i] - x.w[i];
  return row_value(n, offset);
}

std::vector<long double> return_probabilities(const GroupSpec& g, int max_steps) {
  g.validate();
  if (max_steps < 0) throw DomainError("max_steps must be non-negative");
  std::vector<long double> out;
  out.reserve(static_cast<std::size_t>(max_steps) + 1);
  out.push_back(1.0L);
  if (g.is_tree()) {
    std::vector<long double> u{1.0L};
    std::vector<long double> scratch;
    for (int n = 1; n <= max_steps; ++n) {
      // Mass farther out than the remaining steps can never come back.
      const auto limit = static_cast<std::size_t>(std::min(n, max_steps - n));
      radial_step(u, scratch, g.degree(), limit);
      out.push_back(u[0]);
    }
    return out;
  }
  const int radius = max_steps / 2 + 1;
  check_lattice_cost(g, max_steps, radius);
  const Box box{g.param, radius};
  std::vector<long double> cur(box.cells(), 0.0L);
  const std::vector<int> origin(static_cast<std::size_t>(g.param), 0);
  cur[box.index(origin)] = 1.0L;
  for (int n = 1; n <= max_steps; ++n) {
    cur = lattice_step(cur, box, box);
    out.push_back(cur[box.index(origin)]);
  }
  return out;
}

long double return_probability(const GroupSpec& g, int n, const Elem& x, const Elem& y) {
  g.validate();
  if (n < 0) throw DomainError("step count must be non-negative");
  const std::int64_t dist = distance(g, x, y);
  if (dist > n || (dist - n) % 2 != 0) return 0.0L;
  if (g.is_tree()) {
    std::vector<long double> u{1.0L};
    std::vector<long double> scratch;
    for (int s = 1; s <= n; ++s) {
      // Keep only distances from which `dist` is still reachable.
      const auto limit = static_cast<std::size_t>(std::min<std::int64_t>(s, dist + (n - s)));
      radial_step(u, scratch, g.degree(), limit);
    }
    return u[static_cast<std::size_t>(dist)];
  }
  check_lattice_cost(g, n, n);
  std::vector<long double> cur{1.0L};
  for (int s = 1; s <= n; ++s) cur = lattice_step(cur, Box{g.param, s - 1}, Box{g.param, s});
  std::vector<int> offset(x.w.size());
  for (std::size_t i = 0; i < offset.size(); ++i) offset[i] = y.w[i] - x.w[i];
  return cur[Box{g.param, n}.index(offset)];
}

std::vector<long double> transition_column(const GroupSpec& g, const Elem& x, const Elem& y, int max_steps) {
  g.validate();
  if (max_steps < 0) throw DomainError("max_steps must be non-negative");
  const std::int64_t dist = distance(g, x, y);
  std::vector<long double> out;
  out.reserve(static_cast<std::size_t>(max_steps) + 1);
  if (g.is_tree()) {
    std::vector<long double> u{1.0L};
    std::vector<long double> scratch;
    out.push_back(dist == 0 ? 1.0L : 0.0L);
    for (int s = 1; s <= max_steps; ++s) {
      const auto limit = static_cast<std::size_t>(std::min<std::int64_t>(s, dist + (max_steps - s)));
      radial_step(u, scratch, g.degree(), limit);
      out.push_back(static_cast<std::size_t>(dist) < u.size() ? u[static_cast<std::size_t>(dist)] : 0.0L);
    }
    return out;
  }
  const int radius = static_cast<int>(std::min<std::int64_t>(max_steps, dist + max_steps));
  check_lattice_cost(g, max_steps, radius);
  const Box box{g.param, radius};
  std::vector<int> offset(x.w.size());
  for (std::size_t i = 0; i < offset.size(); ++i) offset[i] = y.w[i] - x.w[i];
  const std::vector<int> origin(static_cast<std::size_t>(g.param), 0);
  std::vector<long double> cur(box.cells(), 0.0L);
  cur[box.index(origin)] = 1.0L;
  const std::size_t target = box.index(offset);
  out.push_back(dist == 0 ? 1.0L : 0.0L);
  for (int s = 1; s <= max_steps; ++s) {
    cur = lattice_step(cur, box, box);
    out.push_back(target == static_cast<std::size_t>(-1) ? 0.0L : cur[target]);
  }
  return out;
}

double spectral_radius_closed_form(const GroupSpec& g) {
  g.validate();
  if (!g.is_tree()) return 1.0;
  const double d = g.degree();
  return 2.0 * std::sqrt(d - 1.0) / d;
}

SpectralEstimate spectral_radius(const GroupSpec& g, int n_max) {
  if (n_max < 1) throw DomainError("n_max must be at least 1");
  const auto p = return_probabilities(g, 2 * n_max);
  SpectralEstimate out;
  out.sequence.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    const long double value = std::pow(p[static_cast<std::size_t>(2 * n)], 1.0L / (2 * n));
    out.sequence.push_back(static_cast<double>(value));
  }
  out.estimate = out.sequence.back();
  out.closed_form = spectral_radius_closed_form(g);
  return out;
}

VisitsSeries visits_series(const GroupSpec& g, double mean, int N, long double cap) {
  if (!(mean >= 0.0)) throw DomainError("mean must be non-negative");
  if (N < 0) throw DomainError("N must be non-negative");
  const auto p = return_probabilities(g, N);
  VisitsSeries out;
  out.partial_sums.reserve(p.size());
  long double sum = 0.0L;
  long double carry = 0.0L;
  long double power = 1.0L;
  for (std::size_t n = 0; n < p.size(); ++n) {
    const long double term = p[n] == 0.0L ? 0.0L : power * p[n];
    const long double t = sum + term;
    carry += (sum >= term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    out.partial_sums.push_back(sum + carry);
    if (!(out.partial_sums.back() <= cap)) {
      out.divergence_index = n;
      break;
    }
    power *= mean;
  }
  return out;
}

}  // namespace brw
