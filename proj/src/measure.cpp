#include "irrsio/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace irrsio {

AtomicMeasure::AtomicMeasure(int dim, std::vector<Vec3> positions,
                             std::vector<double> weights)
    : dim_(dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("measure: dim must be 2 or 3");
  if (positions.size() != weights.size())
    throw std::invalid_argument("measure: positions/weights length mismatch");
  px_.reserve(positions.size());
  py_.reserve(positions.size());
  pz_.reserve(positions.size());
  w_.reserve(weights.size());
  total_mass_ = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Vec3& p = positions[i];
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2]))
      throw std::invalid_argument("measure: non-finite atom position");
    if (dim == 2 && p[2] != 0.0)
      throw std::invalid_argument("measure: dim 2 requires z == 0");
    if (!(weights[i] > 0.0))
      throw std::invalid_argument("measure: weights must be positive");
    px_.push_back(p[0]);
    py_.push_back(p[1]);
    pz_.push_back(p[2]);
    w_.push_back(weights[i]);
    total_mass_ += weights[i];
  }
}

AtomicMeasure AtomicMeasure::restrict_to(const std::vector<std::size_t>& indices) const {
  std::vector<Vec3> pos;
  std::vector<double> wts;
  pos.reserve(indices.size());
  wts.reserve(indices.size());
  for (std::size_t i : indices) {
    pos.push_back(position(i));
    wts.push_back(w_[i]);
  }
  return AtomicMeasure(dim_, std::move(pos), std::move(wts));
}

double AtomicMeasure::min_pair_distance() const {
  if (size() < 2) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j)
      best = std::min(best, dist2(position(i), position(j)));
  return std::sqrt(best);
}

double AtomicMeasure::support_diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j)
      best = std::max(best, dist2(position(i), position(j)));
  return std::sqrt(best);
}

Vec3 AtomicMeasure::centroid() const {
  Vec3 c{0, 0, 0};
  if (empty()) return c;
  for (std::size_t i = 0; i < size(); ++i) c = c + w_[i] * position(i);
  return (1.0 / total_mass_) * c;
}

void RatioSchedule::validate() const {
  if (corners != 4) throw std::invalid_argument("ratio schedule: corners must be 4");
  for (double r : ratios)
    if (!(r > 0.0 && r < 0.5))
      throw std::invalid_argument("ratio schedule: every ratio must lie in (0, 1/2)");
}

RatioSchedule two_plateau_schedule(double ratio_a, int len_a, double ratio_b,
                                   int len_b, int generations) {
  if (len_a < 1 || len_b < 1)
    throw std::invalid_argument("two_plateau_schedule: block lengths must be >= 1");
  RatioSchedule s;
  s.ratios.reserve(generations);
  for (int k = 0; k < generations; ++k) {
    const int phase = k % (len_a + len_b);
    s.ratios.push_back(phase < len_a ? ratio_a : ratio_b);
  }
  s.validate();
  return s;
}

AtomicMeasure make_cantor_measure(const RatioSchedule& schedule, int generations,
                                  int dim) {
  schedule.validate();
  if (generations < 1) throw std::invalid_argument("cantor: generations must be >= 1");
  if (generations > 12)
    throw std::invalid_argument("cantor: generation count above 12 rejected (4^N atoms)");
  if (static_cast<int>(schedule.ratios.size()) < generations)
    throw std::invalid_argument("cantor: schedule shorter than generation count");
  if (dim != 2 && dim != 3) throw std::invalid_argument("cantor: dim must be 2 or 3");

  // Cells are tracked by their lower-left corner; each generation splits a
  // cell of side s into four corner cells of side s*ratio.
  struct Cell {
    double x, y;
  };
  std::vector<Cell> cells{{0.0, 0.0}};
  double side = 1.0;
  for (int g = 0; g < generations; ++g) {
    const double r = schedule.ratios[g];
    const double child = side * r;
    std::vector<Cell> next;
    next.reserve(cells.size() * 4);
    for (const Cell& c : cells) {
      next.push_back({c.x, c.y});
      next.push_back({c.x + side - child, c.y});
      next.push_back({c.x, c.y + side - child});
      next.push_back({c.x + side - child, c.y + side - child});
    }
    cells = std::move(next);
    side = child;
  }

  const double weight = std::pow(0.25, generations);
  std::vector<Vec3> pos;
  std::vector<double> wts(cells.size(), weight);
  pos.reserve(cells.size());
  for (const Cell& c : cells) pos.push_back({c.x + side / 2, c.y + side / 2, 0.0});
  return AtomicMeasure(dim, std::move(pos), std::move(wts));
}

namespace {

// Zigzag with |slope| == 1 a.e. and zeros at 0 and 1.
double zigzag(double x) {
  if (x <= 0.25) return x;
  if (x <= 0.75) return 0.5 - x;
  return x - 1.0;
}

}  // namespace

AtomicMeasure make_graph_measure(std::size_t num_atoms, double lipschitz_slope,
                                 int dim) {
  if (num_atoms < 2) throw std::invalid_argument("graph: need at least 2 atoms");
  if (lipschitz_slope < 0.0) throw std::invalid_argument("graph: slope must be >= 0");
  if (dim != 2 && dim != 3) throw std::invalid_argument("graph: dim must be 2 or 3");
  std::vector<Vec3> pos;
  std::vector<double> wts(num_atoms, 1.0 / static_cast<double>(num_atoms));
  pos.reserve(num_atoms);
  for (std::size_t i = 0; i < num_atoms; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(num_atoms - 1);
    pos.push_back({x, lipschitz_slope * zigzag(x), 0.0});
  }
  return AtomicMeasure(dim, std::move(pos), std::move(wts));
}

double ball_mass(const AtomicMeasure& mu, const Ball& ball) {
  const double r2 = ball.radius * ball.radius;
  double mass = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (dist2(mu.position(i), ball.center) < r2) mass += mu.weight(i);
  return mass;
}

double density(const AtomicMeasure& mu, const Ball& ball) {
  if (!(ball.radius > 0.0)) throw std::invalid_argument("density: radius must be > 0");
  const double diam = 2.0 * ball.radius;
  return ball_mass(mu, ball) / std::pow(diam, mu.n());
}

std::vector<std::pair<double, double>> density_profile(const AtomicMeasure& mu,
                                                       const Vec3& x, double r_min,
                                                       double r_max, int per_decade) {
  if (!(r_min > 0.0 && r_min < r_max))
    throw std::invalid_argument("density_profile: need 0 < r_min < r_max");
  if (per_decade < 1) throw std::invalid_argument("density_profile: per_decade >= 1");
  const double decades = std::log10(r_max / r_min);
  const int steps = std::max(1, static_cast<int>(std::ceil(decades * per_decade)));
  std::vector<std::pair<double, double>> out;
  out.reserve(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    const double r = r_min * std::pow(r_max / r_min, static_cast<double>(i) / steps);
    out.emplace_back(r, density(mu, Ball{x, r}));
  }
  return out;
}

double growth_constant(const AtomicMeasure& mu, int sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw std::invalid_argument("growth_constant: sample_count >= 1");
  if (mu.empty()) return 0.0;

  // Radius ladder spanning the resolved scales of the measure.
  double r_lo = mu.min_pair_distance() / 2;
  double r_hi = mu.support_diameter();
  if (!std::isfinite(r_lo) || r_hi == 0.0) {
    r_lo = 1.0;
    r_hi = 1.0;
  }
  std::vector<double> radii;
  const int per_decade = 8;
  if (r_lo >= r_hi) {
    radii.push_back(r_lo);
  } else {
    const double decades = std::log10(r_hi / r_lo);
    const int steps = std::max(1, static_cast<int>(std::ceil(decades * per_decade)));
    for (int i = 0; i <= steps; ++i)
      radii.push_back(r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / steps));
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, mu.size() - 1);
  double best = 0.0;
  for (int s = 0; s < sample_count; ++s) {
    const Vec3 x = mu.position(pick(rng));
    for (double r : radii) {
      const double m = ball_mass(mu, Ball{x, r});
      best = std::max(best, m / std::pow(r, mu.n()));
    }
  }
  return best;
}

AtomicMeasure read_measure(std::istream& in) {
  std::vector<Vec3> pos;
  std::vector<double> wts;
  std::string line;
  int line_no = 0;
  int dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<double> vals;
    double v;
    while (ls >> v) vals.push_back(v);
    if (!ls.eof()) {
      std::string tok;
      ls.clear();
      ls >> tok;
      throw std::runtime_error("measure file line " + std::to_string(line_no) +
                               ": bad token '" + tok + "'");
    }
    if (vals.empty()) continue;
    if (vals.size() != 3 && vals.size() != 4)
      throw std::runtime_error("measure file line " + std::to_string(line_no) +
                               ": expected 3 or 4 numbers, got " +
                               std::to_string(vals.size()));
    const int line_dim = static_cast<int>(vals.size()) - 1;
    if (dim == 0) dim = line_dim;
    if (line_dim != dim)
      throw std::runtime_error("measure file line " + std::to_string(line_no) +
                               ": inconsistent dimension");
    const double weight = vals.back();
    if (!(weight > 0.0))
      throw std::runtime_error("measure file line " + std::to_string(line_no) +
                               ": weight must be > 0");
    pos.push_back({vals[0], vals[1], dim == 3 ? vals[2] : 0.0});
    wts.push_back(weight);
  }
  if (pos.empty()) throw std::runtime_error("measure file: no atoms");
  return AtomicMeasure(dim, std::move(pos), std::move(wts));
}

AtomicMeasure read_measure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open measure file: " + path);
  return read_measure(in);
}

void write_measure(std::ostream& out, const AtomicMeasure& mu) {
  char buf[160];
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Vec3 p = mu.position(i);
    if (mu.dim() == 2)
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p[0], p[1], mu.weight(i));
    else
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", p[0], p[1], p[2],
                    mu.weight(i));
    out << buf;
  }
}

void write_measure_file(const std::string& path, const AtomicMeasure& mu) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_measure(out, mu);
}

}  // namespace irrsio
