#include "gapcert/sampler.hpp"

#include "gapcert/dobrushin.hpp"

#include <algorithm>
#include <cmath>

namespace gapcert {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += kGolden);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& word : state_) word = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

Real Rng::uniform01() {
  return static_cast<Real>(next_u64() >> 11) * 0x1.0p-53;
}

Real Rng::exponential(Real rate) {
  if (!(rate > 0.0)) throw InvalidInput("Rng::exponential: rate must be positive");
  return -std::log1p(-uniform01()) / rate;
}

int Rng::uniform_int(int n) {
  if (n <= 0) throw InvalidInput("Rng::uniform_int: n must be positive");
  return std::min(static_cast<int>(uniform01() * n), n - 1);
}

int Rng::sample_weights(const Vec& weights) {
  const Real u = uniform01();
  Real acc = 0.0;
  for (Index k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(weights.size()) - 1;
}

std::uint64_t SeedSpec::replica_stream(std::uint64_t replica) const {
  std::uint64_t sm = master + (replica + 1) * kGolden;
  return splitmix64(sm);
}

std::size_t Trajectory::state_at(const StateSpace& space, Real t) const {
  std::size_t state = initial_state;
  for (const TrajectoryEvent& e : events) {
    if (e.time > t) break;
    state = space.with_coord(state, e.site, e.new_value);
  }
  return state;
}

Trajectory gillespie(const SpinModel& model, std::size_t x0, Real t_max, std::uint64_t seed) {
  if (t_max < 0.0) throw InvalidInput("gillespie: t_max must be nonnegative");
  const StateSpace& space = model.space();
  if (x0 >= space.size()) throw InvalidInput("gillespie: initial state out of range");

  Rng rng(seed);
  Trajectory traj;
  traj.initial_state = x0;
  traj.t_max = t_max;

  const int n = model.num_sites();
  std::size_t state = x0;
  Real t = 0.0;
  while (true) {
    t += rng.exponential(static_cast<Real>(n));
    if (t > t_max) break;
    const int site = rng.uniform_int(n);
    const DiscreteDistribution cond = model.conditional(site, state);
    const int v = cond.support[static_cast<std::size_t>(rng.sample_weights(cond.weights))];
    traj.events.push_back({t, site, v});
    state = space.with_coord(state, site, v);
  }
  return traj;
}

std::vector<std::size_t> exact_sample(const Vec& table, int n, std::uint64_t seed,
                                      std::size_t cap) {
  if (static_cast<std::size_t>(table.size()) > cap)
    throw SizeLimit("exact_sample: table exceeds cap");
  if (n < 0) throw InvalidInput("exact_sample: sample count must be nonnegative");

  Vec cdf(table.size());
  Real acc = 0.0;
  for (Index a = 0; a < table.size(); ++a) {
    if (table[a] < -1e-12) throw InvalidInput("exact_sample: negative weight");
    acc += table[a];
    cdf[a] = acc;
  }
  if (std::abs(acc - 1.0) > 1e-9) throw InvalidInput("exact_sample: table must be normalized");

  Rng rng(seed);
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const Real u = rng.uniform01() * acc;
    const Real* p = std::lower_bound(cdf.data(), cdf.data() + cdf.size(), u);
    out.push_back(std::min(static_cast<std::size_t>(p - cdf.data()),
                           static_cast<std::size_t>(cdf.size() - 1)));
  }
  return out;
}

bool AutocorrReport::pass() const {
  for (const AutocorrRow& row : rows)
    if (row.autocov > row.envelope + row.ci_half) return false;
  return true;
}

AutocorrReport autocorrelation_decay(const SpinModel& model, const Vec& f,
                                     const std::vector<Real>& t_grid, int replicas,
                                     std::uint64_t seed, std::optional<Real> r_sp,
                                     std::size_t cap) {
  const StateSpace& space = model.space();
  if (f.size() != static_cast<Index>(space.size()))
    throw InvalidInput("autocorrelation_decay: table size mismatch");
  if (replicas < 2) throw InvalidInput("autocorrelation_decay: at least two replicas required");
  if (t_grid.empty()) throw InvalidInput("autocorrelation_decay: empty time grid");

  const Vec mu = model.joint_table(cap);
  const Real mean = mu.dot(f);
  const Real variance = mu.dot(f.cwiseProduct(f)) - mean * mean;
  const Real rate = 1.0 - r_sp.value_or(spectral_radius(interdependence_matrix(model).C));
  const Real t_end = *std::max_element(t_grid.begin(), t_grid.end());

  const SeedSpec seeds{seed};
  const std::vector<std::size_t> starts =
      exact_sample(mu, replicas, seeds.replica_stream(0), cap);

  const std::size_t nt = t_grid.size();
  std::vector<Vec> f0(nt, Vec(replicas)), ft(nt, Vec(replicas));
  for (int r = 0; r < replicas; ++r) {
    const Trajectory traj =
        gillespie(model, starts[static_cast<std::size_t>(r)], t_end,
                  seeds.replica_stream(static_cast<std::uint64_t>(r) + 1));
    const Real fa = f[static_cast<Index>(traj.initial_state)];
    for (std::size_t k = 0; k < nt; ++k) {
      f0[k][r] = fa;
      ft[k][r] = f[static_cast<Index>(traj.state_at(space, t_grid[k]))];
    }
  }

  AutocorrReport report;
  report.variance = variance;
  report.rate = rate;
  report.replicas = replicas;
  const Real R = static_cast<Real>(replicas);
  for (std::size_t k = 0; k < nt; ++k) {
    const Real a_bar = f0[k].mean();
    const Real b_bar = ft[k].mean();
    const Vec prod = (f0[k].array() - a_bar) * (ft[k].array() - b_bar);
    const Real cov = prod.sum() / (R - 1.0);
    const Real sd = std::sqrt((prod.array() - prod.mean()).square().sum() / (R - 1.0));
    AutocorrRow row;
    row.t = t_grid[k];
    row.autocov = cov;
    row.ci_half = 1.96 * sd / std::sqrt(R);
    row.envelope = variance * std::exp(-rate * t_grid[k]);
    report.rows.push_back(row);
    if (row.ci_half > std::max(1e-12, 0.5 * std::abs(row.envelope) + 0.05 * variance))
      report.statistical_power_warning = true;
  }
  return report;
}

}  // namespace gapcert
