#include "zsim/wavefield.hpp"

#include "zsim/rng.hpp"
#include "zsim/spinstates.hpp"
#include "zsim/units.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace zsim {

using namespace units;

namespace {

constexpr Complex kI{0.0, 1.0};

Spinor psi_at(const FourVector& x, const Spinor& a, const PhaseField& phase) {
  return closed_form_state(a, phase.pi, proper_time_of(x, phase)).phi;
}

FourVector unit(int mu) {
  FourVector e = FourVector::Zero();
  e[mu] = 1.0;
  return e;
}

double metric_diag(int mu) { return mu == 0 ? 1.0 : -1.0; }

}  // namespace

double proper_time_of(const FourVector& x, const PhaseField& phase) {
  return phase.tau0 + mdot(phase.pi, x) / kRestEnergy;
}

WaveSample wave_function_at(const FourVector& x, const Spinor& a, const PhaseField& phase) {
  WaveSample w;
  w.x = x;
  w.psi = psi_at(x, a, phase);
  const EnergySplit split = energy_split(w.psi, phase.pi);
  w.plus = split.plus;
  w.minus = split.minus;
  return w;
}

Eigen::Matrix4cd wave_gradient(const FourVector& x, const Spinor& a, const PhaseField& phase) {
  const Spinor psi = psi_at(x, a, phase);
  const Spinor dtau = (-kI / kHbar) * (hamiltonian(phase.pi).m * psi);
  const FourVector pl = lower(phase.pi);
  Eigen::Matrix4cd g;
  for (int mu = 0; mu < 4; ++mu) g.col(mu) = (pl[mu] / kRestEnergy) * dtau;
  return g;
}

Eigen::Matrix4cd wave_gradient_fd(const FourVector& x, const Spinor& a, const PhaseField& phase,
                                  double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  Eigen::Matrix4cd g;
  for (int mu = 0; mu < 4; ++mu)
    g.col(mu) = (psi_at(x + h * unit(mu), a, phase) - psi_at(x - h * unit(mu), a, phase)) / (2.0 * h);
  return g;
}

namespace {
double dirac_from_gradient(const Eigen::Matrix4cd& grad, const Spinor& psi) {
  const auto& g = gamma_matrices();
  Spinor lhs = Spinor::Zero();
  for (int mu = 0; mu < 4; ++mu) lhs += kLightSpeed * (g[mu] * (kI * kHbar * grad.col(mu)));
  return (lhs - kRestEnergy * psi).cwiseAbs().maxCoeff();
}
}  // namespace

ResidualPair dirac_residual(const FourVector& x, const Spinor& a, const PhaseField& phase, double h) {
  const Spinor psi = psi_at(x, a, phase);
  return {dirac_from_gradient(wave_gradient(x, a, phase), psi),
          dirac_from_gradient(wave_gradient_fd(x, a, phase, h), psi)};
}

KleinGordonResidual klein_gordon_residual(const FourVector& x, const Spinor& a,
                                          const PhaseField& phase, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  const double k2 = (kMass * kLightSpeed / kHbar) * (kMass * kLightSpeed / kHbar);
  const Spinor psi = psi_at(x, a, phase);
  const CMatrix4 hm = hamiltonian(phase.pi).m;

  KleinGordonResidual r;
  const Spinor second_tau = -(hm * (hm * psi)) / (kHbar * kHbar);
  const Spinor box = (mdot(phase.pi, phase.pi) / (kRestEnergy * kRestEnergy)) * second_tau;
  r.analytic = (box + k2 * psi).cwiseAbs().maxCoeff();

  Spinor fd = Spinor::Zero();
  for (int mu = 0; mu < 4; ++mu) {
    const Spinor d2 = (psi_at(x + h * unit(mu), a, phase) - 2.0 * psi +
                       psi_at(x - h * unit(mu), a, phase)) /
                      (h * h);
    fd += metric_diag(mu) * d2;
  }
  const Spinor res = fd + k2 * psi;
  for (int i = 0; i < 4; ++i) r.per_component[static_cast<std::size_t>(i)] = std::abs(res[i]);
  r.finite_diff = res.cwiseAbs().maxCoeff();
  return r;
}

FourVector kinetic_momentum(const FourVector& x, const Spinor& a, const PhaseField& phase) {
  const Spinor psi = psi_at(x, a, phase);
  const Eigen::Matrix4cd grad = wave_gradient(x, a, phase);
  const AdjointSpinor bar(psi);
  FourVector p;
  for (int mu = 0; mu < 4; ++mu) p[mu] = (bar * (kI * kHbar * grad.col(mu))).real();
  return p;
}

double continuity_divergence(const FourVector& x, const Spinor& a, const PhaseField& phase,
                             double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  double div = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    const double jp = velocity_of(psi_at(x + h * unit(mu), a, phase))[mu];
    const double jm = velocity_of(psi_at(x - h * unit(mu), a, phase))[mu];
    div += (jp - jm) / (2.0 * h);
  }
  return div;
}

VelocityField velocity_field(const FourVector& x, const Spinor& a, const PhaseField& phase) {
  if (!(a.squaredNorm() > 1e-300)) throw std::domain_error("velocity field undefined for a zero spinor");
  const Spinor psi = psi_at(x, a, phase);
  const double density = psi.squaredNorm();
  if (!(density > 1e-300)) throw std::domain_error("velocity field undefined where psi^* psi = 0");
  const FourVector u = velocity_of(psi);
  return {kLightSpeed, kLightSpeed * spatial(u) / u[0], density};
}

nlohmann::json DensityReport::to_json() const {
  return {{"bins", bins}, {"counts", counts}, {"chi2", chi2}, {"dof", dof}, {"p_value", p_value}};
}

DensityReport chi2_uniformity(int bins_per_axis, std::vector<std::int64_t> counts) {
  DensityReport rep;
  rep.bins = bins_per_axis;
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double chi2 = 0.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  rep.counts = std::move(counts);
  rep.chi2 = chi2;
  rep.dof = static_cast<int>(rep.counts.size()) - 1;
  rep.p_value = boost::math::gamma_q(0.5 * rep.dof, 0.5 * chi2);
  return rep;
}

namespace {

constexpr int kShards = 64;

/// Velocity u(tau) of the boosted spin-up electron in closed form, optionally
/// with the time component of its oscillating part reversed.
struct FlowField {
  FourVector mean, cos_part, sin_part;
  bool corrupt = false;

  FourVector operator()(double tau) const {
    FourVector osc = cos_part * std::cos(kOmega0 * tau) + sin_part * std::sin(kOmega0 * tau);
    if (corrupt) osc[0] = -osc[0];
    return mean + osc;
  }
};

struct Box {
  std::array<double, 4> length{};
};

double wrap(double v, double len) {
  const double r = std::fmod(v, len);
  return r < 0.0 ? r + len : r;
}

void run_shard(const EnsembleConfig& cfg, const FlowField& flow, const FourVector& pi,
               const Box& box, std::int64_t count, std::uint64_t seed,
               std::vector<std::int64_t>& st, std::vector<std::int64_t>& sp) {
  Rng rng(seed);
  const int nb = cfg.bins;
  const auto steps = static_cast<long long>(std::llround(cfg.periods * cfg.steps_per_period));
  const double h = kZbwPeriod / cfg.steps_per_period;
  auto bin = [nb](double v, double len) {
    return std::min(nb - 1, static_cast<int>(v / len * nb));
  };
  for (std::int64_t n = 0; n < count; ++n) {
    FourVector x;
    for (int mu = 0; mu < 4; ++mu) x[mu] = rng.uniform(0.0, box.length[static_cast<std::size_t>(mu)]);
    for (long long k = 0; k < steps; ++k) {
      auto vel = [&](const FourVector& p) { return flow(mdot(pi, p) / kRestEnergy); };
      const FourVector k1 = vel(x);
      const FourVector k2 = vel(x + 0.5 * h * k1);
      const FourVector k3 = vel(x + 0.5 * h * k2);
      const FourVector k4 = vel(x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      for (int mu = 0; mu < 4; ++mu) x[mu] = wrap(x[mu], box.length[static_cast<std::size_t>(mu)]);
    }
    const int bt = bin(x[0], box.length[0]);
    const int b1 = bin(x[1], box.length[1]);
    const int b2 = bin(x[2], box.length[2]);
    const int b3 = bin(x[3], box.length[3]);
    ++st[static_cast<std::size_t>((bt * nb + b1) * nb + b2)];
    ++sp[static_cast<std::size_t>((b1 * nb + b2) * nb + b3)];
  }
}

}  // namespace

EnsembleReport ensemble_uniformity(const EnsembleConfig& cfg) {
  if (cfg.count <= 0) throw std::invalid_argument("ensemble size must be positive");
  if (cfg.bins <= 0 || cfg.steps_per_period <= 0 || cfg.periods < 0.0)
    throw std::invalid_argument("invalid ensemble discretisation");
  if (!(cfg.speed > 0.0 && cfg.speed < kLightSpeed))
    throw std::invalid_argument("ensemble boost speed must lie in (0, c)");

  const BoostParams boost = BoostParams::from_velocity(Vec3(cfg.speed, 0.0, 0.0));
  const Tensor4 lambda = boost_matrix(boost);
  const FourVector pi = lambda * FourVector(kMass * kLightSpeed, 0, 0, 0);
  const Spinor a = spinor_boost(boost) * rest_amplitudes(SpinAxis::from_angles(0.0, 0.0));
  const FourVector u0 = velocity_of(a);
  const FourVector udot0 = (4.0 * kLightSpeed * kLightSpeed / (kHbar * kHbar)) *
                           spin_tensor_of(a).contract_lower(pi);
  FlowField flow{pi / kMass, u0 - pi / kMass, udot0 / kOmega0, cfg.corrupt};

  // tau(x) = gamma (t - V x^1) is periodic in t and x^1 with these lengths.
  const double gamma = boost.gamma;
  Box box;
  box.length = {kZbwPeriod / gamma, kZbwPeriod / (gamma * cfg.speed), 3.0, 3.0};

  const std::size_t cells = static_cast<std::size_t>(cfg.bins) * cfg.bins * cfg.bins;
  std::vector<std::vector<std::int64_t>> st(kShards, std::vector<std::int64_t>(cells, 0));
  std::vector<std::vector<std::int64_t>> sp(kShards, std::vector<std::int64_t>(cells, 0));
  auto shard_count = [&](int s) {
    return cfg.count / kShards + (s < cfg.count % kShards ? 1 : 0);
  };

  const int jobs = std::clamp(cfg.jobs, 1, kShards);
  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      for (int s = w; s < kShards; s += jobs)
        run_shard(cfg, flow, pi, box, shard_count(s), split_seed(cfg.seed, static_cast<std::uint64_t>(s)),
                  st[static_cast<std::size_t>(s)], sp[static_cast<std::size_t>(s)]);
    });
  }
  for (auto& t : pool) t.join();

  std::vector<std::int64_t> st_total(cells, 0), sp_total(cells, 0);
  for (int s = 0; s < kShards; ++s)
    for (std::size_t c = 0; c < cells; ++c) {
      st_total[c] += st[static_cast<std::size_t>(s)][c];
      sp_total[c] += sp[static_cast<std::size_t>(s)][c];
    }
  EnsembleReport rep;
  rep.spacetime = chi2_uniformity(cfg.bins, std::move(st_total));
  rep.spatial = chi2_uniformity(cfg.bins, std::move(sp_total));
  rep.shards = kShards;
  return rep;
}

void write_wave_grid(std::ostream& os, const std::vector<WaveSample>& samples) {
  os << "x0,x1,x2,x3";
  for (int i = 1; i <= 4; ++i) os << ",re_psi" << i << ",im_psi" << i;
  os << '\n';
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (const auto& s : samples) {
    for (int mu = 0; mu < 4; ++mu) {
      if (mu) os << ',';
      put(s.x[mu]);
    }
    for (int i = 0; i < 4; ++i) {
      os << ',';
      put(s.psi[i].real());
      os << ',';
      put(s.psi[i].imag());
    }
    os << '\n';
  }
}

}  // namespace zsim
