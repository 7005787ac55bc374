#include "bellmux/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "bellmux/analytic/visibility.hpp"
#include "bellmux/analytic/werner.hpp"
#include "bellmux/sim/capture.hpp"

namespace bellmux {

void SimulationPlan::validate() const {
  geom.validate();
  kernel.validate();
  phase.validate();
  source.validate();
  noise.validate();
  dec.validate();
  if (schedule.empty()) throw std::invalid_argument("plan: schedule must be nonempty");
  for (const auto& e : schedule)
    if (!(e.storage_time >= 0.0))
      throw std::invalid_argument("plan: storage times must be >= 0");
  if (schedule.size() > 65535) throw std::invalid_argument("plan: too many schedule entries");
  if (mode == SimMode::effective && (v_eff < 0.0 || v_eff > 1.0))
    throw std::invalid_argument("plan: v_eff must lie in [0, 1]");
  if (!(n_sigma > 0.0)) throw std::invalid_argument("plan: n_sigma must be > 0");
}

int sample_pair_counts(RngStream& rng, double chi) { return rng.geometric_mean(chi); }

std::pair<Wavevector, Wavevector> sample_pair_kinematics(RngStream& rng, const ModeGrid& grid,
                                                         int cell,
                                                         const CorrelationKernel& kernel) {
  const Wavevector k_w = grid.sample_in_cell(cell, rng);
  const Wavevector k_r{k_w.x + kernel.sigma_x * rng.gauss(),
                       k_w.y + kernel.sigma_y * rng.gauss()};
  return {k_w, k_r};
}

std::pair<Port, Port> sample_polarization(RngStream& rng, double v_pol, double total_phase,
                                          const MeasurementSetting& setting) {
  const WernerState state{v_pol, total_phase};
  const auto p = joint_outcome_probs(state, setting);
  double u = rng.uniform();
  if (u < p[0]) return {Port::plus, Port::plus};
  u -= p[0];
  if (u < p[1]) return {Port::plus, Port::minus};
  u -= p[1];
  if (u < p[2]) return {Port::minus, Port::plus};
  return {Port::minus, Port::minus};
}

double pair_read_survival(double t, Wavevector k_pair, const DetectorGeometry& geom,
                          const DecoherenceParams& dec) {
  const auto [kh, kv] = branch_moduli(k_pair, geom);
  const double xh = t * kh / dec.gamma;
  const double xv = t * kv / dec.gamma;
  return 0.5 * (std::exp(-xh * xh) + std::exp(-xv * xv));
}

namespace {

struct WindowCtx {
  double p2 = 1.0;       // pair capture through the discrete window
  double cu = 0.0;       // same-cell cross-pair capture
  double w_alpha = 0.0;  // window weight at the nominal mode density
  double w_grid = 0.0;   // window weight at the achieved mode density
};

WindowCtx make_window_ctx(const SimulationPlan& plan, const ModeGrid& grid) {
  const double p = plan.geom.pixel_pitch;
  const int mx = window_halfwidth_px(plan.n_sigma, plan.kernel.sigma_x, p);
  const int my = window_halfwidth_px(plan.n_sigma, plan.kernel.sigma_y, p);
  WindowCtx ctx;
  ctx.p2 = axis_capture_pair(plan.kernel.sigma_x, p, mx) *
           axis_capture_pair(plan.kernel.sigma_y, p, my);
  ctx.cu = axis_capture_samecell(plan.kernel.sigma_x, grid.cell_w, p, mx) *
           axis_capture_samecell(plan.kernel.sigma_y, grid.cell_h, p, my);
  const double window_area = (2.0 * mx + 1.0) * (2.0 * my + 1.0) * p * p;
  ctx.w_alpha = plan.source.alpha / (4.0 * plan.kernel.sigma_x * plan.kernel.sigma_y) * window_area;
  ctx.w_grid = grid.cell_count() / plan.geom.area() * window_area;
  return ctx;
}

double accidental_rate_ctx(const SimulationPlan& plan, const WindowCtx& ctx, double t,
                           Wavevector cell_center) {
  const double chi = plan.source.chi;
  const double b_w = plan.noise.b_w;
  const double b_r = readout_noise(t, chi, plan.noise);
  const double surv = pair_read_survival(t, cell_center, plan.geom, plan.dec);
  const double eta_r = plan.source.eta_r0 * surv;
  const double b_r_eff = b_r / eta_r;
  const double target = 2.0 * (chi + b_w) * (chi + b_r_eff) * ctx.w_alpha;
  double lambda = 0.0;
  for (int it = 0; it < 3; ++it) {
    const double natural =
        (chi + b_w + lambda) * (chi + lambda + b_r_eff) * ctx.w_grid + chi * chi * ctx.cu;
    lambda = std::max(0.0, (target - natural) / ctx.p2);
  }
  return lambda;
}

struct EntryCtx {
  MeasurementSetting setting;
  double t = 0.0;
  std::uint16_t basis = 0;
  std::uint64_t shots = 0;
  std::uint64_t shot_offset = 0;
  double noise_mean_w = 0.0;
  double noise_mean_r = 0.0;
  std::vector<double> lambda_acc;  // per cell, empty when calibration is off
};

class ShotGenerator {
 public:
  ShotGenerator(const SimulationPlan& plan, const ModeGrid& grid) : plan_(plan), grid_(grid) {}

  void generate(const EntryCtx& entry, std::uint64_t local_shot, std::vector<PhotonHit>& out,
                std::uint64_t& dropped) const {
    RngStream rng = RngStream::for_shot(plan_.seed, entry.basis, local_shot);
    const std::uint64_t shot_id = entry.shot_offset + local_shot;
    w_buf_.clear();
    r_buf_.clear();

    const int cells = grid_.cell_count();
    for (int c = 0; c < cells; ++c) {
      const int n = sample_pair_counts(rng, plan_.source.chi);
      for (int i = 0; i < n; ++i) emit_pair(entry, c, rng, true, dropped);
      if (!entry.lambda_acc.empty()) {
        const int n_acc = rng.poisson(entry.lambda_acc[c]);
        for (int i = 0; i < n_acc; ++i) emit_pair(entry, c, rng, false, dropped);
      }
    }
    if (entry.noise_mean_w > 0.0) emit_noise(entry, Arm::writeout, rng);
    if (entry.noise_mean_r > 0.0) emit_noise(entry, Arm::readout, rng);

    for (auto& h : w_buf_) h.shot = shot_id;
    for (auto& h : r_buf_) h.shot = shot_id;
    out.insert(out.end(), w_buf_.begin(), w_buf_.end());
    out.insert(out.end(), r_buf_.begin(), r_buf_.end());
  }

 private:
  void emit_pair(const EntryCtx& entry, int cell, RngStream& rng, bool correlated,
                 std::uint64_t& dropped) const {
    const auto [k_w, k_r] = sample_pair_kinematics(rng, grid_, cell, plan_.kernel);
    const bool det_w = rng.bernoulli(plan_.source.eta_w);
    const double surv = pair_read_survival(entry.t, k_w, plan_.geom, plan_.dec);
    const bool det_r = rng.bernoulli(plan_.source.eta_r0 * plan_.source.eta_d * surv);
    if (!det_w && !det_r) return;

    Port port_w = Port::plus;
    Port port_r = Port::plus;
    if (det_w && det_r && correlated) {
      const double v_pol = polarization_visibility(entry.t, k_w);
      const double phi = phase_at(plan_.phase, k_w, k_r);
      std::tie(port_w, port_r) = sample_polarization(rng, v_pol, phi, entry.setting);
    } else {
      if (det_w) port_w = rng.bernoulli(0.5) ? Port::plus : Port::minus;
      if (det_r) port_r = rng.bernoulli(0.5) ? Port::plus : Port::minus;
    }
    if (det_w) push_hit(entry, Arm::writeout, port_w, k_w, dropped);
    if (det_r) push_hit(entry, Arm::readout, port_r, k_r, dropped);
  }

  double polarization_visibility(double t, Wavevector k_pair) const {
    const auto [kh, kv] = branch_moduli(k_pair, plan_.geom);
    const double g2 = plan_.dec.gamma * plan_.dec.gamma;
    const double v_tilde = 1.0 / std::cosh(t * t * (kv * kv - kh * kh) / (2.0 * g2));
    if (plan_.mode == SimMode::physical) return v_tilde;
    if (plan_.inject == InjectMode::constant) return v_tilde * plan_.v_eff;
    const double tau = plan_.dec.gamma / (0.5 * (kh + kv));
    return v_tilde * visibility_storage(t, tau, plan_.inject_v0, plan_.inject_w);
  }

  void emit_noise(const EntryCtx& entry, Arm arm, RngStream& rng) const {
    const double mean = arm == Arm::writeout ? entry.noise_mean_w : entry.noise_mean_r;
    const int n = rng.poisson(mean);
    auto& buf = arm == Arm::writeout ? w_buf_ : r_buf_;
    for (int i = 0; i < n; ++i) {
      PhotonHit h;
      h.arm = arm;
      h.basis = entry.basis;
      h.storage_time = entry.t;
      h.ix = static_cast<std::uint16_t>(rng.uniform() * plan_.geom.width_px);
      h.iy = static_cast<std::uint16_t>(rng.uniform() * plan_.geom.height_px);
      h.port = rng.bernoulli(0.5) ? Port::plus : Port::minus;
      buf.push_back(h);
    }
  }

  void push_hit(const EntryCtx& entry, Arm arm, Port port, Wavevector k,
                std::uint64_t& dropped) const {
    const auto [ix, iy] = plan_.geom.to_pixel(k);
    if (ix < 0 || ix >= plan_.geom.width_px || iy < 0 || iy >= plan_.geom.height_px) {
      ++dropped;
      return;
    }
    PhotonHit h;
    h.arm = arm;
    h.basis = entry.basis;
    h.port = port;
    h.storage_time = entry.t;
    h.ix = static_cast<std::uint16_t>(ix);
    h.iy = static_cast<std::uint16_t>(iy);
    (arm == Arm::writeout ? w_buf_ : r_buf_).push_back(h);
  }

  const SimulationPlan& plan_;
  const ModeGrid& grid_;
  mutable std::vector<PhotonHit> w_buf_;
  mutable std::vector<PhotonHit> r_buf_;
};

}  // namespace

double accidental_rate(const SimulationPlan& plan, const ModeGrid& grid, double t,
                       Wavevector cell_center) {
  const WindowCtx ctx = make_window_ctx(plan, grid);
  return accidental_rate_ctx(plan, ctx, t, cell_center);
}

RunDiagnostics run_experiment(const SimulationPlan& plan, EventSink& sink) {
  plan.validate();
  const ModeGrid grid = ModeGrid::build(plan.geom, plan.kernel, plan.source.alpha);
  const int cells = grid.cell_count();
  const bool physical = plan.mode == SimMode::physical;

  WindowCtx wctx;
  if (physical && plan.floor_calibration) wctx = make_window_ctx(plan, grid);

  std::vector<EntryCtx> entries(plan.schedule.size());
  std::uint64_t offset = 0;
  for (std::size_t e = 0; e < plan.schedule.size(); ++e) {
    const auto& s = plan.schedule[e];
    auto& ctx = entries[e];
    ctx.setting = s.setting;
    ctx.t = s.storage_time;
    ctx.basis = static_cast<std::uint16_t>(e);
    ctx.shots = s.shots;
    ctx.shot_offset = offset;
    offset += s.shots;
    if (physical) {
      ctx.noise_mean_w = cells * plan.noise.b_w * plan.source.eta_w;
      ctx.noise_mean_r =
          cells * readout_noise(s.storage_time, plan.source.chi, plan.noise) * plan.source.eta_d;
      if (plan.floor_calibration) {
        ctx.lambda_acc.resize(cells);
        for (int c = 0; c < cells; ++c)
          ctx.lambda_acc[c] = accidental_rate_ctx(plan, wctx, s.storage_time, grid.cell_center(c));
      }
    }
  }

  int threads = plan.threads > 0 ? plan.threads
                                 : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, 64);
  constexpr std::uint64_t kBlock = 2048;

  RunDiagnostics diag;
  diag.achieved_modes = cells;
  diag.total_shots = offset;

  std::vector<std::vector<PhotonHit>> block_hits(threads);
  std::vector<std::uint64_t> block_dropped(threads);

  for (const auto& entry : entries) {
    const std::uint64_t n_blocks = (entry.shots + kBlock - 1) / kBlock;
    for (std::uint64_t wave = 0; wave < n_blocks; wave += threads) {
      const int active = static_cast<int>(std::min<std::uint64_t>(threads, n_blocks - wave));
      auto work = [&](int slot) {
        const std::uint64_t b = wave + slot;
        const std::uint64_t begin = b * kBlock;
        const std::uint64_t end = std::min(entry.shots, begin + kBlock);
        block_hits[slot].clear();
        block_dropped[slot] = 0;
        ShotGenerator gen(plan, grid);
        for (std::uint64_t i = begin; i < end; ++i)
          gen.generate(entry, i, block_hits[slot], block_dropped[slot]);
      };
      if (active == 1) {
        work(0);
      } else {
        std::vector<std::thread> pool;
        pool.reserve(active);
        for (int s = 0; s < active; ++s) pool.emplace_back(work, s);
        for (auto& th : pool) th.join();
      }
      for (int s = 0; s < active; ++s) {
        diag.total_hits += block_hits[s].size();
        diag.dropped_hits += block_dropped[s];
        if (!block_hits[s].empty()) sink.accept(block_hits[s]);
      }
    }
  }
  return diag;
}

}  // namespace bellmux
