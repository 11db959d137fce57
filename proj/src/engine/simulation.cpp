#include "focksim/engine/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <thread>

#include "focksim/errors.hpp"
#include "focksim/quantum/measure.hpp"
#include "focksim/stats.hpp"

namespace focksim::engine {
namespace {

using fock::PhotonPool;
using fock::RouteId;

struct Event {
  double t = 0.0;
  std::uint64_t seq = 0;
  int route = -1;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t != b.t) return a.t > b.t;
    return a.seq > b.seq;
  }
};

/// Full mutable state of one trial; copyable so the analytic path can fork
/// it at measurement branches.
struct SimState {
  std::map<std::uint64_t, PhotonPool> pools;
  std::vector<std::uint64_t> route_owner;  // route -> pool id (0 = none)
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue;
  std::uint64_t next_seq = 0;
  fock::PoolIdAllocator ids;
  std::vector<std::map<int, double>> pending;  // device -> port -> arrival t
  std::vector<int> detector_k;       // analytic outcome per detector (-1: none)
  std::vector<bool> detector_gated;  // arrival was inside an active gate
  int events_processed = 0;

  explicit SimState(const Topology& topo)
      : route_owner(topo.routes.size(), 0),
        pending(topo.devices.size()),
        detector_k(topo.detectors.size(), -1),
        detector_gated(topo.detectors.size(), false) {}

  void schedule(double t, int route) {
    queue.push({t, next_seq++, route});
  }
};

bool arrival_in_gate(const Topology& topo, const DetectorNode& det, double t) {
  const double period = topo.clock_period;
  if (period <= 0.0) return true;
  const double rel = t - det.gate_offset;
  const double center = std::round(rel / period) * period;
  return std::abs(rel - center) <= 0.5 * det.params.gate_width + 1e-18;
}

PhotonPool& owner_pool(SimState& st, int route) {
  return st.pools.at(st.route_owner[route]);
}

// Applies a device traversal entered on `route`; transforms the owning pool
// in place, retargets route ownership, and schedules the produced slots.
void fire_simple_traversal(SimState& st, const Topology& topo, int dev_idx,
                           int in_port, double t, RandomStream& rng) {
  const DeviceNode& dev = topo.devices[dev_idx];
  const int in_route = dev.ports[in_port].in_route;
  const std::uint64_t pool_id = st.route_owner[in_route];
  PhotonPool& pool = st.pools.at(pool_id);

  int out_port = -1;
  double delay = 0.0;
  switch (dev.kind) {
    case DeviceKind::kCirculator:
      out_port = (in_port + 1) % static_cast<int>(dev.ports.size());
      break;
    case DeviceKind::kFaradayMirror:
      out_port = 0;
      break;
    default:  // two-port devices traverse to the other port
      out_port = (in_port == 0) ? 1 : 0;
      break;
  }
  const int out_route = dev.ports[out_port].out_route;
  const RouteId in{static_cast<std::uint32_t>(in_route)};
  const RouteId out{static_cast<std::uint32_t>(out_route)};

  switch (dev.kind) {
    case DeviceKind::kAttenuator: {
      auto p = std::get<components::AttenuatorParams>(dev.params);
      p.in = in;
      p.out = out;
      pool = components::apply_attenuator(pool, p);
      break;
    }
    case DeviceKind::kFilter: {
      auto p = std::get<components::FilterParams>(dev.params);
      p.in = in;
      p.out = out;
      pool = components::apply_filter(pool, p);
      break;
    }
    case DeviceKind::kCirculator: {
      auto p = std::get<components::CirculatorParams>(dev.params);
      p.in = in;
      p.out = out;
      pool = components::apply_circulator(pool, p);
      break;
    }
    case DeviceKind::kPolarizationModulator: {
      auto p = std::get<components::PolarizationModulatorParams>(dev.params);
      p.in = in;
      p.out = out;
      pool = components::apply_polarization_modulator(pool, p);
      break;
    }
    case DeviceKind::kPhaseModulator: {
      auto p = std::get<components::PhaseModulatorParams>(dev.params);
      p.in = in;
      p.out = out;
      pool = components::apply_phase_modulator(pool, p);
      break;
    }
    case DeviceKind::kIsolator: {
      auto p = std::get<components::IsolatorParams>(dev.params);
      p.in = in;
      p.out = out;
      p.forward = (in_port == 0);
      pool = components::apply_isolator(pool, p);
      break;
    }
    case DeviceKind::kWaveplate: {
      auto p = std::get<components::WaveplateParams>(dev.params);
      p.in = in;
      p.out = out;
      pool = components::apply_waveplate(pool, p);
      break;
    }
    case DeviceKind::kFiber: {
      auto p = std::get<components::FiberParams>(dev.params);
      p.in = in;
      p.out = out;
      pool = components::apply_fiber(pool, p, rng);
      delay = p.length_km * p.delay_s_per_km;
      break;
    }
    case DeviceKind::kFaradayMirror: {
      auto p = std::get<components::FaradayMirrorParams>(dev.params);
      p.in = in;
      p.out = out;
      pool = components::apply_faraday_mirror(pool, p);
      break;
    }
    case DeviceKind::kSwitch: {
      auto p = std::get<components::SwitchParams>(dev.params);
      p.in = in;
      p.out_1 = RouteId{static_cast<std::uint32_t>(dev.ports[1].out_route)};
      p.out_2 = RouteId{static_cast<std::uint32_t>(dev.ports[2].out_route)};
      pool = components::apply_switch(pool, p);
      st.route_owner[dev.ports[1].out_route] = pool_id;
      st.route_owner[dev.ports[2].out_route] = pool_id;
      st.schedule(t, dev.ports[1].out_route);
      st.schedule(t, dev.ports[2].out_route);
      return;
    }
    default:
      throw std::logic_error("fire_simple_traversal: splitter reached");
  }
  st.route_owner[out_route] = pool_id;
  st.schedule(t + delay, out_route);
}

// BS/PBS firing once every wired input has arrived (or at flush time).
void fire_splitter(SimState& st, const Topology& topo, int dev_idx, double t) {
  const DeviceNode& dev = topo.devices[dev_idx];
  const int in_a = dev.ports[0].in_route;
  const int in_b = dev.ports[1].in_route;
  const int out_c = dev.ports[2].out_route;
  const int out_d = dev.ports[3].out_route;

  std::uint64_t id_a = (in_a >= 0) ? st.route_owner[in_a] : 0;
  std::uint64_t id_b = (in_b >= 0) ? st.route_owner[in_b] : 0;
  std::uint64_t pool_id = 0;
  if (id_a && id_b && id_a != id_b) {
    PhotonPool merged =
        quantum::merge_pools(st.pools.at(id_a), st.pools.at(id_b), st.ids);
    pool_id = merged.pool_id;
    st.pools.erase(id_a);
    st.pools.erase(id_b);
    for (std::uint64_t& owner : st.route_owner) {
      if (owner == id_a || owner == id_b) owner = pool_id;
    }
    st.pools.emplace(pool_id, std::move(merged));
  } else {
    pool_id = id_a ? id_a : id_b;
  }
  if (!pool_id) return;  // nothing ever arrived

  PhotonPool& pool = st.pools.at(pool_id);
  auto route = [](int r) {
    return RouteId{static_cast<std::uint32_t>(r < 0 ? 0x7fffffff : r)};
  };
  if (dev.kind == DeviceKind::kBs) {
    auto p = std::get<components::BsParams>(dev.params);
    p.in_a = route(in_a);
    p.in_b = route(in_b);
    p.out_c = route(out_c);
    p.out_d = route(out_d);
    pool = components::apply_bs(pool, p);
  } else {
    auto p = std::get<components::PbsParams>(dev.params);
    p.in_a = route(in_a);
    p.in_b = route(in_b);
    p.out_c = route(out_c);
    p.out_d = route(out_d);
    pool = components::apply_pbs(pool, p);
  }
  st.route_owner[out_c] = pool_id;
  st.route_owner[out_d] = pool_id;
  st.schedule(t, out_c);
  st.schedule(t, out_d);
}

void emit_sources(SimState& st, const Topology& topo, RandomStream& rng,
                  TrialResult* result) {
  for (const SourceNode& src : topo.sources) {
    PhotonPool pool;
    if (src.single_photon) {
      pool = sources::emit_single_photon(src.params, st.ids);
    } else {
      sources::WeakCoherentEmission e =
          sources::emit_weak_coherent(src.params, src.truncation_nt, rng, st.ids);
      pool = std::move(e.pool);
      if (result) result->exceedance_redraws += e.redraws;
    }
    if (src.out_route >= 0) {
      for (fock::Photon& ph : pool.photons) {
        for (fock::PhotonState& s : ph.states) {
          s.route = RouteId{static_cast<std::uint32_t>(src.out_route)};
        }
      }
      st.route_owner[src.out_route] = pool.pool_id;
      st.schedule(src.emit_offset, src.out_route);
    }
    st.pools.emplace(pool.pool_id, std::move(pool));
  }
}

struct NextDetectorEvent {
  int detector = -1;
  int route = -1;
  double t = 0.0;
};

// Processes events until the queue is empty or a detector event is reached
// (which is popped and returned, not processed). Pending splitter inputs
// are flushed once the queue drains.
std::optional<NextDetectorEvent> advance(SimState& st, const Topology& topo,
                                         RandomStream& rng) {
  while (true) {
    if (st.queue.empty()) {
      // Flush splitters still waiting for a second input that will never
      // come (dangling upstream); deterministic device order.
      bool flushed = false;
      for (std::size_t d = 0; d < topo.devices.size(); ++d) {
        if (st.pending[d].empty()) continue;
        const DeviceNode& dev = topo.devices[d];
        double t = 0.0;
        for (const auto& [port, time] : st.pending[d]) t = std::max(t, time);
        st.pending[d].clear();
        fire_splitter(st, topo, static_cast<int>(d), t);
        flushed = true;
        break;
      }
      if (!flushed) return std::nullopt;
      continue;
    }

    const Event ev = st.queue.top();
    st.queue.pop();
    if (++st.events_processed > kMaxEventsPerTrial) {
      throw CapacityError("run_trial: event count exceeds " +
                          std::to_string(kMaxEventsPerTrial));
    }
    const RouteInfo& route = topo.routes[ev.route];
    if (!route.to) continue;  // sink: pool keeps its states, reported at end

    const Endpoint& to = *route.to;
    if (to.kind == Endpoint::kDetector) {
      if (st.route_owner[ev.route] == 0) continue;
      return NextDetectorEvent{to.node, ev.route, ev.t};
    }

    const DeviceNode& dev = topo.devices[to.node];
    if (dev.kind == DeviceKind::kBs || dev.kind == DeviceKind::kPbs) {
      st.pending[to.node][to.port] = ev.t;
      bool ready = true;
      for (int port : {0, 1}) {
        if (dev.ports[port].in_route < 0) continue;
        if (!st.pending[to.node].count(port)) ready = false;
      }
      if (ready) {
        double t = 0.0;
        for (const auto& [port, time] : st.pending[to.node]) {
          t = std::max(t, time);
        }
        st.pending[to.node].clear();
        fire_splitter(st, topo, to.node, t);
      }
    } else {
      fire_simple_traversal(st, topo, to.node, to.port, ev.t, rng);
    }
  }
}

int count_undetected(const SimState& st) {
  int n = 0;
  for (const auto& [id, pool] : st.pools) {
    n += static_cast<int>(pool.photons.size());
  }
  return n;
}

}  // namespace

TrialResult run_trial(const Topology& topo, std::uint64_t master_seed,
                      std::uint64_t point_index, std::uint64_t trial_index) {
  RandomStream rng = RandomStream::derive(master_seed, point_index, trial_index);
  TrialResult result;
  SimState st(topo);
  emit_sources(st, topo, rng, &result);

  std::vector<bool> last_clicked(topo.detectors.size(), false);
  while (auto det_ev = advance(st, topo, rng)) {
    const DetectorNode& det = topo.detectors[det_ev->detector];
    const std::uint64_t pool_id = st.route_owner[det_ev->route];
    const PhotonPool& pool = st.pools.at(pool_id);
    const bool in_gate = arrival_in_gate(topo, det, det_ev->t);
    detector::DetectResult dr = detector::detect(
        pool, RouteId{static_cast<std::uint32_t>(det_ev->route)},
        det_ev->detector, trial_index, det_ev->t, in_gate, det.params,
        last_clicked[det_ev->detector], rng, topo.photon_cap);
    result.records.push_back(dr.record);
    if (dr.record.aborted) {
      result.aborted = true;
      return result;
    }
    last_clicked[det_ev->detector] = dr.record.clicked;
    st.pools.at(pool_id) = std::move(dr.surviving_pool);
  }
  result.undetected_photons = count_undetected(st);
  return result;
}

namespace {

struct AnalyticAccum {
  std::vector<double> click;
  std::vector<std::vector<double>> pair_joint;  // per pair: E[c1*c2]
  double aborted = 0.0;
};

void analytic_leaf(const Topology& topo,
                   const std::vector<std::pair<int, int>>& pairs,
                   const SimState& st, double weight, AnalyticAccum& acc) {
  std::vector<double> pc(topo.detectors.size(), 0.0);
  for (std::size_t d = 0; d < topo.detectors.size(); ++d) {
    if (st.detector_k[d] < 0 || !st.detector_gated[d]) continue;
    pc[d] = detector::click_probability(st.detector_k[d],
                                        topo.detectors[d].params);
  }
  for (std::size_t d = 0; d < pc.size(); ++d) acc.click[d] += weight * pc[d];
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    acc.pair_joint[p][0] += weight * pc[pairs[p].first] * pc[pairs[p].second];
  }
}

void analytic_recurse(const Topology& topo,
                      const std::vector<std::pair<int, int>>& pairs,
                      SimState st, double weight, AnalyticAccum& acc,
                      RandomStream& dummy_rng) {
  std::optional<NextDetectorEvent> det_ev;
  try {
    det_ev = advance(st, topo, dummy_rng);
  } catch (const DegenerateStateError&) {
    acc.aborted += weight;
    return;
  }
  if (!det_ev) {
    analytic_leaf(topo, pairs, st, weight, acc);
    return;
  }

  const DetectorNode& det = topo.detectors[det_ev->detector];
  const std::uint64_t pool_id = st.route_owner[det_ev->route];
  const PhotonPool& pool = st.pools.at(pool_id);
  const RouteId route{static_cast<std::uint32_t>(det_ev->route)};
  const bool in_gate = arrival_in_gate(topo, det, det_ev->t);

  quantum::NumberDistribution dist;
  try {
    dist = quantum::route_number_distribution(pool, route, topo.photon_cap);
  } catch (const DegenerateStateError&) {
    acc.aborted += weight;
    return;
  }

  for (int k = 0; k < static_cast<int>(dist.probabilities.size()); ++k) {
    const double pk = dist.probabilities[k];
    if (pk <= 0.0) continue;
    quantum::SubsetWeights sw;
    if (k == 0) {
      sw.masks = {0};
      sw.weights = {1.0};
      sw.total = 1.0;
    } else {
      sw = quantum::collapse_subset_weights(pool, route, k, topo.photon_cap);
      if (sw.total <= fock::kDegenerateNormEps) {
        acc.aborted += weight * pk;
        continue;
      }
    }
    for (std::size_t i = 0; i < sw.masks.size(); ++i) {
      if (sw.weights[i] <= 0.0) continue;
      const double branch = weight * pk * (sw.weights[i] / sw.total);
      SimState child = st;
      try {
        quantum::CollapseOutcome outcome = quantum::collapse_with_subset(
            pool, route, k, sw.masks[i], topo.photon_cap);
        child.pools.at(pool_id) = std::move(outcome.surviving_pool);
      } catch (const DegenerateStateError&) {
        acc.aborted += branch;
        continue;
      }
      child.detector_k[det_ev->detector] = k;
      child.detector_gated[det_ev->detector] =
          in_gate && det.params.enabled;
      analytic_recurse(topo, pairs, std::move(child), branch, acc, dummy_rng);
    }
  }
}

}  // namespace

AnalyticPoint run_point_analytic(const Topology& topo) {
  for (const SourceNode& src : topo.sources) {
    if (!src.single_photon) {
      throw ConfigError(
          "analytic mode requires single-photon sources (source '" +
          src.name + "')");
    }
  }
  for (const DeviceNode& dev : topo.devices) {
    if (dev.kind != DeviceKind::kFiber) continue;
    const auto& f = std::get<components::FiberParams>(dev.params);
    for (const components::Disturbance* d :
         {&f.phase, &f.alpha, &f.beta, &f.theta}) {
      if (d->stddev > 0.0) {
        throw ConfigError("analytic mode requires zero fiber disturbance ('" +
                          dev.name + "')");
      }
    }
  }

  std::vector<std::pair<int, int>> pairs;
  for (const auto& [a, b] : topo.experiment.coincidence_pairs) {
    pairs.emplace_back(topo.detector_index(a), topo.detector_index(b));
  }

  AnalyticAccum acc;
  acc.click.assign(topo.detectors.size(), 0.0);
  acc.pair_joint.assign(pairs.size(), std::vector<double>(1, 0.0));

  RandomStream dummy_rng(0);  // never consulted: all elements deterministic
  SimState st(topo);
  emit_sources(st, topo, dummy_rng, nullptr);
  analytic_recurse(topo, pairs, std::move(st), 1.0, acc, dummy_rng);

  AnalyticPoint out;
  out.click_probability = acc.click;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    out.coincidence.push_back(acc.pair_joint[p][0]);
  }
  out.aborted_probability = acc.aborted;
  return out;
}

namespace {

void run_point(const Topology& base, std::uint64_t master_seed,
               std::uint64_t point_index, double sweep_value,
               const std::vector<std::pair<int, int>>& pairs,
               bool keep_records, PointStatistics& out) {
  Topology topo = base;
  if (base.experiment.sweep) {
    set_parameter(topo, base.experiment.sweep->parameter, sweep_value);
  }
  out.sweep_value = sweep_value;
  out.clicks.assign(topo.detectors.size(), 0);
  out.coincidences.assign(pairs.size(), 0);

  if (topo.experiment.analytic) {
    const AnalyticPoint ap = run_point_analytic(topo);
    out.trials = 0;
    for (double p : ap.click_probability) {
      out.click_freq.push_back(p);
      out.click_lo.push_back(p);
      out.click_hi.push_back(p);
    }
    for (double p : ap.coincidence) {
      out.coin_freq.push_back(p);
      out.coin_lo.push_back(p);
      out.coin_hi.push_back(p);
    }
    return;
  }

  const std::uint64_t trials = topo.experiment.trials;
  std::vector<bool> clicked(topo.detectors.size());
  for (std::uint64_t t = 0; t < trials; ++t) {
    TrialResult tr = run_trial(topo, master_seed, point_index, t);
    out.exceedance_redraws += static_cast<std::uint64_t>(tr.exceedance_redraws);
    if (keep_records) {
      out.records.insert(out.records.end(), tr.records.begin(),
                         tr.records.end());
    }
    if (tr.aborted) {
      ++out.aborted;
      continue;
    }
    out.undetected_photons += static_cast<std::uint64_t>(tr.undetected_photons);
    std::fill(clicked.begin(), clicked.end(), false);
    for (const detector::DetectionRecord& r : tr.records) {
      if (r.clicked) clicked[r.detector] = true;
    }
    for (std::size_t d = 0; d < clicked.size(); ++d) {
      if (clicked[d]) ++out.clicks[d];
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      if (clicked[pairs[p].first] && clicked[pairs[p].second]) {
        ++out.coincidences[p];
      }
    }
  }

  const std::uint64_t completed = trials - out.aborted;
  out.trials = completed;
  for (std::size_t d = 0; d < out.clicks.size(); ++d) {
    const double f =
        completed ? static_cast<double>(out.clicks[d]) / completed : 0.0;
    const Interval iv = wilson_interval(out.clicks[d], completed);
    out.click_freq.push_back(f);
    out.click_lo.push_back(iv.lo);
    out.click_hi.push_back(iv.hi);
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const double f =
        completed ? static_cast<double>(out.coincidences[p]) / completed : 0.0;
    const Interval iv = wilson_interval(out.coincidences[p], completed);
    out.coin_freq.push_back(f);
    out.coin_lo.push_back(iv.lo);
    out.coin_hi.push_back(iv.hi);
  }
}

}  // namespace

ExperimentResult run_experiment(const Topology& topo, std::uint64_t master_seed,
                                int n_threads, bool keep_records) {
  ExperimentResult result;
  result.analytic = topo.experiment.analytic;
  for (const DetectorNode& d : topo.detectors) {
    result.detector_names.push_back(d.name);
  }
  std::vector<std::pair<int, int>> pairs;
  for (const auto& [a, b] : topo.experiment.coincidence_pairs) {
    pairs.emplace_back(topo.detector_index(a), topo.detector_index(b));
    result.pair_names.emplace_back(a, b);
  }

  int points = 1;
  double start = 0.0, step = 0.0;
  if (topo.experiment.sweep) {
    points = topo.experiment.sweep->points;
    start = topo.experiment.sweep->start;
    step = (points > 1)
               ? (topo.experiment.sweep->end - start) / (points - 1)
               : 0.0;
  }
  result.points.resize(points);

  auto worker = [&](int thread_idx, int stride) {
    for (int i = thread_idx; i < points; i += stride) {
      run_point(topo, master_seed, static_cast<std::uint64_t>(i),
                start + step * i, pairs, keep_records, result.points[i]);
    }
  };

  n_threads = std::max(1, n_threads);
  if (n_threads == 1 || points == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> threads;
    const int n = std::min(n_threads, points);
    threads.reserve(n);
    for (int i = 0; i < n; ++i) threads.emplace_back(worker, i, n);
    for (std::thread& th : threads) th.join();
  }
  return result;
}

}  // namespace focksim::engine
