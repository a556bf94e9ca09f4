// Copyright 2026 The mixsolve Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mixsolve/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mixsolve {

std::string to_string(DerivativeScheme s) {
  switch (s) {
    case DerivativeScheme::None: return "none";
    case DerivativeScheme::Spectral: return "spectral";
    case DerivativeScheme::FD2: return "fd2";
    case DerivativeScheme::FD4: return "fd4";
    case DerivativeScheme::FD6: return "fd6";
  }
  return "?";
}

DerivativeScheme parse_derivative(const std::string& s) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  if (l == "none") return DerivativeScheme::None;
  if (l == "spectral") return DerivativeScheme::Spectral;
  if (l == "fd2") return DerivativeScheme::FD2;
  if (l == "fd4") return DerivativeScheme::FD4;
  if (l == "fd6") return DerivativeScheme::FD6;
  throw std::invalid_argument("unknown derivative scheme: " + s);
}

int scheme_order(DerivativeScheme s) {
  switch (s) {
    case DerivativeScheme::FD2: return 2;
    case DerivativeScheme::FD4: return 4;
    case DerivativeScheme::FD6: return 6;
    default: return 0;
  }
}

std::complex<double> derivative_symbol(DerivativeScheme scheme, double omega, double h) {
  if (!(h > 0)) throw std::invalid_argument("derivative_symbol: h must be positive");
  const double t = omega * h;
  double v = 0.0;
  switch (scheme) {
    case DerivativeScheme::None: return {1.0, 0.0};
    case DerivativeScheme::Spectral: v = omega; break;
    case DerivativeScheme::FD2: v = std::sin(t) / h; break;
    case DerivativeScheme::FD4: v = (4.0 / 3.0 * std::sin(t) - 1.0 / 6.0 * std::sin(2 * t)) / h; break;
    case DerivativeScheme::FD6:
      v = (1.5 * std::sin(t) - 0.3 * std::sin(2 * t) + std::sin(3 * t) / 30.0) / h;
      break;
  }
  return {0.0, v};
}

namespace {

BC flip(BC b) {
  if (b == BC::Even) return BC::Odd;
  if (b == BC::Odd) return BC::Even;
  return b;
}

// Transform order: real-to-real directions first, then the Fourier ones.
std::vector<int> stage_order(const std::array<BCPair, 3>& bc) {
  std::vector<int> order;
  for (int d = 0; d < 3; ++d)
    if (bc[d].is_symmetric() || bc[d].is_semi_unbounded()) order.push_back(d);
  for (int d = 0; d < 3; ++d)
    if (bc[d].is_periodic() || bc[d].is_unbounded()) order.push_back(d);
  return order;
}

// Plans for one set of boundary conditions, in stage order.
std::vector<TransformPlan> stage_plans(const Domain& dom, const std::array<BCPair, 3>& bc,
                                       const std::vector<int>& order) {
  std::vector<TransformPlan> out;
  bool complex = false;
  bool first_fourier = true;
  for (int d : order) {
    Role role;
    if (bc[d].is_symmetric()) role = Role::FirstSpectral;
    else if (bc[d].is_semi_unbounded()) role = Role::SemiUnbounded;
    else if (bc[d].is_periodic()) role = first_fourier ? Role::FirstSpectral : Role::SubsequentSpectral;
    else role = Role::DoubledUnbounded;
    if (bc[d].is_periodic() || bc[d].is_unbounded()) first_fourier = false;
    out.push_back(plan_transform(bc[d], dom.layout, role, dom.cells[d], dom.length[d], complex));
    complex = out.back().complex_out;
  }
  return out;
}

std::string green_key(const KernelId& k, const Domain& d, const std::vector<TransformPlan>& plans) {
  std::ostringstream os;
  os.precision(17);
  os << k.name() << '/' << k.sigma_ratio << '/' << to_string(d.layout);
  for (int i = 0; i < 3; ++i) os << '/' << d.cells[i] << ':' << d.length[i] << ':' << d.bcs[i].name();
  for (const auto& p : plans) os << '/' << to_string(p.kind) << ':' << p.n_store;
  return os.str();
}

std::shared_ptr<const GreenTable> cached_green(const KernelId& kernel, const Domain& dom,
                                               const std::vector<int>& order,
                                               const std::vector<TransformPlan>& plans,
                                               ZeroModePolicy policy) {
  static std::mutex mutex;
  static std::map<std::string, std::shared_ptr<const GreenTable>> cache;
  static std::vector<std::string> age;
  const std::string key = green_key(kernel, dom, plans) + (policy == ZeroModePolicy::Keep ? "/keep" : "");
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  std::array<TransformPlan, 3> by_dir;
  for (std::size_t s = 0; s < order.size(); ++s) by_dir[order[s]] = plans[s];
  auto t = std::make_shared<const GreenTable>(build_green(kernel, dom, by_dir, policy));
  std::lock_guard lock(mutex);
  if (!cache.count(key)) {
    cache.emplace(key, t);
    age.push_back(key);
    if (age.size() > 8) {
      cache.erase(age.front());
      age.erase(age.begin());
    }
  }
  return t;
}

SolvePlan build_plan(const Domain& domain, const std::vector<std::array<BCPair, 3>>& in_bcs,
                     const std::vector<std::array<BCPair, 3>>& out_bcs, const KernelId& kernel,
                     Strategy strategy, DerivativeScheme derivative, int nranks,
                     const SwitchKnobs& knobs) {
  if (nranks < 1) throw std::invalid_argument("nranks must be positive");
  for (int d = 0; d < 3; ++d)
    if (domain.cells[d] < 1 || !(domain.length[d] > 0))
      throw std::invalid_argument("domain extents must be positive");
  SolvePlan p;
  p.domain = domain;
  p.kernel = kernel;
  p.strategy = strategy;
  p.derivative = derivative;
  p.nranks = nranks;
  p.knobs = knobs;
  p.input_bcs = in_bcs;
  p.output_bcs = out_bcs;

  const std::vector<int> order = stage_order(domain.bcs);
  for (const auto& bc : in_bcs)
    if (stage_order(bc) != order) throw CapabilityError("components need different transform orders");
  for (const auto& bc : out_bcs)
    if (stage_order(bc) != order) throw CapabilityError("components need different transform orders");

  for (const auto& bc : in_bcs) p.forward.push_back(stage_plans(domain, bc, order));
  for (const auto& bc : out_bcs) p.backward.push_back(stage_plans(domain, bc, order));

  const std::vector<TransformPlan>& ref = p.forward[0];
  auto check_compatible = [&](const std::vector<TransformPlan>& other) {
    for (std::size_t s = 0; s < order.size(); ++s) {
      const TransformPlan &a = ref[s], &b = other[s];
      if (a.n_in != b.n_in || a.n_store != b.n_store || a.complex_in != b.complex_in ||
          a.complex_out != b.complex_out || a.n_logical != b.n_logical)
        throw CapabilityError("component transforms do not share a mode layout");
      for (int q = 0; q < a.n_store; ++q)
        if (mode_meta(a, q).omega != mode_meta(b, q).omega)
          throw CapabilityError("component transforms do not share frequencies");
    }
  };
  for (const auto& v : p.forward) check_compatible(v);
  for (const auto& v : p.backward) check_compatible(v);

  const std::array<int, 3> samples = sample_counts(domain);
  std::array<int, 3> ext = samples;
  bool complex = false;
  p.user = build_pencil_topology(samples, nranks, order[0], 1);
  const Topology* prev = &p.user;
  p.normalization = 1.0;
  for (std::size_t s = 0; s < order.size(); ++s) {
    const int d = order[s];
    const TransformPlan& tp = ref[s];
    Stage st;
    st.dir = d;
    if (domain.bcs[d].has_unbounded()) st.ext = extension_geometry(domain, d);
    std::array<int, 3> in_n = ext;
    in_n[d] = tp.n_in;
    st.in = build_pencil_topology(in_n, nranks, d, complex ? 2 : 1);
    st.in.line_pad = tp.line_doubles();
    std::array<int, 3> out_n = ext;
    out_n[d] = tp.n_store;
    st.out = build_pencil_topology(out_n, nranks, d, tp.complex_out ? 2 : 1);
    st.out.line_pad = tp.line_doubles();
    if (st.in.nproc != st.out.nproc) throw std::logic_error("stage topologies disagree");
    for (int q = 0; q < 3; ++q) st.common[q] = std::min(prev->n[q], in_n[q]);
    ext = out_n;
    complex = tp.complex_out;
    p.normalization *= tp.normalization;
    p.stages.push_back(st);
    prev = &p.stages.back().out;
  }

  // Fully spectral problems have a singular zero mode; drop it.
  p.green_table = cached_green(kernel, domain, order, ref, ZeroModePolicy::SetZero);
  p.green = distribute_green(*p.green_table, p.stages.back().out);

  p.capacity.resize(nranks);
  for (int r = 0; r < nranks; ++r) {
    std::size_t c = p.user.local_doubles(r);
    for (const Stage& st : p.stages)
      c = std::max({c, st.in.local_doubles(r), st.out.local_doubles(r)});
    p.capacity[r] = c;
  }
  return p;
}

}  // namespace

BCPair derivative_bc(BCPair bc) { return BCPair(flip(bc.left()), flip(bc.right())); }

SolvePlan build_solve_plan(const Domain& domain, const KernelId& kernel, Strategy strategy,
                           DerivativeScheme derivative, int nranks, const SwitchKnobs& knobs) {
  return build_plan(domain, {domain.bcs}, {domain.bcs}, kernel, strategy, derivative, nranks, knobs);
}

SolvePlan build_biot_savart_plan(const Domain& domain,
                                 const std::array<std::array<BCPair, 3>, 3>& w_bcs,
                                 const KernelId& kernel, Strategy strategy, DerivativeScheme derivative,
                                 int nranks, const SwitchKnobs& knobs) {
  if (derivative == DerivativeScheme::None)
    throw std::invalid_argument("Biot-Savart needs a derivative scheme");
  // u_i = d_j w_k - d_k w_j with (i, j, k) cyclic
  std::vector<std::array<BCPair, 3>> u_bcs(3);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    for (int d = 0; d < 3; ++d) {
      const BCPair a = d == j ? derivative_bc(w_bcs[k][d]) : w_bcs[k][d];
      const BCPair b = d == k ? derivative_bc(w_bcs[j][d]) : w_bcs[j][d];
      if (!(a == b))
        throw CapabilityError("vorticity boundary conditions give an inconsistent velocity in direction " +
                              std::to_string(d));
      u_bcs[i][d] = a;
    }
  }
  Domain dom = domain;
  dom.bcs = w_bcs[0];
  return build_plan(dom, {w_bcs[0], w_bcs[1], w_bcs[2]}, u_bcs, kernel, strategy, derivative, nranks,
                    knobs);
}

FieldBuffer make_field(const SolvePlan& plan, int rank) {
  return FieldBuffer(plan.user, rank, plan.capacity.at(rank));
}

namespace {

void transform_lines(const TransformPlan& tp, FieldBuffer& f, bool forward) {
  const Box box = f.box();
  const int a = f.topo.axis;
  const std::size_t lines = box.volume() / std::max(box.count[a], 1);
  const std::size_t stride = f.line_stride();
  if (box.empty()) return;
  for (std::size_t l = 0; l < lines; ++l) {
    double* line = f.data.data() + l * stride;
    if (forward) forward_line(tp, line);
    else backward_line(tp, line);
  }
}

struct StageScope {
  explicit StageScope(const std::string& name) {
    if (Profiler* p = current_profiler()) p->begin_stage(name, Bucket::Compute);
  }
  ~StageScope() {
    if (Profiler* p = current_profiler()) p->end_stage();
  }
};

struct ProfilerBinding {
  explicit ProfilerBinding(Profiler* p) : saved(current_profiler()) {
    if (p) set_current_profiler(p);
  }
  ~ProfilerBinding() { set_current_profiler(saved); }
  Profiler* saved;
};

const char* axis_name(int d) { return d == 0 ? "x" : d == 1 ? "y" : "z"; }

void do_switch(const SolvePlan& plan, const Topology& src, const Topology& dst,
               std::array<int, 3> common, int tag, FieldBuffer& f, Transport& t,
               const std::string& name) {
  StageScope scope(name);
  if (same_layout(src, dst) && common == dst.n && common == src.n) {
    f.topo = dst;
    return;
  }
  profile_bucket(Bucket::Comm);
  const SwitchPlan sp = plan_switch(src, dst, f.rank, plan.knobs, tag, common);
  execute_switch(plan.strategy, sp, f, t);
}

constexpr int kForwardTag = 16;
constexpr int kBackwardTag = 64;

void forward_chain(const SolvePlan& plan, int comp, FieldBuffer& f, Transport& t) {
  if (!same_layout(f.topo, plan.user) || f.rank != t.rank())
    throw std::invalid_argument("solve: field is not in the plan's user topology");
  if (f.data.size() < plan.capacity.at(f.rank)) f.data.resize(plan.capacity[f.rank], 0.0);
  const Topology* prev = &plan.user;
  for (std::size_t s = 0; s < plan.stages.size(); ++s) {
    const Stage& st = plan.stages[s];
    do_switch(plan, *prev, st.in, st.common, kForwardTag + int(s), f, t,
              std::string("switch_to_") + axis_name(st.dir));
    {
      StageScope scope(std::string("forward_") + axis_name(st.dir));
      transform_lines(plan.forward[comp][s], f, true);
    }
    f.topo = st.out;
    prev = &st.out;
  }
}

void backward_chain(const SolvePlan& plan, int comp, FieldBuffer& f, Transport& t) {
  const double inv = 1.0 / plan.normalization;
  for (std::size_t s = plan.stages.size(); s-- > 0;) {
    const Stage& st = plan.stages[s];
    f.topo = st.in;
    {
      StageScope scope(std::string("backward_") + axis_name(st.dir));
      transform_lines(plan.backward[comp][s], f, false);
      if (s == 0) {
        const std::size_t n = f.used();
        for (std::size_t i = 0; i < n; ++i) f.data[i] *= inv;
      }
    }
    const Topology& dst = s == 0 ? plan.user : plan.stages[s - 1].out;
    do_switch(plan, st.in, dst, st.common, kBackwardTag + int(s), f, t,
              std::string("switch_from_") + axis_name(st.dir));
  }
}

}  // namespace

void solve_poisson(const SolvePlan& plan, FieldBuffer& field, Transport& transport, Profiler* profiler) {
  if (plan.biot_savart()) throw std::invalid_argument("solve_poisson: plan is a Biot-Savart plan");
  ProfilerBinding bind(profiler);
  forward_chain(plan, 0, field, transport);
  {
    StageScope scope("green");
    multiply_spectrum(field, plan.green);
  }
  backward_chain(plan, 0, field, transport);
}

void round_trip(const SolvePlan& plan, FieldBuffer& field, Transport& transport) {
  if (plan.biot_savart()) throw std::invalid_argument("round_trip: plan is a Biot-Savart plan");
  forward_chain(plan, 0, field, transport);
  backward_chain(plan, 0, field, transport);
}

namespace {

// Multiplier of the derivative along one direction, per global slot. For
// Fourier directions the value is imaginary; for sine/cosine directions it
// is real and carries the sign of the DST <-> DCT swap.
struct DerivativeLine {
  bool imaginary = false;
  std::vector<double> value;
};

DerivativeLine derivative_line(const SolvePlan& plan, int comp, int stage) {
  const TransformPlan& tp = plan.forward[comp][stage];
  const int d = plan.stages[stage].dir;
  const double h = plan.domain.h(d);
  DerivativeLine out;
  out.imaginary = !is_r2r(tp.kind);
  out.value.resize(tp.n_store);
  for (int q = 0; q < tp.n_store; ++q) {
    const ModeMeta m = mode_meta(tp, q);
    double s = derivative_symbol(plan.derivative, m.omega, h).imag();
    if (out.imaginary) {
      if (2 * std::abs(m.k) == tp.n_logical && plan.derivative == DerivativeScheme::Spectral) s = 0.0;
    } else if (is_dct(tp.kind)) {
      s = -s;
    }
    out.value[q] = s;
  }
  return out;
}

}  // namespace

void solve_biot_savart(const SolvePlan& plan, std::array<FieldBuffer, 3>& w, Transport& transport,
                       Profiler* profiler) {
  if (!plan.biot_savart()) throw std::invalid_argument("solve_biot_savart: plan is a Poisson plan");
  ProfilerBinding bind(profiler);
  for (int c = 0; c < 3; ++c) forward_chain(plan, c, w[c], transport);

  {
    StageScope scope("curl_green");
    const Topology& t = plan.stages.back().out;
    const int rank = w[0].rank;
    const Box box = t.local_box(rank);
    const int a = t.axis, b = (a + 1) % 3, cc = (a + 2) % 3;
    const int nf = t.nf;
    const std::size_t stride = t.line_stride(rank);
    // stage index of each direction
    std::array<int, 3> stage_of{};
    for (std::size_t s = 0; s < plan.stages.size(); ++s) stage_of[plan.stages[s].dir] = int(s);
    // dl[k][j]: derivative along j applied to component k
    std::array<std::array<DerivativeLine, 3>, 3> dl;
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j) dl[k][j] = derivative_line(plan, k, stage_of[j]);
    const std::vector<double>& g = plan.green.per_rank.at(rank);

    auto apply = [&](const DerivativeLine& L, int slot, const double* v, double* out, double sign) {
      const double s = sign * L.value[slot];
      if (L.imaginary) {
        out[0] += -s * v[1];
        out[1] += s * v[0];
      } else {
        for (int f = 0; f < nf; ++f) out[f] += s * v[f];
      }
    };

    std::array<int, 3> gi{};
    for (int ic = 0; ic < box.count[cc]; ++ic)
      for (int ib = 0; ib < box.count[b]; ++ib) {
        const std::size_t line = std::size_t(ic) * box.count[b] + ib;
        gi[cc] = box.start[cc] + ic;
        gi[b] = box.start[b] + ib;
        for (int ia = 0; ia < box.count[a]; ++ia) {
          gi[a] = box.start[a] + ia;
          const std::size_t off = line * stride + std::size_t(ia) * nf;
          std::array<std::array<double, 2>, 3> v{}, u{};
          for (int c = 0; c < 3; ++c)
            for (int f = 0; f < nf; ++f) v[c][f] = w[c].data[off + f];
          for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3, k = (i + 2) % 3;
            apply(dl[k][j], gi[j], v[k].data(), u[i].data(), 1.0);
            apply(dl[j][k], gi[k], v[j].data(), u[i].data(), -1.0);
          }
          const double gv = g[line * box.count[a] + ia];
          for (int i = 0; i < 3; ++i)
            for (int f = 0; f < nf; ++f) w[i].data[off + f] = gv * u[i][f];
        }
      }
  }

  for (int c = 0; c < 3; ++c) backward_chain(plan, c, w[c], transport);
}

void load_global(const SolvePlan& plan, const std::vector<double>& global, FieldBuffer& f) {
  const std::array<int, 3> n = plan.user.n;
  if (global.size() != std::size_t(n[0]) * n[1] * n[2])
    throw std::invalid_argument("load_global: array does not match the sample counts");
  f.topo = plan.user;
  if (f.data.size() < plan.capacity.at(f.rank)) f.data.resize(plan.capacity[f.rank], 0.0);
  const Box box = f.box();
  for (int k = 0; k < box.count[2]; ++k)
    for (int j = 0; j < box.count[1]; ++j)
      for (int i = 0; i < box.count[0]; ++i) {
        const std::size_t g =
            (std::size_t(box.start[2] + k) * n[1] + box.start[1] + j) * n[0] + box.start[0] + i;
        f.data[f.offset(i, j, k)] = global[g];
      }
}

void store_global(const SolvePlan& plan, const FieldBuffer& f, std::vector<double>& global) {
  const std::array<int, 3> n = plan.user.n;
  if (!same_layout(f.topo, plan.user)) throw std::invalid_argument("store_global: field is not in the user topology");
  global.resize(std::size_t(n[0]) * n[1] * n[2]);
  const Box box = f.box();
  for (int k = 0; k < box.count[2]; ++k)
    for (int j = 0; j < box.count[1]; ++j)
      for (int i = 0; i < box.count[0]; ++i) {
        const std::size_t g =
            (std::size_t(box.start[2] + k) * n[1] + box.start[1] + j) * n[0] + box.start[0] + i;
        global[g] = f.data[f.offset(i, j, k)];
      }
}

std::vector<double> solve_poisson_global(const SolvePlan& plan, const std::vector<double>& rhs,
                                         const TransportOptions& options) {
  std::vector<double> out(rhs.size(), 0.0);
  std::mutex m;
  run_ranks(plan.nranks, options, [&](Transport& t) {
    FieldBuffer f = make_field(plan, t.rank());
    load_global(plan, rhs, f);
    solve_poisson(plan, f, t);
    std::lock_guard lock(m);
    store_global(plan, f, out);
  });
  return out;
}

std::array<std::vector<double>, 3> solve_biot_savart_global(const SolvePlan& plan,
                                                            const std::array<std::vector<double>, 3>& w,
                                                            const TransportOptions& options) {
  std::array<std::vector<double>, 3> out;
  for (int c = 0; c < 3; ++c) out[c].assign(w[c].size(), 0.0);
  std::mutex m;
  run_ranks(plan.nranks, options, [&](Transport& t) {
    std::array<FieldBuffer, 3> f;
    for (int c = 0; c < 3; ++c) {
      f[c] = make_field(plan, t.rank());
      load_global(plan, w[c], f[c]);
    }
    solve_biot_savart(plan, f, t);
    std::lock_guard lock(m);
    for (int c = 0; c < 3; ++c) store_global(plan, f[c], out[c]);
  });
  return out;
}

}  // namespace mixsolve
