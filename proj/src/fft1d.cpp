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

#include "mixsolve/fft1d.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace mixsolve {

std::string to_string(TransformKind k) {
  switch (k) {
    case TransformKind::R2C: return "R2C-DFT";
    case TransformKind::C2C: return "C2C-DFT";
    case TransformKind::DCT1: return "DCT-I";
    case TransformKind::DCT2: return "DCT-II";
    case TransformKind::DCT3: return "DCT-III";
    case TransformKind::DCT4: return "DCT-IV";
    case TransformKind::DST1: return "DST-I";
    case TransformKind::DST2: return "DST-II";
    case TransformKind::DST3: return "DST-III";
    case TransformKind::DST4: return "DST-IV";
  }
  return "?";
}

bool is_dct(TransformKind k) {
  return k == TransformKind::DCT1 || k == TransformKind::DCT2 || k == TransformKind::DCT3 ||
         k == TransformKind::DCT4;
}
bool is_dst(TransformKind k) {
  return k == TransformKind::DST1 || k == TransformKind::DST2 || k == TransformKind::DST3 ||
         k == TransformKind::DST4;
}
bool is_r2r(TransformKind k) { return is_dct(k) || is_dst(k); }

int TransformPlan::line_doubles() const { return std::max(n_in * nf_in(), n_store * nf_out()); }

namespace {

struct Shape {
  TransformKind kind;
  int core_n, core_offset, n_out, n_store, store_offset;
  bool half;
};

// Symmetric transforms on a line of `cells` cells (node: cells+1 samples).
Shape symmetric_shape(BCPair bc, Layout layout, int cells) {
  const bool node = layout == Layout::NodeCentered;
  const int n = cells;
  using K = TransformKind;
  if (bc == bcs::EE) return node ? Shape{K::DCT1, n + 1, 0, n + 1, n + 1, 0, false}
                                 : Shape{K::DCT2, n, 0, n, n + 1, 0, false};
  if (bc == bcs::OO) return node ? Shape{K::DST1, n - 1, 1, n - 1, n + 1, 1, false}
                                 : Shape{K::DST2, n, 0, n, n + 1, 1, false};
  if (bc == bcs::OE) return node ? Shape{K::DST3, n, 1, n, n, 0, true}
                                 : Shape{K::DST4, n, 0, n, n, 0, true};
  if (bc == bcs::EO) return node ? Shape{K::DCT3, n, 0, n, n, 0, true}
                                 : Shape{K::DCT4, n, 0, n, n, 0, true};
  throw std::invalid_argument("not a symmetric boundary pair: " + bc.name());
}

}  // namespace

TransformPlan plan_transform(BCPair bc, Layout layout, Role role, int cells, double length,
                             std::optional<bool> complex_input) {
  if (cells < 2) throw std::invalid_argument("plan_transform: need at least 2 cells");
  const bool node = layout == Layout::NodeCentered;
  const int ns = node ? cells + 1 : cells;
  using A = Fixup::Action;

  TransformPlan p;
  p.bc = bc;
  p.layout = layout;
  p.role = role;
  p.cells = cells;
  p.h = length / cells;
  p.n_user = ns;
  p.complex_in = complex_input.value_or(role == Role::SubsequentSpectral);

  switch (role) {
    case Role::FirstSpectral:
    case Role::SubsequentSpectral: {
      if (bc.has_unbounded())
        throw std::invalid_argument("plan_transform: unbounded pair " + bc.name() +
                                    " needs an unbounded role");
      p.n_in = ns;
      if (bc.is_periodic()) {
        p.kind = p.complex_in ? TransformKind::C2C : TransformKind::R2C;
        p.core_n = cells;
        p.n_logical = cells;
        p.n_out = p.complex_in ? cells : cells / 2 + 1;
        p.n_store = p.n_out;
        if (node) {
          p.fixups.push_back({A::Ignore, cells});
          p.fixups.push_back({A::DuplicateFrom, cells, 0});
        }
      } else {
        const Shape s = symmetric_shape(bc, layout, cells);
        p.kind = s.kind;
        p.core_n = s.core_n;
        p.core_offset = s.core_offset;
        p.n_out = s.n_out;
        p.n_store = s.n_store;
        p.store_offset = s.store_offset;
        p.half_modes = s.half;
        p.n_logical = 2 * cells;
        if (node) {
          if (s.kind == TransformKind::DST1 || s.kind == TransformKind::DST3)
            p.fixups.push_back({A::OverwriteZero, 0});
          if (s.kind == TransformKind::DST1 || s.kind == TransformKind::DCT3)
            p.fixups.push_back({A::OverwriteZero, cells});
        }
      }
      break;
    }
    case Role::DoubledUnbounded: {
      if (!bc.is_unbounded())
        throw std::invalid_argument("plan_transform: doubled-unbounded role needs UU, got " +
                                    bc.name());
      p.kind = p.complex_in ? TransformKind::C2C : TransformKind::R2C;
      p.n_in = 2 * cells;
      p.core_n = 2 * cells;
      p.n_logical = 2 * cells;
      p.n_out = p.complex_in ? 2 * cells : cells + 1;
      p.n_store = p.n_out;
      break;
    }
    case Role::SemiUnbounded: {
      if (!bc.is_semi_unbounded())
        throw std::invalid_argument("plan_transform: semi-unbounded role needs a semi pair, got " +
                                    bc.name());
      const BC sym = bc.left() == BC::Unbounded ? bc.right() : bc.left();
      p.reversed = bc.left() == BC::Unbounded;
      const bool even = sym == BC::Even;
      const int n2 = 2 * cells;
      p.n_logical = 2 * n2;
      p.n_store = n2 + 1;
      if (node) {
        p.n_in = n2 + 1;
        p.kind = even ? TransformKind::DCT1 : TransformKind::DST1;
        p.core_n = even ? n2 + 1 : n2 - 1;
        p.core_offset = even ? 0 : 1;
        p.n_out = p.core_n;
        p.store_offset = even ? 0 : 1;
        if (!even) {
          p.fixups.push_back({A::OverwriteZero, 0});
          p.fixups.push_back({A::OverwriteZero, n2});
        }
      } else {
        p.n_in = n2;
        p.kind = even ? TransformKind::DCT2 : TransformKind::DST2;
        p.core_n = n2;
        p.n_out = n2;
        p.store_offset = even ? 0 : 1;
      }
      break;
    }
  }
  if (bc.is_periodic() && role != Role::FirstSpectral && role != Role::SubsequentSpectral)
    throw std::invalid_argument("plan_transform: periodic direction cannot be unbounded");
  p.complex_out = p.complex_in || p.kind == TransformKind::R2C;
  if (p.kind == TransformKind::C2C || p.kind == TransformKind::R2C) p.half_modes = false;
  p.normalization = p.n_logical;
  return p;
}

ModeMeta mode_meta(const TransformPlan& plan, int slot) {
  if (slot < 0 || slot >= plan.n_store) throw std::out_of_range("mode slot out of range");
  ModeMeta m;
  m.k = slot;
  if (plan.kind == TransformKind::C2C && slot > plan.core_n / 2) m.k = slot - plan.core_n;
  m.half = plan.half_modes;
  m.is_real_pair = plan.complex_out;
  const double w0 = 2.0 * std::numbers::pi / (plan.n_logical * plan.h);
  m.omega = (m.half ? m.k + 0.5 : double(m.k)) * w0;
  return m;
}

// ---------------------------------------------------------------------------
// FFT core

namespace {

enum class Dir { Forward, Backward };

std::mutex g_plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> g_plans;

fftw_r2r_kind r2r_kind(TransformKind k, Dir d) {
  const bool f = d == Dir::Forward;
  switch (k) {
    case TransformKind::DCT1: return FFTW_REDFT00;
    case TransformKind::DST1: return FFTW_RODFT00;
    case TransformKind::DCT2: return f ? FFTW_REDFT10 : FFTW_REDFT01;
    case TransformKind::DCT3: return f ? FFTW_REDFT01 : FFTW_REDFT10;
    case TransformKind::DST2: return f ? FFTW_RODFT10 : FFTW_RODFT01;
    case TransformKind::DST3: return f ? FFTW_RODFT01 : FFTW_RODFT10;
    case TransformKind::DCT4: return FFTW_REDFT11;
    case TransformKind::DST4: return FFTW_RODFT11;
    default: break;
  }
  throw std::logic_error("not a real-to-real kind");
}

fftw_plan core_plan(TransformKind k, Dir d, int n) {
  const auto key = std::make_tuple(int(k), int(d), n);
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto it = g_plans.find(key);
  if (it != g_plans.end()) return it->second;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::vector<double> a(2 * n + 4), b(2 * n + 4);
  fftw_plan p = nullptr;
  auto* ca = reinterpret_cast<fftw_complex*>(a.data());
  auto* cb = reinterpret_cast<fftw_complex*>(b.data());
  if (k == TransformKind::R2C) {
    p = d == Dir::Forward ? fftw_plan_dft_r2c_1d(n, a.data(), cb, flags)
                          : fftw_plan_dft_c2r_1d(n, ca, b.data(), flags);
  } else if (k == TransformKind::C2C) {
    p = fftw_plan_dft_1d(n, ca, cb, d == Dir::Forward ? FFTW_FORWARD : FFTW_BACKWARD, flags);
  } else {
    p = fftw_plan_r2r_1d(n, a.data(), b.data(), r2r_kind(k, d), flags);
  }
  if (!p) throw std::runtime_error("FFTW could not create a plan for " + to_string(k));
  g_plans.emplace(key, p);
  return p;
}

struct Scratch {
  std::vector<double> in, out, res;
  void ensure(std::size_t n) {
    if (in.size() < n) in.resize(n);
    if (out.size() < n) out.resize(n);
    if (res.size() < n) res.resize(n);
  }
};
thread_local Scratch t_scratch;

// Core transform from scratch.in to scratch.out, `n` the core length.
void run_core(TransformKind k, Dir d, int n, double* in, double* out) {
  fftw_plan p = core_plan(k, d, n);
  if (k == TransformKind::R2C) {
    if (d == Dir::Forward)
      fftw_execute_dft_r2c(p, in, reinterpret_cast<fftw_complex*>(out));
    else
      fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(in), out);
  } else if (k == TransformKind::C2C) {
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in), reinterpret_cast<fftw_complex*>(out));
  } else {
    fftw_execute_r2r(p, in, out);
  }
}

void reverse_elements(double* line, int n, int nf) {
  for (int i = 0, j = n - 1; i < j; ++i, --j)
    for (int f = 0; f < nf; ++f) std::swap(line[i * nf + f], line[j * nf + f]);
}

}  // namespace

void apply_fixups(const TransformPlan& plan, double* line) {
  const int nf = plan.nf_in();
  for (const Fixup& fx : plan.fixups)
    if (fx.action == Fixup::Action::OverwriteZero)
      for (int f = 0; f < nf; ++f) line[fx.index * nf + f] = 0.0;
}

void forward_line(const TransformPlan& plan, double* line) {
  const int nfi = plan.nf_in(), nfo = plan.nf_out();
  if (plan.reversed) reverse_elements(line, plan.n_user, nfi);
  apply_fixups(plan, line);
  Scratch& s = t_scratch;
  s.ensure(2 * std::size_t(std::max({plan.core_n, plan.n_store, plan.n_in})) + 4);
  const int ld = plan.line_doubles();

  if (plan.kind == TransformKind::R2C || plan.kind == TransformKind::C2C) {
    std::copy(line + plan.core_offset * nfi, line + (plan.core_offset + plan.core_n) * nfi,
              s.in.data());
    run_core(plan.kind, Dir::Forward, plan.core_n, s.in.data(), s.out.data());
    std::fill(line, line + ld, 0.0);
    std::copy(s.out.data(), s.out.data() + plan.n_out * nfo, line + plan.store_offset * nfo);
    return;
  }
  // real-to-real, once per component
  double* result = s.res.data();
  std::fill(result, result + std::size_t(plan.n_store) * nfo, 0.0);
  for (int f = 0; f < nfi; ++f) {
    for (int j = 0; j < plan.core_n; ++j) s.in[j] = line[(plan.core_offset + j) * nfi + f];
    run_core(plan.kind, Dir::Forward, plan.core_n, s.in.data(), s.out.data());
    for (int k = 0; k < plan.n_out; ++k) result[(plan.store_offset + k) * nfo + f] = s.out[k];
  }
  std::fill(line, line + ld, 0.0);
  std::copy(result, result + std::size_t(plan.n_store) * nfo, line);
}

void backward_line(const TransformPlan& plan, double* line) {
  const int nfi = plan.nf_in(), nfo = plan.nf_out();
  Scratch& s = t_scratch;
  s.ensure(2 * std::size_t(std::max({plan.core_n, plan.n_store, plan.n_in})) + 4);
  const int ld = plan.line_doubles();

  if (plan.kind == TransformKind::R2C || plan.kind == TransformKind::C2C) {
    std::copy(line + plan.store_offset * nfo, line + (plan.store_offset + plan.n_out) * nfo,
              s.in.data());
    run_core(plan.kind, Dir::Backward, plan.core_n, s.in.data(), s.out.data());
    std::fill(line, line + ld, 0.0);
    std::copy(s.out.data(), s.out.data() + plan.core_n * nfi, line + plan.core_offset * nfi);
  } else {
    double* result = s.res.data();
    std::fill(result, result + std::size_t(plan.n_in) * nfi, 0.0);
    for (int f = 0; f < nfi; ++f) {
      for (int k = 0; k < plan.n_out; ++k) s.in[k] = line[(plan.store_offset + k) * nfo + f];
      run_core(plan.kind, Dir::Backward, plan.core_n, s.in.data(), s.out.data());
      for (int j = 0; j < plan.core_n; ++j) result[(plan.core_offset + j) * nfi + f] = s.out[j];
    }
    std::fill(line, line + ld, 0.0);
    std::copy(result, result + std::size_t(plan.n_in) * nfi, line);
  }
  for (const Fixup& fx : plan.fixups)
    if (fx.action == Fixup::Action::DuplicateFrom)
      for (int f = 0; f < nfi; ++f) line[fx.index * nfi + f] = line[fx.from * nfi + f];
  if (plan.reversed) reverse_elements(line, plan.n_user, nfi);
}

std::vector<double> execute_forward(const TransformPlan& plan, std::vector<double>& samples) {
  if (samples.size() != std::size_t(plan.n_in) * plan.nf_in())
    throw std::invalid_argument("execute_forward: expected " + std::to_string(plan.n_in) +
                                " samples");
  std::vector<double> line(plan.line_doubles(), 0.0);
  std::copy(samples.begin(), samples.end(), line.begin());
  // fixups are observable on the caller's samples
  if (plan.reversed) reverse_elements(samples.data(), plan.n_user, plan.nf_in());
  apply_fixups(plan, samples.data());
  if (plan.reversed) reverse_elements(samples.data(), plan.n_user, plan.nf_in());
  forward_line(plan, line.data());
  const int nfo = plan.nf_out();
  return std::vector<double>(line.begin() + plan.store_offset * nfo,
                             line.begin() + (plan.store_offset + plan.n_out) * nfo);
}

std::vector<double> execute_backward(const TransformPlan& plan, const std::vector<double>& modes) {
  const int nfo = plan.nf_out();
  if (modes.size() != std::size_t(plan.n_out) * nfo)
    throw std::invalid_argument("execute_backward: expected " + std::to_string(plan.n_out) +
                                " modes");
  std::vector<double> line(plan.line_doubles(), 0.0);
  std::copy(modes.begin(), modes.end(), line.begin() + plan.store_offset * nfo);
  backward_line(plan, line.data());
  line.resize(std::size_t(plan.n_in) * plan.nf_in());
  return line;
}

}  // namespace mixsolve
