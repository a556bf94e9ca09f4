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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mixsolve/grid.hpp"

namespace mixsolve {

enum class TransformKind { R2C, C2C, DCT1, DCT2, DCT3, DCT4, DST1, DST2, DST3, DST4 };

std::string to_string(TransformKind k);
bool is_dct(TransformKind k);
bool is_dst(TransformKind k);
bool is_r2r(TransformKind k);

enum class Role { FirstSpectral, SubsequentSpectral, DoubledUnbounded, SemiUnbounded };

struct Fixup {
  enum class Action { OverwriteZero, Ignore, DuplicateFrom };
  Action action;
  int index;
  int from = -1;  // DuplicateFrom only
};

struct ModeMeta {
  int k = 0;            // signed frequency index
  double omega = 0.0;   // angular frequency
  bool half = false;    // (k+1/2) modes of the type III/IV transforms
  bool is_real_pair = false;
};

/// One direction of the multidimensional transform.
///
/// Samples live in a line of `n_in` elements. After the forward transform the
/// line holds `n_store` mode slots; slot q is frequency index q. The core
/// transform produces `n_out` modes written at slots store_offset..store_offset+n_out-1,
/// the other slots are zero. This lets a DST and the matching DCT share indexing.
struct TransformPlan {
  TransformKind kind = TransformKind::R2C;
  BCPair bc;
  Layout layout = Layout::NodeCentered;
  Role role = Role::FirstSpectral;
  int cells = 0;
  double h = 1.0;

  int n_logical = 0;
  int n_in = 0;
  int n_out = 0;
  int n_store = 0;
  int store_offset = 0;
  int n_user = 0;       // samples provided by the user, the rest of n_in is padding
  int core_n = 0;       // length handed to the FFT core
  int core_offset = 0;  // first line index fed to the core
  bool complex_in = false;
  bool complex_out = false;
  bool half_modes = false;
  bool reversed = false;  // unbounded side on the left: the line is mirrored around the pencil
  std::vector<Fixup> fixups;
  double normalization = 1.0;

  int nf_in() const { return complex_in ? 2 : 1; }
  int nf_out() const { return complex_out ? 2 : 1; }
  // doubles needed by a line holding either the samples or the modes
  int line_doubles() const;
};

/// Selects the transform for one direction. `complex_input` defaults to
/// false for FirstSpectral and to true for SubsequentSpectral; for the
/// unbounded roles it picks R2C (false) or C2C (true) on the extended line.
TransformPlan plan_transform(BCPair bc, Layout layout, Role role, int cells, double length = 1.0,
                             std::optional<bool> complex_input = std::nullopt);

ModeMeta mode_meta(const TransformPlan& plan, int slot);

/// In-place line kernels used by the solver. `line` holds line_doubles() doubles.
void forward_line(const TransformPlan& plan, double* line);
void backward_line(const TransformPlan& plan, double* line);
void apply_fixups(const TransformPlan& plan, double* line);

/// Vector interface. Forward applies the fixups to `samples` in place and returns
/// n_out modes; backward maps n_out modes back to n_in samples, unnormalized.
std::vector<double> execute_forward(const TransformPlan& plan, std::vector<double>& samples);
std::vector<double> execute_backward(const TransformPlan& plan, const std::vector<double>& modes);

}  // namespace mixsolve
