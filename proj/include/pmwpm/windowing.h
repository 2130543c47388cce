// Copyright 2026 The pmwpm Authors
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

#ifndef PMWPM_WINDOWING_H_
#define PMWPM_WINDOWING_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "pmwpm/detector_model.h"
#include "pmwpm/isolation.h"
#include "pmwpm/shortest_paths.h"

namespace pmwpm {

struct WindowConfig {
    uint32_t n_com = 1;
    /// Rounds in the buffer region; conventionally the code distance.
    uint32_t n_buf = 3;
    uint32_t distance = 3;

    static WindowConfig for_distance(uint32_t d, uint32_t n_com) { return WindowConfig{n_com, d, d}; }
};

struct TimingModel {
    double tau_sg = 1.0;
    double tau_l = 0.0;
    double t_w = 0.0;
};

/// T_w < tau_sg * n_com (strict).
bool throughput_ok(const TimingModel& tm, const WindowConfig& cfg);

/// eta = 2 d tau + d tau * ceil((tau_l + T_w) / (d tau) - 1). Requires
/// 0 < T_w < d tau_sg and tau_l >= 0; throws std::domain_error otherwise.
double reaction_time(const TimingModel& tm, uint32_t d);

/// The two-case expression with threshold
/// Delta = d tau (1 + ceil(tau_l / (d tau) - 1)) - tau_l. Same domain.
double reaction_time_case_form(const TimingModel& tm, uint32_t d);

/// Parallel-window variant with 2 T_w in place of T_w; requires T_w > 0.
double reaction_time_parallel(const TimingModel& tm, uint32_t d);

/// Layers [first, end) of the detector graph processed by one window, of
/// which [first, commit_end) are committed.
struct WindowSpan {
    uint32_t index = 0;
    uint32_t first = 0;
    uint32_t commit_end = 0;
    uint32_t end = 0;
    bool final = false;
};

/// Windows k = 0, 1, ... start at k n_com and span n_com + n_buf layers
/// (clipped). The last window commits everything it covers.
std::vector<WindowSpan> plan_windows(uint32_t layers, const WindowConfig& cfg);

/// Detector-graph restriction to one window, with local vertex ids.
///
/// Local detector ids are (layer - first) * per_layer + stabilizer, followed
/// by the original boundary vertices and, unless the window reaches the last
/// layer, one TimeBoundary absorbing the edges into later layers. Edges into
/// earlier layers are dropped, so the first layer acts as a closed boundary.
struct WindowSlice {
    DetectorGraph graph;
    /// Original edge id of each slice edge, or -1 for merged time-boundary edges.
    std::vector<int64_t> original_edge;
};

WindowSlice slice_window(const DetectorGraph& graph, uint32_t per_layer, uint32_t first, uint32_t end);

struct WindowRecord {
    uint32_t index = 0;
    uint32_t first = 0;
    uint32_t commit_end = 0;
    uint32_t end = 0;
    size_t events = 0;
    size_t artificial_events = 0;
    size_t path_graph_size = 0;
    uint64_t attempts_used = 0;
    int64_t w_max_used = 0;
    std::vector<EdgeId> committed_edges;  // original edge ids, sorted
    bool logical_flip_parity = false;     // of this window's committed edges
};

nlohmann::json window_record_to_json(const WindowRecord& record);

struct WindowRunResult {
    std::vector<WindowRecord> windows;
    std::vector<EdgeId> committed_edges;  // sorted, cancelled mod 2
    bool logical_flip_correction = false;
};

/// Raised when a window's decode fails; carries the window index.
class WindowDecodeFailure : public std::runtime_error {
   public:
    WindowDecodeFailure(uint32_t window, const std::string& what)
        : std::runtime_error("window " + std::to_string(window) + ": " + what), window_(window) {}
    uint32_t window() const { return window_; }

   private:
    uint32_t window_;
};

/// Streaming sliding-window decoder over a layered detector graph. Rounds
/// are pushed in order; each window is decoded once its last layer arrives.
/// Distance tables are computed once per distinct window slice.
class SlidingWindowDecoder {
   public:
    SlidingWindowDecoder(const DetectorGraph& graph, WindowConfig cfg, PerturbationScheme scheme,
                         DecodeOptions options = {});

    uint32_t layers() const { return layers_; }
    uint32_t per_layer() const { return per_layer_; }
    const std::vector<WindowSpan>& windows() const { return plan_; }

    /// Feeds the detection events (global detector ids) of the next layer.
    /// Returns the records of the windows completed by this layer.
    std::vector<WindowRecord> push_round(uint32_t round, std::span<const VertexId> events);

    /// Requires all layers pushed.
    WindowRunResult finish();

    /// Decodes a complete event set (sorted detector ids) in one call.
    WindowRunResult run(std::span<const VertexId> events);

    /// Number of distinct slice tables built so far.
    size_t cached_tables() const { return tables_.size(); }

   private:
    WindowRecord decode_window(const WindowSpan& span);
    void reset();

    const DetectorGraph* graph_;
    WindowConfig cfg_;
    PerturbationScheme scheme_;
    DecodeOptions options_;
    uint32_t layers_ = 0;
    uint32_t per_layer_ = 0;
    std::vector<WindowSpan> plan_;
    std::map<std::pair<uint32_t, uint32_t>, std::shared_ptr<WindowSlice>> slices_;
    std::map<uint64_t, std::shared_ptr<DistanceTable>> tables_;

    std::vector<uint8_t> pending_;     // events per global detector, toggled by artificial events
    std::vector<uint8_t> correction_;  // committed parity per original edge
    std::vector<uint8_t> artificial_;  // artificial toggles per global detector
    uint32_t next_round_ = 0;
    size_t next_window_ = 0;
    std::vector<WindowRecord> records_;
};

}  // namespace pmwpm

#endif  // PMWPM_WINDOWING_H_
