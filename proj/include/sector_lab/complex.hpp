#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sector_lab/error.hpp"

namespace sector_lab {

struct Edge {
  int tail = 0;
  int head = 0;
  double weight = 1.0;
  std::string label;
};

/// One traversal of an undirected edge, in its stored direction or against it.
struct Step {
  int edge = 0;
  bool forward = true;

  Step reversed() const { return {edge, !forward}; }
  bool operator==(const Step&) const = default;
};

/// Finite combinatorial 2-complex: weighted vertices, undirected weighted
/// edges (usable in both directions) and faces given as closed edge walks
/// that are declared null-homotopic. Immutable once constructed.
class ConfigComplex {
 public:
  ConfigComplex(std::vector<std::string> vertex_labels, std::vector<double> measure,
                std::vector<Edge> edges, std::vector<std::vector<Step>> faces,
                std::vector<std::string> face_labels = {})
      : labels_(std::move(vertex_labels)),
        measure_(std::move(measure)),
        edges_(std::move(edges)),
        faces_(std::move(faces)),
        face_labels_(std::move(face_labels)) {
    const int n = vertex_count();
    if (n < 1) fail(ErrorCode::invalid_parameter, "complex needs at least one vertex");
    if (measure_.empty()) measure_.assign(labels_.size(), 1.0);
    if (measure_.size() != labels_.size())
      fail(ErrorCode::invalid_parameter, "one measure weight per vertex required");
    if (face_labels_.empty())
      for (std::size_t f = 0; f < faces_.size(); ++f) face_labels_.push_back("f" + std::to_string(f));
    if (face_labels_.size() != faces_.size())
      fail(ErrorCode::invalid_parameter, "one label per face required");

    for (int v = 0; v < n; ++v) {
      if (!(measure_[v] > 0.0)) fail(ErrorCode::invalid_parameter, "vertex " + labels_[v] + " has non-positive measure");
      if (labels_[v].empty()) fail(ErrorCode::invalid_parameter, "empty vertex label");
      if (!vertex_ids_.emplace(labels_[v], v).second)
        fail(ErrorCode::invalid_parameter, "duplicate vertex label " + labels_[v]);
    }
    for (int e = 0; e < edge_count(); ++e) {
      auto& ed = edges_[e];
      if (ed.label.empty()) ed.label = "e" + std::to_string(e);
      if (ed.tail < 0 || ed.tail >= n || ed.head < 0 || ed.head >= n)
        fail(ErrorCode::invalid_parameter, "edge " + ed.label + " has an endpoint outside the vertex set");
      if (!(ed.weight > 0.0)) fail(ErrorCode::invalid_parameter, "edge " + ed.label + " has non-positive weight");
      if (!edge_ids_.emplace(ed.label, e).second)
        fail(ErrorCode::invalid_parameter, "duplicate edge label " + ed.label);
    }
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      const auto& w = faces_[f];
      if (w.empty()) fail(ErrorCode::invalid_parameter, "face " + face_labels_[f] + " is empty");
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i].edge < 0 || w[i].edge >= edge_count())
          fail(ErrorCode::invalid_parameter, "face " + face_labels_[f] + " references an unknown edge");
      }
      for (std::size_t i = 0; i < w.size(); ++i)
        if (head(w[i]) != tail(w[(i + 1) % w.size()]))
          fail(ErrorCode::invalid_parameter, "face " + face_labels_[f] + " is not a closed walk");
    }

    incidence_.assign(static_cast<std::size_t>(n), {});
    for (int e = 0; e < edge_count(); ++e) {
      incidence_[edges_[e].tail].push_back({e, true});
      incidence_[edges_[e].head].push_back({e, false});
    }
    for (auto& inc : incidence_)
      std::sort(inc.begin(), inc.end(), [this](const Step& a, const Step& b) {
        return std::make_tuple(head(a), a.edge, !a.forward) < std::make_tuple(head(b), b.edge, !b.forward);
      });

    if (!connected()) fail(ErrorCode::not_connected, "underlying graph is not connected");
  }

  int vertex_count() const { return static_cast<int>(labels_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int face_count() const { return static_cast<int>(faces_.size()); }

  const std::string& vertex_label(int v) const { return labels_[v]; }
  const std::vector<std::string>& vertex_labels() const { return labels_; }
  double measure(int v) const { return measure_[v]; }
  const std::vector<double>& measures() const { return measure_; }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Step>& face(int f) const { return faces_[f]; }
  const std::vector<std::vector<Step>>& faces() const { return faces_; }
  const std::string& face_label(int f) const { return face_labels_[f]; }

  int tail(Step s) const { return s.forward ? edges_[s.edge].tail : edges_[s.edge].head; }
  int head(Step s) const { return s.forward ? edges_[s.edge].head : edges_[s.edge].tail; }

  /// Steps leaving `v`, ordered by (target vertex, edge id, direction).
  const std::vector<Step>& outgoing(int v) const { return incidence_[v]; }
  int degree(int v) const { return static_cast<int>(incidence_[v].size()); }

  std::optional<int> find_vertex(const std::string& label) const {
    auto it = vertex_ids_.find(label);
    if (it == vertex_ids_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<int> find_edge(const std::string& label) const {
    auto it = edge_ids_.find(label);
    if (it == edge_ids_.end()) return std::nullopt;
    return it->second;
  }
  int vertex_id(const std::string& label) const {
    auto v = find_vertex(label);
    if (!v) fail(ErrorCode::invalid_parameter, "unknown vertex " + label);
    return *v;
  }

  /// First Betti number of the 1-skeleton.
  int cycle_rank() const { return edge_count() - vertex_count() + 1; }

  ConfigComplex with_faces(const std::vector<std::vector<Step>>& extra,
                           const std::vector<std::string>& extra_labels = {}) const {
    auto faces = faces_;
    auto labels = face_labels_;
    for (std::size_t i = 0; i < extra.size(); ++i) {
      faces.push_back(extra[i]);
      labels.push_back(i < extra_labels.size() ? extra_labels[i] : "f" + std::to_string(faces.size() - 1));
    }
    return ConfigComplex(labels_, measure_, edges_, std::move(faces), std::move(labels));
  }

 private:
  bool connected() const {
    std::vector<bool> seen(labels_.size(), false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    int count = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (Step s : incidence_[v]) {
        int w = head(s);
        if (!seen[w]) {
          seen[w] = true;
          ++count;
          q.push(w);
        }
      }
    }
    return count == vertex_count();
  }

  std::vector<std::string> labels_;
  std::vector<double> measure_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Step>> faces_;
  std::vector<std::string> face_labels_;
  std::vector<std::vector<Step>> incidence_;
  std::unordered_map<std::string, int> vertex_ids_;
  std::unordered_map<std::string, int> edge_ids_;
};

/// A walk on a complex: start vertex plus chained steps. Empty walks are the
/// identity path at their start vertex.
class PathWord {
 public:
  explicit PathWord(int start) : start_(start), end_(start) {}

  PathWord(const ConfigComplex& cx, int start, std::vector<Step> steps)
      : start_(start), end_(start), steps_(std::move(steps)) {
    if (start < 0 || start >= cx.vertex_count()) fail(ErrorCode::invalid_parameter, "path starts outside the complex");
    for (Step s : steps_) {
      if (s.edge < 0 || s.edge >= cx.edge_count()) fail(ErrorCode::invalid_parameter, "path uses an unknown edge");
      if (cx.tail(s) != end_) fail(ErrorCode::invalid_parameter, "path steps do not chain head-to-tail");
      end_ = cx.head(s);
    }
  }

  int start() const { return start_; }
  int end() const { return end_; }
  bool closed() const { return start_ == end_; }
  bool empty() const { return steps_.empty(); }
  std::size_t size() const { return steps_.size(); }
  const std::vector<Step>& steps() const { return steps_; }

  PathWord reversed() const {
    PathWord out(end_);
    out.end_ = start_;
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) out.steps_.push_back(it->reversed());
    return out;
  }

  /// Walk `first`, then `second`.
  friend PathWord then(const PathWord& first, const PathWord& second) {
    if (first.end_ != second.start_) fail(ErrorCode::invalid_parameter, "paths are not composable");
    PathWord out = first;
    out.steps_.insert(out.steps_.end(), second.steps_.begin(), second.steps_.end());
    out.end_ = second.end_;
    return out;
  }

  /// Composition in the usual right-to-left order: compose(g, h) walks h first.
  friend PathWord compose(const PathWord& outer, const PathWord& inner) { return then(inner, outer); }

  bool operator==(const PathWord&) const = default;

 private:
  int start_;
  int end_;
  std::vector<Step> steps_;
};

inline PathWord face_walk(const ConfigComplex& cx, int f) {
  const auto& w = cx.face(f);
  return PathWord(cx, cx.tail(w.front()), w);
}

}  // namespace sector_lab
