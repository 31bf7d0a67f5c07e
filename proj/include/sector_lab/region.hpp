#pragma once

#include <algorithm>
#include <queue>
#include <vector>

#include "sector_lab/complex.hpp"
#include "sector_lab/error.hpp"
#include "sector_lab/pi1.hpp"

namespace sector_lab {

/// Vertex subset with its induced edges and faces. `small` means the induced
/// complex has trivial fundamental group (a contractible neighbourhood).
struct Region {
  std::vector<int> vertices;  // ascending ids in the parent complex
  std::vector<int> edges;     // ascending
  std::vector<int> faces;     // ascending
  bool small = false;

  bool contains(int v) const { return std::binary_search(vertices.begin(), vertices.end(), v); }
  int local_index(int v) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
    if (it == vertices.end() || *it != v) return -1;
    return static_cast<int>(it - vertices.begin());
  }
};

/// The induced subcomplex; vertex i is region.vertices[i], edge j is region.edges[j].
inline ConfigComplex region_complex(const ConfigComplex& cx, const Region& r) {
  std::vector<std::string> labels;
  std::vector<double> measure;
  for (int v : r.vertices) {
    labels.push_back(cx.vertex_label(v));
    measure.push_back(cx.measure(v));
  }
  std::vector<int> edge_local(static_cast<std::size_t>(cx.edge_count()), -1);
  std::vector<Edge> edges;
  for (int e : r.edges) {
    edge_local[e] = static_cast<int>(edges.size());
    Edge ed = cx.edge(e);
    ed.tail = r.local_index(ed.tail);
    ed.head = r.local_index(ed.head);
    edges.push_back(ed);
  }
  std::vector<std::vector<Step>> faces;
  std::vector<std::string> face_labels;
  for (int f : r.faces) {
    std::vector<Step> w;
    for (Step s : cx.face(f)) w.push_back({edge_local[s.edge], s.forward});
    faces.push_back(std::move(w));
    face_labels.push_back(cx.face_label(f));
  }
  return ConfigComplex(std::move(labels), std::move(measure), std::move(edges), std::move(faces),
                       std::move(face_labels));
}

inline Region induced_region(const ConfigComplex& cx, std::vector<int> vertices) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  if (vertices.empty()) fail(ErrorCode::invalid_region, "region has no vertices");
  for (int v : vertices)
    if (v < 0 || v >= cx.vertex_count()) fail(ErrorCode::invalid_parameter, "region vertex outside the complex");
  Region r;
  r.vertices = std::move(vertices);
  std::vector<bool> in_edges(static_cast<std::size_t>(cx.edge_count()), false);
  for (int e = 0; e < cx.edge_count(); ++e)
    if (r.contains(cx.edge(e).tail) && r.contains(cx.edge(e).head)) {
      r.edges.push_back(e);
      in_edges[e] = true;
    }
  for (int f = 0; f < cx.face_count(); ++f) {
    const auto& w = cx.face(f);
    if (std::all_of(w.begin(), w.end(), [&](Step s) { return in_edges[s.edge]; })) r.faces.push_back(f);
  }
  try {
    Pi1Presentation local(region_complex(cx, r), 0);
    r.small = local.simply_connected();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::not_connected) fail(ErrorCode::invalid_region, "induced subgraph is not connected");
    throw;
  }
  return r;
}

/// Ball of the given graph radius around `center`.
inline Region star_region(const ConfigComplex& cx, int center, int radius) {
  if (radius < 1) fail(ErrorCode::invalid_parameter, "radius must be >= 1");
  if (center < 0 || center >= cx.vertex_count()) fail(ErrorCode::invalid_parameter, "unknown center vertex");
  std::vector<int> dist(static_cast<std::size_t>(cx.vertex_count()), -1);
  dist[center] = 0;
  std::queue<int> q;
  q.push(center);
  std::vector<int> ball{center};
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    if (dist[v] == radius) continue;
    for (Step s : cx.outgoing(v)) {
      int w = cx.head(s);
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        ball.push_back(w);
        q.push(w);
      }
    }
  }
  return induced_region(cx, std::move(ball));
}

}  // namespace sector_lab
