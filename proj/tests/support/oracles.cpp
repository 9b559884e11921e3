// Copyright 2026 The supkit Authors
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

#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace sup::oracle
{

namespace
{

using geometry::OrientedBox;
using geometry::Vec2;

double cross(Vec2 a, Vec2 b) {return a.x * b.y - a.y * b.x;}

std::array<Vec2, 4> box_vertices(const OrientedBox & b)
{
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const Vec2 ex{c * b.length / 2.0, s * b.length / 2.0};
  const Vec2 ey{-s * b.width / 2.0, c * b.width / 2.0};
  return {b.center + ex + ey, b.center - ex + ey, b.center - ex - ey, b.center + ex - ey};
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b)
{
  const Vec2 ab = b - a;
  const double len2 = geometry::dot(ab, ab);
  double t = len2 > 0.0 ? geometry::dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return geometry::norm(p - (a + t * ab));
}

double weight_miss(const actions::ScoreWeights & w, const MetaAction & a)
{
  return a.conservative ? w.p_missing_conservative : w.p_missing;
}

double weight_red(const actions::ScoreWeights & w, const MetaAction & a)
{
  return a.conservative ? w.p_redundant_conservative : w.p_redundant;
}

// Explores every increasing pairing: each reference position either stays
// unpaired or pairs with a later candidate position holding the same token.
// Pairing i with j turns a miss and a redundant insertion into a match.
struct PairingSearch
{
  std::size_t n{0};
  // Bit j of same[i]: cand[j] carries ref[i]'s token.
  std::array<unsigned, 7> same{};
  std::array<std::array<double, 7>, 7> gain_of{};
  double best{-std::numeric_limits<double>::infinity()};

  PairingSearch(const OracleSeq & ref, const OracleSeq & cand, const actions::ScoreWeights & w)
  : n(ref.id.size())
  {
    for (std::size_t i = 0; i < ref.id.size(); ++i) {
      for (std::size_t j = 0; j < cand.id.size(); ++j) {
        if (ref.id[i] == cand.id[j]) {
          same[i] |= 1u << j;
          gain_of[i][j] = w.s_matching +
            (ref.conservative[i] ? w.p_missing_conservative : w.p_missing) +
            (cand.conservative[j] ? w.p_redundant_conservative : w.p_redundant);
        }
      }
    }
  }

  void visit(std::size_t i, unsigned from, double gain)
  {
    if (i == n) {
      best = std::max(best, gain);
      return;
    }
    visit(i + 1, from, gain);
    for (unsigned bits = same[i] & ~((1u << from) - 1u); bits != 0; bits &= bits - 1) {
      const unsigned j = static_cast<unsigned>(std::countr_zero(bits));
      visit(i + 1, j + 1, gain + gain_of[i][j]);
    }
  }
};

}  // namespace

OracleSeq Interner::operator()(std::span<const MetaAction> seq)
{
  OracleSeq out;
  for (const auto & a : seq) {
    auto it = ids_.find(a.token);
    if (it == ids_.end()) {
      it = ids_.emplace(a.token, static_cast<int>(ids_.size())).first;
    }
    out.id.push_back(it->second);
    out.conservative.push_back(a.conservative);
  }
  return out;
}

double oracle_align(
  const OracleSeq & ref, const OracleSeq & cand, const actions::ScoreWeights & w)
{
  if (ref.id.size() > 7 || cand.id.size() > 7) {
    throw std::invalid_argument("oracle_align supports lengths up to 7");
  }
  double base = 0.0;
  for (std::size_t i = 0; i < ref.id.size(); ++i) {
    base -= ref.conservative[i] ? w.p_missing_conservative : w.p_missing;
  }
  for (std::size_t j = 0; j < cand.id.size(); ++j) {
    base -= cand.conservative[j] ? w.p_redundant_conservative : w.p_redundant;
  }
  PairingSearch search(ref, cand, w);
  search.visit(0, 0, 0.0);
  return base + search.best;
}

double oracle_align(
  std::span<const MetaAction> ref, std::span<const MetaAction> cand,
  const actions::ScoreWeights & w)
{
  Interner intern;
  const auto r = intern(ref);
  return oracle_align(r, intern(cand), w);
}

double enumerate_interleavings(
  std::span<const MetaAction> ref, std::span<const MetaAction> cand,
  const actions::ScoreWeights & w)
{
  std::function<double(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) {
      if (i == ref.size() && j == cand.size()) {
        return 0.0;
      }
      double best = -std::numeric_limits<double>::infinity();
      if (i < ref.size()) {
        best = std::max(best, go(i + 1, j) - weight_miss(w, ref[i]));
      }
      if (j < cand.size()) {
        best = std::max(best, go(i, j + 1) - weight_red(w, cand[j]));
      }
      if (i < ref.size() && j < cand.size() && ref[i].token == cand[j].token) {
        best = std::max(best, go(i + 1, j + 1) + w.s_matching);
      }
      return best;
    };
  return go(0, 0);
}

bool inside(const OrientedBox & box, Vec2 p)
{
  const auto v = box_vertices(box);
  for (int k = 0; k < 4; ++k) {
    if (cross(v[(k + 1) % 4] - v[k], p - v[k]) < 0.0) {
      return false;
    }
  }
  return true;
}

double sampled_distance(const OrientedBox & box, Vec2 p, int per_edge)
{
  const auto v = box_vertices(box);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 4; ++k) {
    const Vec2 a = v[k];
    const Vec2 b = v[(k + 1) % 4];
    for (int s = 0; s <= per_edge; ++s) {
      const double t = static_cast<double>(s) / per_edge;
      best = std::min(best, geometry::norm(p - (a + t * (b - a))));
    }
  }
  return inside(box, p) ? -best : best;
}

bool sampled_overlap(const OrientedBox & a, const OrientedBox & b, int per_edge)
{
  const auto covers = [per_edge](const OrientedBox & x, const OrientedBox & y) {
      const auto v = box_vertices(x);
      for (int k = 0; k < 4; ++k) {
        const Vec2 p = v[k];
        const Vec2 q = v[(k + 1) % 4];
        for (int s = 0; s <= per_edge; ++s) {
          if (inside(y, p + (static_cast<double>(s) / per_edge) * (q - p))) {
            return true;
          }
        }
      }
      const int g = 20;
      for (int i = 1; i < g; ++i) {
        for (int j = 1; j < g; ++j) {
          const Vec2 p = v[1] + (static_cast<double>(i) / g) * (v[0] - v[1]) +
            (static_cast<double>(j) / g) * (v[2] - v[1]);
          if (inside(y, p)) {
            return true;
          }
        }
      }
      return false;
    };
  return covers(a, b) || covers(b, a);
}

double minkowski_gap(const OrientedBox & a, const OrientedBox & b)
{
  const auto va = box_vertices(a);
  const auto vb = box_vertices(b);
  std::vector<Vec2> pts;
  for (const auto & p : va) {
    for (const auto & q : vb) {
      pts.push_back(p - q);
    }
  }
  std::sort(pts.begin(), pts.end(), [](Vec2 p, Vec2 q) {
      return p.x < q.x || (p.x == q.x && p.y < q.y);
    });
  // Andrew's monotone chain.
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) {
      --k;
    }
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= 0.0) {
      --k;
    }
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);

  const Vec2 o{0.0, 0.0};
  double d = std::numeric_limits<double>::infinity();
  bool in = true;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2 p = hull[i];
    const Vec2 q = hull[(i + 1) % hull.size()];
    d = std::min(d, segment_distance(o, p, q));
    if (cross(q - p, o - p) < 0.0) {
      in = false;
    }
  }
  return in ? -d : d;
}

std::vector<Candidate> best_assignment(std::span<const Candidate> cands)
{
  std::vector<Candidate> best;
  double best_value = -1.0;
  std::vector<Candidate> cur;
  std::function<void(std::size_t, double)> go = [&](std::size_t i, double value) {
      if (i == cands.size()) {
        if (value > best_value + 1e-12) {
          best_value = value;
          best = cur;
        }
        return;
      }
      go(i + 1, value);
      const auto & c = cands[i];
      const bool free = std::none_of(cur.begin(), cur.end(), [&](const Candidate & x) {
            return x.critical == c.critical || x.detection == c.detection;
          });
      if (free) {
        cur.push_back(c);
        go(i + 1, value + c.value);
        cur.pop_back();
      }
    };
  go(0, 0.0);
  std::sort(best.begin(), best.end(), [](const Candidate & x, const Candidate & y) {
      return x.critical != y.critical ? x.critical < y.critical : x.detection < y.detection;
    });
  return best;
}

BBox2D corner_hull(const Detection3D & det, const CameraModel & cam)
{
  const double c = std::cos(det.yaw);
  const double s = std::sin(det.yaw);
  BBox2D out{1e300, 1e300, -1e300, -1e300};
  for (int dx : {-1, 1}) {
    for (int dy : {-1, 1}) {
      for (int dz : {-1, 1}) {
        const double lx = dx * det.size[0] / 2.0;
        const double ly = dy * det.size[1] / 2.0;
        const Eigen::Vector3d p{det.center[0] + c * lx - s * ly, det.center[1] + s * lx + c * ly,
          det.center[2] + dz * det.size[2] / 2.0};
        const Eigen::Vector3d q = cam.rotation * p + cam.translation;
        const double u = cam.fx * q.x() / q.z() + cam.cx;
        const double v = cam.fy * q.y() / q.z() + cam.cy;
        out.x1 = std::min(out.x1, u);
        out.y1 = std::min(out.y1, v);
        out.x2 = std::max(out.x2, u);
        out.y2 = std::max(out.y2, v);
      }
    }
  }
  return out;
}

}  // namespace sup::oracle
