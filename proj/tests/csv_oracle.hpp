// Copyright 2026 The scenex Authors
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


// Brute-force criticality measures computed straight from a dumped trace CSV.
// Shares no code with the library beyond the file format.

#ifndef SCENEX__TESTS__CSV_ORACLE_HPP_
#define SCENEX__TESTS__CSV_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace scenex::oracle
{

struct Rows
{
  std::vector<double> t, x, y, s, v;
};

struct Body
{
  double radius;
  double max_accel;
  double entry;
  double exit;
};

inline std::map<std::string, Rows> parse_csv(const std::string & text)
{
  std::map<std::string, Rows> out;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double t, x, y, s, v;
    std::string id;
    row >> t >> id >> x >> y >> s >> v;
    Rows & r = out[id];
    r.t.push_back(t);
    r.x.push_back(x);
    r.y.push_back(y);
    r.s.push_back(s);
    r.v.push_back(v);
  }
  return out;
}

inline double cap_at(double v, double cap) { return v >= cap ? cap : v; }

inline double euclidean(const Rows & a, const Rows & b, double cap)
{
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < std::min(a.t.size(), b.t.size()); ++k) {
    const double dx = a.x[k] - b.x[k];
    const double dy = a.y[k] - b.y[k];
    best = std::min(best, std::sqrt(dx * dx + dy * dy));
  }
  return cap_at(best, cap);
}

inline double trajectory(const Rows & a, const Rows & b, const Body & ba, const Body & bb, double cap)
{
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < std::min(a.t.size(), b.t.size()); ++k) {
    if (a.s[k] > ba.exit || b.s[k] > bb.exit) continue;
    double d = 0.0;
    if (a.s[k] < ba.entry) d += ba.entry - a.s[k];
    if (b.s[k] < bb.entry) d += bb.entry - b.s[k];
    best = std::min(best, d);
  }
  return cap_at(best, cap);
}

// smallest tau >= 0 with g = V tau + A tau^2 / 2
inline double wttc(const Rows & a, const Rows & b, const Body & ba, const Body & bb, double cap)
{
  double best = std::numeric_limits<double>::infinity();
  const double acc = ba.max_accel + bb.max_accel;
  for (std::size_t k = 0; k < std::min(a.t.size(), b.t.size()); ++k) {
    const double dx = a.x[k] - b.x[k];
    const double dy = a.y[k] - b.y[k];
    const double g = std::sqrt(dx * dx + dy * dy) - ba.radius - bb.radius;
    const double vs = a.v[k] + b.v[k];
    double tau;
    if (g <= 0.0) {
      tau = 0.0;
    } else if (acc > 0.0) {
      tau = (-vs + std::sqrt(vs * vs + 2.0 * acc * g)) / acc;
    } else if (vs > 0.0) {
      tau = g / vs;
    } else {
      continue;
    }
    best = std::min(best, tau);
  }
  return cap_at(best, cap);
}

inline double gap_time(
  const Rows & a, const Rows & b, const Body & ba, const Body & bb, double guard, double cap)
{
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < std::min(a.t.size(), b.t.size()); ++k) {
    const double da = ba.entry - a.s[k];
    const double db = bb.entry - b.s[k];
    if (da <= 0.0 || db <= 0.0 || a.v[k] <= guard || b.v[k] <= guard) continue;
    best = std::min(best, std::abs(da / a.v[k] - db / b.v[k]));
  }
  return cap_at(best, cap);
}

inline double pet(const Rows & a, const Rows & b, const Body & ba, const Body & bb, double cap)
{
  auto window = [](const Rows & r, const Body & body, double & first, double & last) {
    bool seen = false;
    for (std::size_t k = 0; k < r.t.size(); ++k) {
      if (r.s[k] >= body.entry - body.radius && r.s[k] <= body.exit + body.radius) {
        if (!seen) first = r.t[k];
        last = r.t[k];
        seen = true;
      }
    }
    return seen;
  };
  double a0, a1, b0, b1;
  if (!window(a, ba, a0, a1) || !window(b, bb, b0, b1)) return cap;
  if (a0 <= b1 && b0 <= a1) return 0.0;
  return cap_at(a1 < b0 ? b0 - a1 : a0 - b1, cap);
}

}  // namespace scenex::oracle

#endif  // SCENEX__TESTS__CSV_ORACLE_HPP_
