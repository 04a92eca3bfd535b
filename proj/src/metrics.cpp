#include "uvc/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "uvc/common.hpp"

namespace uvc {
namespace {

// One curve prepared for interpolation: x = PSNR (strictly increasing),
// y = log10(bitrate), m = monotone Hermite slopes (Fritsch-Carlson).
struct Pchip {
  std::vector<double> x, y, m;
};

Pchip make_pchip(const RdCurve& curve, const char* which) {
  const auto& pts = curve.points;
  const size_t n = pts.size();
  if (n < 4)
    throw std::invalid_argument(std::string("bd_rate: ") + which + " curve has fewer than 4 points");
  Pchip p;
  p.x.resize(n);
  p.y.resize(n);
  for (size_t i = 0; i < n; ++i) {
    if (!(pts[i].kbps > 0.0))
      throw std::invalid_argument(std::string("bd_rate: ") + which + " curve has non-positive bitrate");
    if (i && !(pts[i].psnr > pts[i - 1].psnr))
      throw std::invalid_argument(std::string("bd_rate: ") + which +
                                  " curve needs strictly increasing PSNR");
    p.x[i] = pts[i].psnr;
    p.y[i] = std::log10(pts[i].kbps);
  }

  std::vector<double> h(n - 1), d(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    h[i] = p.x[i + 1] - p.x[i];
    d[i] = (p.y[i + 1] - p.y[i]) / h[i];
  }
  p.m.assign(n, 0.0);
  for (size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      p.m[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      p.m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0) return 0.0;
    if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return m;
  };
  p.m[0] = end_slope(h[0], h[1], d[0], d[1]);
  p.m[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  return p;
}

// Antiderivative (in normalized t) of the cubic Hermite basis combination on
// one interval, so segment integrals are exact.
double hermite_primitive(double y0, double y1, double m0, double m1, double h, double t) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  const double f00 = 0.5 * t4 - t3 + t;
  const double f10 = 0.25 * t4 - (2.0 / 3.0) * t3 + 0.5 * t2;
  const double f01 = -0.5 * t4 + t3;
  const double f11 = 0.25 * t4 - t3 / 3.0;
  return h * (y0 * f00 + h * m0 * f10 + y1 * f01 + h * m1 * f11);
}

// Exact integral of the interpolant over [a, b], which must lie inside the
// knot range.
double pchip_integral(const Pchip& p, double a, double b) {
  double acc = 0.0;
  for (size_t i = 0; i + 1 < p.x.size(); ++i) {
    const double x0 = p.x[i], x1 = p.x[i + 1];
    const double lo = std::max(a, x0), hi = std::min(b, x1);
    if (!(hi > lo)) continue;
    const double h = x1 - x0;
    const double ta = (lo - x0) / h, tb = (hi - x0) / h;
    acc += hermite_primitive(p.y[i], p.y[i + 1], p.m[i], p.m[i + 1], h, tb) -
           hermite_primitive(p.y[i], p.y[i + 1], p.m[i], p.m[i + 1], h, ta);
  }
  return acc;
}

struct Overlap {
  double lo, hi;
};

Overlap overlap_of(const Pchip& a, const Pchip& b) {
  const double lo = std::max(a.x.front(), b.x.front());
  const double hi = std::min(a.x.back(), b.x.back());
  if (!(hi > lo)) throw std::invalid_argument("bd_rate: curves share no PSNR overlap");
  return {lo, hi};
}

// Least-squares cubic fit y(x) via normal equations (partial-pivot solve).
std::array<double, 4> cubic_fit(const std::vector<double>& x, const std::vector<double>& y) {
  double a[4][5] = {};
  for (size_t k = 0; k < x.size(); ++k) {
    double px[7] = {1, 0, 0, 0, 0, 0, 0};
    for (int i = 1; i < 7; ++i) px[i] = px[i - 1] * x[k];
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) a[r][c] += px[r + c];
      a[r][4] += px[r] * y[k];
    }
  }
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    for (int c = 0; c < 5; ++c) std::swap(a[col][c], a[piv][c]);
    if (a[col][col] == 0.0) throw std::invalid_argument("bd_rate: degenerate cubic fit");
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 5; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return {a[0][4] / a[0][0], a[1][4] / a[1][1], a[2][4] / a[2][2], a[3][4] / a[3][3]};
}

double cubic_integral(const std::array<double, 4>& c, double a, double b) {
  auto prim = [&](double x) {
    return c[0] * x + c[1] * x * x / 2.0 + c[2] * x * x * x / 3.0 +
           c[3] * x * x * x * x / 4.0;
  };
  return prim(b) - prim(a);
}

}  // namespace

std::string validate_rd_curve(const RdCurve& curve) {
  const auto& pts = curve.points;
  if (pts.size() < 4) throw std::invalid_argument("rd curve: needs at least 4 points");
  for (size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].kbps > 0.0))
      throw std::invalid_argument("rd curve: bitrate must be positive");
    if (i && !(pts[i].kbps > pts[i - 1].kbps))
      throw std::invalid_argument("rd curve: bitrate must be strictly ascending");
  }
  for (size_t i = 1; i < pts.size(); ++i)
    if (pts[i].psnr < pts[i - 1].psnr)
      return "warning: PSNR drops while bitrate rises at point " + std::to_string(i);
  return "";
}

double bd_rate(const RdCurve& anchor, const RdCurve& test) {
  const Pchip pa = make_pchip(anchor, "anchor");
  const Pchip pt = make_pchip(test, "test");
  const Overlap ov = overlap_of(pa, pt);
  const double avg =
      (pchip_integral(pt, ov.lo, ov.hi) - pchip_integral(pa, ov.lo, ov.hi)) / (ov.hi - ov.lo);
  return (std::pow(10.0, avg) - 1.0) * 100.0;
}

double bd_rate_cubic(const RdCurve& anchor, const RdCurve& test) {
  const Pchip pa = make_pchip(anchor, "anchor");
  const Pchip pt = make_pchip(test, "test");
  const Overlap ov = overlap_of(pa, pt);
  const auto ca = cubic_fit(pa.x, pa.y);
  const auto ct = cubic_fit(pt.x, pt.y);
  const double avg =
      (cubic_integral(ct, ov.lo, ov.hi) - cubic_integral(ca, ov.lo, ov.hi)) / (ov.hi - ov.lo);
  return (std::pow(10.0, avg) - 1.0) * 100.0;
}

double weighted_yuv(double y, double u, double v) { return (6.0 * y + u + v) / 8.0; }

std::vector<RdCsvRow> parse_rd_csv(std::istream& in) {
  std::vector<RdCsvRow> rows;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.rfind("label", 0) == 0) continue;
    std::stringstream ss(line);
    RdCsvRow row;
    std::string kbps, psnr;
    if (!std::getline(ss, row.label, ',') || !std::getline(ss, row.component, ',') ||
        !std::getline(ss, kbps, ',') || !std::getline(ss, psnr))
      throw MalformedInput("rd csv: line " + std::to_string(lineno) +
                           " needs label,component,kbps,psnr");
    try {
      row.kbps = std::stod(kbps);
      row.psnr = std::stod(psnr);
    } catch (const std::exception&) {
      throw MalformedInput("rd csv: line " + std::to_string(lineno) + " has non-numeric fields");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

RdCurve curve_from_rows(const std::vector<RdCsvRow>& rows, const std::string& label,
                        const std::string& component) {
  RdCurve c;
  for (const auto& r : rows)
    if (r.label == label && r.component == component) c.points.push_back({r.kbps, r.psnr});
  if (c.points.empty())
    throw std::invalid_argument("rd csv: no rows for label '" + label + "' component '" +
                                component + "'");
  std::sort(c.points.begin(), c.points.end(),
            [](const RdPoint& a, const RdPoint& b) { return a.kbps < b.kbps; });
  return c;
}

}  // namespace uvc
