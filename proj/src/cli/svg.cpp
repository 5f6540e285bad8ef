#include <algorithm>
#include <cmath>
#include <cstdio>

#include "actgov/artifacts.hpp"
#include "actgov/error.hpp"

namespace actgov {

namespace {

constexpr int kProjectionDirections = 256;

double cross(const std::pair<double, double>& o, const std::pair<double, double>& a,
             const std::pair<double, double>& b) {
  return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
}

// Andrew's monotone chain, counter-clockwise without collinear points.
Polygon2 hull2(Polygon2 pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  Polygon2 h(2 * pts.size());
  size_t k = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i - 1]) <= 0) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  return h;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

Polygon2 project_polytope(const Polytope& P, int i, int j, const std::pair<double, double>& lo,
                          const std::pair<double, double>& hi) {
  const int n = P.dim();
  if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
    fail(ErrorKind::kInvalidInput, "projection axes are out of range");
  }
  Polytope clipped = P.with_strictness(false);
  clipped.add_row(Vec::Unit(n, i), hi.first);
  clipped.add_row(-Vec::Unit(n, i), -lo.first);
  clipped.add_row(Vec::Unit(n, j), hi.second);
  clipped.add_row(-Vec::Unit(n, j), -lo.second);
  if (!clipped.has_interior()) return {};
  // Support points of the shadow over a fan of directions; each is a
  // vertex of the projection, so their hull is the projection.
  Polygon2 pts;
  for (int k = 0; k < kProjectionDirections; ++k) {
    const double th = 2.0 * M_PI * k / kProjectionDirections;
    Vec c = Vec::Zero(n);
    c(i) = -std::cos(th);
    c(j) = -std::sin(th);
    const SolveStatus r = solve_lp(c, clipped.cons());
    if (r.optimal()) pts.emplace_back(r.point(i), r.point(j));
  }
  return hull2(std::move(pts));
}

std::string render_svg(const PlotData& d) {
  const double W = 640, H = 480, pad = 56;
  const double sx = (W - 2 * pad) / std::max(d.hi.first - d.lo.first, 1e-12);
  const double sy = (H - 2 * pad) / std::max(d.hi.second - d.lo.second, 1e-12);
  auto X = [&](double x) { return pad + (x - d.lo.first) * sx; };
  auto Y = [&](double y) { return H - pad - (y - d.lo.second) * sy; };
  auto points = [&](const Polygon2& poly) {
    std::string s;
    for (const auto& [x, y] : poly) s += num(X(x)) + "," + num(Y(y)) + " ";
    if (!s.empty()) s.pop_back();
    return s;
  };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
         "\" viewBox=\"0 0 " + num(W) + " " + num(H) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(W) + "\" height=\"" + num(H) +
         "\" fill=\"white\"/>\n";
  out += "<defs><clipPath id=\"frame\"><rect x=\"" + num(pad) + "\" y=\"" + num(pad) +
         "\" width=\"" + num(W - 2 * pad) + "\" height=\"" + num(H - 2 * pad) +
         "\"/></clipPath></defs>\n";
  out += "<g clip-path=\"url(#frame)\">\n";
  if (d.oinf) {
    out += "<polygon class=\"oinf\" points=\"" + points(*d.oinf) +
           "\" fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"#3182bd\"/>\n";
  }
  for (const auto& poly : d.unsafe) {
    out += "<polygon class=\"unsafe\" points=\"" + points(poly) +
           "\" fill=\"#fdae6b\" fill-opacity=\"0.6\" stroke=\"#e6550d\" stroke-width=\"0.5\"/>\n";
  }
  for (const auto& poly : d.exclusion) {
    out += "<polygon class=\"exclusion\" points=\"" + points(poly) +
           "\" fill=\"#de2d26\" fill-opacity=\"0.6\" stroke=\"#a50f15\"/>\n";
  }
  if (!d.path.empty()) {
    out += "<polyline class=\"trajectory\" points=\"" + points(d.path) +
           "\" fill=\"none\" stroke=\"#31a354\" stroke-width=\"2\" stroke-dasharray=\"8,3,2,3\"/>\n";
  }
  out += "</g>\n";
  if (!d.path.empty()) {
    out += "<circle class=\"start\" cx=\"" + num(X(d.path.front().first)) + "\" cy=\"" +
           num(Y(d.path.front().second)) + "\" r=\"5\" fill=\"#31a354\"/>\n";
  }
  if (d.target) {
    out += "<circle class=\"target\" cx=\"" + num(X(d.target->first)) + "\" cy=\"" +
           num(Y(d.target->second)) + "\" r=\"6\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";
  }
  // Frame, ticks and labels.
  out += "<rect x=\"" + num(pad) + "\" y=\"" + num(pad) + "\" width=\"" + num(W - 2 * pad) +
         "\" height=\"" + num(H - 2 * pad) + "\" fill=\"none\" stroke=\"black\"/>\n";
  char buf[64];
  for (int t = 0; t <= 4; ++t) {
    const double vx = d.lo.first + (d.hi.first - d.lo.first) * t / 4.0;
    const double vy = d.lo.second + (d.hi.second - d.lo.second) * t / 4.0;
    std::snprintf(buf, sizeof buf, "%.3g", vx);
    out += "<text x=\"" + num(X(vx)) + "\" y=\"" + num(H - pad + 16) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + buf + "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", vy);
    out += "<text x=\"" + num(pad - 6) + "\" y=\"" + num(Y(vy) + 4) +
           "\" font-size=\"11\" text-anchor=\"end\">" + buf + "</text>\n";
  }
  out += "<text x=\"" + num(W / 2) + "\" y=\"" + num(H - 12) +
         "\" font-size=\"13\" text-anchor=\"middle\">" + d.x_label + "</text>\n";
  out += "<text x=\"16\" y=\"" + num(H / 2) + "\" font-size=\"13\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 16 " + num(H / 2) + ")\">" + d.y_label + "</text>\n";
  out += "<text x=\"" + num(W / 2) + "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">" +
         d.title + "</text>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace actgov
