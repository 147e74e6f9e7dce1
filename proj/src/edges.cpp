#include "vip/edges.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>

#include "simd/kernels.hpp"
#include "vip/error.hpp"
#include "vip/log.hpp"

namespace vip {

GrayImage::GrayImage(int width, int height, float fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::BadParam, "image dimensions must be positive");
  }
  values_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage to_gray(const Frame& frame) {
  GrayImage out(frame.width(), frame.height());
  auto dst = out.values();
  const auto src = frame.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double luma = 0.299 * src[i].r + 0.587 * src[i].g + 0.114 * src[i].b;
    dst[i] = static_cast<float>(luma / 255.0);
  }
  return out;
}

void CannyParams::validate() const {
  if (!(sigma > 0.0)) throw Error(ErrorCode::BadParam, "canny sigma must be > 0");
  if (!(t_high > 0.0)) throw Error(ErrorCode::BadParam, "canny t_high must be > 0");
  if (!(ratio > 1.0)) throw Error(ErrorCode::BadParam, "canny ratio must be > 1");
  if (ratio < 2.0 || ratio > 3.0) {
    std::ostringstream msg;
    msg << "canny high:low ratio " << ratio << " is outside the recommended [2, 3]";
    log::warn(msg.str());
  }
}

std::vector<float> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::BadParam, "gaussian sigma must be > 0");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> w(2 * radius + 1);
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    w[k + radius] = std::exp(-(k * k) / (2.0 * sigma * sigma));
    sum += w[k + radius];
  }
  std::vector<float> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = static_cast<float>(w[i] / sum);
  return out;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  const std::vector<float> weights = gaussian_kernel(sigma);
  const int radius = static_cast<int>(weights.size() / 2);
  const int taps = static_cast<int>(weights.size());
  const auto& k = simd::active();
  const int w = img.width();
  const int h = img.height();

  GrayImage horizontal(w, h);
  for (int y = 0; y < h; ++y) k.convolve_row(img.row(y), w, weights.data(), radius, horizontal.row(y));

  GrayImage out(w, h);
  std::vector<const float*> rows(taps);
  for (int y = 0; y < h; ++y) {
    for (int t = 0; t < taps; ++t) rows[t] = horizontal.row(std::clamp(y + t - radius, 0, h - 1));
    k.convolve_cols(rows.data(), taps, weights.data(), w, out.row(y));
  }
  return out;
}

Gradients sobel_gradients(const GrayImage& img) {
  if (img.width() < 3 || img.height() < 3) {
    throw Error(ErrorCode::ImageTooSmall, "sobel needs at least 3x3 pixels");
  }
  const int w = img.width();
  const int h = img.height();
  Gradients g{GrayImage(w, h), GrayImage(w, h), GrayImage(w, h), GrayImage(w, h)};
  const auto& k = simd::active();
  for (int y = 0; y < h; ++y) {
    k.sobel_row(img.row(std::max(y - 1, 0)), img.row(y), img.row(std::min(y + 1, h - 1)), w,
                g.gx.row(y), g.gy.row(y), g.magnitude.row(y));
  }
  auto dir = g.direction.values();
  const auto gx = g.gx.values();
  const auto gy = g.gy.values();
  for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = std::atan2(gy[i], gx[i]);
  return g;
}

namespace {

// Neighbour offset along the quantized gradient direction (y grows downward).
PixelCoord direction_step(float radians) {
  double deg = radians * 180.0 / std::numbers::pi;
  if (deg < 0.0) deg += 180.0;
  if (deg >= 180.0) deg -= 180.0;
  if (deg < 22.5 || deg >= 157.5) return {1, 0};
  if (deg < 67.5) return {1, 1};
  if (deg < 112.5) return {0, 1};
  return {-1, 1};
}

}  // namespace

GrayImage non_max_suppression(const Gradients& grad) {
  const GrayImage& mag = grad.magnitude;
  const int w = mag.width();
  const int h = mag.height();
  GrayImage out(w, h);
  auto sample = [&](int x, int y) {
    return (x >= 0 && y >= 0 && x < w && y < h) ? mag.at(x, y) : 0.0f;
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float m = mag.at(x, y);
      if (m <= 0.0f) continue;
      const PixelCoord d = direction_step(grad.direction.at(x, y));
      const float back = sample(x - d.x, y - d.y);
      const float fwd = sample(x + d.x, y + d.y);
      if (m > back && m >= fwd) out.at(x, y) = m;
    }
  }
  return out;
}

BinaryMask hysteresis(const GrayImage& suppressed, double t_low, double t_high) {
  const int w = suppressed.width();
  const int h = suppressed.height();
  BinaryMask edges(w, h);
  std::vector<PixelCoord> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (suppressed.at(x, y) > t_high && !edges.on(x, y)) {
        edges.at(x, y) = BinaryMask::kOn;
        stack.push_back({x, y});
      }
      while (!stack.empty()) {
        const PixelCoord p = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = p.x + dx;
            const int ny = p.y + dy;
            if (!edges.contains(nx, ny) || edges.on(nx, ny)) continue;
            if (suppressed.at(nx, ny) >= t_low && suppressed.at(nx, ny) > 0.0f) {
              edges.at(nx, ny) = BinaryMask::kOn;
              stack.push_back({nx, ny});
            }
          }
        }
      }
    }
  }
  return edges;
}

CannyStages canny_stages(const GrayImage& img, const CannyParams& params) {
  params.validate();
  CannyStages s;
  s.blurred = gaussian_blur(img, params.sigma);
  s.gradients = sobel_gradients(s.blurred);
  s.suppressed = non_max_suppression(s.gradients);
  s.edges = hysteresis(s.suppressed, params.t_low(), params.t_high);
  return s;
}

BinaryMask canny(const GrayImage& img, const CannyParams& params) {
  return canny_stages(img, params).edges;
}

double DisplayQuad::signed_area() const noexcept {
  double twice = 0.0;
  for (std::size_t i = 0; i < 4; ++i) twice += cross(corners[i], corners[(i + 1) % 4]);
  return 0.5 * twice;
}

namespace {

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

}  // namespace

bool DisplayQuad::simple() const noexcept {
  const auto& c = corners;
  return !segments_cross(c[0], c[1], c[2], c[3]) && !segments_cross(c[1], c[2], c[3], c[0]);
}

DisplayQuad canonical_quad(std::array<Vec2, 4> points, double confidence) {
  Vec2 centroid;
  for (const Vec2& p : points) centroid = centroid + 0.25 * p;
  std::sort(points.begin(), points.end(), [&](Vec2 a, Vec2 b) {
    return std::atan2(a.y - centroid.y, a.x - centroid.x) <
           std::atan2(b.y - centroid.y, b.x - centroid.x);
  });
  std::size_t first = 0;
  for (std::size_t i = 1; i < 4; ++i) {
    const double si = points[i].x + points[i].y;
    const double sf = points[first].x + points[first].y;
    if (si < sf || (si == sf && points[i].y < points[first].y)) first = i;
  }
  DisplayQuad q;
  for (std::size_t i = 0; i < 4; ++i) q.corners[i] = points[(first + i) % 4];
  q.confidence = confidence;
  return q;
}

namespace {

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

// Open-chain Douglas-Peucker over chain[lo..hi], appending kept interior
// indices (exclusive of endpoints) in order.
void simplify_chain(std::span<const Vec2> chain, double tolerance, std::vector<std::size_t>& keep) {
  if (chain.size() < 3) return;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, chain.size() - 1}};
  std::vector<bool> kept(chain.size(), false);
  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    stack.pop_back();
    double worst = -1.0;
    std::size_t idx = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const double d = segment_distance(chain[i], chain[lo], chain[hi]);
      if (d > worst) {
        worst = d;
        idx = i;
      }
    }
    if (worst > tolerance) {
      kept[idx] = true;
      stack.push_back({lo, idx});
      stack.push_back({idx, hi});
    }
  }
  for (std::size_t i = 1; i + 1 < chain.size(); ++i) {
    if (kept[i]) keep.push_back(i);
  }
}

std::size_t farthest_from(std::span<const Vec2> pts, Vec2 from) {
  std::size_t best = 0;
  double best_d = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = distance(pts[i], from);
    if (d > best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

std::vector<Vec2> simplify_closed(std::span<const Vec2> contour, double tolerance) {
  const std::size_t n = contour.size();
  if (n < 3) return {contour.begin(), contour.end()};
  // Anchor on two extreme points so no mid-edge start vertex survives.
  const std::size_t a = farthest_from(contour, contour[0]);
  const std::size_t b = farthest_from(contour, contour[a]);
  const std::size_t lo = std::min(a, b);
  const std::size_t hi = std::max(a, b);
  if (lo == hi) return {contour[lo]};

  std::vector<Vec2> first(contour.begin() + lo, contour.begin() + hi + 1);
  std::vector<Vec2> second(contour.begin() + hi, contour.end());
  second.insert(second.end(), contour.begin(), contour.begin() + lo + 1);

  std::vector<Vec2> out;
  std::vector<std::size_t> keep;
  out.push_back(first.front());
  simplify_chain(first, tolerance, keep);
  for (std::size_t i : keep) out.push_back(first[i]);
  out.push_back(second.front());
  keep.clear();
  simplify_chain(second, tolerance, keep);
  for (std::size_t i : keep) out.push_back(second[i]);
  return out;
}

std::vector<Vec2> trace_outer_contour(const BinaryMask& region, PixelCoord start) {
  // Clockwise ring on screen (y down), starting west.
  static constexpr std::array<PixelCoord, 8> kRing{{
      {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}}};
  auto inside = [&](PixelCoord p) { return region.contains(p.x, p.y) && region.on(p.x, p.y); };
  auto ring_index = [](PixelCoord from, PixelCoord to) {
    const PixelCoord d{to.x - from.x, to.y - from.y};
    for (std::size_t i = 0; i < kRing.size(); ++i) {
      if (kRing[i] == d) return i;
    }
    return std::size_t{0};
  };

  std::vector<Vec2> contour{pixel_center(start)};
  const PixelCoord start_back{start.x - 1, start.y};
  PixelCoord current = start;
  PixelCoord back = start_back;
  const std::size_t limit = 4 * static_cast<std::size_t>(region.width()) * region.height() + 8;
  for (std::size_t step = 0; step < limit; ++step) {
    const std::size_t bi = ring_index(current, back);
    bool found = false;
    PixelCoord next{};
    PixelCoord prev_checked = back;
    for (std::size_t k = 1; k <= 8; ++k) {
      const PixelCoord o = kRing[(bi + k) % 8];
      const PixelCoord cand{current.x + o.x, current.y + o.y};
      if (inside(cand)) {
        next = cand;
        found = true;
        break;
      }
      prev_checked = cand;
    }
    if (!found) break;  // isolated pixel
    back = prev_checked;
    current = next;
    if (current == start && back == start_back) break;
    contour.push_back(pixel_center(current));
  }
  if (contour.size() > 1 && contour.back() == contour.front()) contour.pop_back();
  return contour;
}

namespace {

struct ClosedCandidate {
  BinaryMask region;
  std::size_t region_area = 0;
  PixelCoord start;
};

// Component pixels plus everything they enclose (not 4-reachable from the
// border through non-component pixels). Nothing enclosed => not closed.
std::optional<ClosedCandidate> close_component(const Component& comp, int w, int h) {
  BinaryMask wall(w, h);
  for (const PixelCoord& p : comp.pixels) wall.at(p.x, p.y) = BinaryMask::kOn;
  std::vector<std::uint8_t> outside(static_cast<std::size_t>(w) * h, 0);
  std::deque<PixelCoord> queue;
  auto seed = [&](int x, int y) {
    const std::size_t i = static_cast<std::size_t>(y) * w + x;
    if (!wall.on(x, y) && !outside[i]) {
      outside[i] = 1;
      queue.push_back({x, y});
    }
  };
  for (int x = 0; x < w; ++x) {
    seed(x, 0);
    seed(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    seed(0, y);
    seed(w - 1, y);
  }
  while (!queue.empty()) {
    const PixelCoord p = queue.front();
    queue.pop_front();
    static constexpr std::array<PixelCoord, 4> kFour{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
    for (const PixelCoord& d : kFour) {
      const int nx = p.x + d.x;
      const int ny = p.y + d.y;
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      seed(nx, ny);
    }
  }
  ClosedCandidate cand{BinaryMask(w, h), 0, {}};
  bool have_start = false;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (outside[static_cast<std::size_t>(y) * w + x]) continue;
      cand.region.at(x, y) = BinaryMask::kOn;
      ++cand.region_area;
      if (!have_start) {
        cand.start = {x, y};
        have_start = true;
      }
    }
  }
  if (cand.region_area <= comp.area) return std::nullopt;
  return cand;
}

double closed_perimeter(std::span<const Vec2> contour) {
  double p = 0.0;
  for (std::size_t i = 0; i < contour.size(); ++i) {
    p += distance(contour[i], contour[(i + 1) % contour.size()]);
  }
  return p;
}

// Simplified vertices are contour pixels, which cut across corners that the
// blur rounded off. Fit a line to the middle of each side and intersect
// neighbours instead; keep the vertex when that is ill-conditioned.
std::vector<Vec2> refine_corners(std::span<const Vec2> contour, std::span<const Vec2> poly) {
  const std::size_t n = contour.size();
  const std::size_t k = poly.size();
  std::vector<std::size_t> at;
  for (const Vec2& v : poly) {
    const auto it = std::find(contour.begin(), contour.end(), v);
    if (it == contour.end()) return {poly.begin(), poly.end()};
    at.push_back(static_cast<std::size_t>(it - contour.begin()));
  }
  struct Line {
    Vec2 point;
    Vec2 dir;
  };
  std::vector<Line> sides;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t len = (at[(i + 1) % k] + n - at[i]) % n;
    const std::size_t trim = len / 5;
    if (len < 2 * trim + 3) return {poly.begin(), poly.end()};
    // Total least squares over points near the current line, starting from
    // the chord: a marker crossing the side bends the contour outwards.
    const Vec2 chord = poly[(i + 1) % k] - poly[i];
    Line fit{poly[i], chord * (1.0 / std::hypot(chord.x, chord.y))};
    for (const double band : {1.5, 0.75}) {
      Vec2 mean{0, 0};
      std::size_t count = 0;
      auto usable = [&](const Vec2& q) { return std::abs(cross(fit.dir, q - fit.point)) <= band; };
      for (std::size_t j = trim; j <= len - trim; ++j) {
        const Vec2& q = contour[(at[i] + j) % n];
        if (!usable(q)) continue;
        mean = mean + q;
        ++count;
      }
      if (count < 3) return {poly.begin(), poly.end()};
      mean = mean * (1.0 / count);
      double sxx = 0, sxy = 0, syy = 0;
      for (std::size_t j = trim; j <= len - trim; ++j) {
        const Vec2& q = contour[(at[i] + j) % n];
        if (!usable(q)) continue;
        const Vec2 d = q - mean;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
      }
      const double theta = 0.5 * std::atan2(2 * sxy, sxx - syy);
      fit = Line{mean, {std::cos(theta), std::sin(theta)}};
    }
    sides.push_back(fit);
  }
  std::vector<Vec2> out(poly.begin(), poly.end());
  for (std::size_t i = 0; i < k; ++i) {
    const Line& a = sides[(i + k - 1) % k];
    const Line& b = sides[i];
    const double den = cross(a.dir, b.dir);
    if (std::abs(den) < 0.1) continue;  // under ~6 degrees apart
    const Vec2 p = a.point + a.dir * (cross(b.point - a.point, b.dir) / den);
    if (distance(p, poly[i]) <= 0.05 * closed_perimeter(contour)) out[i] = p;
  }
  return out;
}

}  // namespace

std::optional<DisplayQuad> detect_display_quad(const BinaryMask& edges,
                                               const QuadDetectOptions& options) {
  const int w = edges.width();
  const int h = edges.height();
  const std::vector<Component> comps = connected_components(edges);

  std::optional<ClosedCandidate> best;
  for (std::size_t i = 0; i < comps.size() && i < options.max_candidates; ++i) {
    if (comps[i].area < 4) break;
    auto cand = close_component(comps[i], w, h);
    if (cand && (!best || cand->region_area > best->region_area)) best = std::move(cand);
  }
  if (!best) return std::nullopt;

  const std::vector<Vec2> contour = trace_outer_contour(best->region, best->start);
  const double tolerance = options.simplify_fraction * closed_perimeter(contour);
  const std::vector<Vec2> simplified = simplify_closed(contour, tolerance);
  if (simplified.size() != 4) return std::nullopt;
  const std::vector<Vec2> poly = refine_corners(contour, simplified);

  DisplayQuad quad = canonical_quad({poly[0], poly[1], poly[2], poly[3]}, 1.0);
  if (!quad.simple() || quad.signed_area() < options.min_area_fraction * w * h) {
    return std::nullopt;
  }
  return quad;
}

std::optional<DisplayQuad> extract_display_quad(const BinaryMask& edges,
                                                const std::optional<DisplayQuad>& prev,
                                                const QuadDetectOptions& options) {
  if (auto fresh = detect_display_quad(edges, options)) return fresh;
  if (!prev) return std::nullopt;
  DisplayQuad decayed = *prev;
  decayed.confidence *= options.miss_decay;
  return decayed;
}

const std::optional<DisplayQuad>& QuadTracker::update(const BinaryMask& edges) {
  if (auto fresh = detect_display_quad(edges, options_)) {
    quad_ = fresh;
    misses_ = 0;
    return quad_;
  }
  ++misses_;
  if (misses_ >= max_misses_ || !quad_) {
    quad_.reset();
  } else {
    quad_->confidence *= options_.miss_decay;
  }
  return quad_;
}

}  // namespace vip
