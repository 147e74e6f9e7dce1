#include "vip/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vip/error.hpp"
#include "vip/image_io.hpp"
#include "vip/log.hpp"

namespace vip {

const Frame& AssetCache::get(const std::string& relative) {
  if (const auto it = frames_.find(relative); it != frames_.end()) return it->second;
  const std::filesystem::path path = root_ / relative;
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::AssetMissing, path.string());
  }
  return frames_.emplace(relative, io::read_ppm(path)).first->second;
}

namespace {

struct PixelSpan {
  int x0, y0, x1, y1;  // half-open
  bool empty() const { return x0 >= x1 || y0 >= y1; }
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
};

// Pixels whose centres fall in [lo, hi) of the scaled coordinate.
int first_center_at_or_after(double edge) { return static_cast<int>(std::ceil(edge - 0.5)); }

PixelSpan pixel_span(const Bounds& b, int width, int height) {
  PixelSpan s{first_center_at_or_after(b.u * width), first_center_at_or_after(b.v * height),
              first_center_at_or_after((b.u + b.w) * width),
              first_center_at_or_after((b.v + b.h) * height)};
  s.x0 = std::clamp(s.x0, 0, width);
  s.x1 = std::clamp(s.x1, 0, width);
  s.y0 = std::clamp(s.y0, 0, height);
  s.y1 = std::clamp(s.y1, 0, height);
  return s;
}

void fill(Frame& f, const PixelSpan& s, Rgb color) {
  for (int y = s.y0; y < s.y1; ++y) {
    for (int x = s.x0; x < s.x1; ++x) f.at(x, y) = color;
  }
}

void outline(Frame& f, const PixelSpan& s, Rgb color) {
  if (s.empty()) return;
  for (int x = s.x0; x < s.x1; ++x) {
    f.at(x, s.y0) = color;
    f.at(x, s.y1 - 1) = color;
  }
  for (int y = s.y0; y < s.y1; ++y) {
    f.at(s.x0, y) = color;
    f.at(s.x1 - 1, y) = color;
  }
}

// A row of equal boxes centred in the span, one per character slot.
void glyph_boxes(Frame& f, const PixelSpan& s, const std::string& text, Rgb color) {
  if (text.empty() || s.empty()) return;
  const int n = static_cast<int>(text.size());
  const int cell = std::min(s.width() / (n + 1), s.height() * 3 / 5);
  if (cell < 2) return;
  const int gh = std::max(1, std::min(cell * 4 / 3, s.height() - 2));
  const int total = n * cell;
  const int left = s.x0 + (s.width() - total) / 2;
  const int top = s.y0 + (s.height() - gh) / 2;
  for (int i = 0; i < n; ++i) {
    if (text[i] == ' ') continue;
    const int gx0 = left + i * cell;
    fill(f, {gx0, top, gx0 + std::max(1, cell - 1), top + gh}, color);
  }
}

void scale_into(Frame& f, const PixelSpan& s, const Frame& src) {
  for (int y = s.y0; y < s.y1; ++y) {
    const int sy = std::min(src.height() - 1, static_cast<int>((y - s.y0 + 0.5) * src.height() / s.height()));
    for (int x = s.x0; x < s.x1; ++x) {
      const int sx = std::min(src.width() - 1, static_cast<int>((x - s.x0 + 0.5) * src.width() / s.width()));
      f.at(x, y) = src.at(sx, sy);
    }
  }
}

void line(Frame& f, int x0, int y0, int x1, int y1, Rgb color) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (f.contains(x0, y0)) f.at(x0, y0) = color;
    if (x0 == x1 && y0 == y1) return;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace

Frame compose_panel(const PrototypeDoc& doc, int width, int height, AssetCache& assets) {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::BadParam, "resolution must be positive");
  Frame out(width, height, panel_colors::kBackground);

  std::vector<std::size_t> order(doc.elements.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return doc.elements[i].z < doc.elements[j].z;
  });

  for (std::size_t i : order) {
    const PanelElement& e = doc.elements[i];
    const PixelSpan s = pixel_span(e.bounds, width, height);
    if (s.empty()) continue;
    switch (e.kind) {
      case ElementKind::Button:
        fill(out, s, e.locked ? panel_colors::kButtonLocked : panel_colors::kButton);
        glyph_boxes(out, s, e.text, panel_colors::kGlyph);
        break;
      case ElementKind::Slider: {
        fill(out, s, panel_colors::kSliderTrack);
        PixelSpan knob = s;
        knob.x1 = s.x0 + static_cast<int>(std::lround(std::clamp(e.value, 0.0, 1.0) * s.width()));
        fill(out, knob, panel_colors::kSliderFill);
        break;
      }
      case ElementKind::Label:
        fill(out, s, panel_colors::kLabel);
        glyph_boxes(out, s, e.text, panel_colors::kLabelGlyph);
        break;
      case ElementKind::Screen:
        // A frameless Screen shows as an unlit label-coloured box.
        if (e.frames.empty()) {
          fill(out, s, panel_colors::kLabel);
        } else {
          scale_into(out, s, assets.get(e.frames.at(static_cast<std::size_t>(e.frame_index))));
        }
        break;
      case ElementKind::LockControl:
        break;
    }
    if (e.locked && e.kind != ElementKind::Screen) outline(out, s, panel_colors::kOutline);
  }

  if (doc.inspector) {
    for (const Connection& c : doc.connections) {
      const PanelElement* a = doc.find(c.from.element);
      const PanelElement* b = doc.find(c.to.element);
      if (!a || !b) continue;
      const Vec2 pa = a->bounds.center(), pb = b->bounds.center();
      const int x0 = static_cast<int>(std::floor(pa.x * width)), y0 = static_cast<int>(std::floor(pa.y * height));
      const int x1 = static_cast<int>(std::floor(pb.x * width)), y1 = static_cast<int>(std::floor(pb.y * height));
      line(out, x0, y0, x1, y1, panel_colors::kWire);
      fill(out, {std::max(0, x1 - 1), std::max(0, y1 - 1), std::min(width, x1 + 2), std::min(height, y1 + 2)},
           panel_colors::kWire);
    }
  }
  return out;
}

AffineTransform AffineTransform::inverse() const {
  const double det = this->det();
  if (!(std::abs(det) > 1e-9) || !std::isfinite(det)) {
    throw Error(ErrorCode::DegenerateTransform, "affine determinant " + std::to_string(det));
  }
  AffineTransform inv;
  inv.a = d / det;
  inv.b = -b / det;
  inv.c = -c / det;
  inv.d = a / det;
  inv.tx = -(inv.a * tx + inv.b * ty);
  inv.ty = -(inv.c * tx + inv.d * ty);
  return inv;
}

AffineTransform compose(const AffineTransform& o, const AffineTransform& i) {
  AffineTransform r;
  r.a = o.a * i.a + o.b * i.c;
  r.b = o.a * i.b + o.b * i.d;
  r.c = o.c * i.a + o.d * i.c;
  r.d = o.c * i.b + o.d * i.d;
  r.tx = o.a * i.tx + o.b * i.ty + o.tx;
  r.ty = o.c * i.tx + o.d * i.ty + o.ty;
  return r;
}

AffineTransform fit_affine(double w, double h, Vec2 tl, Vec2 tr, Vec2 bl) {
  if (!(w > 0) || !(h > 0)) throw Error(ErrorCode::BadParam, "source size must be positive");
  const Vec2 ex = tr - tl, ey = bl - tl;
  const double scale = std::max(norm(ex) * norm(ey), 1e-300);
  if (std::abs(cross(ex, ey)) <= 1e-12 * scale || norm(ex) == 0 || norm(ey) == 0) {
    throw Error(ErrorCode::DegenerateTarget, "target anchors are collinear");
  }
  return {ex.x / w, ey.x / h, tl.x, ex.y / w, ey.y / h, tl.y};
}

QuadFit fit_quad(int w, int h, const DisplayQuad& quad) {
  QuadFit fit;
  fit.transform = fit_affine(w, h, quad.corners[0], quad.corners[1], quad.corners[3]);
  fit.br_residual = distance(fit.transform.apply({static_cast<double>(w), static_cast<double>(h)}),
                             quad.corners[2]);
  return fit;
}

Frame warp_into(const Frame& src, const AffineTransform& t, Frame target) {
  const AffineTransform inv = t.inverse();
  const int sw = src.width(), sh = src.height();
  for (int y = 0; y < target.height(); ++y) {
    for (int x = 0; x < target.width(); ++x) {
      const Vec2 s = inv.apply({x + 0.5, y + 0.5});
      if (!(s.x >= 0 && s.x < sw && s.y >= 0 && s.y < sh)) continue;
      const double fx = s.x - 0.5, fy = s.y - 0.5;
      const double x0f = std::floor(fx), y0f = std::floor(fy);
      const double ax = fx - x0f, ay = fy - y0f;
      const int x0 = std::clamp(static_cast<int>(x0f), 0, sw - 1);
      const int y0 = std::clamp(static_cast<int>(y0f), 0, sh - 1);
      const int x1 = std::clamp(static_cast<int>(x0f) + 1, 0, sw - 1);
      const int y1 = std::clamp(static_cast<int>(y0f) + 1, 0, sh - 1);
      const Rgb p00 = src.at(x0, y0), p10 = src.at(x1, y0), p01 = src.at(x0, y1), p11 = src.at(x1, y1);
      auto mix = [&](std::uint8_t Rgb::*ch) {
        const double top = (1 - ax) * (p00.*ch) + ax * (p10.*ch);
        const double bot = (1 - ax) * (p01.*ch) + ax * (p11.*ch);
        return static_cast<std::uint8_t>(std::lround(std::clamp((1 - ay) * top + ay * bot, 0.0, 255.0)));
      };
      target.at(x, y) = {mix(&Rgb::r), mix(&Rgb::g), mix(&Rgb::b)};
    }
  }
  return target;
}

}  // namespace vip
