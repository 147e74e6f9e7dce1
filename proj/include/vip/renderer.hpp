#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "vip/edges.hpp"
#include "vip/panel.hpp"
#include "vip/raster.hpp"

namespace vip {

// Loads Screen frames (PPM) relative to `root` once per path. Throws
// AssetMissing with the resolved path; corrupt files raise DecodeError.
class AssetCache {
 public:
  explicit AssetCache(std::filesystem::path root = ".") : root_(std::move(root)) {}

  const Frame& get(const std::string& relative);
  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  std::filesystem::path root_;
  std::map<std::string, Frame, std::less<>> frames_;
};

namespace panel_colors {
inline constexpr Rgb kBackground{24, 24, 32};
inline constexpr Rgb kButton{70, 130, 200};
inline constexpr Rgb kButtonLocked{40, 160, 90};
inline constexpr Rgb kGlyph{235, 235, 235};
inline constexpr Rgb kSliderTrack{64, 64, 64};
inline constexpr Rgb kSliderFill{210, 160, 60};
inline constexpr Rgb kLabel{44, 44, 52};
inline constexpr Rgb kLabelGlyph{200, 200, 200};
inline constexpr Rgb kOutline{250, 250, 250};
inline constexpr Rgb kWire{255, 80, 80};
}  // namespace panel_colors

// Painter's order by z (document order on ties). Pixel (x, y) belongs to an
// element when its centre lies inside the bounds. Text becomes one filled
// glyph box per non-space byte. Locked elements get a one-pixel outline.
// With the inspector flag set, connections are drawn as lines between
// element centres.
Frame compose_panel(const PrototypeDoc& doc, int width, int height, AssetCache& assets);

// x' = a x + b y + tx, y' = c x + d y + ty
struct AffineTransform {
  double a = 1, b = 0, tx = 0;
  double c = 0, d = 1, ty = 0;

  Vec2 apply(Vec2 p) const noexcept { return {a * p.x + b * p.y + tx, c * p.x + d * p.y + ty}; }
  double det() const noexcept { return a * d - b * c; }
  // Throws DegenerateTransform when |det| <= 1e-9.
  AffineTransform inverse() const;

  friend bool operator==(const AffineTransform&, const AffineTransform&) = default;
};

// outer ∘ inner
AffineTransform compose(const AffineTransform& outer, const AffineTransform& inner);

// (0,0) -> tl, (w,0) -> tr, (0,h) -> bl. Throws DegenerateTarget when the
// three targets are collinear, BadParam for a non-positive source size.
AffineTransform fit_affine(double w, double h, Vec2 tl, Vec2 tr, Vec2 bl);

struct QuadFit {
  AffineTransform transform;
  double br_residual = 0;  // px between the mapped (w,h) and the quad's BR
};

// Fit against TL, TR, BL of the quad; BR falls where the map sends it.
QuadFit fit_quad(int w, int h, const DisplayQuad& quad);

// Inverse mapping with bilinear sampling at pixel centres. Target pixels
// whose centre maps outside the composite are left untouched. Throws
// DegenerateTransform.
Frame warp_into(const Frame& composite, const AffineTransform& t, Frame target);

}  // namespace vip
