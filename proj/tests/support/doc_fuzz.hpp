#pragma once

#include <random>
#include <string>

#include "vip/panel.hpp"

namespace vip::test {

inline std::string random_text(std::mt19937_64& rng) {
  static const std::string pieces[] = {"OK", "Cancel", "1", "Enter PIN", "\"q\"", "a/b", "~0",
                                       "tab\there", "caf\xc3\xa9", ""};
  std::uniform_int_distribution<std::size_t> pick(0, std::size(pieces) - 1);
  return pieces[pick(rng)] + pieces[pick(rng)];
}

inline Bounds random_bounds(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> size(kMinElementSize, 0.5), unit(0.0, 1.0);
  Bounds b;
  b.w = size(rng);
  b.h = size(rng);
  b.u = unit(rng) * (1.0 - b.w);
  b.v = unit(rng) * (1.0 - b.h);
  return b;
}

inline std::vector<std::string> random_frames(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 6);
  std::vector<std::string> frames;
  for (int i = count(rng); i > 0; --i) frames.push_back("seq/" + std::to_string(i) + ".ppm");
  return frames;
}

// Valid by construction: connections only run from earlier to later
// elements, so the graph is acyclic.
inline PrototypeDoc random_valid_doc(std::mt19937_64& rng) {
  const ElementKind kinds[] = {ElementKind::Button, ElementKind::Screen, ElementKind::Slider,
                               ElementKind::Label};
  std::uniform_int_distribution<int> kind(0, 3), small(0, 6), zdist(-5, 20);
  std::uniform_real_distribution<double> unit(0.0, 1.0), size(kMinElementSize, 1.0);
  std::bernoulli_distribution coin(0.5);

  PrototypeDoc doc;
  doc.mode = coin(rng) ? Mode::Edit : Mode::Run;
  doc.inspector = coin(rng);
  const int templates = small(rng);
  const int lock_at = std::uniform_int_distribution<int>(0, templates)(rng);
  for (int i = 0; i <= templates; ++i) {
    PaletteTemplate t;
    t.id = "tpl-" + std::to_string(i);
    t.kind = i == lock_at ? ElementKind::LockControl : kinds[kind(rng)];
    t.w = size(rng);
    t.h = size(rng);
    if (t.kind == ElementKind::Button || t.kind == ElementKind::Label) t.text = random_text(rng);
    if (t.kind == ElementKind::Slider) t.value = unit(rng);
    if (t.kind == ElementKind::Screen) t.frames = random_frames(rng);
    if (!outlets(t.kind).empty() && coin(rng)) {
      t.links.push_back({std::string(outlets(t.kind)[0].name), {"somewhere", "advance"}});
    }
    doc.palette.push_back(std::move(t));
  }
  const int n = std::uniform_int_distribution<int>(0, 8)(rng);
  for (int i = 0; i < n; ++i) {
    PanelElement e;
    e.id = "el-" + std::to_string(i) + (coin(rng) ? "-x" : "");
    e.kind = kinds[kind(rng)];
    e.bounds = random_bounds(rng);
    e.locked = coin(rng);
    e.z = zdist(rng);
    if (e.kind == ElementKind::Button || e.kind == ElementKind::Label) e.text = random_text(rng);
    if (e.kind == ElementKind::Slider) e.value = unit(rng);
    if (e.kind == ElementKind::Screen) {
      e.frames = random_frames(rng);
      e.frame_index = std::uniform_int_distribution<int>(0, static_cast<int>(e.frames.size()) - 1)(rng);
    }
    doc.elements.push_back(std::move(e));
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const PanelElement& from = doc.elements[a];
      const PanelElement& to = doc.elements[b];
      for (const PortSpec& out : outlets(from.kind)) {
        for (const PortSpec& in : inlets(to.kind)) {
          if (out.type == in.type && unit(rng) < 0.3) {
            doc.connections.push_back({{from.id, std::string(out.name)}, {to.id, std::string(in.name)}});
          }
        }
      }
    }
  }
  return doc;
}

}  // namespace vip::test
