import { describe, expect, it } from "vitest";

import type { RenderSpec } from "../src/api.js";
import { renderScene } from "../src/render.js";

const twoShapes: RenderSpec = {
  width: 300,
  height: 100,
  items: [
    { id: 0, glyph: "square", fill: "red", x: 50, y: 50, size: 70 },
    { id: 1, glyph: "circle", fill: "blue", x: 150, y: 50, size: 70 },
  ],
  arrows: [{ from: 0, to: 1, label: "touching" }],
};

describe("renderScene", () => {
  it("sizes the svg from the spec", () => {
    const svg = renderScene(document, twoShapes);
    expect(svg.getAttribute("viewBox")).toBe("0 0 300 100");
    expect(svg.getAttribute("width")).toBe("100%");
  });

  it("draws one element per item with fill and position", () => {
    const svg = renderScene(document, twoShapes);
    const rect = svg.querySelector('[data-item-id="0"]')!;
    expect(rect.tagName.toLowerCase()).toBe("rect");
    expect(rect.getAttribute("fill")).toBe("red");
    expect(rect.getAttribute("x")).toBe("15"); // 50 - 70/2
    const circle = svg.querySelector('[data-item-id="1"]')!;
    expect(circle.tagName.toLowerCase()).toBe("circle");
    expect(circle.getAttribute("cx")).toBe("150");
    expect(circle.getAttribute("r")).toBe("35");
  });

  it("covers the full shape vocabulary with distinct elements", () => {
    const glyphs = [
      "square",
      "rectangle",
      "triangle",
      "pentagon",
      "cross",
      "circle",
      "semicircle",
      "ellipse",
    ];
    const spec: RenderSpec = {
      width: 800,
      height: 100,
      items: glyphs.map((glyph, i) => ({
        id: i,
        glyph,
        fill: "green",
        x: 50 + 100 * i,
        y: 50,
        size: 70,
      })),
      arrows: [],
    };
    const svg = renderScene(document, spec);
    for (const glyph of glyphs) {
      const el = svg.querySelector(`[data-glyph="${glyph}"]`);
      expect(el, glyph).not.toBeNull();
      expect(el!.hasAttribute("data-unknown-glyph")).toBe(false);
    }
    // polygon shapes must carry computed points
    expect(
      svg.querySelector('[data-glyph="pentagon"]')!.getAttribute("points"),
    ).toMatch(/^[\d.,\s-]+$/);
  });

  it("marks unknown glyphs instead of dropping them", () => {
    const spec: RenderSpec = {
      width: 100,
      height: 100,
      items: [{ id: 0, glyph: "blob", fill: "gray", x: 50, y: 50, size: 70 }],
      arrows: [],
    };
    const svg = renderScene(document, spec);
    expect(svg.querySelector('[data-unknown-glyph="blob"]')).not.toBeNull();
  });

  it("draws labelled arrows trimmed to the glyph edges", () => {
    const svg = renderScene(document, twoShapes);
    const line = svg.querySelector('[data-arrow="touching"]')!;
    expect(Number(line.getAttribute("x1"))).toBeGreaterThan(50);
    expect(Number(line.getAttribute("x2"))).toBeLessThan(150);
    const labels = Array.from(svg.querySelectorAll("text")).map((t) => t.textContent);
    expect(labels).toContain("touching");
    // arrowhead present
    expect(svg.querySelectorAll("polygon").length).toBeGreaterThan(0);
  });

  it("skips arrows that reference missing items", () => {
    const spec: RenderSpec = {
      ...twoShapes,
      arrows: [{ from: 0, to: 9, label: "facing" }],
    };
    const svg = renderScene(document, spec);
    expect(svg.querySelector('[data-arrow="facing"]')).toBeNull();
  });
});
