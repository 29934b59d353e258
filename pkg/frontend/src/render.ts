/** Client-side scene drawing: service render specs to SVG, no raster assets. */

import type { RenderItem, RenderSpec } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function polygonPoints(cx: number, cy: number, r: number, n: number, phase: number): string {
  const pts: string[] = [];
  for (let i = 0; i < n; i++) {
    const a = phase + (2 * Math.PI * i) / n;
    pts.push(`${(cx + r * Math.sin(a)).toFixed(2)},${(cy - r * Math.cos(a)).toFixed(2)}`);
  }
  return pts.join(" ");
}

function crossPoints(cx: number, cy: number, r: number): string {
  // plus sign: 12 corners of two overlapping bars of thickness 2t
  const t = r / 3;
  const pts: [number, number][] = [
    [-t, -r], [t, -r], [t, -t], [r, -t], [r, t], [t, t],
    [t, r], [-t, r], [-t, t], [-r, t], [-r, -t], [-t, -t],
  ];
  return pts.map(([dx, dy]) => `${(cx + dx).toFixed(2)},${(cy + dy).toFixed(2)}`).join(" ");
}

function shapeElement(doc: Document, item: RenderItem): SVGElement {
  const { glyph, x, y } = item;
  const r = item.size / 2;
  const make = (tag: string) => doc.createElementNS(SVG_NS, tag) as SVGElement;
  let el: SVGElement;
  switch (glyph) {
    case "square": {
      el = make("rect");
      el.setAttribute("x", String(x - r));
      el.setAttribute("y", String(y - r));
      el.setAttribute("width", String(2 * r));
      el.setAttribute("height", String(2 * r));
      break;
    }
    case "rectangle": {
      const h = r * 0.62;
      el = make("rect");
      el.setAttribute("x", String(x - r));
      el.setAttribute("y", String(y - h));
      el.setAttribute("width", String(2 * r));
      el.setAttribute("height", String(2 * h));
      break;
    }
    case "triangle": {
      el = make("polygon");
      el.setAttribute("points", polygonPoints(x, y, r, 3, 0));
      break;
    }
    case "pentagon": {
      el = make("polygon");
      el.setAttribute("points", polygonPoints(x, y, r, 5, 0));
      break;
    }
    case "cross": {
      el = make("polygon");
      el.setAttribute("points", crossPoints(x, y, r));
      break;
    }
    case "circle": {
      el = make("circle");
      el.setAttribute("cx", String(x));
      el.setAttribute("cy", String(y));
      el.setAttribute("r", String(r));
      break;
    }
    case "semicircle": {
      el = make("path");
      el.setAttribute(
        "d",
        `M ${x - r} ${y + r / 2} A ${r} ${r} 0 0 1 ${x + r} ${y + r / 2} Z`,
      );
      break;
    }
    case "ellipse": {
      el = make("ellipse");
      el.setAttribute("cx", String(x));
      el.setAttribute("cy", String(y));
      el.setAttribute("rx", String(r));
      el.setAttribute("ry", String(r * 0.6));
      break;
    }
    default: {
      // unknown glyph: visible placeholder rather than a blank cell
      el = make("circle");
      el.setAttribute("cx", String(x));
      el.setAttribute("cy", String(y));
      el.setAttribute("r", String(r));
      el.setAttribute("data-unknown-glyph", glyph);
      break;
    }
  }
  el.setAttribute("fill", item.fill);
  el.setAttribute("stroke", "#1f2430");
  el.setAttribute("stroke-width", "1.5");
  el.setAttribute("data-glyph", glyph);
  el.setAttribute("data-item-id", String(item.id));
  return el;
}

function arrowElements(
  doc: Document,
  fromItem: RenderItem,
  toItem: RenderItem,
  label: string,
): SVGElement[] {
  const make = (tag: string) => doc.createElementNS(SVG_NS, tag) as SVGElement;
  const dx = toItem.x - fromItem.x;
  const dy = toItem.y - fromItem.y;
  const len = Math.hypot(dx, dy) || 1;
  const ux = dx / len;
  const uy = dy / len;
  // leave the glyphs visible: trim the segment at both bounding radii
  const x1 = fromItem.x + ux * (fromItem.size / 2 + 4);
  const y1 = fromItem.y + uy * (fromItem.size / 2 + 4);
  const x2 = toItem.x - ux * (toItem.size / 2 + 4);
  const y2 = toItem.y - uy * (toItem.size / 2 + 4);

  const line = make("line");
  line.setAttribute("x1", x1.toFixed(2));
  line.setAttribute("y1", y1.toFixed(2));
  line.setAttribute("x2", x2.toFixed(2));
  line.setAttribute("y2", y2.toFixed(2));
  line.setAttribute("stroke", "#1f2430");
  line.setAttribute("stroke-width", "2");
  line.setAttribute("data-arrow", label);

  const headLen = 8;
  const head = make("polygon");
  const leftX = x2 - ux * headLen - uy * (headLen / 2);
  const leftY = y2 - uy * headLen + ux * (headLen / 2);
  const rightX = x2 - ux * headLen + uy * (headLen / 2);
  const rightY = y2 - uy * headLen - ux * (headLen / 2);
  head.setAttribute(
    "points",
    `${x2.toFixed(2)},${y2.toFixed(2)} ${leftX.toFixed(2)},${leftY.toFixed(2)} ${rightX.toFixed(2)},${rightY.toFixed(2)}`,
  );
  head.setAttribute("fill", "#1f2430");

  const text = make("text");
  text.setAttribute("x", ((x1 + x2) / 2).toFixed(2));
  text.setAttribute("y", ((y1 + y2) / 2 - 6).toFixed(2));
  text.setAttribute("text-anchor", "middle");
  text.setAttribute("font-size", "12");
  text.setAttribute("class", "arrow-label");
  text.textContent = label;

  return [line, head, text];
}

/** One scene as an inline SVG sized by its render spec. */
export function renderScene(doc: Document, spec: RenderSpec): SVGSVGElement {
  const svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
  svg.setAttribute("viewBox", `0 0 ${spec.width} ${spec.height}`);
  svg.setAttribute("width", "100%");
  svg.setAttribute("role", "img");
  const byId = new Map(spec.items.map((item) => [item.id, item]));
  for (const item of spec.items) {
    svg.appendChild(shapeElement(doc, item));
  }
  for (const arrow of spec.arrows) {
    const fromItem = byId.get(arrow.from);
    const toItem = byId.get(arrow.to);
    if (!fromItem || !toItem) continue;
    for (const el of arrowElements(doc, fromItem, toItem, arrow.label)) {
      svg.appendChild(el);
    }
  }
  return svg;
}
