// Dependency-free SVG charts. Each builder returns a detached <svg> element
// sized by the caller's CSS; coordinates are computed against a fixed
// viewBox so the markup stays testable.

const SVG_NS = "http://www.w3.org/2000/svg";
const W = 420;
const H = 260;
const PAD = 36;

function svgRoot(label: string): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${W} ${H}`);
  svg.setAttribute("role", "img");
  svg.setAttribute("aria-label", label);
  return svg;
}

function el(name: string, attrs: Record<string, string | number>): SVGElement {
  const node = document.createElementNS(SVG_NS, name);
  for (const [k, v] of Object.entries(attrs)) {
    node.setAttribute(k, String(v));
  }
  return node;
}

function text(x: number, y: number, content: string, cls = ""): SVGElement {
  const node = el("text", { x, y, class: `chart-text ${cls}`.trim() });
  node.textContent = content;
  return node;
}

interface Scale {
  (v: number): number;
}

function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function lineChart(
  points: Array<{ x: number; y: number }>,
  opts: { label: string; xTitle: string; yTitle: string; marker?: { x: number; y: number } },
): SVGSVGElement {
  const svg = svgRoot(opts.label);
  if (points.length === 0) return svg;
  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const sx = linearScale(Math.min(...xs), Math.max(...xs), PAD, W - PAD);
  const sy = linearScale(0, Math.max(...ys, 1e-9), H - PAD, PAD);

  svg.appendChild(el("line", { x1: PAD, y1: H - PAD, x2: W - PAD, y2: H - PAD, class: "axis" }));
  svg.appendChild(el("line", { x1: PAD, y1: PAD, x2: PAD, y2: H - PAD, class: "axis" }));
  svg.appendChild(text(W / 2, H - 6, opts.xTitle, "axis-title"));
  svg.appendChild(text(10, 14, opts.yTitle, "axis-title"));

  const path = points.map((p, i) => `${i === 0 ? "M" : "L"}${sx(p.x)},${sy(p.y)}`).join(" ");
  svg.appendChild(el("path", { d: path, class: "series" }));
  for (const p of points) {
    svg.appendChild(el("circle", { cx: sx(p.x), cy: sy(p.y), r: 3, class: "dot" }));
  }
  if (opts.marker) {
    svg.appendChild(
      el("circle", { cx: sx(opts.marker.x), cy: sy(opts.marker.y), r: 6, class: "marker" }),
    );
  }
  return svg;
}

export function barChart(
  entries: Array<{ label: string; value: number }>,
  opts: { label: string },
): SVGSVGElement {
  const svg = svgRoot(opts.label);
  if (entries.length === 0) return svg;
  const maxAbs = Math.max(...entries.map((e) => Math.abs(e.value)), 1e-9);
  const rowH = (H - 2 * PAD) / entries.length;
  const mid = W * 0.45;
  const halfSpan = W - PAD - mid;

  svg.appendChild(el("line", { x1: mid, y1: PAD - 6, x2: mid, y2: H - PAD + 6, class: "axis" }));
  entries.forEach((entry, i) => {
    const y = PAD + i * rowH;
    const len = (Math.abs(entry.value) / maxAbs) * halfSpan;
    const x = entry.value >= 0 ? mid : mid - len;
    svg.appendChild(
      el("rect", {
        x,
        y: y + rowH * 0.15,
        width: Math.max(len, 0.5),
        height: rowH * 0.7,
        class: entry.value >= 0 ? "bar positive" : "bar negative",
        "data-name": entry.label,
        "data-value": entry.value,
      }),
    );
    svg.appendChild(text(4, y + rowH * 0.65, entry.label, "bar-label"));
  });
  return svg;
}
