import init, { quantize, approximate, report } from "./pkg/lcabs_web.js";

const PRESETS = {
  quantizer: {
    domain: { lo: -10, hi: 10, lo_closed: true, hi_closed: true },
    symbols: {
      m2: { lo: -10, hi: -4, lo_closed: true, hi_closed: false },
      m1: { lo: -6, hi: 1, lo_closed: false, hi_closed: false },
      p1: { lo: -1, hi: 6, lo_closed: false, hi_closed: false },
      p2: { lo: 4, hi: 10, lo_closed: false, hi_closed: true },
    },
    initial_values: [-10, 10],
    mode: "point",
  },
  "three-state": {
    alphabet: ["a", "b", "c"],
    states: ["x1", "x2", "x3"],
    initial: ["x2"],
    transitions: [["x2", "a", "x1"], ["x1", "b", "x2"], ["x2", "a", "x3"], ["x3", "c", "x2"]],
  },
  aab: {
    alphabet: ["a", "b"],
    states: ["s0", "s1", "s2"],
    initial: ["s0"],
    transitions: [["s0", "a", "s1"], ["s1", "a", "s2"], ["s2", "b", "s0"]],
  },
};

const $ = (id) => document.getElementById(id);
const COLORS = ["#3366cc", "#dc3912", "#ff9900", "#109618", "#990099", "#0099c6"];

function params() {
  return { text: $("input").value, mode: $("mode").value, l: Number($("l").value) || 0 };
}

function guarded(fn) {
  return () => {
    $("error").textContent = "";
    try {
      fn();
    } catch (e) {
      $("error").textContent = String(e.message ?? e);
    }
  };
}

function table(head, rows) {
  const t = $("table");
  t.replaceChildren();
  const tr = t.insertRow();
  head.forEach((h) => {
    const th = document.createElement("th");
    th.textContent = h;
    tr.appendChild(th);
  });
  rows.forEach((row) => {
    const r = t.insertRow();
    row.forEach((cell) => {
      const td = r.insertCell();
      td.textContent = cell;
      if (cell === "pass" || cell === "fail") td.className = cell;
    });
  });
}

// Parses "[-10, -4) ∪ (-1, 6)" or "{-6, 1}" into drawable pieces.
function pieces(text) {
  if (text === "∅") return [];
  return text.split(" ∪ ").flatMap((part) => {
    if (part.startsWith("{")) {
      return part.slice(1, -1).split(", ").map((v) => ({ lo: Number(v), hi: Number(v), point: true }));
    }
    const [lo, hi] = part.slice(1, -1).split(", ").map(Number);
    return [{ lo, hi, loClosed: part[0] === "[", hiClosed: part.at(-1) === "]" }];
  });
}

function plot(data) {
  const c = $("plot");
  const g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  const { lo, hi } = data.domain;
  const x = (v) => 40 + ((v - lo) / (hi - lo)) * (c.width - 80);
  const rows = [
    ...Object.entries(data.symbols).map(([name, i]) => ({ name, parts: [{ ...i, loClosed: i.lo_closed, hiClosed: i.hi_closed }] })),
    ...Object.entries(data.reach).map(([past, text]) => ({ name: `after ${past}`, parts: pieces(text) })),
  ];
  const step = Math.min(24, (c.height - 30) / rows.length);
  g.font = "11px monospace";
  rows.forEach((row, k) => {
    const y = 15 + k * step;
    g.fillStyle = "#333";
    g.fillText(row.name, 2, y + 4);
    g.strokeStyle = g.fillStyle = COLORS[k % COLORS.length];
    g.lineWidth = 3;
    row.parts.forEach((p) => {
      if (p.point) {
        g.beginPath();
        g.arc(x(p.lo), y, 4, 0, 2 * Math.PI);
        g.fill();
        return;
      }
      g.beginPath();
      g.moveTo(x(p.lo), y);
      g.lineTo(x(p.hi), y);
      g.stroke();
      [[p.lo, p.loClosed], [p.hi, p.hiClosed]].forEach(([v, closed]) => {
        g.beginPath();
        g.arc(x(v), y, 4, 0, 2 * Math.PI);
        if (closed) g.fill();
        else {
          g.fillStyle = "#fff";
          g.fill();
          g.stroke();
          g.fillStyle = g.strokeStyle;
        }
      });
    });
  });
  g.fillStyle = "#333";
  for (let v = Math.ceil(lo); v <= hi; v += Math.max(1, Math.round((hi - lo) / 10))) {
    g.fillText(String(v), x(v) - 6, c.height - 4);
  }
}

const SVG = "http://www.w3.org/2000/svg";
function el(name, attrs, text) {
  const e = document.createElementNS(SVG, name);
  Object.entries(attrs).forEach(([k, v]) => e.setAttribute(k, v));
  if (text !== undefined) e.textContent = text;
  return e;
}

// Circular layout; parallel edges share one arrow with a joined label.
function drawMachine(m, caption) {
  const svg = $("graph");
  svg.replaceChildren();
  svg.appendChild(el("defs", {})).appendChild(
    el("marker", { id: "arrow", viewBox: "0 0 10 10", refX: 10, refY: 5, markerWidth: 6, markerHeight: 6, orient: "auto" }),
  ).appendChild(el("path", { d: "M0,0 L10,5 L0,10 z", fill: "#555" }));
  const n = m.states.length;
  const pos = {};
  m.states.forEach((s, i) => {
    const a = (2 * Math.PI * i) / n - Math.PI / 2;
    pos[s] = [320 + 140 * Math.cos(a), 180 + 140 * Math.sin(a)];
  });
  const labels = {};
  m.transitions.forEach(([s, a, d]) => {
    const key = `${s}\u0000${d}`;
    (labels[key] ??= []).push(a);
  });
  const r = 22;
  Object.entries(labels).forEach(([key, syms]) => {
    const [s, d] = key.split("\u0000");
    const [x1, y1] = pos[s];
    const [x2, y2] = pos[d];
    const text = syms.join(",");
    if (s === d) {
      svg.appendChild(el("path", { d: `M${x1 - 8},${y1 - r} C${x1 - 30},${y1 - 70} ${x1 + 30},${y1 - 70} ${x1 + 8},${y1 - r}`, fill: "none", stroke: "#555", "marker-end": "url(#arrow)" }));
      svg.appendChild(el("text", { x: x1, y: y1 - 58, "text-anchor": "middle" }, text));
      return;
    }
    const len = Math.hypot(x2 - x1, y2 - y1);
    const [ux, uy] = [(x2 - x1) / len, (y2 - y1) / len];
    const bend = labels[`${d}\u0000${s}`] ? 18 : 0;
    const [mx, my] = [(x1 + x2) / 2 - uy * bend, (y1 + y2) / 2 + ux * bend];
    svg.appendChild(el("path", { d: `M${x1 + ux * r},${y1 + uy * r} Q${mx},${my} ${x2 - ux * r},${y2 - uy * r}`, fill: "none", stroke: "#555", "marker-end": "url(#arrow)" }));
    svg.appendChild(el("text", { x: mx - uy * 8, y: my + ux * 8, "text-anchor": "middle" }, text));
  });
  const initial = new Set(m.initial);
  m.states.forEach((s) => {
    const [x, y] = pos[s];
    svg.appendChild(el("circle", { cx: x, cy: y, r, fill: initial.has(s) ? "#e8f0fe" : "#fff", stroke: "#333", "stroke-width": initial.has(s) ? 2.5 : 1 }));
    svg.appendChild(el("text", { x, y: y + 4, "text-anchor": "middle" }, s));
  });
  $("graph-caption").textContent = caption;
}

function runQuantize() {
  const { text, mode, l } = params();
  const data = JSON.parse(quantize(text, mode, l));
  plot(data);
  drawMachine(data.machine, `Compiled machine (${mode} mode)`);
  table(
    ["recent past", "signal values"],
    Object.entries(data.reach),
  );
}

function runApproximate() {
  const { text, mode, l } = params();
  const data = JSON.parse(approximate(text, mode, l));
  drawMachine(data.approximation, `${l}-complete approximation`);
  table(["system state", "approximation state"], data.rl);
}

function runReport() {
  const { text, mode, l } = params();
  const data = JSON.parse(report(text, mode, l));
  drawMachine(data.approximation, `${l}-complete approximation`);
  const describe = (item) => {
    const cx = item.counterexample;
    if (!cx) return item.witness ? `extra behavior: ${item.witness}` : "";
    return cx.kind === "step"
      ? `(${cx.left}, ${cx.right}) cannot match ${cx.symbol} after ${cx.replay}`
      : `${cx.left} uncovered after ${cx.replay}`;
  };
  table(
    ["item", "claim", "status", "evidence"],
    [
      ...data.items.map((i) => [i.item, i.claim, i.status, describe(i)]),
      ["", `${l}-complete`, data.premises.l_complete.status, data.premises.l_complete.witness ?? ""],
      ...(data.notes ?? []).map((n) => ["", n, "", ""]),
    ],
  );
}

function loadPreset() {
  $("input").value = JSON.stringify(PRESETS[$("preset").value], null, 2);
  const q = $("preset").value === "quantizer";
  $("mode").disabled = !q;
  $("run-quantize").disabled = !q;
}

await init();
$("preset").addEventListener("change", loadPreset);
$("run-quantize").addEventListener("click", guarded(runQuantize));
$("run-approximate").addEventListener("click", guarded(runApproximate));
$("run-report").addEventListener("click", guarded(runReport));
loadPreset();
guarded(runQuantize)();
