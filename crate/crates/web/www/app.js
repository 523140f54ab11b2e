import init, { analyze, encode, simulate, fixtureText } from "./pkg/icc_web.js";

const $ = (id) => document.getElementById(id);
const SVG = "http://www.w3.org/2000/svg";

let analysis = null;

function el(tag, attrs = {}, text) {
  const node = document.createElementNS(SVG, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function call(fn, ...args) {
  $("error").textContent = "";
  try {
    return JSON.parse(fn(...args));
  } catch (e) {
    $("error").textContent = e.message ?? String(e);
    return null;
  }
}

const graphText = () => $("graph").value;
const selection = () => $("select").value;
const construction = () => Number(document.querySelector("input[name=construction]:checked").value);
const xor = (ids) => (ids.length ? ids.map((v) => `x${v}`).join(" ⊕ ") : "0");

function outerEdges(cycles) {
  const set = new Set();
  for (const c of cycles) c.forEach((v, k) => set.add(`${v}>${c[(k + 1) % c.length]}`));
  return set;
}

function draw(a) {
  const svg = $("view");
  svg.replaceChildren();
  const defs = el("defs");
  for (const [id, color] of [["arrow", "#bbb"], ["arrow-outer", "#d2691e"]]) {
    const m = el("marker", { id, viewBox: "0 0 10 10", refX: 10, refY: 5, markerWidth: 6, markerHeight: 6, orient: "auto-start-reverse" });
    m.append(el("path", { d: "M0,0 L10,5 L0,10 z", fill: color }));
    defs.append(m);
  }
  svg.append(defs);

  const { n, inner, edges } = a.graph;
  const r = n > 24 ? 13 : 16;
  const R = 300 - r - 20;
  const pos = (v) => {
    const t = (2 * Math.PI * (v - 1)) / n - Math.PI / 2;
    return [300 + R * Math.cos(t), 300 + R * Math.sin(t)];
  };
  const outer = outerEdges(a.outer_cycles);
  const has = new Set(edges.map(([u, v]) => `${u}>${v}`));
  const layer = el("g");
  for (const [u, v] of [...edges].sort((e, f) => outer.has(`${e[0]}>${e[1]}`) - outer.has(`${f[0]}>${f[1]}`))) {
    const [x1, y1] = pos(u);
    const [x2, y2] = pos(v);
    const d = Math.hypot(x2 - x1, y2 - y1);
    const [ux, uy] = [(x2 - x1) / d, (y2 - y1) / d];
    const [sx, sy, ex, ey] = [x1 + ux * r, y1 + uy * r, x2 - ux * (r + 2), y2 - uy * (r + 2)];
    // bend antiparallel pairs apart
    const bend = has.has(`${v}>${u}`) ? 18 : 0;
    const [mx, my] = [(sx + ex) / 2 - uy * bend, (sy + ey) / 2 + ux * bend];
    const cls = outer.has(`${u}>${v}`) ? "edge outer" : "edge";
    layer.append(el("path", { class: cls, d: `M${sx},${sy} Q${mx},${my} ${ex},${ey}` }));
  }
  svg.append(layer);

  const innerSet = new Set(inner);
  const ccvs = new Set(a.mocgs.map((m) => m.ccv));
  for (let v = 1; v <= n; v++) {
    const [x, y] = pos(v);
    const cls = ["vertex", innerSet.has(v) ? "inner" : "", ccvs.has(v) ? "ccv" : ""].join(" ").trim();
    const g = el("g", { class: cls, "data-v": v });
    g.append(el("circle", { cx: x, cy: y, r }), el("text", { x, y }, String(v)));
    svg.append(g);
  }
}

function light(ids) {
  const set = new Set(ids);
  for (const g of $("view").querySelectorAll(".vertex")) g.classList.toggle("lit", set.has(Number(g.dataset.v)));
}

function summarize(a) {
  const rows = a.mocgs
    .map((m) => `<tr><td>${m.ccv}</td><td>${m.cycles.map((c) => c.join("→")).join(", ")}</td><td>{${m.pre_central.join(", ")}}</td><td>${m.isolated ? "isolated" : "shared"}, ${m.odd ? "odd" : "even"}</td></tr>`)
    .join("");
  const verdict = (ok) => (ok ? '<span class="ok">holds</span>' : '<span class="bad">fails</span>');
  $("summary").innerHTML =
    `<h2>${a.graph.inner.length}-IC structure, ${a.graph.n} vertices, ${a.graph.edges.length} edges</h2>` +
    `<p>${a.outer_cycles.length} outer cycle(s); V<sub>OC</sub> = {${a.v_oc.join(", ")}}. c1 ${verdict(a.c1_ok)}, c2 ${verdict(a.c2_ok)}.</p>` +
    (rows ? `<table><tr><th>CCV</th><th>cycles</th><th>pre-central</th><th></th></tr>${rows}</table>` : "");
}

function runAnalyze() {
  const a = call(analyze, graphText());
  if (!a) return false;
  analysis = a;
  draw(a);
  summarize(a);
  for (const id of ["codebook", "equations", "simulation"]) $(id).hidden = true;
  return true;
}

function runEncode() {
  if (!runAnalyze()) return;
  const e = call(encode, graphText(), selection(), construction());
  if (!e) return;
  const book = e.codebook;
  const symbols = [["W_I", book.W_I], ...Object.entries(book.W_j)];
  const choices = Object.entries(book.choices).map(([c, p]) => `CCV ${c} keeps {${p.join(", ")}}`).join("; ");
  $("codebook").hidden = false;
  $("codebook").innerHTML =
    `<h2>Construction ${book.construction}: ${book.length} symbols</h2>` +
    (choices ? `<p class="muted">${choices}</p>` : "") +
    `<table>${symbols.map(([l, s]) => `<tr data-s="${s.join(",")}"><td>${l}</td><td>${xor(s)}</td></tr>`).join("")}</table>`;

  const cert = e.certificate;
  const status = cert.all_decodable
    ? `<span class="ok">every user decodable</span> (rank ${cert.code_rank})`
    : `<span class="bad">undecodable: ${Object.entries(cert.per_user).filter(([, c]) => !c.decodable).map(([u]) => u).join(", ")}</span>`;
  $("equations").hidden = false;
  $("equations").innerHTML =
    `<h2>Inner-vertex decoding (algorithm ${e.algorithm})</h2><p>GF(2) check: ${status}</p>` +
    `<table>${e.equations.map((q) => `<tr data-s="${q.z_support.join(",")}"><td>Z<sub>${q.inner}</sub></td><td>${q.combined.join(" ⊕ ")}</td><td>= ${xor(q.z_support)}</td></tr>`).join("")}</table>`;
  for (const tr of document.querySelectorAll("#codebook tr, #equations tr")) {
    tr.addEventListener("mouseenter", () => {
      tr.classList.add("hover");
      light(tr.dataset.s ? tr.dataset.s.split(",").map(Number) : []);
    });
    tr.addEventListener("mouseleave", () => {
      tr.classList.remove("hover");
      light([]);
    });
  }
}

function runSimulate() {
  if (!analysis && !runAnalyze()) return;
  const r = call(simulate, graphText(), selection(), construction(), Number($("trials").value), Number($("msglen").value), Number($("seed").value));
  if (!r) return;
  const rate = r.match_rate === null ? "n/a" : `${(100 * r.match_rate).toFixed(2)}%`;
  const fails = r.failures.map((f) => `<li>trial ${f.trial}, user ${f.user}: ${f.reason}</li>`).join("");
  $("simulation").hidden = false;
  $("simulation").innerHTML =
    `<h2>Round trips</h2><p>${r.matches} / ${r.trials} exact (${rate}), ${r.msg_len}-byte messages, seed ${r.seed}. ` +
    `At most ${r.max_symbols_used} symbols combined per user.</p>` +
    (fails ? `<ul>${fails}</ul>` : "");
}

function loadFixture() {
  const name = $("fixture").value;
  if (!name) return;
  $("graph").value = fixtureText(name);
  $("select").value = "";
  runEncode();
}

await init();
$("fixture").addEventListener("change", loadFixture);
$("graph").addEventListener("input", () => ($("fixture").value = ""));
$("analyze").addEventListener("click", runAnalyze);
$("encode").addEventListener("click", runEncode);
$("simulate").addEventListener("click", runSimulate);
loadFixture();
