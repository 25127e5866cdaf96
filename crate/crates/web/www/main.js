import init, { FlowDemo, polar_pair, subsolution_curve } from "./pkg/aniflow_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function showError(el, e) {
  el.className = "err";
  el.textContent = String(e && e.message ? e.message : e);
}

function clearError(el) {
  el.className = "";
}

// Draws closed polylines given as interleaved x, y arrays, scaled to fit.
function drawCurves(canvas, curves, colors) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  let extent = 0;
  for (const c of curves) {
    for (const v of c) extent = Math.max(extent, Math.abs(v));
  }
  if (!(extent > 0) || !isFinite(extent)) return;
  const s = (0.45 * Math.min(canvas.width, canvas.height)) / extent;
  const cx = canvas.width / 2;
  const cy = canvas.height / 2;

  ctx.strokeStyle = "#ddd";
  ctx.beginPath();
  ctx.moveTo(0, cy); ctx.lineTo(canvas.width, cy);
  ctx.moveTo(cx, 0); ctx.lineTo(cx, canvas.height);
  ctx.stroke();

  curves.forEach((c, i) => {
    ctx.strokeStyle = colors[i % colors.length];
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    for (let k = 0; k < c.length; k += 2) {
      const x = cx + s * c[k];
      const y = cy - s * c[k + 1];
      if (k === 0) ctx.moveTo(x, y); else ctx.lineTo(x, y);
    }
    ctx.closePath();
    ctx.stroke();
  });
}

// flow panel

let demo = null;
let running = false;

function startFlow() {
  const info = $("flow-info");
  clearError(info);
  try {
    if (demo) demo.free();
    demo = new FlowDemo($("shape").value, num("param"), num("alpha"), num("aniso"), $("raw").checked, 256);
  } catch (e) {
    demo = null;
    running = false;
    showError(info, e);
    return;
  }
  running = true;
  requestAnimationFrame(tick);
}

function tick() {
  if (!demo) return;
  const info = $("flow-info");
  let alive = false;
  try {
    alive = demo.advance(200);
  } catch (e) {
    showError(info, e);
    running = false;
  }
  drawCurves($("flow-canvas"), [demo.boundary()], ["#000"]);
  info.textContent =
    `t = ${demo.time().toFixed(4)}   R = ${demo.ratio().toPrecision(5)}\n` +
    `residual = ${demo.residual().toExponential(3)}   J = ${demo.functional().toPrecision(8)}\n` +
    (alive ? "" : "stopped");
  if (!alive) running = false;
  if (running) requestAnimationFrame(tick);
}

$("start").onclick = startFlow;
$("pause").onclick = () => {
  if (!demo) return;
  running = !running;
  $("pause").textContent = running ? "pause" : "resume";
  if (running) requestAnimationFrame(tick);
};

// polar panel

function drawPolar() {
  const info = $("polar-info");
  clearError(info);
  try {
    const pts = polar_pair($("polar-shape").value, num("polar-param"), 256);
    const half = pts.length / 2;
    drawCurves($("polar-canvas"), [pts.slice(0, half), pts.slice(half)], ["#000", "#1f5fbf"]);
    info.textContent = "black: body, blue: polar dual";
  } catch (e) {
    showError(info, e);
  }
}

$("polar-shape").onchange = drawPolar;
$("polar-param").oninput = drawPolar;

// subsolution panel

function drawSub() {
  const info = $("sub-info");
  clearError(info);
  const canvas = $("sub-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  let c;
  try {
    c = subsolution_curve(num("sub-theta"), num("sub-q"), num("sub-t"), 201);
  } catch (e) {
    showError(info, e);
    return;
  }
  let lo = Infinity, hi = -Infinity;
  for (let k = 1; k < c.length; k += 2) { lo = Math.min(lo, c[k]); hi = Math.max(hi, c[k]); }
  const pad = 0.1 * (hi - lo || 1);
  lo -= pad; hi += pad;
  const X = (rho) => 20 + (rho + 1) / 2 * (canvas.width - 40);
  const Y = (phi) => canvas.height - 20 - (phi - lo) / (hi - lo) * (canvas.height - 40);
  ctx.strokeStyle = "#1f5fbf";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  for (let k = 0; k < c.length; k += 2) {
    if (k === 0) ctx.moveTo(X(c[k]), Y(c[k + 1])); else ctx.lineTo(X(c[k]), Y(c[k + 1]));
  }
  ctx.stroke();
  info.textContent = `θ = ${num("sub-theta")}, t = ${num("sub-t")}, φ(0) = ${c[c.length / 2 | 1].toPrecision(6)}`;
}

for (const id of ["sub-theta", "sub-q", "sub-t"]) $(id).oninput = drawSub;

await init();
drawPolar();
drawSub();
