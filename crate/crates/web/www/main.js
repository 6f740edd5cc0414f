import init, { simplexPath, kernelCurve, directingSamples } from "./pkg/martinwalk_web.js";

const $ = (id) => document.getElementById(id);
const PAD = 40;

function clear(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.font = "12px system-ui, sans-serif";
  ctx.fillStyle = "#222";
  ctx.strokeStyle = "#222";
  return ctx;
}

function axes(ctx, w, h, xlabel, ylabel) {
  ctx.strokeStyle = "#888";
  ctx.beginPath();
  ctx.moveTo(PAD, PAD / 2);
  ctx.lineTo(PAD, h - PAD);
  ctx.lineTo(w - PAD / 2, h - PAD);
  ctx.stroke();
  ctx.fillText(xlabel, w - PAD - 60, h - 10);
  ctx.fillText(ylabel, 4, 14);
}

function guarded(errId, f) {
  return () => {
    $(errId).textContent = "";
    try {
      f();
    } catch (e) {
      $(errId).textContent = String(e.message ?? e);
    }
  };
}

function drawTriangle(ctx, data, w, h) {
  const side = Math.min(w - 2 * PAD, (h - 2 * PAD) * 2 / Math.sqrt(3));
  const x0 = (w - side) / 2;
  const y0 = h - PAD;
  const corners = [
    [x0, y0],
    [x0 + side, y0],
    [x0 + side / 2, y0 - side * Math.sqrt(3) / 2],
  ];
  const to = (p) => [
    p[0] * corners[0][0] + p[1] * corners[1][0] + p[2] * corners[2][0],
    p[0] * corners[0][1] + p[1] * corners[1][1] + p[2] * corners[2][1],
  ];
  ctx.strokeStyle = "#888";
  ctx.beginPath();
  ctx.moveTo(...corners[0]);
  ctx.lineTo(...corners[1]);
  ctx.lineTo(...corners[2]);
  ctx.closePath();
  ctx.stroke();
  ["e1", "e2", "e3"].forEach((name, i) => ctx.fillText(name, corners[i][0] + (i === 1 ? 6 : -18), corners[i][1] + (i === 2 ? -6 : 14)));
  const steps = data.length / 3;
  ctx.lineWidth = 1;
  for (let k = 1; k < steps; k++) {
    const t = k / steps;
    ctx.strokeStyle = `hsl(${220 - 200 * t}, 70%, 45%)`;
    ctx.beginPath();
    ctx.moveTo(...to(data.subarray(3 * (k - 1), 3 * k)));
    ctx.lineTo(...to(data.subarray(3 * k, 3 * k + 3)));
    ctx.stroke();
  }
  const last = to(data.subarray(data.length - 3));
  ctx.fillStyle = "#b00";
  ctx.beginPath();
  ctx.arc(last[0], last[1], 4, 0, 2 * Math.PI);
  ctx.fill();
}

function drawLine(ctx, data, w, h) {
  const steps = data.length / 2;
  axes(ctx, w, h, "log k", "Y_k,1 / k");
  const lx = (k) => PAD + (w - 1.5 * PAD) * Math.log(k) / Math.log(steps);
  const ly = (v) => h - PAD - (h - 1.5 * PAD) * v;
  ctx.strokeStyle = "#246";
  ctx.beginPath();
  for (let k = 1; k <= steps; k++) {
    const v = data[2 * (k - 1)];
    if (k === 1) ctx.moveTo(lx(k), ly(v));
    else ctx.lineTo(lx(k), ly(v));
  }
  ctx.stroke();
}

function runPath() {
  const alpha = $("path-alpha").value;
  const n = Number($("path-n").value);
  const data = simplexPath(alpha, n, BigInt($("path-seed").value));
  const d = data.length / n;
  const canvas = $("path-canvas");
  const ctx = clear(canvas);
  if (d === 3) drawTriangle(ctx, data, canvas.width, canvas.height);
  else if (d === 2) drawLine(ctx, data, canvas.width, canvas.height);
  else throw new Error("pick two or three coordinates");
}

function runKernel() {
  const max = Number($("kern-max").value);
  const levels = [];
  for (let e = 1; e <= Math.log10(max) + 1e-9; e += 0.125) levels.push(Math.round(10 ** e));
  const uniq = Uint32Array.from([...new Set(levels)]);
  const values = kernelCurve($("kern-alpha").value, $("kern-x").value, uniq);
  const limit = values[values.length - 1];
  const curve = values.subarray(0, values.length - 1);
  const canvas = $("kern-canvas");
  const ctx = clear(canvas);
  const { width: w, height: h } = canvas;
  axes(ctx, w, h, "log10 n", "K");
  const lo = Math.min(limit, ...curve);
  const hi = Math.max(limit, ...curve);
  const span = hi - lo || 1;
  const lx = (n) => PAD + (w - 1.5 * PAD) * (Math.log10(n) - 1) / (Math.log10(max) - 1 || 1);
  const ly = (v) => h - PAD - (h - 1.5 * PAD) * (v - lo) / span;
  ctx.setLineDash([5, 4]);
  ctx.strokeStyle = "#b00";
  ctx.beginPath();
  ctx.moveTo(PAD, ly(limit));
  ctx.lineTo(w - PAD / 2, ly(limit));
  ctx.stroke();
  ctx.setLineDash([]);
  ctx.strokeStyle = "#246";
  ctx.fillStyle = "#246";
  ctx.beginPath();
  uniq.forEach((n, i) => (i === 0 ? ctx.moveTo(lx(n), ly(curve[i])) : ctx.lineTo(lx(n), ly(curve[i]))));
  ctx.stroke();
  uniq.forEach((n, i) => ctx.fillRect(lx(n) - 2, ly(curve[i]) - 2, 4, 4));
  ctx.fillStyle = "#222";
  ctx.fillText(`K(x, α) = ${limit.toPrecision(6)}; at n = ${uniq[uniq.length - 1]}: ${curve[curve.length - 1].toPrecision(6)}`, PAD + 10, PAD);
}

function runHistogram() {
  const data = directingSamples(
    $("dm-kind").value,
    $("dm-params").value,
    Number($("dm-n").value),
    Number($("dm-r").value),
    BigInt($("dm-seed").value),
  );
  const reps = Number($("dm-r").value);
  const d = data.length / reps;
  const bins = new Array(50).fill(0);
  for (let i = 0; i < reps; i++) {
    const v = data[i * d];
    bins[Math.min(bins.length - 1, Math.floor(v * bins.length))]++;
  }
  const canvas = $("dm-canvas");
  const ctx = clear(canvas);
  const { width: w, height: h } = canvas;
  axes(ctx, w, h, "first coordinate", "count");
  const top = Math.max(...bins);
  const bw = (w - 1.5 * PAD) / bins.length;
  ctx.fillStyle = "#4a7";
  bins.forEach((c, i) => {
    const bh = (h - 1.5 * PAD) * c / top;
    ctx.fillRect(PAD + i * bw + 1, h - PAD - bh, bw - 2, bh);
  });
  ctx.fillStyle = "#222";
  [0, 0.25, 0.5, 0.75, 1].forEach((t) => ctx.fillText(String(t), PAD + t * bins.length * bw - 6, h - PAD + 14));
  ctx.fillText(`max bin ${top}`, PAD + 10, PAD);
}

$("dm-kind").addEventListener("change", () => {
  $("dm-params").value = $("dm-kind").value === "polya" ? "1,1" : "1/5,4/5;3/5,2/5|1/2,1/2";
});

await init();
$("path-run").addEventListener("click", guarded("path-err", runPath));
$("kern-run").addEventListener("click", guarded("kern-err", runKernel));
$("dm-run").addEventListener("click", guarded("dm-err", runHistogram));
guarded("path-err", runPath)();
guarded("kern-err", runKernel)();
guarded("dm-err", runHistogram)();
