import init, { transfer_curve, power_curve, trend_test } from "./pkg/landscape_demo.js";

const $ = (id) => document.getElementById(id);

function plot(canvas, ys, xMax, yMax, marks = []) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 30;
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, 5, w - pad - 5, h - pad - 5);
  ctx.fillStyle = "#333";
  ctx.fillText("0", pad - 10, h - pad + 12);
  ctx.fillText(String(xMax), w - 25, h - pad + 12);
  ctx.fillText(String(yMax), 2, 12);
  const sx = (i) => pad + (i / (ys.length - 1)) * (w - pad - 5);
  const sy = (v) => h - pad - (v / yMax) * (h - pad - 5);
  for (const m of marks) {
    ctx.strokeStyle = "#d88";
    ctx.beginPath();
    ctx.moveTo(pad, sy(m));
    ctx.lineTo(w - 5, sy(m));
    ctx.stroke();
  }
  ctx.strokeStyle = "#1565c0";
  ctx.beginPath();
  ys.forEach((v, i) => (i ? ctx.lineTo(sx(i), sy(v)) : ctx.moveTo(sx(i), sy(v))));
  ctx.stroke();
}

function guard(msg, f) {
  try {
    msg.textContent = "";
    f();
  } catch (e) {
    msg.textContent = String(e.message ?? e);
  }
}

function drawTransfer() {
  guard($("transfer-msg"), () => {
    const bias = Float64Array.from($("bias").value.split(",").map(Number));
    const tMax = Number($("tmax").value);
    const ys = transfer_curve(bias, Number($("out").value), $("heis").checked, tMax, 600);
    plot($("transfer"), ys, tMax, 1);
    $("transfer-msg").textContent = `max prob ${Math.max(...ys).toFixed(4)}`;
  });
}

function drawPower() {
  guard($("power-msg"), () => {
    const ys = power_curve(Number($("alpha").value), 5, 200);
    plot($("power"), ys, 5, 1, [0.8]);
    const k = ys.findIndex((p) => p >= 0.8);
    $("power-msg").textContent = k < 0 ? "80% not reached by mu = 5" : `80% power from mu ~ ${(k * 5 / 200).toFixed(3)}`;
  });
}

function runTrend() {
  guard($("trend-msg"), () => {
    const rows = $("pairs").value.trim().split(/\n+/).map((l) => l.split(/[,\s]+/).map(Number));
    const x = Float64Array.from(rows.map((r) => r[0]));
    const y = Float64Array.from(rows.map((r) => r[1]));
    const [tau, tauP, z, p] = trend_test(x, y, Number($("bins").value));
    $("trend-msg").textContent =
      `N = ${rows.length}\nKendall tau = ${tau.toFixed(4)} (p = ${tauP.toFixed(4)})\n` +
      `Jonckheere-Terpstra Z = ${z.toFixed(4)} (p = ${p.toFixed(4)})`;
  });
}

function samplePairs() {
  const lines = [];
  for (let i = 0; i < 120; i++) {
    const x = i / 1200;
    lines.push(`${x.toFixed(5)},${(Math.log(1 + 50 * x) + Math.random()).toFixed(5)}`);
  }
  return lines.join("\n");
}

await init();
$("pairs").value = samplePairs();
$("draw-transfer").onclick = drawTransfer;
$("draw-power").onclick = drawPower;
$("run-trend").onclick = runTrend;
drawTransfer();
drawPower();
