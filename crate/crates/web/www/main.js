import init, { explore_single_mode, catalog_trajectory, rate_sweep, scenarios } from "./pkg/fermigauss_web.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#ff7f0e", "#17becf"];

function values(form) {
  const out = {};
  for (const el of form.elements) {
    if (!el.name) continue;
    out[el.name] = el.type === "range" ? parseFloat(el.value) : el.value;
    const o = el.parentElement.querySelector("output");
    if (o) o.textContent = el.value;
  }
  return out;
}

function fmt(x) {
  return Math.abs(x) < 5e-13 ? "0" : x.toPrecision(4);
}

function axes(ctx, box, xr, yr) {
  const sx = (x) => box.x + ((x - xr[0]) / (xr[1] - xr[0])) * box.w;
  const sy = (y) => box.y + box.h - ((y - yr[0]) / (yr[1] - yr[0])) * box.h;
  ctx.strokeStyle = "#999";
  ctx.lineWidth = 1;
  ctx.strokeRect(box.x, box.y, box.w, box.h);
  ctx.fillStyle = "#444";
  ctx.font = "11px system-ui";
  for (let k = 0; k <= 4; k++) {
    const x = xr[0] + ((xr[1] - xr[0]) * k) / 4;
    const y = yr[0] + ((yr[1] - yr[0]) * k) / 4;
    ctx.fillText(fmt(x), sx(x) - 10, box.y + box.h + 14);
    ctx.fillText(fmt(y), 4, sy(y) + 4);
  }
  if (yr[0] < 0 && yr[1] > 0) {
    ctx.strokeStyle = "#ddd";
    ctx.beginPath();
    ctx.moveTo(box.x, sy(0));
    ctx.lineTo(box.x + box.w, sy(0));
    ctx.stroke();
  }
  return { sx, sy };
}

function range(arrays) {
  let lo = Infinity;
  let hi = -Infinity;
  for (const a of arrays) for (const v of a) { lo = Math.min(lo, v); hi = Math.max(hi, v); }
  if (!(hi > lo)) { lo -= 1; hi += 1; }
  const pad = 0.05 * (hi - lo);
  return [lo - pad, hi + pad];
}

function polyline(ctx, xs, ys, map, color, width = 1.5) {
  ctx.strokeStyle = color;
  ctx.lineWidth = width;
  ctx.beginPath();
  xs.forEach((x, k) => (k ? ctx.lineTo(map.sx(x), map.sy(ys[k])) : ctx.moveTo(map.sx(x), map.sy(ys[k]))));
  ctx.stroke();
}

function guard(outEl, fn) {
  try {
    outEl.classList.remove("err");
    fn();
  } catch (e) {
    outEl.classList.add("err");
    outEl.textContent = String(e.message ?? e);
  }
}

function drawCp() {
  const v = values(document.getElementById("cp-form"));
  const out = document.getElementById("cp-out");
  guard(out, () => {
    const rep = JSON.parse(explore_single_mode(v.a_na, v.a_x, v.a_z, v.a_op, v.c, 2, 161));
    const canvas = document.getElementById("cp-canvas");
    const ctx = canvas.getContext("2d");
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    const box = { x: 40, y: 10, w: canvas.width - 50, h: canvas.height - 30 };
    const { grid, extent, min_eig } = rep.region;
    const cell = { w: box.w / grid, h: box.h / grid };
    for (let row = 0; row < grid; row++) {
      for (let col = 0; col < grid; col++) {
        const m = min_eig[row * grid + col];
        const shade = m >= -1e-10 ? Math.min(1, 0.35 + m / 4) : 0;
        ctx.fillStyle = m >= -1e-10 ? `rgba(31,119,180,${shade})` : "#f3f3f3";
        ctx.fillRect(box.x + col * cell.w, box.y + box.h - (row + 1) * cell.h, cell.w + 0.5, cell.h + 0.5);
      }
    }
    const map = axes(ctx, box, [-extent, extent], [-extent, extent]);
    ctx.fillStyle = rep.is_cp ? "#2ca02c" : "#d62728";
    ctx.beginPath();
    ctx.arc(map.sx(v.a_x), map.sy(v.c), 6, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = "#222";
    ctx.fillText("a_x →", box.x + box.w - 40, box.y + box.h - 6);
    ctx.fillText("c ↑", box.x + 6, box.y + 14);

    const lines = [
      `completely positive: ${rep.is_cp}`,
      `min certificate eigenvalue: ${fmt(rep.min_eig)}`,
      `noise deficit: ${fmt(rep.noise_deficit)}`,
      `classes: ${rep.classes.join(", ") || "none"}`,
      `steady ν: ${rep.steady_nu === null ? "no unique fixed point" : fmt(rep.steady_nu)}`,
    ];
    for (const ch of rep.channels) {
      const vec = ch.re.map((re, k) => `${fmt(re)}${ch.im[k] < 0 ? "−" : "+"}${fmt(Math.abs(ch.im[k]))}i`);
      lines.push(`channel γ = ${fmt(ch.rate)}  ℓ = (${vec.join(", ")})`);
    }
    out.textContent = lines.join("\n");
  });
}

function drawTrajectory() {
  const v = values(document.getElementById("traj-form"));
  const out = document.getElementById("traj-out");
  guard(out, () => {
    const rep = JSON.parse(catalog_trajectory(v.key, v.r, v.b, v.c, v.nu1, v.nu2, v.mix, v.t_max, 401));
    const canvas = document.getElementById("traj-canvas");
    const ctx = canvas.getContext("2d");
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    const box = { x: 40, y: 10, w: canvas.width - 50, h: canvas.height - 30 };
    const series = rep.series.concat(rep.conserved.map((s) => ({ ...s, label: `${s.label} (conserved)` })));
    const map = axes(ctx, box, [0, v.t_max], range(series.map((s) => s.values)));
    series.forEach((s, k) => polyline(ctx, rep.times, s.values, map, COLORS[k % COLORS.length], k >= 6 ? 3 : 1.5));
    document.getElementById("traj-legend").innerHTML = series
      .map((s, k) => `<span style="color:${COLORS[k % COLORS.length]}">■ ${s.label}</span>`)
      .join("");
    const last = (a) => fmt(a[a.length - 1]);
    out.textContent = [
      rep.name,
      `classes: ${rep.classes.join(", ")}`,
      `completely positive: ${rep.is_cp}`,
      `propagation: ${rep.closed_form ? "closed form" : "RK4"}`,
      `⟨n⟩: ${fmt(rep.excitation[0])} → ${last(rep.excitation)}`,
      `max physicality violation: ${rep.max_violation.toExponential(1)}`,
    ].join("\n");
  });
}

function drawSweep() {
  const v = values(document.getElementById("sweep-form"));
  const out = document.getElementById("sweep-out");
  guard(out, () => {
    const rep = JSON.parse(rate_sweep(v.key, v.r, v.b, v.c, v.param, v.from, v.to, 201));
    const canvas = document.getElementById("sweep-canvas");
    const ctx = canvas.getContext("2d");
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    const box = { x: 40, y: 10, w: canvas.width - 50, h: canvas.height - 30 };
    const n = rep.eigenvalues[0].length;
    const re = [...Array(n)].map((_, j) => rep.eigenvalues.map((e) => e[j][0]));
    const im = [...Array(n)].map((_, j) => rep.eigenvalues.map((e) => e[j][1]));
    const map = axes(ctx, box, [rep.values[0], rep.values[rep.values.length - 1]], range(re.concat(im)));
    ctx.globalAlpha = 0.25;
    im.forEach((ys, j) => polyline(ctx, rep.values, ys, map, COLORS[j % COLORS.length]));
    ctx.globalAlpha = 1;
    re.forEach((ys, j) => polyline(ctx, rep.values, ys, map, COLORS[j % COLORS.length], 2));
    const slowest = rep.eigenvalues.map((e) => Math.max(...e.map((z) => z[0])));
    out.textContent = [
      `slowest rate at ${v.param} = ${fmt(rep.values[0])}: ${fmt(slowest[0])}`,
      `slowest rate at ${v.param} = ${fmt(rep.values[rep.values.length - 1])}: ${fmt(slowest[slowest.length - 1])}`,
      rep.predicted ? "closed-form rates available for this scenario" : "closed-form rates refer to the squared matrix",
    ].join("\n");
  });
}

async function main() {
  await init();
  const list = JSON.parse(scenarios());
  for (const sel of document.querySelectorAll("select[name=key]")) {
    sel.innerHTML = list.map((s) => `<option value="${s.key}">${s.name}</option>`).join("");
  }
  document.querySelector("#traj-form select[name=key]").value = "passive-shielding";
  document.querySelector("#sweep-form select[name=key]").value = "active-shielding";
  const wire = (id, fn) => {
    document.getElementById(id).addEventListener("input", fn);
    fn();
  };
  wire("cp-form", drawCp);
  wire("traj-form", drawTrajectory);
  wire("sweep-form", drawSweep);
  document.getElementById("status").textContent = "";
}

main().catch((e) => {
  document.getElementById("status").textContent = `Failed to load: ${e}`;
});
