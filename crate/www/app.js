import init, { pdf_grid, copula_tail_grid, tail_summary, taildep_json } from "./pkg/skewell_wasm.js";

const N = 96;

const el = (id) => document.getElementById(id);
const state = () => ({
  family: el("family").value,
  nu: parseFloat(el("nu").value),
  rho: parseFloat(el("rho").value),
  d1: parseFloat(el("d1").value),
  d2: parseFloat(el("d2").value),
  eta: parseFloat(el("eta").value),
  orientation: el("orientation").value,
});

function modelString(s) {
  if (s.family === "mixture") return `mixture(rho=${s.rho},eta=${s.eta})`;
  if (s.family === "skew-normal") return `skew-normal(rho=${s.rho},delta=[${s.d1},${s.d2}])`;
  return `skew-t(nu=${s.nu},rho=${s.rho},delta=[${s.d1},${s.d2}])`;
}

// compact viridis-like ramp
const STOPS = [
  [0.0, 68, 1, 84], [0.25, 59, 82, 139], [0.5, 33, 145, 140],
  [0.75, 94, 201, 98], [1.0, 253, 231, 37],
];
function color(t) {
  t = Math.min(1, Math.max(0, t));
  for (let k = 1; k < STOPS.length; k++) {
    if (t <= STOPS[k][0]) {
      const [t0, r0, g0, b0] = STOPS[k - 1];
      const [t1, r1, g1, b1] = STOPS[k];
      const u = (t - t0) / (t1 - t0);
      return [r0 + u * (r1 - r0), g0 + u * (g1 - g0), b0 + u * (b1 - b0)];
    }
  }
  return [253, 231, 37];
}

function drawHeatmap(canvas, values, logShade) {
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(N, N);
  let shade = values;
  if (logShade) shade = values.map((v) => Math.log(Math.max(v, 1e-300)));
  let lo = Infinity, hi = -Infinity;
  for (const v of shade) {
    if (Number.isFinite(v)) { lo = Math.min(lo, v); hi = Math.max(hi, v); }
  }
  if (logShade) lo = Math.max(lo, hi - 12); // clamp 12 nats of range
  for (let i = 0; i < N; i++) {
    for (let j = 0; j < N; j++) {
      // grid is row-major in (w1, w2); draw w1 right, w2 up
      const v = shade[i * N + j];
      const t = (v - lo) / (hi - lo || 1);
      const [r, g, b] = color(t);
      const px = 4 * ((N - 1 - j) * N + i);
      img.data[px] = r; img.data[px + 1] = g; img.data[px + 2] = b; img.data[px + 3] = 255;
    }
  }
  ctx.putImageData(img, 0, 0);
}

const fmt = (x, digits = 4) =>
  x === null || x === undefined ? "—" : Number(x).toPrecision(digits);

function refresh() {
  const s = state();
  el("nuC").hidden = s.family !== "skew-t";
  el("d1C").hidden = s.family === "mixture";
  el("d2C").hidden = s.family === "mixture";
  el("etaC").hidden = s.family !== "mixture";
  el("error").textContent = "";
  const model = modelString(s);
  try {
    drawHeatmap(el("pdf"), pdf_grid(model, -4, 4, N), false);
    drawHeatmap(el("copula"), copula_tail_grid(model, s.orientation, N), true);
    const info = JSON.parse(tail_summary(model, s.orientation));
    el("regime").textContent = info.regime;
    el("kappa").textContent = fmt(info.kappa, 6);
    el("gamma").textContent = info.gamma === null ? "—" : fmt(info.gamma, 6);
    el("a2").textContent = fmt(info.a[1], 6);
    el("theta").textContent = info.theta.length
      ? `(${fmt(info.theta[0])}, ${fmt(info.theta[1])})`
      : "—";
    el("lam11").textContent = fmt(info.lambda_11, 6);
    if (s.family === "skew-t") {
      const td = JSON.parse(taildep_json(s.nu, s.rho, s.d1, s.d2));
      el("bu").textContent = fmt(td.b_upper, 6);
      el("bl").textContent = fmt(td.b_lower, 6);
    } else {
      el("bu").textContent = "—";
      el("bl").textContent = "—";
    }
  } catch (e) {
    el("error").textContent = String(e);
  }
}

for (const id of ["family", "nu", "rho", "d1", "d2", "eta", "orientation"]) {
  el(id).addEventListener("input", () => {
    for (const o of ["nu", "rho", "d1", "d2", "eta"]) {
      el(o + "O").textContent = el(o).value;
    }
    refresh();
  });
}

init().then(refresh);
