import init, { hnf, diagPattern, gcdDistribution } from "./pkg/hermite_density_wasm.js";

const $ = (id) => document.getElementById(id);

function show(id, fn) {
  const out = $(id);
  out.classList.remove("error");
  try {
    fn(out);
  } catch (e) {
    out.classList.add("error");
    out.textContent = String(e.message ?? e);
  }
}

function matrixText(rows) {
  const width = Math.max(...rows.flat().map((x) => x.length), 1);
  return rows.map((r) => r.map((x) => x.padStart(width)).join(" ")).join("\n");
}

function runHnf() {
  show("hnf-out", (out) => {
    const r = JSON.parse(hnf($("hnf-input").value));
    out.textContent =
      `H\n${matrixText(r.h)}\n\nU\n${matrixText(r.u)}\n\n` +
      `rank ${r.rank}, pivots ${r.pivots.join(", ")}`;
  });
}

function runDiag() {
  show("diag-out", (out) => {
    const num = (id) => Number($(id).value);
    const r = JSON.parse(
      diagPattern(num("diag-n"), num("diag-m"), $("diag-pattern").value,
        BigInt(num("diag-samples")), BigInt(num("diag-bound")), BigInt(num("diag-seed"))),
    );
    const lines = [`predicted  ${r.predicted ?? "not covered by the closed form"}`];
    if (r.experiment) {
      const e = r.experiment;
      lines.push(`empirical  ${e.empirical}  (${e.hits} / ${e.samples}, stderr ${e.stderr})`);
    }
    out.textContent = lines.join("\n");
  });
}

function drawChart(rows) {
  const canvas = $("dist-chart");
  const ctx = canvas.getContext("2d");
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  const top = Math.max(...rows.map((r) => Math.max(r.d_n, r.d_limit)));
  const slot = (width - 20) / rows.length;
  const bar = Math.max(slot / 2 - 1, 1);
  const y = (v) => height - 20 - (v / top) * (height - 30);
  rows.forEach((r, i) => {
    const x = 10 + i * slot;
    ctx.fillStyle = "#4a78b5";
    ctx.fillRect(x, y(r.d_n), bar, height - 20 - y(r.d_n));
    ctx.fillStyle = "#d08a2c";
    ctx.fillRect(x + bar, y(r.d_limit), bar, height - 20 - y(r.d_limit));
    if (rows.length <= 40 || i % 5 === 0) {
      ctx.fillStyle = "#222";
      ctx.fillText(String(r.g), x, height - 6);
    }
  });
  ctx.fillStyle = "#4a78b5";
  ctx.fillText("D_n(g)", width - 120, 14);
  ctx.fillStyle = "#d08a2c";
  ctx.fillText("D(g)", width - 60, 14);
}

function runDist() {
  show("dist-out", (out) => {
    const r = JSON.parse(gcdDistribution(Number($("dist-n").value), BigInt($("dist-gmax").value)));
    drawChart(r.rows);
    const head = "<tr><th>g</th><th>f_n(g)</th><th>D_n(g)</th><th>f(g)</th><th>D(g)</th></tr>";
    const body = r.rows
      .map((x) => `<tr><td>${x.g}</td><td>${x.f_n}</td><td>${x.d_n}</td><td>${x.f}</td><td>${x.d_limit}</td></tr>`)
      .join("");
    out.innerHTML = `<table>${head}${body}</table>`;
  });
}

await init();
$("hnf-run").onclick = runHnf;
$("diag-run").onclick = runDiag;
$("dist-run").onclick = runDist;
runHnf();
runDiag();
runDist();
