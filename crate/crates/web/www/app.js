import init, { classify_json, sequence_decay, qcqp_single } from "./pkg/simdiag_web.js";

const $ = (id) => document.getElementById(id);

function attempt(f, out) {
  try {
    return f();
  } catch (e) {
    out.textContent = "error: " + e;
    return null;
  }
}

function showClassify() {
  const out = $("classify-out");
  const r = attempt(() => JSON.parse(classify_json($("set").value)), out);
  if (!r) return;
  const lines = r.reports.map((x) => `${x.property.padEnd(7)} ${x.verdict.padEnd(8)} ${x.rules.join(" > ")}`);
  for (const v of r.lattice_violations) lines.push("lattice violation: " + v);
  out.textContent = `${r.count} matrices of size ${r.dim}\n` + lines.join("\n");
}

function showDecay() {
  const out = $("decay-out");
  const r = attempt(() => JSON.parse(sequence_decay($("set").value, $("ks").value)), out);
  if (!r) return;
  if (r.rows.length === 0) {
    out.textContent = `${r.property}: ${r.verdict}, no sequence certificate`;
    return;
  }
  const fmt = (v) => v.toExponential(3);
  const body = r.rows
    .map((x) => `<tr><td>${fmt(x.k)}</td><td>${fmt(x.offdiag)}</td><td>${fmt(x.diag)}</td><td>${fmt(x.det_drift)}</td></tr>`)
    .join("");
  const slope = r.slope === null ? "n/a" : r.slope.toFixed(3);
  out.innerHTML =
    `<p>${r.property}: ${r.verdict} (${r.recipe}), slope ${slope}, bounded diagonal ${r.bounded_diag}</p>` +
    `<table><tr><th>k</th><th>offdiag</th><th>diag</th><th>det drift</th></tr>${body}</table>`;
}

function showQcqp() {
  const out = $("qcqp-out");
  const r = attempt(() => JSON.parse(qcqp_single($("qcqp").value)), out);
  if (!r) return;
  out.textContent = `status ${r.status}\nvalue  ${r.value}\npoint  ${r.point ? r.point.join(", ") : "none"}`;
}

await init();
$("classify").onclick = showClassify;
$("decay").onclick = showDecay;
$("solve").onclick = showQcqp;
showClassify();
