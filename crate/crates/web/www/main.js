// Built with: wasm-pack build crates/web --target web --out-dir www/pkg
import init, { compile_network, verify_circuit, pebble_sweep } from "./pkg/oracleforge_web.js";

const $ = (id) => document.getElementById(id);

function show(el, text, failed) {
  el.textContent = text;
  el.className = failed ? "fail" : "";
}

function verdictText(v) {
  return v.pass ? `pass (${v.cases} cases)` : `fail ${v.counterexample}`;
}

function onCompile() {
  const r = JSON.parse(compile_network($("network").value, $("strategy").value));
  if (!r.ok) return show($("cost"), r.error, true);
  const c = r.cost;
  show(
    $("cost"),
    `${r.inputs} in, ${r.outputs} out, ${r.and_count} AND, ${r.xor_count} XOR | ` +
      `T ${c.t_count}, qubits ${c.qubits}, CNOT ${c.cnots}, NOT ${c.nots} | ${verdictText(r.verify)}`,
    !r.verify.pass,
  );
  $("circuit").value = r.circuit;
}

function onVerify() {
  const r = JSON.parse(verify_circuit($("circuit").value, $("network").value));
  if (!r.ok) return show($("verdict"), r.error, true);
  show($("verdict"), verdictText(r.verify), !r.verify.pass);
}

function onSweep() {
  const low = Number($("low").value);
  const high = Number($("high").value);
  const r = JSON.parse(pebble_sweep($("network").value, low, high, Number($("cap").value)));
  $("plot").innerHTML = "";
  if (!r.ok) return show($("points"), r.error, true);
  const table = document.createElement("table");
  table.innerHTML = "<tr><th>pebbles</th><th>status</th><th>steps</th><th>ancillae</th><th>T</th></tr>";
  for (const p of r.points) {
    const row = table.insertRow();
    for (const v of [p.pebbles, p.status, p.steps ?? "", p.ancillae ?? "", p.t_count ?? ""]) {
      row.insertCell().textContent = v;
    }
  }
  $("points").replaceChildren(table);
  // the SVG comes from our own renderer, not user input
  $("plot").innerHTML = r.svg;
}

await init();
$("compile").onclick = onCompile;
$("verify").onclick = onVerify;
$("sweep").onclick = onSweep;
