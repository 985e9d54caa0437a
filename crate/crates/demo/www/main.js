// Copyright 2026 The ptarm Authors
// SPDX-License-Identifier: Apache-2.0

import init, { build_tree, and_trees, mine_csv } from "./pkg/ptarm_demo.js";

const $ = (id) => document.getElementById(id);

function el(tag, attrs = {}, ...kids) {
  const e = document.createElement(tag);
  Object.assign(e, attrs);
  for (const k of kids) e.append(k);
  return e;
}

function nodeList(node) {
  const ul = el("ul", { className: "tree" });
  const label = node.kind === "leaf"
    ? `leaf ${node.bits}`
    : `${node.kind} ${node.count}/${node.size}`;
  const li = el("li", {},
    el("span", { className: `node ${node.kind}`, title: `bits ${node.offset}..${node.offset + node.size - 1}` }, label));
  if (node.children) for (const c of node.children) li.append(nodeList(c));
  ul.append(li);
  return ul;
}

function treeBlock(title, t) {
  return el("div", {},
    el("div", {}, `${title}: length ${t.len}, root count ${t.root_count}, ${t.node_count} nodes`),
    el("div", {}, t.bits),
    nodeList(t.root));
}

function show(target, f) {
  const out = $(target);
  out.replaceChildren();
  try {
    out.append(f());
  } catch (e) {
    out.append(el("div", { className: "error" }, String(e.message ?? e)));
  }
}

function onBuild() {
  show("tree-out", () => treeBlock("tree", JSON.parse(build_tree($("bits").value))));
}

function onAnd() {
  show("and-out", () => {
    const r = JSON.parse(and_trees($("and-a").value, $("and-b").value));
    return el("div", {},
      el("div", {}, `popcount of bitwise AND: ${r.popcount}; tree AND agrees: ${r.agrees}`),
      treeBlock("a AND b", r.and),
      treeBlock("a", r.a),
      treeBlock("b", r.b));
  });
}

function onMine() {
  show("mine-out", () => {
    const r = JSON.parse(mine_csv($("csv").value, $("minsup").value, $("minconf").value, $("decisions").value));
    const rows = r.rules.map((x) => el("tr", {},
      el("td", {}, x.antecedent.join(", ")),
      el("td", {}, "→ " + x.consequent),
      el("td", { className: "num" }, x.support.toFixed(4)),
      el("td", { className: "num" }, x.confidence.toFixed(4))));
    return el("div", {},
      el("div", {}, `${r.n_rows} rows, ${r.items.length} items; frequent itemsets by size: ${r.level_sizes.join(", ")}`),
      el("div", {}, `${r.rules.length} rules; horizontal Apriori gives the same output: ${r.apriori_agrees}`),
      el("table", {},
        el("tr", {}, el("th", {}, "antecedent"), el("th", {}, "consequent"), el("th", {}, "support"), el("th", {}, "confidence")),
        ...rows));
  });
}

await init();
$("status").textContent = "Ready.";
$("build").onclick = onBuild;
$("and").onclick = onAnd;
$("mine").onclick = onMine;
onBuild();
onAnd();
onMine();
