// Browser wiring: builds the workbench DOM, renders the store on every
// change, and forwards user input to store actions. All data shown
// comes from store.docs; this file only moves it into elements.

import { ApiClient } from "./api.js";
import { HEAT_RAMP } from "./ramp.js";
import {
  buildScene,
  CanvasContext,
  renderScene,
  Transform,
} from "./render.js";
import { maxActiveTime, Store } from "./store.js";
import type { Overlays } from "./types.js";
import { countsPanel, pathsPanel, reportDetail } from "./viewmodel.js";

const CANVAS_SIZE = 760;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function main(): void {
  const params = new URLSearchParams(location.search);
  const base = params.get("service") ?? "http://127.0.0.1:8080";
  const scenarioId = params.get("scenario") ?? "archipelago";
  const api = new ApiClient(base, (url, init) => fetch(url, init));
  const store = new Store(api, scenarioId);

  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");

  const mapCard = el("div", "card map-card");
  const canvas = el("canvas");
  canvas.width = CANVAS_SIZE;
  canvas.height = CANVAS_SIZE;
  mapCard.append(canvas);

  const sliderRow = el("div", "row");
  const slider = el("input");
  slider.type = "range";
  slider.min = "0";
  slider.step = "60000";
  const sliderLabel = el("span", "mono");
  sliderRow.append(el("span", undefined, "time"), slider, sliderLabel);
  mapCard.append(sliderRow);

  const overlayRow = el("div", "row");
  const overlayKeys: (keyof Overlays)[] = [
    "reports",
    "sensors",
    "graph",
    "evidence_map",
    "paths",
  ];
  for (const key of overlayKeys) {
    const label = el("label");
    const box = el("input");
    box.type = "checkbox";
    box.checked = true;
    box.addEventListener("change", () => store.toggleOverlay(key));
    label.append(box, document.createTextNode(key.replace("_", " ")));
    overlayRow.append(label);
  }
  mapCard.append(overlayRow);

  const legend = el("div", "row legend");
  legend.append(el("span", undefined, "plausibility"));
  for (const color of HEAT_RAMP) {
    const swatch = el("span", "swatch");
    swatch.style.background = color;
    legend.append(swatch);
  }
  mapCard.append(legend);

  const side = el("div", "side");
  const statusCard = el("div", "card");
  const statusLine = el("div", "mono");
  const typeRow = el("div", "row");
  const typeSelect = el("select");
  typeRow.append(el("span", undefined, "assumed type"), typeSelect);
  const thresholdRow = el("div", "row");
  const threshold = el("input");
  threshold.type = "range";
  threshold.min = "0";
  threshold.max = "1";
  threshold.step = "0.05";
  threshold.value = "0";
  const thresholdLabel = el("span", "mono", "0");
  thresholdRow.append(
    el("span", undefined, "edge threshold"),
    threshold,
    thresholdLabel,
  );
  statusCard.append(statusLine, typeRow, thresholdRow);

  const pathsCard = el("div", "card");
  pathsCard.append(el("h2", undefined, "ranked paths"));
  const pathsMeta = el("div", "mono");
  const pathsList = el("div");
  pathsCard.append(pathsMeta, pathsList);

  const countsCard = el("div", "card");
  countsCard.append(el("h2", undefined, "boat count"));
  const countsList = el("div");
  countsCard.append(countsList);

  const reportsCard = el("div", "card");
  reportsCard.append(el("h2", undefined, "reports"));
  const reportsList = el("div");
  reportsCard.append(reportsList);

  const detailCard = el("div", "card");
  detailCard.append(el("h2", undefined, "detail"));
  const detailBody = el("div", "mono");
  detailCard.append(detailBody);

  const toastArea = el("div", "toasts");

  side.append(statusCard, pathsCard, countsCard, reportsCard, detailCard);
  root.append(mapCard, side, toastArea);

  slider.addEventListener("input", () => {
    store.setSlider(Number(slider.value));
  });
  threshold.addEventListener("input", () => {
    thresholdLabel.textContent = threshold.value;
    void store.setThreshold(Number(threshold.value));
  });
  typeSelect.addEventListener("change", () => {
    void store.setType(typeSelect.value || null);
  });
  canvas.addEventListener("click", (ev) => {
    const scenario = store.docs.scenario;
    if (!scenario) return;
    const rect = canvas.getBoundingClientRect();
    const cx = ((ev.clientX - rect.left) * canvas.width) / rect.width;
    const cy = ((ev.clientY - rect.top) * canvas.height) / rect.height;
    const tf = new Transform(scenario.map.bounds, canvas.width, canvas.height);
    let best: string | null = null;
    let bestDist = 12;
    for (const report of scenario.reports) {
      const dx = tf.x(report.position[0]) - cx;
      const dy = tf.y(report.position[1]) - cy;
      const d = Math.hypot(dx, dy);
      if (d < bestDist) {
        best = report.id;
        bestDist = d;
      }
    }
    if (best !== null) store.toggleSelect(best);
  });

  let typeOptionsBuilt = false;
  let sliderRangeSet = false;

  function fmtMinutes(ms: number): string {
    return `${Math.round(ms / 6000) / 10} min`;
  }

  function render(): void {
    const { scenario, graph, paths, counts } = store.docs;

    if (scenario && !typeOptionsBuilt) {
      typeOptionsBuilt = true;
      const none = el("option", undefined, "(scenario default)");
      none.value = "";
      typeSelect.append(none);
      for (const t of scenario.types) {
        const opt = el("option", undefined, `${t.id} (${t.name})`);
        opt.value = t.id;
        typeSelect.append(opt);
      }
    }
    if (scenario && !sliderRangeSet) {
      sliderRangeSet = true;
      const top = Math.max(
        maxActiveTime(scenario),
        ...scenario.reports.map((r) => r.time),
      );
      slider.max = String(top);
      slider.value = String(store.state.tSlider);
    }

    statusLine.textContent =
      `scenario ${store.state.scenarioId}` +
      ` | token ${store.state.token ?? "-"}` +
      ` | graph ${graph ? graph.edges.length + " edges" : "-"}`;
    sliderLabel.textContent = fmtMinutes(store.state.tSlider);

    const ctx2d = canvas.getContext("2d");
    if (ctx2d) {
      const scene = buildScene(
        store.docs,
        {
          overlays: store.state.overlays,
          selectedReports: store.state.selectedReports,
          graphThreshold: store.state.graphThreshold,
          hoveredChain: store.state.hoveredChain,
        },
        canvas.width,
        canvas.height,
      );
      renderScene(new CanvasContext(ctx2d), scene);
    }

    pathsList.textContent = "";
    pathsMeta.textContent = "";
    if (paths) {
      const model = pathsPanel(paths);
      pathsMeta.textContent =
        `conflict k = ${model.conflictText}` +
        ` | boats ${model.nSubs}` +
        (model.approximate ? " | approximate" : "");
      for (const row of model.rows) {
        const rowEl = el("div", "path-row");
        rowEl.addEventListener("mouseenter", () =>
          store.setHoveredChain(row.chain),
        );
        rowEl.addEventListener("mouseleave", () =>
          store.setHoveredChain(null),
        );
        const head = el("div");
        head.append(
          el("span", "rank", `#${row.rank}`),
          el("span", "chain", row.label),
        );
        const bar = el("div", "bar");
        const pl = el("div", "bar-pl");
        pl.style.width = `${row.plausibility * 100}%`;
        const sup = el("div", "bar-sup");
        sup.style.width = `${row.support * 100}%`;
        bar.append(pl, sup);
        const nums = el(
          "div",
          "mono interval",
          `[${row.supportText}, ${row.plausibilityText}]`,
        );
        rowEl.append(head, bar, nums);
        pathsList.append(rowEl);
      }
    }

    countsList.textContent = "";
    if (counts) {
      for (const row of countsPanel(counts)) {
        const rowEl = el("div", "path-row");
        rowEl.append(
          el("span", "rank", `${row.count}`),
          el(
            "span",
            "mono interval",
            `[${row.supportText}, ${row.plausibilityText}]`,
          ),
        );
        countsList.append(rowEl);
      }
    }

    reportsList.textContent = "";
    if (scenario) {
      for (const report of scenario.reports) {
        const rowEl = el("div", "report-row");
        const name = el("span", "mono", report.id);
        if (report.flagged_false) name.classList.add("flagged");
        const flagBtn = el(
          "button",
          undefined,
          report.flagged_false ? "unflag" : "flag false",
        );
        flagBtn.addEventListener("click", () => {
          void store.toggleFlag(report.id);
        });
        rowEl.append(
          name,
          el("span", "mono", `t=${fmtMinutes(report.time)}`),
          el("span", "mono", `p=${report.trust_p}`),
          flagBtn,
        );
        reportsList.append(rowEl);
      }
    }

    detailBody.textContent = "";
    if (scenario) {
      for (const id of store.state.selectedReports) {
        const report = scenario.reports.find((r) => r.id === id);
        if (!report) continue;
        for (const [key, value] of reportDetail(report)) {
          detailBody.append(el("div", undefined, `${key}: ${value}`));
        }
        detailBody.append(el("hr"));
      }
    }

    toastArea.textContent = "";
    store.toasts.forEach((toast, i) => {
      const node = el(
        "div",
        "toast",
        `${toast.status ?? "error"}: ${toast.message}`,
      );
      const close = el("button", undefined, "x");
      close.addEventListener("click", () => store.dismissToast(i));
      node.append(close);
      toastArea.append(node);
    });
  }

  store.subscribe(render);
  render();
  void store.load();
}

main();
