// App shell: generate or upload an instance, launch solves, inspect the
// solution, and fan out what-if scenarios against the base job.

import { Client } from "./api.js";
import { RouteCanvas } from "./canvas.js";
import { pollJob } from "./poll.js";
import type { InstanceDoc, JobDoc, WhatifOverrides } from "./types.js";
import { buildScenarioView, compareScenarios, ScenarioView } from "./views.js";

const client = new Client("");

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

let instanceId: string | null = null;
let instanceDoc: InstanceDoc | null = null;
let baseJob: JobDoc | null = null;
let baseView: ScenarioView | null = null;
let canvas: RouteCanvas;

function money(x: number): string {
  return x.toFixed(2);
}

function setStatus(text: string) {
  $("status").textContent = text;
}

function renderView(view: ScenarioView) {
  if (view.status !== "ready" || !view.summary) {
    setStatus(view.status === "failed" ? `job failed: ${view.error}` : "running...");
    return;
  }
  setStatus(`job ${view.jobId} done in ${view.summary.wallTimeS.toFixed(2)}s`);
  $("summary").innerHTML = `
    <b>${view.summary.customers}</b> customers |
    method <b>${view.summary.method}</b> |
    alpha <b>${view.summary.alpha}</b> |
    objective <b>${money(view.summary.objective)}</b> |
    routes <b>${view.summary.routeCount}</b> |
    on-time <b>${view.meanOnTimeRate === null ? "n/a" : view.meanOnTimeRate.toFixed(2)}</b>`;

  const legendRows = view.legend
    .map((e) => `<tr><td><span class="dot" style="background:#999"></span>${e.label}</td>
                 <td class="num">${money(e.amount)}</td></tr>`)
    .join("");
  $("legend").innerHTML = `<table>${legendRows}
    <tr class="total"><td>total</td><td class="num">${money(view.serverTotal ?? 0)}</td></tr>
    </table>`;

  const routeRows = view.polylines
    .map((p) => `<tr><td><span class="dot" style="background:${p.color}"></span>#${p.routeId}</td>
      <td>${p.customers.join(" → ")}</td>
      <td class="num">${money(p.cost)}</td>
      <td class="num">${p.travelTime.toFixed(1)}</td>
      <td class="num">${p.overtime.toFixed(1)}</td></tr>`)
    .join("");
  $("routes").innerHTML = `<table><tr><th>route</th><th>sequence</th>
    <th>cost</th><th>travel</th><th>overtime</th></tr>${routeRows}</table>`;

  const schedRows = view.scheduleRows
    .map((r) => `<tr><td>${r.customer}</td><td>#${r.routeId}</td>
      <td class="num">${r.appointment.toFixed(1)}</td>
      <td class="num">${r.onTimeRate === null ? "n/a" : r.onTimeRate.toFixed(2)}</td></tr>`)
    .join("");
  $("schedule").innerHTML = `<table><tr><th>customer</th><th>route</th>
    <th>appointment (min)</th><th>route on-time</th></tr>${schedRows}</table>`;

  if (instanceDoc) canvas.show(instanceDoc, view.polylines);
}

function renderComparison(scenarioView: ScenarioView, label: string) {
  if (!baseView) return;
  const cmp = compareScenarios(baseView, scenarioView);
  const fmt = (x: number) => (x >= 0 ? "+" : "") + money(x);
  const costRows = Object.entries(cmp.costDeltas)
    .map(([k, v]) => `<tr><td>${k}</td><td class="num">${fmt(v)}</td></tr>`)
    .join("");
  $("whatif-result").innerHTML = `
    <h3>${label} vs base ${cmp.isNoop ? "(no change)" : ""}</h3>
    <table>
      <tr><td>objective</td><td class="num">${fmt(cmp.objectiveDelta)}</td></tr>
      <tr><td>routes</td><td class="num">${cmp.routeCountDelta}</td></tr>
      <tr><td>on-time rate</td><td class="num">${
        cmp.onTimeRateDelta === null ? "n/a" : fmt(cmp.onTimeRateDelta)}</td></tr>
      ${costRows}
      <tr class="total"><td>simulated total</td><td class="num">${fmt(cmp.totalDelta)}</td></tr>
    </table>
    <p>${cmp.appointmentDeltas.length} shared appointments, ${
      cmp.appointmentsNeverDecreased ? "none earlier than base" : "some moved earlier"}</p>`;
}

async function refreshInstance(id: string) {
  instanceId = id;
  instanceDoc = await client.getInstance(id);
  setStatus(`instance ${id}: n=${instanceDoc.n}`);
}

async function launchSolve(): Promise<void> {
  if (!instanceId) {
    setStatus("generate or upload an instance first");
    return;
  }
  const body = {
    instance_id: instanceId,
    method: ($("method") as HTMLSelectElement).value,
    alpha: Number(($("alpha") as HTMLInputElement).value),
    t_max: numberOrNull(($("tmax") as HTMLInputElement).value),
    replicas: Number(($("replicas") as HTMLInputElement).value),
    seed: Number(($("seed") as HTMLInputElement).value),
  };
  const { job_id } = await client.postSolve(body);
  setStatus(`job ${job_id} queued`);
  const outcome = await pollJob((id) => client.getJob(id), job_id, {
    onUpdate: (job) => renderView(buildScenarioView(job, instanceDoc ?? undefined)),
  });
  if (outcome.ok) {
    baseJob = outcome.job;
    baseView = buildScenarioView(outcome.job, instanceDoc ?? undefined);
    renderView(baseView);
  }
}

function numberOrNull(s: string): number | null {
  return s.trim() === "" ? null : Number(s);
}

async function launchWhatif(): Promise<void> {
  if (!baseJob) {
    setStatus("run a base solve first");
    return;
  }
  const overrides: WhatifOverrides = {};
  const cf = ($("wi-cf") as HTMLInputElement).value;
  const ct = ($("wi-ct") as HTMLInputElement).value;
  const co = ($("wi-co") as HTMLInputElement).value;
  const alpha = ($("wi-alpha") as HTMLInputElement).value;
  const subset = ($("wi-subset") as HTMLInputElement).value;
  if (cf) overrides.cf = Number(cf);
  if (ct) overrides.ct = Number(ct);
  if (co) overrides.co = Number(co);
  if (alpha) overrides.alpha = Number(alpha);
  if (subset.trim()) {
    overrides.customer_subset = subset.split(",").map((s) => Number(s.trim()));
  }
  const { job_id } = await client.postWhatif(baseJob.id, overrides);
  const label = Object.keys(overrides).length
    ? JSON.stringify(overrides)
    : "no-op scenario";
  setStatus(`what-if ${job_id} queued`);
  const outcome = await pollJob((id) => client.getJob(id), job_id);
  if (!outcome.ok) {
    setStatus(`what-if ${job_id}: ${outcome.reason}`);
    return;
  }
  const scenarioInstance = await client.getInstance(outcome.job.instance_id);
  const view = buildScenarioView(outcome.job, scenarioInstance);
  renderComparison(view, label);
  setStatus(`what-if ${job_id} done`);
}

export function start() {
  canvas = new RouteCanvas($("map") as unknown as HTMLCanvasElement);
  $("btn-generate").onclick = async () => {
    const n = Number(($("gen-n") as HTMLInputElement).value);
    const seed = Number(($("gen-seed") as HTMLInputElement).value);
    const { id } = await client.postInstance({ n, seed });
    await refreshInstance(id);
  };
  $("btn-upload").onclick = async () => {
    const text = ($("upload-json") as HTMLTextAreaElement).value;
    const { id } = await client.postInstance(JSON.parse(text));
    await refreshInstance(id);
  };
  $("btn-solve").onclick = () => void launchSolve();
  $("btn-whatif").onclick = () => void launchWhatif();
}

if (typeof document !== "undefined" && document.getElementById("map")) {
  start();
}
