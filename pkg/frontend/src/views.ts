// Pure view builders: server JSON in, renderable structures out. All numbers
// come from the service; nothing is re-optimized or re-simulated here.

import type {
  CostBreakdownDoc,
  InstanceDoc,
  JobDoc,
  ResultDoc,
} from "./types.js";

export const ROUTE_COLORS = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

export interface RoutePolyline {
  routeId: number;
  color: string;
  points: [number, number][]; // depot, customers in visit order, depot
  cost: number;
  travelTime: number;
  overtime: number;
  customers: number[];
}

export interface LegendEntry {
  label: keyof Omit<CostBreakdownDoc, "total">;
  amount: number;
}

export interface ScheduleRow {
  customer: number;
  routeId: number;
  appointment: number;
  onTimeRate: number | null;
}

export interface ScenarioView {
  jobId: string;
  status: "loading" | "failed" | "ready";
  error?: string;
  summary?: {
    customers: number;
    method: string;
    alpha: number;
    objective: number;
    routeCount: number;
    wallTimeS: number;
  };
  polylines: RoutePolyline[];
  legend: LegendEntry[];
  renderedTotal: number | null; // sum of legend amounts; must match the server
  serverTotal: number | null;
  scheduleRows: ScheduleRow[];
  meanOnTimeRate: number | null;
}

const COST_PARTS: LegendEntry["label"][] = [
  "hiring", "travel", "overtime", "earliness", "delay",
];

export function buildScenarioView(job: JobDoc, instance?: InstanceDoc): ScenarioView {
  if (job.status === "failed") {
    return {
      jobId: job.id, status: "failed", error: job.error ?? "job failed",
      polylines: [], legend: [], renderedTotal: null, serverTotal: null,
      scheduleRows: [], meanOnTimeRate: null,
    };
  }
  if (job.status !== "done" || !job.result) {
    // spinner state: nothing stale to show
    return {
      jobId: job.id, status: "loading", polylines: [], legend: [],
      renderedTotal: null, serverTotal: null, scheduleRows: [],
      meanOnTimeRate: null,
    };
  }
  const result = job.result;
  const polylines = instance ? buildPolylines(result, instance) : [];
  const legend = COST_PARTS.map((label) => ({
    label,
    amount: result.cost_breakdown[label],
  }));
  const renderedTotal = legend.reduce((acc, e) => acc + e.amount, 0);
  const scheduleRows = buildScheduleRows(result);
  const rates = result.schedules
    .map((s) => s.on_time_rate)
    .filter((r): r is number => r !== null);
  return {
    jobId: job.id,
    status: "ready",
    summary: {
      customers: instance ? instance.n : result.solution.routes
        .reduce((acc, r) => acc + r.customers.length, 0),
      method: result.solution.method,
      alpha: job.config.alpha,
      objective: result.solution.objective,
      routeCount: result.solution.routes.length,
      wallTimeS: result.solution.wall_time_s,
    },
    polylines,
    legend,
    renderedTotal,
    serverTotal: result.cost_breakdown.total,
    scheduleRows,
    meanOnTimeRate: rates.length
      ? rates.reduce((a, b) => a + b, 0) / rates.length
      : null,
  };
}

export function buildPolylines(result: ResultDoc, instance: InstanceDoc): RoutePolyline[] {
  return result.solution.routes.map((route, k) => {
    const points: [number, number][] = [instance.coords[0]];
    for (const c of route.customers) points.push(instance.coords[c]);
    points.push(instance.coords[0]);
    return {
      routeId: k,
      color: ROUTE_COLORS[k % ROUTE_COLORS.length],
      points,
      cost: route.cost,
      travelTime: route.travel_time,
      overtime: route.overtime,
      customers: route.customers,
    };
  });
}

export function buildScheduleRows(result: ResultDoc): ScheduleRow[] {
  const rows: ScheduleRow[] = [];
  for (const sched of result.schedules) {
    for (const entry of sched.appointments) {
      rows.push({
        customer: entry.customer,
        routeId: sched.route_id,
        appointment: entry.w,
        onTimeRate: sched.on_time_rate,
      });
    }
  }
  rows.sort((a, b) => a.appointment - b.appointment || a.customer - b.customer);
  return rows;
}

// -- scenario comparison ---------------------------------------------------------

export interface AppointmentDelta {
  customer: number;
  base: number;
  scenario: number;
  delta: number;
}

export interface Comparison {
  objectiveDelta: number;
  routeCountDelta: number;
  onTimeRateDelta: number | null;
  costDeltas: Record<string, number>;
  totalDelta: number;
  appointmentDeltas: AppointmentDelta[];
  /** true when no shared customer's appointment moved earlier */
  appointmentsNeverDecreased: boolean;
  isNoop: boolean;
}

const EPS = 1e-9;

export function compareScenarios(base: ScenarioView, scenario: ScenarioView): Comparison {
  if (base.status !== "ready" || scenario.status !== "ready") {
    throw new Error("both scenarios must be ready to compare");
  }
  const baseAppointments = new Map(
    base.scheduleRows.map((r) => [r.customer, r.appointment]),
  );
  const appointmentDeltas: AppointmentDelta[] = [];
  for (const row of scenario.scheduleRows) {
    const before = baseAppointments.get(row.customer);
    if (before === undefined) continue;
    appointmentDeltas.push({
      customer: row.customer,
      base: before,
      scenario: row.appointment,
      delta: row.appointment - before,
    });
  }
  const costDeltas: Record<string, number> = {};
  for (const entry of scenario.legend) {
    const baseAmount = base.legend.find((e) => e.label === entry.label)?.amount ?? 0;
    costDeltas[entry.label] = entry.amount - baseAmount;
  }
  const totalDelta = (scenario.serverTotal ?? 0) - (base.serverTotal ?? 0);
  const objectiveDelta =
    (scenario.summary?.objective ?? 0) - (base.summary?.objective ?? 0);
  const routeCountDelta =
    (scenario.summary?.routeCount ?? 0) - (base.summary?.routeCount ?? 0);
  const onTimeRateDelta =
    scenario.meanOnTimeRate !== null && base.meanOnTimeRate !== null
      ? scenario.meanOnTimeRate - base.meanOnTimeRate
      : null;
  const isNoop =
    Math.abs(objectiveDelta) <= EPS &&
    routeCountDelta === 0 &&
    Math.abs(totalDelta) <= EPS &&
    appointmentDeltas.every((d) => Math.abs(d.delta) <= EPS) &&
    Object.values(costDeltas).every((d) => Math.abs(d) <= EPS);
  return {
    objectiveDelta,
    routeCountDelta,
    onTimeRateDelta,
    costDeltas,
    totalDelta,
    appointmentDeltas,
    appointmentsNeverDecreased: appointmentDeltas.every((d) => d.delta >= -EPS),
    isNoop,
  };
}
