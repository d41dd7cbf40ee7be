// Wire types mirroring the server's JSON documents. The dashboard never
// recomputes optimization results; it renders these payloads as-is.

export interface InstanceDoc {
  schema_version?: number;
  n: number;
  coords: [number, number][];
  travel_mean: number[][];
  service_mean: number[];
  cancel_prob: number[];
  L: number;
  costs: { cf: number; ct: number; co: number; ce: number; cd: number };
}

export interface RouteDoc {
  customers: number[];
  cost: number;
  travel_time: number;
  overtime: number;
}

export interface SolutionDoc {
  routes: RouteDoc[];
  objective: number;
  lower_bound: number | null;
  gap_percent: number | null;
  method: string;
  wall_time_s: number;
}

export interface CostBreakdownDoc {
  hiring: number;
  travel: number;
  overtime: number;
  earliness: number;
  delay: number;
  total: number;
}

export interface AppointmentDoc {
  customer: number;
  w: number;
}

export interface ScheduleDoc {
  route_id: number;
  appointments: AppointmentDoc[];
  on_time_rate: number | null;
  cost_breakdown: CostBreakdownDoc | null;
}

export interface ResultDoc {
  schema_version: number;
  job_id: string;
  solution: SolutionDoc;
  schedules: ScheduleDoc[];
  cost_breakdown: CostBreakdownDoc;
}

export type JobStatus = "queued" | "running" | "done" | "failed";

export interface JobConfig {
  method: string;
  t_max: number | null;
  alpha: number;
  replicas: number;
  seed: number;
}

export interface JobDoc {
  schema_version: number;
  id: string;
  instance_id: string;
  config: JobConfig;
  base_job: string | null;
  status: JobStatus;
  error?: string;
  result?: ResultDoc;
}

export interface WhatifOverrides {
  cf?: number;
  ct?: number;
  co?: number;
  alpha?: number;
  t_max?: number | null;
  customer_subset?: number[];
}
