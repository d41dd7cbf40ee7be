import type { InstanceDoc, JobDoc, WhatifOverrides } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(base + path, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = await resp.json();
      if (body && body.detail) detail = String(body.detail);
    } catch {
      // keep the status text
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class Client {
  constructor(public base: string = "") {}

  postInstance(body: object): Promise<{ id: string }> {
    return request(this.base, "/instances", {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  getInstance(id: string): Promise<InstanceDoc> {
    return request(this.base, `/instances/${id}`);
  }

  postSolve(body: {
    instance_id: string;
    method?: string;
    t_max?: number | null;
    alpha?: number;
    replicas?: number;
    seed?: number;
  }): Promise<{ job_id: string }> {
    return request(this.base, "/solve", {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  getJob(id: string): Promise<JobDoc> {
    return request(this.base, `/jobs/${id}`);
  }

  postWhatif(baseJobId: string, overrides: WhatifOverrides): Promise<{ job_id: string }> {
    return request(this.base, "/whatif", {
      method: "POST",
      body: JSON.stringify({ base_job_id: baseJobId, overrides }),
    });
  }
}
