import type { JobDoc } from "./types.js";

export interface PollOptions {
  intervalMs?: number;
  timeoutMs?: number;
  onUpdate?: (job: JobDoc) => void;
  // injectable for tests
  sleep?: (ms: number) => Promise<void>;
  now?: () => number;
}

export type PollOutcome =
  | { ok: true; job: JobDoc }
  | { ok: false; reason: "failed" | "timeout"; job?: JobDoc };

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

/** Poll a job until it settles (done/failed) or the timeout elapses. */
export async function pollJob(
  fetchJob: (id: string) => Promise<JobDoc>,
  jobId: string,
  opts: PollOptions = {},
): Promise<PollOutcome> {
  const interval = opts.intervalMs ?? 500;
  const timeout = opts.timeoutMs ?? 300_000;
  const sleep = opts.sleep ?? defaultSleep;
  const now = opts.now ?? Date.now;
  const deadline = now() + timeout;
  for (;;) {
    const job = await fetchJob(jobId);
    opts.onUpdate?.(job);
    if (job.status === "done") return { ok: true, job };
    if (job.status === "failed") return { ok: false, reason: "failed", job };
    if (now() >= deadline) return { ok: false, reason: "timeout", job };
    await sleep(interval);
  }
}

/** Track several pending what-if jobs at once; resolves when all settle. */
export async function pollMany(
  fetchJob: (id: string) => Promise<JobDoc>,
  jobIds: string[],
  opts: PollOptions = {},
): Promise<Map<string, PollOutcome>> {
  const entries = await Promise.all(
    jobIds.map(async (id) => [id, await pollJob(fetchJob, id, opts)] as const),
  );
  return new Map(entries);
}
