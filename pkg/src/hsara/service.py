"""HTTP service: instances, solve jobs, schedules, what-if re-solves.

Artifacts are append-only JSON documents on disk keyed by id. Jobs run in
separate OS processes drawn from a bounded FIFO pool, so a stuck solve can be
killed at twice its time budget without touching the server process.
"""

from __future__ import annotations

import json
import multiprocessing
import threading
import time
import traceback
import uuid
from collections import deque
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from . import colgen, scheduler, stochastics
from .instance import (CostParams, GeneratorParams, Instance, InstanceError,
                       generate_instance, instance_from_dict, instance_to_dict)

SCHEMA_VERSION = 1
KILL_GRACE_FLOOR_S = 60.0


def _atomic_write(path: Path, doc: dict):
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(doc))
    tmp.replace(path)


class Store:
    """Append-only JSON documents under data_dir/{instances,jobs,results}."""

    def __init__(self, data_dir):
        self.root = Path(data_dir)
        for sub in ("instances", "jobs", "results"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)

    @staticmethod
    def new_id() -> str:
        return uuid.uuid4().hex[:12]

    def path(self, kind: str, doc_id: str) -> Path:
        return self.root / kind / f"{doc_id}.json"

    def write(self, kind: str, doc_id: str, doc: dict):
        _atomic_write(self.path(kind, doc_id), doc)

    def read(self, kind: str, doc_id: str) -> dict | None:
        p = self.path(kind, doc_id)
        if not p.exists():
            return None
        return json.loads(p.read_text())


def run_job(data_root: str, job_id: str):
    """Executed inside the worker process; writes the result and final status."""
    store = Store(data_root)
    job = store.read("jobs", job_id)
    try:
        instance = instance_from_dict(store.read("instances", job["instance_id"]))
        cfg = job["config"]
        t_max = cfg["t_max"] if cfg["t_max"] is not None else float("inf")
        col_cfg = colgen.ColGenConfig(method=cfg["method"], t_max=t_max)
        solution = colgen.run_colgen(instance, col_cfg)
        model = stochastics.calibrate(instance)
        sched_cfg = scheduler.ScheduleConfig(
            alpha=cfg["alpha"], replicas=cfg["replicas"], seed=cfg["seed"]
        )
        schedules = scheduler.schedule_solution(instance, model, solution, sched_cfg)
        breakdown = scheduler.evaluate_costs(
            instance, model, solution, schedules,
            eval_replicas=cfg["replicas"], seed=cfg["seed"],
        )
        result = {
            "schema_version": SCHEMA_VERSION,
            "job_id": job_id,
            "solution": solution.to_dict(),
            "schedules": [s.to_dict(i) for i, s in enumerate(schedules)],
            "cost_breakdown": breakdown.to_dict(),
        }
        store.write("results", job_id, result)
        job["status"] = "done"
        job["finished_at"] = time.time()
        store.write("jobs", job_id, job)
    except Exception:
        job["status"] = "failed"
        job["error"] = traceback.format_exc(limit=4)
        job["finished_at"] = time.time()
        store.write("jobs", job_id, job)


class JobManager:
    """Bounded FIFO worker pool over OS processes, with a hard wall-clock kill."""

    def __init__(self, store: Store, pool_size: int = 2):
        self.store = store
        self.pool_size = pool_size
        self.queue = deque()
        self.active = {}
        self.cond = threading.Condition()
        self._dispatcher = threading.Thread(target=self._dispatch_loop, daemon=True)
        self._dispatcher.start()

    def submit(self, job_id: str):
        with self.cond:
            self.queue.append(job_id)
            self.cond.notify_all()

    def _dispatch_loop(self):
        while True:
            with self.cond:
                while not self.queue or len(self.active) >= self.pool_size:
                    self.cond.wait()
                job_id = self.queue.popleft()
                self.active[job_id] = None
            self._start(job_id)

    def _start(self, job_id: str):
        job = self.store.read("jobs", job_id)
        job["status"] = "running"
        job["started_at"] = time.time()
        self.store.write("jobs", job_id, job)
        proc = multiprocessing.Process(
            target=run_job, args=(str(self.store.root), job_id), daemon=True
        )
        proc.start()
        with self.cond:
            self.active[job_id] = proc
        t_max = job["config"]["t_max"]
        kill_after = None
        if t_max is not None and t_max > 0:
            kill_after = max(2.0 * t_max, KILL_GRACE_FLOOR_S)
        threading.Thread(
            target=self._watch, args=(job_id, proc, kill_after), daemon=True
        ).start()

    def _watch(self, job_id: str, proc, kill_after):
        proc.join(kill_after)
        if proc.is_alive():
            proc.terminate()
            proc.join()
            job = self.store.read("jobs", job_id)
            job["status"] = "failed"
            job["error"] = f"killed at the wall-clock limit (2*t_max = {kill_after:.0f}s)"
            job["finished_at"] = time.time()
            self.store.write("jobs", job_id, job)
        with self.cond:
            self.active.pop(job_id, None)
            self.cond.notify_all()


def _parse_instance_body(body: dict) -> Instance:
    if "coords" in body:
        return instance_from_dict(body)
    if "n" not in body:
        raise InstanceError("expected an instance document or generator parameters")
    params = GeneratorParams()
    overrides = {}
    for key in ("square_edge_km", "speed_km_per_min", "horizon_L", "cancel_prob"):
        if key in body:
            overrides[key] = float(body[key])
    if "costs" in body:
        overrides["costs"] = CostParams(**{
            k: float(v) for k, v in body["costs"].items()
        })
    if overrides:
        import dataclasses
        params = dataclasses.replace(params, **overrides)
    return generate_instance(int(body["n"]), int(body.get("seed", 0)), params)


def _job_doc(store, instance_id, method, t_max, alpha, replicas, seed,
             base_job=None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "id": store.new_id(),
        "instance_id": instance_id,
        "config": {
            "method": method,
            "t_max": t_max,
            "alpha": alpha,
            "replicas": replicas,
            "seed": seed,
        },
        "base_job": base_job,
        "status": "queued",
        "created_at": time.time(),
    }


def create_app(data_dir, pool_size: int = 2, static_dir=None) -> FastAPI:
    store = Store(data_dir)
    manager = JobManager(store, pool_size=pool_size)
    app = FastAPI(title="home service routing and scheduling")
    app.state.store = store
    app.state.manager = manager
    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")

    def _get_or_404(kind, doc_id):
        doc = store.read(kind, doc_id)
        if doc is None:
            raise HTTPException(status_code=404, detail=f"unknown {kind[:-1]} {doc_id}")
        return doc

    def _validated_config(body):
        method = body.get("method", "em")
        if method not in colgen.METHODS:
            raise HTTPException(422, f"method must be one of {colgen.METHODS}")
        t_max = body.get("t_max")
        if t_max is not None:
            t_max = float(t_max)
            if t_max < 0:
                raise HTTPException(422, "t_max must be >= 0")
        alpha = float(body.get("alpha", 0.5))
        replicas = int(body.get("replicas", 100))
        seed = int(body.get("seed", 0))
        if not 0 <= alpha <= 1:
            raise HTTPException(422, "alpha must lie in [0, 1]")
        if replicas < 1:
            raise HTTPException(422, "replicas must be >= 1")
        if seed < 0:
            raise HTTPException(422, "seed must be >= 0")
        return method, t_max, alpha, replicas, seed

    @app.post("/instances")
    def post_instance(body: dict):
        try:
            instance = _parse_instance_body(body)
        except (InstanceError, ValueError, TypeError) as exc:
            raise HTTPException(422, str(exc))
        doc = instance_to_dict(instance)
        doc["schema_version"] = SCHEMA_VERSION
        instance_id = store.new_id()
        store.write("instances", instance_id, doc)
        return {"id": instance_id}

    @app.get("/instances/{instance_id}")
    def get_instance(instance_id: str):
        return _get_or_404("instances", instance_id)

    @app.post("/solve")
    def post_solve(body: dict):
        instance_id = body.get("instance_id")
        if not instance_id:
            raise HTTPException(422, "instance_id is required")
        _get_or_404("instances", instance_id)
        method, t_max, alpha, replicas, seed = _validated_config(body)
        job = _job_doc(store, instance_id, method, t_max, alpha, replicas, seed)
        store.write("jobs", job["id"], job)
        manager.submit(job["id"])
        return {"job_id": job["id"]}

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        job = _get_or_404("jobs", job_id)
        payload = dict(job)
        if job["status"] == "done":
            payload["result"] = store.read("results", job_id)
        return JSONResponse(payload)

    @app.post("/whatif")
    def post_whatif(body: dict):
        base_id = body.get("base_job_id")
        if not base_id:
            raise HTTPException(422, "base_job_id is required")
        base_job = _get_or_404("jobs", base_id)
        if base_job["status"] != "done":
            raise HTTPException(409, f"base job is {base_job['status']}, not done")
        overrides = body.get("overrides", {})
        allowed = {"cf", "ct", "co", "alpha", "t_max", "customer_subset"}
        unknown = set(overrides) - allowed
        if unknown:
            raise HTTPException(422, f"unknown overrides: {sorted(unknown)}")

        base_doc = _get_or_404("instances", base_job["instance_id"])
        try:
            instance = instance_from_dict(base_doc)
            costs = instance.costs
            cost_fields = {k: float(overrides[k]) for k in ("cf", "ct", "co")
                           if k in overrides}
            if cost_fields:
                import dataclasses
                costs = dataclasses.replace(costs, **cost_fields)
            instance = instance.with_overrides(
                costs=costs if cost_fields else None,
                customer_subset=overrides.get("customer_subset"),
            )
        except (InstanceError, ValueError, TypeError) as exc:
            raise HTTPException(422, str(exc))

        cfg = dict(base_job["config"])
        if "alpha" in overrides:
            alpha = float(overrides["alpha"])
            if not 0 <= alpha <= 1:
                raise HTTPException(422, "alpha must lie in [0, 1]")
            cfg["alpha"] = alpha
        if "t_max" in overrides:
            t_max = overrides["t_max"]
            cfg["t_max"] = None if t_max is None else float(t_max)

        doc = instance_to_dict(instance)
        doc["schema_version"] = SCHEMA_VERSION
        instance_id = store.new_id()
        store.write("instances", instance_id, doc)
        job = _job_doc(store, instance_id, cfg["method"], cfg["t_max"],
                       cfg["alpha"], cfg["replicas"], cfg["seed"],
                       base_job=base_id)
        store.write("jobs", job["id"], job)
        manager.submit(job["id"])
        return {"job_id": job["id"]}

    return app
