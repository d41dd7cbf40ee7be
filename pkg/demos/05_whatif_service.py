"""Drive the HTTP service end to end: solve, then re-solve what-if scenarios.

Runs the app in-process; the same flow works against `hsara serve --port 8000`
with plain HTTP calls (and is what the dashboard frontend does).
"""

import tempfile
import time

from fastapi.testclient import TestClient

from hsara.service import create_app


def wait(client, job_id):
    while True:
        doc = client.get(f"/jobs/{job_id}").json()
        if doc["status"] in ("done", "failed"):
            return doc
        time.sleep(0.2)


with tempfile.TemporaryDirectory() as data_dir:
    app = create_app(data_dir, pool_size=2)
    with TestClient(app) as client:
        instance_id = client.post("/instances", json={"n": 10, "seed": 3}).json()["id"]
        base_job = client.post("/solve", json={
            "instance_id": instance_id, "method": "hm",
            "alpha": 0.5, "replicas": 200, "seed": 1,
        }).json()["job_id"]
        base = wait(client, base_job)
        sol = base["result"]["solution"]
        print(f"base: objective {sol['objective']:.1f}, {len(sol['routes'])} routes, "
              f"simulated total {base['result']['cost_breakdown']['total']:.1f}")

        scenarios = {
            "hiring x10": {"cf": 1000.0},
            "alpha 0.95": {"alpha": 0.95},
            "only customers 1-5": {"customer_subset": [1, 2, 3, 4, 5]},
        }
        for label, overrides in scenarios.items():
            job_id = client.post("/whatif", json={
                "base_job_id": base_job, "overrides": overrides,
            }).json()["job_id"]
            doc = wait(client, job_id)
            res = doc["result"]
            print(f"{label:>20}: objective {res['solution']['objective']:8.1f}  "
                  f"routes {len(res['solution']['routes'])}  "
                  f"total {res['cost_breakdown']['total']:8.1f}")
