"""
Smoke check against a running server (`python run.py`): health, one example
pair classification and the reproduction report.
"""
import asyncio
import os
import time

import httpx

API_URL = os.environ.get("POVMORDER_API_URL", "http://127.0.0.1:8000/api")


async def verify():
    async with httpx.AsyncClient(timeout=300.0) as client:
        resp = await client.get(f"{API_URL}/health")
        print(f"Health: {resp.status_code} {resp.json()}")
        if resp.status_code != 200:
            return

        fixture = (await client.get(f"{API_URL}/examples/ex3")).json()
        body = {
            "n": fixture["povms"]["N"],
            "m": fixture["povms"]["M"],
            "budget": {"samples": 2000, "refine_steps": 50, "seed": 0},
        }
        start_time = time.time()
        resp = await client.post(f"{API_URL}/order/classify", json=body)
        if resp.status_code != 200:
            print("Classification failed!", resp.text)
            return
        entropy = resp.json()["n_vs_m"]["entropy"]
        print(f"N vs M entropy: {entropy['status']} ({time.time() - start_time:.1f}s)")

        print("Reproducing fixtures...")
        report = (await client.get(f"{API_URL}/reproduce")).json()
        failed = [check for check in report["checks"] if not check["passed"]]
        print(f"{len(report['checks']) - len(failed)}/{len(report['checks'])} checks passed")
        for check in failed:
            print(f"  MISMATCH {check['fixture']}/{check['key']}: {check['expected']} vs {check['computed']}")
        if not failed:
            print("SUCCESS: all fixture values and relations reproduced.")


if __name__ == "__main__":
    asyncio.run(verify())
