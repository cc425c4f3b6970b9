#!/usr/bin/env python3
"""A full portal session over live HTTP: login, browse, event, refresh.

Run: python demos/03_portal_session.py
"""

import json
import urllib.request

from portalis.cli import default_schema_path
from portalis.dsl import load_file
from portalis.gateway import PortalGateway
from portalis.httpd import ServerThread


def call(base, method, path, body=None):
    data = json.dumps(body).encode() if body is not None else None
    request = urllib.request.Request(base + path, data=data, method=method,
                                     headers={"Content-Type":
                                              "application/json"})
    with urllib.request.urlopen(request) as response:
        return json.loads(response.read())


engine = load_file(default_schema_path()).engine
with ServerThread(PortalGateway(engine)) as server:
    base = server.address
    print(f"gateway on {base}\n")

    session = call(base, "POST", "/session", {"profile": "manager"})
    token = session["token"]
    print("logged in as", session["persona"], "rank", session["rank"])
    print("visible pages:", call(base, "GET", f"/pages?token={token}")["pages"])

    page = call(base, "GET", f"/page/vacancyBoard?token={token}")
    print("\nvacancyBoard openings:", page["items"]["openings"]["value"])

    print("\nfilling the engineer vacancy (content-critical update)...")
    call(base, "POST", "/warehouse/hrMain/update", {
        "change": {"op": "update", "id": "vac_eng",
                   "values": {"openVacancy": False}},
        "contentCritical": True})
    page = call(base, "GET", f"/page/vacancyBoard?token={token}")
    print("vacancyBoard openings now:", page["items"]["openings"]["value"],
          "(stale:", str(page["stale"]) + ")")

    print("\nsubmitting a preference-changed event...")
    outcome = call(base, "POST", "/event", {
        "token": token, "name": "preference-changed",
        "args": {"theme": "dark"}, "idempotencyKey": "demo-1"})
    print("effects:", outcome["effects"])
    page = call(base, "GET", f"/page/corporateProfile?token={token}")
    print("session overlay on corporateProfile:", page["overlay"])

    call(base, "DELETE", f"/session/{token}")
    print("\nsession closed; the token is dead now.")
