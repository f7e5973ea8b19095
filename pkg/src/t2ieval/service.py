"""HTTP annotation service backing the human-evaluation UI.

Serves task batches, accepts worker judgments, and aggregates them by strict
majority. Submissions are persisted to a single append-only JSONL journal;
resubmission by the same (worker, item) pair replaces the earlier answer at
read time, so the journal stays a faithful audit trail.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import FileResponse, JSONResponse

from .model import ObjectClass, RelationKind
from .stats import ABSTAIN, EXCLUDED, NOT_HUMAN, aggregate_workers
from .ingest import ImageManifest

TASK_KINDS = ("skill_object", "skill_count", "skill_spatial", "gender", "skin_point")

OBJECT_CLASS_NAMES = [c.value for c in ObjectClass]
RELATION_NAMES = [r.value for r in RelationKind]
GENDER_CHOICES = ["male", "female", NOT_HUMAN]


@dataclass(frozen=True)
class Task:
    id: str
    kind: str
    image_ids: tuple[str, ...]

    def view(self) -> dict:
        v: dict = {
            "id": self.id,
            "kind": self.kind,
            "image_urls": [f"/images/{i}" for i in self.image_ids],
        }
        if self.kind == "gender":
            v["allowed_answers"] = GENDER_CHOICES
        elif self.kind == "skill_object":
            v["classes"] = OBJECT_CLASS_NAMES
        elif self.kind == "skill_count":
            v["classes"] = OBJECT_CLASS_NAMES
            v["counts"] = [1, 2, 3, 4]
        elif self.kind == "skill_spatial":
            v["classes"] = OBJECT_CLASS_NAMES
            v["relations"] = RELATION_NAMES
        return v


def load_tasks(path: str | Path) -> list[Task]:
    tasks: list[Task] = []
    with Path(path).open("r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            raw = json.loads(line)
            kind = raw["kind"]
            if kind not in TASK_KINDS:
                raise ValueError(f"unknown task kind {kind!r}")
            images = tuple(raw["images"])
            if kind == "gender" and len(images) != 9:
                raise ValueError(f"gender task {raw['id']} must carry 9 images")
            if kind != "gender" and len(images) != 1:
                raise ValueError(f"task {raw['id']} must carry 1 image")
            tasks.append(Task(id=raw["id"], kind=kind, image_ids=images))
    return tasks


class AnnotationStore:
    """Append-only JSONL journal with latest-answer-per-(worker,item) reads."""

    def __init__(self, journal_path: str | Path):
        self.path = Path(journal_path)
        self._lock = threading.Lock()
        self._latest: dict[tuple[str, str], dict] = {}
        if self.path.exists():
            with self.path.open("r", encoding="utf-8") as f:
                for line in f:
                    line = line.strip()
                    if line:
                        rec = json.loads(line)
                        self._latest[(rec["worker_id"], rec["item_id"])] = rec

    def append(self, record: dict) -> None:
        with self._lock:
            with self.path.open("a", encoding="utf-8") as f:
                f.write(json.dumps(record))
                f.write("\n")
            self._latest[(record["worker_id"], record["item_id"])] = record

    def answers_for_item(self, item_id: str) -> list[dict]:
        with self._lock:
            return [r for (_, iid), r in self._latest.items() if iid == item_id]

    def has_answered(self, worker_id: str, item_id: str) -> bool:
        with self._lock:
            return (worker_id, item_id) in self._latest


def _validate_answer(task: Task, answer: dict, manifest: ImageManifest) -> list[str]:
    errors: list[str] = []
    if task.kind == "gender":
        if answer.get("choice") not in GENDER_CHOICES:
            errors.append(f"choice: must be one of {GENDER_CHOICES}")
    elif task.kind == "skill_object":
        if answer.get("class") not in OBJECT_CLASS_NAMES:
            errors.append("class: unknown object class")
    elif task.kind == "skill_count":
        if answer.get("class") not in OBJECT_CLASS_NAMES:
            errors.append("class: unknown object class")
        if answer.get("count") not in (1, 2, 3, 4):
            errors.append("count: must be in [1,4]")
    elif task.kind == "skill_spatial":
        if answer.get("class_a") not in OBJECT_CLASS_NAMES:
            errors.append("class_a: unknown object class")
        if answer.get("class_b") not in OBJECT_CLASS_NAMES:
            errors.append("class_b: unknown object class")
        if answer.get("relation") not in RELATION_NAMES:
            errors.append(f"relation: must be one of {RELATION_NAMES}")
    elif task.kind == "skin_point":
        x, y = answer.get("x"), answer.get("y")
        if not isinstance(x, int) or not isinstance(y, int):
            errors.append("x/y: must be integer pixel coordinates")
        else:
            entry = manifest.by_image_id().get(task.image_ids[0])
            if entry is None:
                errors.append("image: not in manifest")
            else:
                w, h = entry.width, entry.height
                if w is None or h is None:
                    from PIL import Image

                    with Image.open(entry.path) as im:
                        w, h = im.size
                if not (0 <= x < w and 0 <= y < h):
                    errors.append(f"x/y: outside image bounds {w}x{h}")
    return errors


def _canonical_answer(task: Task, answer: dict) -> str:
    """Stable string form used for majority voting."""
    if task.kind == "gender":
        return answer["choice"]
    return json.dumps(answer, sort_keys=True)


def create_app(
    tasks: list[Task],
    store: AnnotationStore,
    manifest: ImageManifest,
) -> FastAPI:
    app = FastAPI(title="annotation service")
    tasks_by_id = {t.id: t for t in tasks}
    images = manifest.by_image_id()

    @app.get("/tasks/next")
    def next_task(worker: str) -> JSONResponse:
        for task in tasks:
            if not store.has_answered(worker, task.id):
                return JSONResponse({"task": task.view()})
        return JSONResponse({"task": None})

    @app.post("/annotations")
    async def submit(request: Request) -> JSONResponse:
        body = await request.json()
        errors: list[str] = []
        for name in ("worker_id", "item_id", "answer"):
            if name not in body:
                errors.append(f"{name}: required")
        if errors:
            raise HTTPException(status_code=400, detail={"errors": errors})
        task = tasks_by_id.get(body["item_id"])
        if task is None:
            raise HTTPException(status_code=404, detail="unknown item")
        if not isinstance(body["answer"], dict):
            raise HTTPException(
                status_code=400, detail={"errors": ["answer: must be an object"]}
            )
        errors = _validate_answer(task, body["answer"], manifest)
        if errors:
            raise HTTPException(status_code=400, detail={"errors": errors})

        answer = dict(body["answer"])
        if task.kind == "skin_point":
            entry = images[task.image_ids[0]]
            answer["rgb"] = _sample_rgb(entry.path, answer["x"], answer["y"])

        store.append(
            {
                "worker_id": body["worker_id"],
                "item_id": body["item_id"],
                "task": task.kind,
                "answer": answer,
                "ts": time.time(),
            }
        )
        return JSONResponse({"status": "stored"})

    @app.get("/aggregate/{item_id}")
    def aggregate(item_id: str) -> JSONResponse:
        task = tasks_by_id.get(item_id)
        if task is None:
            raise HTTPException(status_code=404, detail="unknown item")
        records = store.answers_for_item(item_id)
        if not records:
            return JSONResponse(
                {"item_id": item_id, "n_workers": 0, "result": None}
            )
        votes = [_canonical_answer(task, r["answer"]) for r in records]
        result = aggregate_workers(votes)
        if result == ABSTAIN:
            payload: object = {"verdict": "abstain"}
        elif result == EXCLUDED:
            payload = {"verdict": "excluded"}
        else:
            payload = {"verdict": "majority", "answer": result}
        return JSONResponse(
            {"item_id": item_id, "n_workers": len(records), "result": payload}
        )

    @app.get("/images/{image_id}")
    def image(image_id: str) -> FileResponse:
        entry = images.get(image_id)
        if entry is None or not Path(entry.path).exists():
            raise HTTPException(status_code=404, detail="unknown image")
        return FileResponse(entry.path)

    return app


def _sample_rgb(path: str, x: int, y: int) -> list[int]:
    # Sampled from the authoritative image so tone assignment stays
    # recomputable if the palette changes.
    from PIL import Image

    with Image.open(path) as im:
        r, g, b = im.convert("RGB").getpixel((x, y))
    return [r, g, b]
