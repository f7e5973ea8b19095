import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from t2ieval.model import (
    BBox,
    Detection,
    DetectionRecord,
    ObjectClass,
    ObjectSpec,
    RelationKind,
    SceneConfig,
    SkillKind,
)
from t2ieval.templates import prompt_for_scene


def make_scene(skill, objects, relation=None, template_id=0, scene_id="s0", split="test"):
    scene = SceneConfig(
        id=scene_id,
        skill=skill,
        split=split,
        objects=tuple(objects),
        relation=relation,
        background_id=0,
        template_id=template_id,
        prompt="",
    )
    try:
        prompt = prompt_for_scene(scene)
    except Exception:
        prompt = ""  # intentionally invalid scene; validation flags it
    return SceneConfig(
        id=scene.id,
        skill=scene.skill,
        split=scene.split,
        objects=scene.objects,
        relation=scene.relation,
        background_id=scene.background_id,
        template_id=scene.template_id,
        prompt=prompt,
    )


def det(label, confidence, x=0.0, y=0.0, w=10.0, h=10.0):
    return Detection(label=label, confidence=confidence, bbox=BBox(x, y, w, h))


def record(scene_id, detections, image_id=None):
    return DetectionRecord(
        image_id=image_id or f"img_{scene_id}",
        scene_id=scene_id,
        detections=tuple(detections),
    )


class _StubSimilarityHandler(BaseHTTPRequestHandler):
    """Returns scores from the server's scripted queue, or a fixed default."""

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length))
        server = self.server
        if server.fail_next > 0:
            server.fail_next -= 1
            self.send_response(500)
            self.end_headers()
            return
        if server.scripted:
            scores = server.scripted.pop(0)
        else:
            scores = server.default_scores
        payload = json.dumps({"scores": scores[: len(body["texts"])]}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture
def similarity_server():
    server = HTTPServer(("127.0.0.1", 0), _StubSimilarityHandler)
    server.default_scores = [0.8, 0.2]
    server.scripted = []
    server.fail_next = 0
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server
    server.shutdown()
    thread.join(timeout=5)


@pytest.fixture
def similarity_url(similarity_server):
    return f"http://127.0.0.1:{similarity_server.server_port}/similarity"
