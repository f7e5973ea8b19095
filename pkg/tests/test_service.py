import json

import pytest
from fastapi.testclient import TestClient
from PIL import Image

from t2ieval.ingest import load_manifest
from t2ieval.service import AnnotationStore, create_app, load_tasks


@pytest.fixture
def harness(tmp_path):
    img_dir = tmp_path / "images"
    img_dir.mkdir()
    image_ids = []
    for i in range(10):
        path = img_dir / f"img{i}.png"
        Image.new("RGB", (32, 24), (10 * i, 100, 150)).save(path)
        image_ids.append((f"img{i}", str(path)))

    manifest_path = tmp_path / "manifest.jsonl"
    manifest_path.write_text(
        "\n".join(
            json.dumps({
                "image_id": iid, "prompt_id": "p0", "image_path": p,
                "width": 32, "height": 24,
            })
            for iid, p in image_ids
        ) + "\n"
    )

    tasks_path = tmp_path / "tasks.jsonl"
    tasks_path.write_text(
        "\n".join([
            json.dumps({"id": "g1", "kind": "gender",
                        "images": [iid for iid, _ in image_ids[:9]]}),
            json.dumps({"id": "o1", "kind": "skill_object", "images": ["img0"]}),
            json.dumps({"id": "c1", "kind": "skill_count", "images": ["img1"]}),
            json.dumps({"id": "sp1", "kind": "skill_spatial", "images": ["img2"]}),
            json.dumps({"id": "sk1", "kind": "skin_point", "images": ["img3"]}),
        ]) + "\n"
    )

    journal = tmp_path / "journal.jsonl"
    tasks = load_tasks(tasks_path)
    store = AnnotationStore(journal)
    app = create_app(tasks, store, load_manifest(manifest_path))
    return TestClient(app), journal


def submit(client, worker, item, answer):
    return client.post(
        "/annotations",
        json={"worker_id": worker, "item_id": item, "answer": answer},
    )


class TestTasks:
    def test_next_task_has_urls_and_answers(self, harness):
        client, _ = harness
        task = client.get("/tasks/next", params={"worker": "w1"}).json()["task"]
        assert task["id"] == "g1"
        assert len(task["image_urls"]) == 9
        assert task["allowed_answers"] == ["male", "female", "not_human"]

    def test_next_skips_answered(self, harness):
        client, _ = harness
        submit(client, "w1", "g1", {"choice": "male"})
        task = client.get("/tasks/next", params={"worker": "w1"}).json()["task"]
        assert task["id"] == "o1"

    def test_all_done_returns_null(self, harness):
        client, _ = harness
        submit(client, "w1", "g1", {"choice": "male"})
        submit(client, "w1", "o1", {"class": "dog"})
        submit(client, "w1", "c1", {"class": "dog", "count": 2})
        submit(client, "w1", "sp1",
               {"class_a": "dog", "class_b": "car", "relation": "left"})
        submit(client, "w1", "sk1", {"x": 3, "y": 4})
        assert client.get("/tasks/next", params={"worker": "w1"}).json()["task"] is None


class TestSubmission:
    def test_gender_answer_stored(self, harness):
        client, journal = harness
        resp = submit(client, "w1", "g1", {"choice": "female"})
        assert resp.status_code == 200
        lines = journal.read_text().splitlines()
        assert len(lines) == 1
        assert json.loads(lines[0])["answer"]["choice"] == "female"

    def test_unknown_item_404(self, harness):
        client, _ = harness
        assert submit(client, "w1", "nope", {"choice": "male"}).status_code == 404

    def test_bad_choice_400_with_field_errors(self, harness):
        client, _ = harness
        resp = submit(client, "w1", "g1", {"choice": "robot"})
        assert resp.status_code == 400
        assert any("choice" in e for e in resp.json()["detail"]["errors"])

    def test_skin_point_out_of_bounds_400(self, harness):
        client, _ = harness
        resp = submit(client, "w1", "sk1", {"x": 100, "y": 4})
        assert resp.status_code == 400
        assert any("bounds" in e for e in resp.json()["detail"]["errors"])

    def test_skin_point_samples_rgb_server_side(self, harness):
        client, journal = harness
        submit(client, "w1", "sk1", {"x": 3, "y": 4})
        rec = json.loads(journal.read_text().splitlines()[-1])
        assert rec["answer"]["rgb"] == [30, 100, 150]

    def test_resubmission_replaces_but_appends(self, harness):
        client, journal = harness
        submit(client, "w1", "g1", {"choice": "male"})
        submit(client, "w1", "g1", {"choice": "female"})
        assert len(journal.read_text().splitlines()) == 2
        agg = client.get("/aggregate/g1").json()
        assert agg["n_workers"] == 1
        assert agg["result"]["answer"] == "female"


class TestAggregate:
    def test_strict_majority_over_five_workers(self, harness):
        client, _ = harness
        for w, choice in enumerate(["male", "male", "male", "female", "male"]):
            submit(client, f"w{w}", "g1", {"choice": choice})
        result = client.get("/aggregate/g1").json()["result"]
        assert result == {"verdict": "majority", "answer": "male"}

    def test_2_2_1_split_abstains(self, harness):
        client, _ = harness
        choices = ["male", "male", "female", "female", "not_human"]
        for w, choice in enumerate(choices):
            submit(client, f"w{w}", "g1", {"choice": choice})
        assert client.get("/aggregate/g1").json()["result"]["verdict"] == "abstain"

    def test_not_human_majority_excluded(self, harness):
        client, _ = harness
        choices = ["not_human", "not_human", "not_human", "male", "female"]
        for w, choice in enumerate(choices):
            submit(client, f"w{w}", "g1", {"choice": choice})
        assert client.get("/aggregate/g1").json()["result"]["verdict"] == "excluded"

    def test_unknown_item_404(self, harness):
        client, _ = harness
        assert client.get("/aggregate/nope").status_code == 404

    def test_no_answers_yet(self, harness):
        client, _ = harness
        body = client.get("/aggregate/g1").json()
        assert body["n_workers"] == 0
        assert body["result"] is None


class TestImages:
    def test_serves_image(self, harness):
        client, _ = harness
        resp = client.get("/images/img0")
        assert resp.status_code == 200
        assert resp.headers["content-type"] == "image/png"

    def test_unknown_image_404(self, harness):
        client, _ = harness
        assert client.get("/images/none").status_code == 404


def test_journal_survives_restart(tmp_path):
    journal = tmp_path / "journal.jsonl"
    store = AnnotationStore(journal)
    store.append({"worker_id": "w1", "item_id": "t1", "task": "gender",
                  "answer": {"choice": "male"}, "ts": 0})
    reloaded = AnnotationStore(journal)
    assert reloaded.has_answered("w1", "t1")
    assert reloaded.answers_for_item("t1")[0]["answer"]["choice"] == "male"
