"""Command-line entry points: gen, score, bias, stats, fid, rprecision, serve.

Exit codes: 0 success, 1 runtime error, 2 usage error. Every report embeds
the exact config it was produced with so a re-run reproduces the values.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import __version__, generate, ingest, scoring, stats
from .bias import SimilarityClient, gender_classifier, run_bias_eval, skin_tone_classifier
from .model import ScorerConfig, SkillKind
from .skin import MstPalette, load_skin_thresholds


@dataclass
class HarnessConfig:
    scorer: ScorerConfig
    palette_path: Optional[str] = None
    skin_thresholds_path: Optional[str] = None
    similarity_url: Optional[str] = None
    similarity_timeout: float = 30.0
    similarity_retries: int = 2
    seed: int = 0
    output_dir: str = "."

    def to_dict(self) -> dict:
        return {
            "scorer": self.scorer.to_dict(),
            "palette_path": self.palette_path,
            "skin_thresholds_path": self.skin_thresholds_path,
            "similarity_url": self.similarity_url,
            "similarity_timeout": self.similarity_timeout,
            "similarity_retries": self.similarity_retries,
            "seed": self.seed,
            "output_dir": self.output_dir,
        }

    @staticmethod
    def from_dict(d: dict) -> "HarnessConfig":
        return HarnessConfig(
            scorer=ScorerConfig.from_dict(d.get("scorer", {})),
            palette_path=d.get("palette_path"),
            skin_thresholds_path=d.get("skin_thresholds_path"),
            similarity_url=d.get("similarity_url"),
            similarity_timeout=float(d.get("similarity_timeout", 30.0)),
            similarity_retries=int(d.get("similarity_retries", 2)),
            seed=int(d.get("seed", 0)),
            output_dir=d.get("output_dir", "."),
        )

    @staticmethod
    def load(path: Optional[str]) -> "HarnessConfig":
        if path is None:
            return HarnessConfig(scorer=ScorerConfig())
        with open(path, "r", encoding="utf-8") as f:
            return HarnessConfig.from_dict(json.load(f))


def _write_report(payload: dict, config: HarnessConfig, out: str | Path) -> None:
    """Atomic write: report lands complete or not at all."""
    report = {
        "harness_version": __version__,
        "config": config.to_dict(),
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        **payload,
    }
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=out.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            json.dump(report, f, indent=2)
            f.write("\n")
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_gen(args: argparse.Namespace) -> int:
    skill = SkillKind(args.skill)
    if args.multiplicity is not None:
        spec = generate.GenerationSpec(skill, args.split, args.seed, args.multiplicity)
        scenes = generate.generate_scenes(spec)
    else:
        scenes = generate.generate_split(skill, args.split, args.seed)
    generate.export_simulator_batch(scenes, args.out)
    print(f"{len(scenes)} scenes written to {args.out}")
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    config = HarnessConfig.load(args.config)
    scenes = generate.load_scene_batch(args.scenes)
    records = ingest.load_detections(args.detections)
    joined = ingest.join(scenes, records)
    if joined.unmatched_scenes:
        raise ValueError(
            f"{len(joined.unmatched_scenes)} scenes without detections, "
            f"first: {joined.unmatched_scenes[0]}"
        )
    skill = scenes[0].skill
    report = scoring.score_split(
        [s for s, _ in joined.pairs],
        [r for _, r in joined.pairs],
        config.scorer,
        skill,
    )
    _write_report({"skill_report": report.to_dict()}, config, args.out)
    print(f"skill {skill.value}: accuracy {report.accuracy * 100:.1f}% "
          f"({report.n_correct}/{report.n_images}), report at {args.out}")
    return 0


def cmd_bias(args: argparse.Namespace) -> int:
    config = HarnessConfig.load(args.config)
    if args.similarity_url:
        config.similarity_url = args.similarity_url
    if args.palette:
        config.palette_path = args.palette
    manifest = ingest.load_manifest(args.manifest)
    groups = {
        ref: [e.path for e in entries]
        for ref, entries in manifest.grouped_by_ref().items()
    }

    if args.attribute == "gender":
        if not config.similarity_url:
            raise ValueError("gender evaluation needs a similarity service URL")
        client = SimilarityClient(
            url=config.similarity_url,
            timeout=config.similarity_timeout,
            retries=config.similarity_retries,
        )
        classify = gender_classifier(client)
    else:
        palette = (
            MstPalette.from_file(config.palette_path)
            if config.palette_path
            else MstPalette.default()
        )
        thresholds = (
            load_skin_thresholds(config.skin_thresholds_path)
            if config.skin_thresholds_path
            else None
        )
        classify = skin_tone_classifier(palette, thresholds)

    report = run_bias_eval(groups, args.attribute, classify)
    _write_report({"bias_report": report.to_dict()}, config, args.out)
    print(f"{args.attribute}: STD {report.std:.4f}, MAD {report.mad:.4f} "
          f"({report.distribution.n_prompts_included} prompts included, "
          f"{report.distribution.n_prompts_excluded} excluded)")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    if args.confusion:
        a, b, c, d = args.confusion
        table = stats.Confusion2x2(a, b, c, d)
        print(f"phi {stats.phi_coefficient(table):.6f}")
        print(f"kappa {stats.cohens_kappa(table):.6f}")
    if args.pairs:
        pairs = []
        with open(args.pairs, "r", encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    raw = json.loads(line)
                    pairs.append((raw["a"], raw["b"]))
        if args.tones:
            print(f"tone_mean_abs_diff {stats.tone_mean_abs_diff(pairs):.6f}")
        else:
            print(f"agreement_rate {stats.agreement_rate(pairs):.6f}")
    if not args.confusion and not args.pairs:
        raise ValueError("nothing to compute: pass --confusion and/or --pairs")
    return 0


def cmd_fid(args: argparse.Namespace) -> int:
    real = stats.FeatureSet.load(args.real)
    gen = stats.FeatureSet.load(args.generated)
    print(f"fid {stats.fid(real, gen):.6f}")
    return 0


def cmd_rprecision(args: argparse.Namespace) -> int:
    sim = stats.load_similarity_matrix(args.similarities)
    print(f"r_precision {stats.r_precision(sim):.6f}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import AnnotationStore, create_app, load_tasks

    tasks = load_tasks(args.tasks)
    store = AnnotationStore(args.journal)
    manifest = ingest.load_manifest(args.manifest)
    app = create_app(tasks, store, manifest)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="t2ieval")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate scene configurations")
    p.add_argument("--skill", required=True, choices=[s.value for s in SkillKind])
    p.add_argument("--split", required=True, choices=["train", "test"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--multiplicity", type=int, default=None,
                   help="copies per combination (default: published split size)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("score", help="score a skill split from detections")
    p.add_argument("--scenes", required=True)
    p.add_argument("--detections", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("bias", help="run the gender/skin-tone bias evaluation")
    p.add_argument("--manifest", required=True)
    p.add_argument("--attribute", required=True, choices=["gender", "skin_tone"])
    p.add_argument("--config", default=None)
    p.add_argument("--similarity-url", default=None)
    p.add_argument("--palette", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bias)

    p = sub.add_parser("stats", help="agreement statistics")
    p.add_argument("--confusion", nargs=4, type=int, metavar=("A", "B", "C", "D"))
    p.add_argument("--pairs", default=None, help="JSONL of {a, b} label pairs")
    p.add_argument("--tones", action="store_true",
                   help="treat pairs as tone indices; report mean abs diff")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("fid", help="Frechet distance between two feature sets")
    p.add_argument("real")
    p.add_argument("generated")
    p.set_defaults(func=cmd_fid)

    p = sub.add_parser("rprecision", help="R-precision over a similarity matrix")
    p.add_argument("similarities")
    p.set_defaults(func=cmd_rprecision)

    p = sub.add_parser("serve", help="run the annotation HTTP service")
    p.add_argument("--tasks", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--journal", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
