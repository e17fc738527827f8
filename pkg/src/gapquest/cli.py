"""Pipeline CLI: deterministic JSON artifacts, one subcommand per stage.

    ingest -> cluster-classes -> build-global -> missing
           -> train-usefulness -> retrieve -> evaluate -> analyze

Every artifact embeds a schema version and the hash of the effective
configuration. Exit codes: 0 ok, 2 validation problem, 3 data problem.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path

import click

from .classes import ClassAssignment, cluster_dialog_classes, split_hierarchy_classes
from .conllu import ConlluError
from .corpus import Context, CorpusError, context_from_normalized_json, context_to_json, load_contexts
from .embeddings import EmbeddingError, EmbeddingTable, load_embeddings
from .globalschema import GlobalSchema, MissingSchema, extend_global, missing_schema
from .keyphrase import load_stopwords
from .metrics import (
    bleu4,
    bleu4_sentence,
    distinct2,
    length_stats,
    load_synonym_pairs,
    meteor_lite,
    question_overlap_ratio,
    robustness_report,
)
from .pipeline import build_class_globals, local_schemas, target_schema
from .retrieval import build_index, rerank_useful, retrieve
from .schema import Schema
from .usefulness import (
    TrainConfig,
    UsefulnessModel,
    binarize_scores,
    make_negative_samples,
    train_usefulness,
)

SCHEMA_VERSION = 1
ENV_PREFIX = "GAPQUEST_"

EXIT_VALIDATION = 2
EXIT_DATA = 3

DATA_ERRORS = (CorpusError, ConlluError, EmbeddingError, FileNotFoundError, json.JSONDecodeError)


@dataclass
class PipelineConfig:
    contexts: str | None = None
    embeddings: str | None = None
    stopwords: str | None = None
    synonyms: str | None = None
    cluster_theta: float = 0.6
    match_theta: float = 0.8
    retain: float = 0.6
    usefulness_threshold: float = 3.0
    alpha: float = 0.5
    cap: int = 400
    k: int = 26
    k_sweep: list[int] | None = None
    seed: int = 0
    top_k: int = 5
    window: int = 2
    raw_counts: bool = False
    epochs: int = 60
    learning_rate: float = 0.5
    l2: float = 1e-3

    _FLOATS = ("cluster_theta", "match_theta", "retain", "usefulness_threshold",
               "alpha", "learning_rate", "l2")
    _INTS = ("cap", "k", "seed", "top_k", "window", "epochs")
    _PATHS = ("contexts", "embeddings", "stopwords", "synonyms")

    def validate(self) -> None:
        for name, low, high in (
            ("cluster_theta", 0.0, 1.0),
            ("retain", 0.0, 1.0),
            ("alpha", 0.0, 1.0),
            ("usefulness_threshold", 0.0, 5.0),
        ):
            value = getattr(self, name)
            if not low <= value <= high:
                raise click.ClickException(f"config: {name}={value} outside [{low}, {high}]")
        if self.match_theta <= 0:
            raise click.ClickException("config: match_theta must be positive")
        for name in ("cap", "k", "top_k", "window", "epochs"):
            if getattr(self, name) < 1:
                raise click.ClickException(f"config: {name} must be >= 1")
        for name in self._PATHS:
            value = getattr(self, name)
            if value is not None and not Path(value).exists():
                raise click.ClickException(f"config: {name} path does not exist: {value}")

    def hash(self) -> str:
        canonical = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def load_config(path: str | None) -> PipelineConfig:
    """Config file, then GAPQUEST_* environment overrides."""
    cfg = PipelineConfig()
    if path:
        try:
            obj = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise click.ClickException(f"config {path}: invalid JSON ({exc})")
        for key, value in obj.items():
            if not hasattr(cfg, key) or key.startswith("_"):
                raise click.ClickException(f"config {path}: unknown key {key!r}")
            setattr(cfg, key, value)
    for key in list(vars(cfg)):
        env = os.environ.get(ENV_PREFIX + key.upper())
        if env is None:
            continue
        if key in PipelineConfig._FLOATS:
            setattr(cfg, key, float(env))
        elif key in PipelineConfig._INTS:
            setattr(cfg, key, int(env))
        elif key == "raw_counts":
            setattr(cfg, key, env.lower() in ("1", "true", "yes"))
        elif key == "k_sweep":
            lo, hi = env.split("..")
            setattr(cfg, key, list(range(int(lo), int(hi) + 1)))
        else:
            setattr(cfg, key, env)
    return cfg


@contextmanager
def artifact_lock(artifacts: Path):
    artifacts.mkdir(parents=True, exist_ok=True)
    lock = artifacts / ".lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise click.ClickException(
            f"artifact directory is locked ({lock}); remove the file if no other run is active"
        )
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        lock.unlink(missing_ok=True)


def write_artifact(path: Path, payload: dict, config_hash: str) -> None:
    """Atomic, deterministic JSON artifact with provenance fields."""
    payload = {"schema_version": SCHEMA_VERSION, "config_hash": config_hash, **payload}
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    try:
        tmp.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8")
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def read_artifact(path: Path) -> dict:
    if not path.exists():
        raise click.ClickException(f"missing artifact {path}; run the earlier stages first")
    return json.loads(path.read_text(encoding="utf-8"))


def class_file_name(class_id: str) -> str:
    safe = "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in class_id)
    return f"{safe}.json"


class _State:
    def __init__(self, config: PipelineConfig, artifacts: Path):
        self.config = config
        self.artifacts = artifacts
        self._table: EmbeddingTable | None = None

    @property
    def table(self) -> EmbeddingTable:
        if self._table is None:
            if not self.config.embeddings:
                raise click.ClickException("config: embeddings path is required here")
            with open(self.config.embeddings, encoding="utf-8") as fh:
                self._table = load_embeddings(fh)
        return self._table

    def stopword_set(self):
        return load_stopwords(Path(self.config.stopwords)) if self.config.stopwords else None

    def load_corpus(self) -> list[Context]:
        obj = read_artifact(self.artifacts / "corpus.json")
        return [context_from_normalized_json(c) for c in obj["contexts"]]

    def load_assignment(self) -> ClassAssignment:
        obj = read_artifact(self.artifacts / "classes.json")
        return ClassAssignment.from_json(obj)

    def load_globals(self) -> dict[str, GlobalSchema]:
        schemas_dir = self.artifacts / "schemas"
        if not schemas_dir.is_dir():
            raise click.ClickException(f"missing artifact {schemas_dir}; run build-global first")
        globals_: dict[str, GlobalSchema] = {}
        for path in sorted(schemas_dir.glob("*.json")):
            gs = GlobalSchema.from_json(json.loads(path.read_text(encoding="utf-8")))
            globals_[gs.class_id] = gs
        return globals_

    def load_locals(self) -> dict[str, Schema]:
        obj = read_artifact(self.artifacts / "locals.json")
        return {cid: Schema.from_json(s) for cid, s in obj["locals"].items()}

    def load_missing(self) -> dict[str, MissingSchema]:
        obj = read_artifact(self.artifacts / "missing.json")
        return {cid: MissingSchema.from_json(m) for cid, m in obj["missing"].items()}

    def load_model(self) -> UsefulnessModel:
        obj = read_artifact(self.artifacts / "usefulness.json")
        return UsefulnessModel.from_json(obj["model"])


pass_state = click.make_pass_decorator(_State)


def run_guarded(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except click.ClickException:
        raise
    except DATA_ERRORS as exc:
        click.echo(f"error: data: {exc}", err=True)
        sys.exit(EXIT_DATA)
    except ValueError as exc:
        click.echo(f"error: validation: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON config file; GAPQUEST_* env vars override its keys.")
@click.option("--artifacts", type=click.Path(), default="artifacts", show_default=True,
              help="Directory for pipeline artifacts.")
@click.option("--seed", type=int, default=None, help="Override the configured RNG seed.")
@click.pass_context
def main(ctx, config_path, artifacts, seed):
    """Missing-information schemas and clarification-question retrieval."""
    config = load_config(config_path)
    if seed is not None:
        config.seed = seed
    config.validate()
    ctx.obj = _State(config, Path(artifacts))


@main.command()
@click.option("--contexts", "contexts_path", type=click.Path(), default=None,
              help="JSON-lines context corpus (overrides config).")
@click.option("--embeddings", "embeddings_path", type=click.Path(), default=None,
              help="GloVe-format embedding file (overrides config).")
@pass_state
def ingest(state: _State, contexts_path, embeddings_path):
    """Validate and normalize the corpus into corpus.json."""
    if contexts_path:
        state.config.contexts = contexts_path
    if embeddings_path:
        state.config.embeddings = embeddings_path
    if not state.config.contexts:
        raise click.ClickException("no context corpus given (--contexts or config)")

    def work():
        contexts = load_contexts(Path(state.config.contexts))
        table = state.table
        with artifact_lock(state.artifacts):
            write_artifact(
                state.artifacts / "corpus.json",
                {
                    "contexts": [context_to_json(c) for c in contexts],
                    "embedding_dimension": table.dimension,
                    "embedding_words": len(table),
                },
                state.config.hash(),
            )
        click.echo(
            f"ingested {len(contexts)} contexts; embeddings: {len(table)} words x {table.dimension}d"
        )

    run_guarded(work)


@main.command("cluster-classes")
@click.option("--k", type=int, default=None, help="Fixed cluster count for dialog corpora.")
@click.option("--k-sweep", default=None, help="Elbow sweep range, e.g. 2..8.")
@click.option("--cap", type=int, default=None, help="Max products per hierarchy class.")
@pass_state
def cluster_classes(state: _State, k, k_sweep, cap):
    """Assign every context to a class (hierarchy split or k-means)."""
    cfg = state.config
    if k is not None:
        cfg.k = k
    if cap is not None:
        cfg.cap = cap
    if k_sweep is not None:
        lo, hi = k_sweep.split("..")
        cfg.k_sweep = list(range(int(lo), int(hi) + 1))

    def work():
        contexts = state.load_corpus()
        qa = [c for c in contexts if c.scenario == "communityQA"]
        dialogs = [c for c in contexts if c.scenario == "dialog"]
        assignment: dict[str, str] = {}
        fallback: list[str] = []
        if qa:
            ca = split_hierarchy_classes(qa, cap=cfg.cap, seed=cfg.seed)
            assignment.update(ca.assignment)
            fallback.extend(ca.kmeans_fallback)
        if dialogs:
            ca = cluster_dialog_classes(dialogs, k=cfg.k, seed=cfg.seed, k_sweep=cfg.k_sweep)
            assignment.update(ca.assignment)
        merged = ClassAssignment(assignment=assignment, kmeans_fallback=fallback)
        merged.validate(len(contexts))
        with artifact_lock(state.artifacts):
            write_artifact(state.artifacts / "classes.json", merged.to_json(), cfg.hash())
        click.echo(f"assigned {len(assignment)} contexts to {len(merged.classes())} classes")

    run_guarded(work)


@main.command("build-global")
@pass_state
def build_global(state: _State):
    """Local schemas for every context, then one global schema per class."""
    cfg = state.config

    def work():
        contexts = state.load_corpus()
        assignment = state.load_assignment()
        stopword_set = state.stopword_set()
        schemas, raw = local_schemas(
            contexts, top_k=cfg.top_k, stopwords=stopword_set, window=cfg.window
        )
        targets = {}
        for ctx in contexts:
            if ctx.split == "train":
                tgt = target_schema(ctx, top_k=cfg.top_k, stopwords=stopword_set,
                                    window=cfg.window)
                if tgt is not None:
                    targets[ctx.id] = tgt
        globals_ = build_class_globals(
            contexts,
            assignment.assignment,
            state.table,
            schemas,
            raw_counts=raw if cfg.raw_counts else None,
            theta=cfg.cluster_theta,
            retain=cfg.retain,
            target_schemas=targets,
        )
        with artifact_lock(state.artifacts):
            write_artifact(
                state.artifacts / "locals.json",
                {"locals": {cid: s.to_json() for cid, s in sorted(schemas.items())}},
                cfg.hash(),
            )
            for class_id, gs in globals_.items():
                write_artifact(
                    state.artifacts / "schemas" / class_file_name(class_id),
                    gs.to_json(),
                    cfg.hash(),
                )
        click.echo(f"built {len(globals_)} global schemas from {len(contexts)} local schemas")

    run_guarded(work)


@main.command()
@click.option("--context", "context_id", default=None,
              help="Only this context (default: every context).")
@pass_state
def missing(state: _State, context_id):
    """Missing schema per context: retained global clusters with no local match."""
    cfg = state.config

    def work():
        assignment = state.load_assignment()
        locals_ = state.load_locals()
        globals_ = state.load_globals()
        targets = sorted(locals_) if context_id is None else [context_id]
        if context_id is not None and context_id not in locals_:
            raise click.ClickException(f"unknown context {context_id!r}")
        out = {}
        for cid in targets:
            gs = globals_[assignment.class_of(cid)]
            out[cid] = missing_schema(gs, locals_[cid], state.table, cfg.match_theta).to_json()
        with artifact_lock(state.artifacts):
            write_artifact(state.artifacts / "missing.json", {"missing": out}, cfg.hash())
        total = sum(len(m["elements"]) for m in out.values())
        click.echo(f"missing schemas for {len(out)} contexts ({total} elements)")

    run_guarded(work)


@main.command("train-usefulness")
@click.option("--scores", "scores_path", type=click.Path(), default=None,
              help="JSON-lines of {question, score in [0,5]} human annotations.")
@click.option("--negative-sampling", is_flag=True,
              help="Label (context, target question) pairs 1 and cross-sampled pairs 0.")
@pass_state
def train_usefulness_cmd(state: _State, scores_path, negative_sampling):
    """Train the linear usefulness model over averaged question embeddings."""
    cfg = state.config
    if bool(scores_path) == negative_sampling:
        raise click.ClickException("pick exactly one of --scores / --negative-sampling")

    def work():
        if scores_path:
            rows = [
                json.loads(line)
                for line in Path(scores_path).read_text(encoding="utf-8").splitlines()
                if line.strip()
            ]
            data = binarize_scores(
                [(r["question"], float(r["score"])) for r in rows],
                threshold=cfg.usefulness_threshold,
            )
        else:
            contexts = state.load_corpus()
            pairs = [(c.id, c.target.text) for c in contexts if c.target]
            data = make_negative_samples(pairs, seed=cfg.seed)
        model = train_usefulness(
            data,
            state.table,
            TrainConfig(epochs=cfg.epochs, learning_rate=cfg.learning_rate,
                        l2=cfg.l2, seed=cfg.seed),
        )
        with artifact_lock(state.artifacts):
            write_artifact(
                state.artifacts / "usefulness.json",
                {"model": model.to_json(), "examples": len(data)},
                cfg.hash(),
            )
        click.echo(f"trained on {len(data)} labeled questions "
                   f"(final objective {model.loss_history[-1]:.4f})")

    run_guarded(work)


@main.command()
@click.option("--context", "context_id", required=True)
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--alpha", type=float, default=None,
              help="Overlap/usefulness blend; default from config (0.5).")
@click.option("--class-filter", is_flag=True, help="Search only the context's class.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write JSON-lines candidates here instead of stdout.")
@pass_state
def retrieve_cmd(state: _State, context_id, k, alpha, class_filter, out_path):
    """Retrieve train-split questions for a context's missing schema,
    re-ranked by usefulness when a trained model is available."""
    cfg = state.config
    if alpha is None:
        alpha = cfg.alpha

    def work():
        contexts = state.load_corpus()
        assignment = state.load_assignment()
        missing_map = state.load_missing()
        if context_id not in missing_map:
            raise click.ClickException(f"no missing schema for context {context_id!r}")
        pairs = [
            (assignment.class_of(c.id), c.target)
            for c in contexts
            if c.target and c.split == "train" and c.id != context_id
        ]
        if not pairs:
            raise click.ClickException("no train-split questions to index")
        index = build_index(pairs, top_k=cfg.top_k)
        candidates = retrieve(
            index,
            missing_map[context_id],
            state.table,
            k=k,
            match_theta=cfg.match_theta,
            class_filter=assignment.class_of(context_id) if class_filter else None,
        )
        model_path = state.artifacts / "usefulness.json"
        if model_path.exists():
            candidates = rerank_useful(candidates, state.load_model(), state.table, alpha=alpha)
        else:
            click.echo("note: no usefulness model found; returning raw overlap order", err=True)
        lines = [json.dumps(c.to_json(), sort_keys=True) for c in candidates]
        if out_path:
            Path(out_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
        else:
            for line in lines:
                click.echo(line)

    run_guarded(work)


@main.command()
@click.option("--outputs", "outputs_path", type=click.Path(), required=True,
              help="JSON-lines of {context_id, output}.")
@click.option("--refs", "refs_path", type=click.Path(), required=True,
              help="JSON-lines of {context_id, references: [...]}.")
@click.option("--missing", "use_missing", is_flag=True,
              help="Also score missing-information overlap from missing.json.")
@click.option("--report", "report_path", type=click.Path(), default=None,
              help="Report file (default: <artifacts>/report.json).")
@pass_state
def evaluate(state: _State, outputs_path, refs_path, use_missing, report_path):
    """Corpus metrics plus per-example records for the analysis stage."""
    cfg = state.config

    def work():
        outputs_rows = [
            json.loads(line)
            for line in Path(outputs_path).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        refs_map = {}
        for line in Path(refs_path).read_text(encoding="utf-8").splitlines():
            if line.strip():
                row = json.loads(line)
                refs_map[row["context_id"]] = row["references"]
        ids = [r["context_id"] for r in outputs_rows]
        outputs = [r["output"] for r in outputs_rows]
        missing_ids = [cid for cid in ids if cid not in refs_map]
        if missing_ids:
            raise CorpusError(f"no references for contexts: {missing_ids}")
        references = [refs_map[cid] for cid in ids]

        synonyms = None
        if cfg.synonyms:
            synonyms = load_synonym_pairs(Path(cfg.synonyms).read_text(encoding="utf-8"))

        per_example = [
            {
                "context_id": cid,
                "output": out,
                "bleu4_sentence": bleu4_sentence(out, refs),
                "meteor": meteor_lite([out], [refs], synonyms=synonyms),
            }
            for cid, out, refs in zip(ids, outputs, references)
        ]
        report = {
            "bleu4": bleu4(outputs, references),
            "meteor": meteor_lite(outputs, references, synonyms=synonyms),
            "distinct2": distinct2(outputs),
            "per_example": per_example,
        }
        if use_missing:
            missing_map = state.load_missing()
            table = state.table
            ratios = []
            for record, cid, out in zip(per_example, ids, outputs):
                if cid not in missing_map:
                    raise CorpusError(f"no missing schema for context {cid!r}")
                ratio = question_overlap_ratio(out, missing_map[cid], table, cfg.match_theta)
                record["missinfo_overlap"] = None if ratio is None else 100.0 * ratio
                if ratio is not None:
                    ratios.append(ratio)
            if not ratios:
                raise CorpusError("no output produced any keyphrase")
            report["missinfo_overlap"] = 100.0 * sum(ratios) / len(ratios)
            report["missinfo_skipped"] = len(outputs) - len(ratios)

        target = Path(report_path) if report_path else state.artifacts / "report.json"
        with artifact_lock(state.artifacts):
            write_artifact(target, report, cfg.hash())
        shown = {k: v for k, v in report.items() if isinstance(v, float)}
        click.echo(json.dumps(shown, sort_keys=True))

    run_guarded(work)


@main.command()
@click.option("--report", "report_path", type=click.Path(), default=None,
              help="Evaluation report to analyze (default: <artifacts>/report.json).")
@click.option("--length-threshold", type=float, default=None,
              help="Context-length split point (default: median).")
@click.option("--size-threshold", type=float, default=None,
              help="Global-schema-size split point (default: median).")
@pass_state
def analyze(state: _State, report_path, length_threshold, size_threshold):
    """Robustness partitions and question-length statistics."""
    cfg = state.config

    def work():
        report = read_artifact(Path(report_path) if report_path else state.artifacts / "report.json")
        contexts = {c.id: c for c in state.load_corpus()}
        assignment = state.load_assignment()
        globals_ = state.load_globals()
        records = report["per_example"]
        scored = [r for r in records if r["context_id"] in contexts]
        if len(scored) != len(records):
            raise CorpusError("report contains contexts missing from the corpus")
        ctx_list = [contexts[r["context_id"]] for r in records]
        robustness = robustness_report(
            [r["bleu4_sentence"] for r in records],
            ctx_list,
            globals_,
            assignment=assignment.assignment,
            length_threshold=length_threshold,
            size_threshold=size_threshold,
        )
        analysis = {
            "robustness": robustness,
            "length_stats": length_stats([r["output"] for r in records]),
        }
        with artifact_lock(state.artifacts):
            write_artifact(state.artifacts / "analysis.json", analysis, cfg.hash())
        click.echo(json.dumps(
            {
                "length_diff": robustness["by_context_length"]["diff"],
                "schema_size_diff": robustness["by_global_schema_size"]["diff"],
            },
            sort_keys=True,
        ))

    run_guarded(work)


@main.command("extend-global")
@click.option("--class-id", required=True, help="Class whose global schema to extend.")
@click.option("--new-contexts", "new_path", type=click.Path(), required=True,
              help="JSON-lines corpus of additional same-class contexts.")
@pass_state
def extend_global_cmd(state: _State, class_id, new_path):
    """Fold new contexts into an existing global schema in place; the
    missing stage picks the change up with no retraining."""
    cfg = state.config

    def work():
        schema_path = state.artifacts / "schemas" / class_file_name(class_id)
        if not schema_path.exists():
            raise click.ClickException(f"no global schema for class {class_id!r}")
        gs = GlobalSchema.from_json(json.loads(schema_path.read_text(encoding="utf-8")))
        new_contexts = load_contexts(Path(new_path))
        schemas, raw = local_schemas(
            new_contexts, top_k=cfg.top_k, stopwords=state.stopword_set(), window=cfg.window
        )
        counts = None
        if cfg.raw_counts:
            merged = {}
            for counter in raw.values():
                for el, n in counter.items():
                    merged[el] = merged.get(el, 0) + n
            counts = merged
        extended = extend_global(
            gs, list(schemas.values()), state.table, class_id=class_id, counts=counts
        )
        with artifact_lock(state.artifacts):
            write_artifact(schema_path, extended.to_json(), cfg.hash())
        click.echo(
            f"extended {class_id!r}: {len(gs.clusters)} -> {len(extended.clusters)} clusters "
            f"({extended.retained_count()} retained)"
        )

    run_guarded(work)


if __name__ == "__main__":
    main()
