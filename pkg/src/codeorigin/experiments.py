"""Dataset x configuration experiment grids."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Union

from .classifier import Hyperparams, predict_batch, train
from .corpus import Corpus, DatasetSplit, split
from .errors import CodeOriginError
from .extractor import ClassRename, PreprocessConfig, RenameMap, counterpart_rename_map, preset
from .metrics import EvalReport, evaluate

logger = logging.getLogger(__name__)

CorpusSource = Union[Corpus, Callable[[], Corpus]]


@dataclass
class CellResult:
    dataset: str
    config: str
    report: Optional[EvalReport] = None
    error: Optional[str] = None
    predictions: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self) -> dict:
        d = {"dataset": self.dataset, "config": self.config, "error": self.error}
        if self.report is not None:
            d["report"] = self.report.to_dict()
        return d


def _resolve_config(config: Union[str, PreprocessConfig], prefixes: Sequence[str]) -> PreprocessConfig:
    if isinstance(config, PreprocessConfig):
        return config.with_prefixes(prefixes) if prefixes else config
    return preset(config, prefixes)


def rename_map_for(
    corpus: Corpus, config: PreprocessConfig, human_chosen: Optional[RenameMap] = None
) -> Optional[RenameMap]:
    """The rename map a configuration needs: derived from the corpus or supplied by the user."""
    if config.class_rename is ClassRename.COUNTERPART_NAME:
        return counterpart_rename_map(corpus.snippets)
    if config.class_rename is ClassRename.HUMAN_CHOSEN_NAME:
        return human_chosen
    return None


def run_cell(
    dataset: str,
    corpus: Corpus,
    data_split: DatasetSplit,
    config: PreprocessConfig,
    backend: str,
    hyperparams: Optional[Hyperparams] = None,
    human_chosen: Optional[RenameMap] = None,
    checkpoint: Optional[str] = None,
) -> CellResult:
    # unpaired snippets have nothing to be renamed after
    strict = corpus.provenance.is_paired
    rename_map = rename_map_for(corpus, config, human_chosen)
    model = train(backend, data_split, corpus, config, hyperparams, rename_map, strict, checkpoint)
    test = corpus.subset(data_split.test)
    preds = predict_batch(model, test, config, rename_map, strict_rename=strict)
    hp = model.hyperparams
    report = evaluate(
        [s.origin for s in test],
        [p.label for p in preds],
        dataset=dataset,
        config=config.name,
        backend=backend,
        seed=hp.seed,
        split_seed=data_split.seed,
    )
    return CellResult(dataset, config.name, report, None, [p.to_dict() for p in preds])


def run_experiment_grid(
    corpora: Mapping[str, CorpusSource],
    configs: Sequence[Union[str, PreprocessConfig]],
    backend: str = "linear",
    hyperparams: Optional[Hyperparams] = None,
    ratios=(80, 10, 10),
    seed: int = 42,
    rename_maps: Optional[Mapping[str, RenameMap]] = None,
    project_prefixes: Sequence[str] = (),
    jobs: int = 1,
    checkpoint: Optional[str] = None,
) -> List[CellResult]:
    """Train and test one model per (dataset, configuration) cell.

    Every configuration of a dataset shares one split. A failing cell (or a
    dataset that cannot be loaded) is reported as an error on the affected
    cells only. Results come back in declaration order whatever ``jobs`` is.
    """
    rename_maps = rename_maps or {}
    plans = []  # (dataset, corpus, split, config) or (dataset, config_name, error)
    for name, source in corpora.items():
        try:
            corpus = source() if callable(source) else source
            data_split = split(corpus, ratios, seed)
        except (CodeOriginError, OSError, ValueError) as exc:
            logger.error("dataset %s unavailable: %s", name, exc)
            for c in configs:
                cname = c.name if isinstance(c, PreprocessConfig) else str(c)
                plans.append((name, cname, f"{type(exc).__name__}: {exc}"))
            continue
        for c in configs:
            plans.append((name, corpus, data_split, c))

    def run(plan) -> CellResult:
        if len(plan) == 3:
            return CellResult(plan[0], plan[1], error=plan[2])
        name, corpus, data_split, c = plan
        cname = c.name if isinstance(c, PreprocessConfig) else str(c)
        try:
            config = _resolve_config(c, project_prefixes)
            result = run_cell(name, corpus, data_split, config, backend, hyperparams, rename_maps.get(name), checkpoint)
        except (CodeOriginError, ValueError) as exc:
            logger.error("cell %s/%s failed: %s", name, cname, exc)
            return CellResult(name, cname, error=f"{type(exc).__name__}: {exc}")
        logger.info("cell %s/%s accuracy %.4f", name, cname, result.report.accuracy)
        return result

    if jobs > 1 and len(plans) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run, plans))
    return [run(p) for p in plans]
