"""HTTP annotation service.

Serves candidate pairs to experts, records verdicts durably, reports
inter-annotator agreement, and exports the agreed ground truth in the
classifier import format. Errors return conventional 4xx statuses with a
machine-readable reason code in the body.
"""

from __future__ import annotations

import io

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from .annotation import VERDICTS, JudgmentStore, TaskSet, canonical_pair, next_task
from .corpus import Corpus, Recipe
from .ml import write_ground_truth


class JudgmentIn(BaseModel):
    expert: str
    main_id: str
    secondary_id: str
    verdict: str


def _error(status: int, code: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": code, "detail": detail})


def _recipe_card(recipe: Recipe) -> dict:
    return {
        "id": recipe.id,
        "title": recipe.title,
        "ingredients": [
            {"descriptor": ing.descriptor, "path": list(ing.descriptor_path)}
            for ing in recipe.ingredients
        ],
        "instructions": list(recipe.instructions),
    }


def create_app(
    corpus: Corpus,
    task_set: TaskSet,
    store: JudgmentStore,
    reveal_scores: bool = False,
    roster: list[str] | None = None,
    ui_dir: str | None = None,
) -> FastAPI:
    """Wire the annotation endpoints around one task set and store.

    With a roster, judgments from unlisted experts are refused; otherwise
    experts self-register by showing up. When ui_dir is given, the built
    frontend is served from the root path.
    """
    app = FastAPI(title="recipesim annotation service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    pair_index = {pair: i for i, pair in enumerate(task_set.pairs)}

    def check_expert(expert: str) -> JSONResponse | None:
        if not expert:
            return _error(422, "missing_expert", "expert id must be non-empty")
        if roster is not None and expert not in roster:
            return _error(403, "unknown_expert", f"expert {expert!r} is not on the roster")
        return None

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "pairs": len(task_set), "recipes": len(corpus)}

    @app.get("/api/tasks/next")
    def tasks_next(expert: str = ""):
        refusal = check_expert(expert)
        if refusal is not None:
            return refusal
        judged = store.judged_count(expert)
        pair = next_task(task_set, store, expert)
        if pair is None:
            return {"status": "done", "judged": judged, "total": len(task_set)}
        main_id, secondary_id = pair
        payload = {
            "status": "pair",
            "position": pair_index[pair] + 1,
            "total": len(task_set),
            "judged": judged,
            "main": _recipe_card(corpus[main_id]),
            "secondary": _recipe_card(corpus[secondary_id]),
        }
        if reveal_scores and pair in task_set.fused_scores:
            payload["fused"] = task_set.fused_scores[pair]
        return payload

    @app.post("/api/judgments")
    def submit_judgment(judgment: JudgmentIn):
        refusal = check_expert(judgment.expert)
        if refusal is not None:
            return refusal
        if judgment.verdict not in VERDICTS:
            return _error(422, "invalid_verdict", f"verdict must be one of {list(VERDICTS)}")
        try:
            pair = canonical_pair(judgment.main_id, judgment.secondary_id)
        except ValueError as exc:
            return _error(422, "invalid_pair", str(exc))
        if pair not in pair_index:
            return _error(422, "pair_not_in_task_set", f"pair {pair} is not assigned")
        judged = store.submit(judgment.expert, *pair, judgment.verdict)
        return {"status": "ok", "judged": judged, "total": len(task_set)}

    @app.get("/api/stats/agreement")
    def agreement():
        try:
            stats = store.agreement_stats()
        except ValueError as exc:
            return _error(409, "insufficient_experts", str(exc))
        return {
            "total_pairs_judged_by_all": stats.total_pairs_judged_by_all,
            "agreed_count": stats.agreed_count,
            "agreement_pct": stats.agreement_pct,
        }

    @app.get("/api/export/ground-truth")
    def export_ground_truth():
        buffer = io.StringIO()
        write_ground_truth(store.agreed_pairs(), buffer)
        return PlainTextResponse(buffer.getvalue(), media_type="text/csv")

    @app.get("/api/recipes/{recipe_id}")
    def get_recipe(recipe_id: str):
        if recipe_id not in corpus:
            return _error(404, "unknown_recipe", f"no recipe with id {recipe_id!r}")
        return _recipe_card(corpus[recipe_id])

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app
