"""HTTP prediction service over a trained bundle.

Small JSON API consumed by the web form and by scripted clients: schema
out, prediction in, health for probes.  The app factory takes an already
loaded bundle (or none, in which case prediction endpoints answer 503)
so tests can run it in-process.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__
from .bundle import BundleInputError, ModelBundle


def create_app(bundle: ModelBundle | None = None) -> FastAPI:
    app = FastAPI(title="imbapipe detection service", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.bundle = bundle

    def no_bundle() -> JSONResponse:
        return JSONResponse(
            status_code=503,
            content={"error": "no model bundle loaded", "missing": []},
        )

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "bundle_loaded": app.state.bundle is not None,
            "version": __version__,
        }

    @app.get("/api/schema")
    def schema():
        loaded: ModelBundle | None = app.state.bundle
        if loaded is None:
            return no_bundle()
        return {
            "features": list(loaded.feature_names),
            "positive_label": loaded.positive_label,
            "pipeline": loaded.pipeline_id,
        }

    @app.post("/api/predict")
    async def predict(request: Request):
        loaded: ModelBundle | None = app.state.bundle
        if loaded is None:
            return no_bundle()
        try:
            body = await request.json()
        except Exception:
            return JSONResponse(
                status_code=400,
                content={"error": "request body is not valid JSON", "missing": []},
            )
        if not isinstance(body, dict) or not isinstance(body.get("features"), dict):
            return JSONResponse(
                status_code=400,
                content={
                    "error": 'request body must be {"features": {name: value, ...}}',
                    "missing": [],
                },
            )
        try:
            label, score = loaded.predict_row(body["features"])
        except BundleInputError as exc:
            return JSONResponse(
                status_code=400,
                content={
                    "error": str(exc),
                    "missing": exc.missing + exc.unknown + exc.non_finite,
                },
            )
        return {"label": label, "score": score, "pipeline": loaded.pipeline_id}

    return app
