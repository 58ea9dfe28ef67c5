"""HTTP service: benchmark runs, variant comparison, preset inspection,
and long-lived streaming detector sessions.

Sessions live in process memory; one detector per stream, fed in
timestamp order via POST /detectors/{id}/step. Benchmark runs execute
synchronously inside the request on the server host.
"""

from __future__ import annotations

import dataclasses
import threading
import uuid

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import presets, runner
from ..errors import ConfigError, ContractError, NumericOverflowError, ParseError
from ..repad import RepadDetector
from ..salad import SaladDetector
from . import schemas


class SessionNotFound(Exception):
    pass


class DetectorSession:
    """One streaming detector plus the metadata the API reports."""

    def __init__(self, detector_id: str, algorithm: str, flat_config: dict, detector):
        self.detector_id = detector_id
        self.algorithm = algorithm
        self.flat_config = flat_config
        self.detector = detector
        self.anomalies = 0
        self.lock = threading.Lock()

    @property
    def points_seen(self) -> int:
        return self.detector.points_seen

    @property
    def trainings(self) -> int:
        if isinstance(self.detector, SaladDetector):
            return self.detector.conversion_train_count + self.detector.inner.retrain_count
        return self.detector.retrain_count

    def info(self) -> schemas.DetectorInfo:
        return schemas.DetectorInfo(
            detector_id=self.detector_id,
            algorithm=self.algorithm,
            config=self.flat_config,
            points_seen=self.points_seen,
            trainings=self.trainings,
            anomalies=self.anomalies,
        )


def _build_detector(algorithm: str, flat: dict):
    if algorithm == presets.REPAD:
        return RepadDetector(presets.detector_config_from(flat))
    return SaladDetector(presets.salad_config_from(flat))


def create_app() -> FastAPI:
    app = FastAPI(title="ladkit", version="0.1.0")
    sessions: dict[str, DetectorSession] = {}
    registry_lock = threading.Lock()

    @app.exception_handler(ConfigError)
    async def _config_error(request: Request, exc: ConfigError):
        return JSONResponse(status_code=400, content={"kind": "config", "message": str(exc)})

    @app.exception_handler(ParseError)
    async def _parse_error(request: Request, exc: ParseError):
        return JSONResponse(status_code=400, content={"kind": "data", "message": str(exc)})

    @app.exception_handler(ContractError)
    async def _contract_error(request: Request, exc: ContractError):
        return JSONResponse(status_code=400, content={"kind": "data", "message": str(exc)})

    @app.exception_handler(FileNotFoundError)
    async def _missing_file(request: Request, exc: FileNotFoundError):
        return JSONResponse(status_code=404, content={"kind": "io", "message": str(exc)})

    @app.exception_handler(OSError)
    async def _os_error(request: Request, exc: OSError):
        return JSONResponse(status_code=400, content={"kind": "io", "message": str(exc)})

    @app.exception_handler(NumericOverflowError)
    async def _overflow(request: Request, exc: NumericOverflowError):
        return JSONResponse(status_code=500, content={"kind": "overflow", "message": str(exc)})

    @app.exception_handler(SessionNotFound)
    async def _not_found(request: Request, exc: SessionNotFound):
        return JSONResponse(status_code=404, content={"kind": "not_found", "message": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "version": app.version}

    @app.get("/presets", response_model=schemas.PresetsResponse)
    def list_presets():
        return schemas.PresetsResponse(
            presets={name: presets.expand_preset(name) for name in sorted(presets.PRESETS)}
        )

    @app.post("/runs", response_model=schemas.RunResponse)
    def execute_run(req: schemas.RunRequest):
        result = runner.run(runner.RunSpec(
            algorithm=req.algorithm,
            input_path=req.input_path,
            labels_path=req.labels_path,
            preset=req.preset,
            overrides=req.overrides,
            duplicate_n=req.duplicate_n,
            k=req.k,
            seed=req.seed,
            out_dir=req.out_dir,
            name=req.name,
        ))
        return schemas.RunResponse(name=result.name, report=result.report_doc, files=result.files)

    @app.post("/compare", response_model=schemas.CompareResponse)
    def execute_compare(req: schemas.CompareRequest):
        spec_list = []
        for variant in req.variants:
            merged = dict(req.overrides)
            merged.update(variant.overrides)
            spec_list.append(runner.RunSpec(
                algorithm=req.algorithm,
                input_path=req.input_path,
                labels_path=req.labels_path,
                preset=req.preset,
                overrides=merged,
                duplicate_n=req.duplicate_n,
                k=req.k,
                seed=req.seed,
                name=variant.name,
            ))
        rows, table, files = runner.compare(spec_list, out_dir=req.out_dir)
        return schemas.CompareResponse(rows=rows, table=table, files=files)

    @app.post("/detectors", response_model=schemas.DetectorInfo, status_code=201)
    def create_detector(req: schemas.CreateDetectorRequest):
        flat = presets.effective_flat(req.algorithm, req.preset, req.overrides, seed=req.seed)
        detector = _build_detector(req.algorithm, flat)
        session = DetectorSession(uuid.uuid4().hex, req.algorithm, flat, detector)
        with registry_lock:
            sessions[session.detector_id] = session
        return session.info()

    def _get(detector_id: str) -> DetectorSession:
        with registry_lock:
            session = sessions.get(detector_id)
        if session is None:
            raise SessionNotFound(f"no detector {detector_id}")
        return session

    @app.get("/detectors", response_model=list[schemas.DetectorInfo])
    def list_detectors():
        with registry_lock:
            return [s.info() for s in sessions.values()]

    @app.get("/detectors/{detector_id}", response_model=schemas.DetectorInfo)
    def detector_info(detector_id: str):
        return _get(detector_id).info()

    @app.post("/detectors/{detector_id}/step", response_model=schemas.StepResponse)
    def step_detector(detector_id: str, req: schemas.StepRequest):
        session = _get(detector_id)
        verdicts = []
        with session.lock:
            for point in req.points:
                verdict = session.detector.step(point.timestamp, point.value)
                if session.algorithm == presets.SALAD:
                    flagged = verdict.inner_verdict is not None and verdict.inner_verdict.is_anomaly
                else:
                    flagged = verdict.is_anomaly
                if flagged:
                    session.anomalies += 1
                verdicts.append(dataclasses.asdict(verdict))
        return schemas.StepResponse(detector_id=detector_id, verdicts=verdicts)

    @app.delete("/detectors/{detector_id}")
    def delete_detector(detector_id: str):
        with registry_lock:
            if detector_id not in sessions:
                raise SessionNotFound(f"no detector {detector_id}")
            del sessions[detector_id]
        return {"deleted": detector_id}

    return app


app = create_app()
