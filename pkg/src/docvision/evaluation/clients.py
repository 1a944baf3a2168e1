"""
Inference clients used by the evaluation runner.

- HTTPInferenceClient talks to a chat-style endpoint:
  POST <endpoint> {model, messages} -> {content}
- ReplayClient answers from a directory of recorded responses, offline.
"""

from __future__ import annotations

import base64
import os
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import requests

from .models import EvalSetError, InferenceError

ENDPOINT_ENV = "DOCVISION_ENDPOINT"
TOKEN_ENV = "DOCVISION_API_TOKEN"
MODEL_ENV = "DOCVISION_MODEL"
DEFAULT_MODEL = "docvision"


class InferenceClient(ABC):
    """Turns a prompt plus images into the model's raw text answer."""

    @abstractmethod
    def send(self, prompt: str, images: Sequence[str], *, sample_id: Optional[str] = None) -> str:
        """
        Raises:
            InferenceError: If no answer can be produced for this sample
        """
        raise NotImplementedError

    def close(self) -> None:
        pass

    def __enter__(self) -> "InferenceClient":
        return self

    def __exit__(self, *exc: Any) -> None:
        self.close()


class HTTPInferenceClient(InferenceClient):
    def __init__(
        self,
        endpoint: Optional[str] = None,
        model: Optional[str] = None,
        api_token: Optional[str] = None,
        request_timeout_s: float = 60.0,
        default_headers: Optional[Dict[str, str]] = None,
    ):
        endpoint = endpoint or os.environ.get(ENDPOINT_ENV)
        if not endpoint:
            raise EvalSetError(f"no inference endpoint given and {ENDPOINT_ENV} is not set")
        self._endpoint = endpoint.rstrip("/")
        self._model = model or os.environ.get(MODEL_ENV) or DEFAULT_MODEL
        self._timeout = float(request_timeout_s)
        self._http = requests.Session()
        self._headers = dict(default_headers or {})
        token = api_token or os.environ.get(TOKEN_ENV)
        if token:
            self._headers["Authorization"] = f"Bearer {token}"

    @property
    def endpoint(self) -> str:
        return self._endpoint

    @property
    def model(self) -> str:
        return self._model

    def _payload(self, prompt: str, images: Sequence[str]) -> Dict[str, Any]:
        content: List[Dict[str, str]] = []
        for image in images:
            try:
                data = Path(image).read_bytes()
            except OSError as e:
                raise InferenceError(f"cannot read image {image}: {e}") from e
            content.append({"type": "image", "data": base64.b64encode(data).decode("ascii")})
        content.append({"type": "text", "data": prompt})
        return {"model": self._model, "messages": [{"role": "user", "content": content}]}

    def send(self, prompt: str, images: Sequence[str], *, sample_id: Optional[str] = None) -> str:
        body = self._payload(prompt, images)
        try:
            r = self._http.post(
                self._endpoint,
                json=body,
                headers=self._headers,
                timeout=self._timeout,
            )
            r.raise_for_status()
            payload = r.json()
        except (requests.RequestException, ValueError) as e:
            raise InferenceError(f"request for {sample_id or 'sample'} failed: {e}") from e
        content = payload.get("content") if isinstance(payload, dict) else None
        if not isinstance(content, str):
            raise InferenceError(f"response for {sample_id or 'sample'} has no text 'content'")
        return content

    def close(self) -> None:
        self._http.close()


class ReplayClient(InferenceClient):
    """Serves ``<fixtures_dir>/<sample_id>.txt`` as the model answer."""

    def __init__(self, fixtures_dir: str | Path):
        self._root = Path(fixtures_dir)
        if not self._root.is_dir():
            raise EvalSetError(f"replay fixtures directory not found: {self._root}")

    def send(self, prompt: str, images: Sequence[str], *, sample_id: Optional[str] = None) -> str:
        if sample_id is None:
            raise InferenceError("replay client needs a sample id")
        path = self._root / f"{sample_id}.txt"
        if not path.is_file():
            raise InferenceError(f"no recorded response for {sample_id} in {self._root}")
        try:
            return path.read_text(encoding="utf-8")
        except UnicodeDecodeError as e:
            raise EvalSetError(f"replay fixture {path} is not valid UTF-8") from e
