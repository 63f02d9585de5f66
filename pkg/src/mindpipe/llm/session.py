"""Backend session: template rendering, caching, call logging, one-shot re-ask."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable

from ..errors import ResponseFormatError, TemplateError
from .cache import ResponseCache
from .completion import CompletionRequest
from .templates import PromptTemplate, render

REASK_REMINDER = "\n\nReminder: respond exactly in the required output format."


@dataclass
class CallRecord:
    """One completion request as issued by the pipeline (hit or miss)."""

    seq: int
    template: str
    tags: dict[str, str]
    cache_hit: bool
    reask: bool
    model: str
    temperature: float
    max_tokens: int
    top_p: float
    stop: list[str] | None
    messages: list[dict[str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "template": self.template,
            "tags": self.tags,
            "cache_hit": self.cache_hit,
            "reask": self.reask,
            "model": self.model,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
            "top_p": self.top_p,
            "stop": self.stop,
        }


class LlmSession:
    """Shared entry point for every completion the pipeline makes.

    Thread-safe; per-entry work may call concurrently. Each logical
    request is logged exactly once, whether served from cache or not.
    """

    def __init__(
        self,
        backend,
        templates: dict[str, PromptTemplate],
        model: str,
        cache: ResponseCache | None = None,
    ):
        self.backend = backend
        self.templates = templates
        self.model = model
        self.cache = cache
        self.records: list[CallRecord] = []
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()

    def ask(
        self,
        template_name: str,
        bindings: dict[str, str],
        *,
        tags: dict[str, str],
        reask: bool = False,
    ) -> str:
        """Render, consult the cache, call the backend on a miss, log the call."""
        try:
            template = self.templates[template_name]
        except KeyError:
            raise TemplateError(f"unknown template: {template_name}") from None
        messages = render(template, bindings)
        if reask:
            messages[-1] = {
                "role": "user",
                "content": messages[-1]["content"] + REASK_REMINDER,
            }
        request = CompletionRequest(model=self.model, messages=messages)
        key = request.cache_key()

        text: str | None = None
        if self.cache is not None:
            text = self.cache.get(key)
        hit = text is not None
        if not hit:
            result = self.backend.complete(request)
            text = result.text
            if self.cache is not None:
                user = request.user_content()
                self.cache.put(
                    key,
                    {"model": self.model, "template": template_name, "user_preview": user[:80]},
                    text,
                )
        with self._lock:
            if hit:
                self.hits += 1
            else:
                self.misses += 1
            self.records.append(
                CallRecord(
                    seq=len(self.records) + 1,
                    template=template_name,
                    tags=dict(tags),
                    cache_hit=hit,
                    reask=reask,
                    model=request.model,
                    temperature=request.temperature,
                    max_tokens=request.max_tokens,
                    top_p=request.top_p,
                    stop=request.stop,
                    messages=messages,
                )
            )
        assert text is not None
        return text

    def ask_parsed(
        self,
        template_name: str,
        bindings: dict[str, str],
        parser: Callable[[str], object],
        *,
        tags: dict[str, str],
    ):
        """Ask once, re-ask once with a format reminder, then report failure.

        Returns (parsed value, None) on success or (None, failure detail).
        """
        response = self.ask(template_name, bindings, tags=tags)
        try:
            return parser(response), None
        except ResponseFormatError:
            pass
        response = self.ask(template_name, bindings, tags=tags, reask=True)
        try:
            return parser(response), None
        except ResponseFormatError as exc:
            return None, str(exc)
