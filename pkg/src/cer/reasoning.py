"""Reasoning prompts, LLM providers, response caching, output parsing.

The prompt has three fixed sections. The instruction block lives in
<<SYS>>; the retrieved sentences, together with the clause that
introduces them, live in <<Context>>; the claim lives in <<Question>>.
Ablation variants each rewrite exactly one section, which is what the
sectioned-diff test in the suite checks.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import time
from dataclasses import dataclass

import requests

from .errors import ConfigError, ProviderError

log = logging.getLogger(__name__)

LLM_ENDPOINT_VAR = "CER_LLM_ENDPOINT"
LLM_API_KEY_VAR = "CER_LLM_API_KEY"

VARIANTS = ("full", "no_role", "no_evidence", "no_justification")

ROLE_SENTENCE = "You are a helpful, respectful, and honest Doctor."
_SYS_COMMON = (
    "Always answer as helpfully as possible using the context text provided. "
    "Use only the knowledge in the results to answer. "
    "Be formal and use the third person."
)
JUSTIFICATION_INSTRUCTION = (
    "Provide a maximum 200-word response without directly mentioning the "
    "Context. Use it but don't refer to it in your answer."
)
LABEL_ONLY_INSTRUCTION = "Respond with only the label."
LABEL_FORMAT_SENTENCE = (
    'Begin with: "Label:" followed by the justification label '
    '("Yes", "No", or "NEI").'
)
EVIDENCE_LEAD_IN = (
    "Try to give an explanation based on the scientific evidence as follows:"
)
EVIDENCE_TAIL = "Elaborate the scientific evidence to generate new information."
QUESTION_LEAD_IN = "The claim is as follows:"

DEFAULT_CHAR_BUDGET = 24000


@dataclass(frozen=True)
class PromptSpec:
    sys_section: str
    context_section: str
    question_section: str
    variant: str

    def render(self) -> str:
        return (
            f"<<SYS>>\n{self.sys_section}\n\n"
            f"<<Context>>\n{self.context_section}\n\n"
            f"<<Question>>\n{self.question_section}\n"
        )


@dataclass(frozen=True)
class ReasoningOutput:
    llm_label: str
    justification: str
    parse_ok: bool
    raw: str


def _sys_section(variant: str) -> str:
    parts = []
    if variant != "no_role":
        parts.append(ROLE_SENTENCE)
    parts.append(_SYS_COMMON)
    if variant == "no_justification":
        parts.append(LABEL_ONLY_INSTRUCTION)
    else:
        parts.append(JUSTIFICATION_INSTRUCTION)
    parts.append(LABEL_FORMAT_SENTENCE)
    return " ".join(parts)


def _context_section(sentences: list[str]) -> str:
    return "\n".join([EVIDENCE_LEAD_IN, *sentences, EVIDENCE_TAIL])


def build_prompt(
    claim: str,
    context_sentences,
    variant: str = "full",
    char_budget: int = DEFAULT_CHAR_BUDGET,
) -> PromptSpec:
    """Assemble the three-section prompt for one claim.

    When the rendered prompt exceeds char_budget, context sentences are
    dropped from the lowest rank (the end of the list) upward until it
    fits; the instruction sections are never shortened.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown prompt variant {variant!r}, expected one of {VARIANTS}")
    sentences = [] if variant == "no_evidence" else list(context_sentences)
    question = f"{QUESTION_LEAD_IN} {claim}"
    sys_section = _sys_section(variant)

    def make(sents: list[str]) -> PromptSpec:
        context = "" if variant == "no_evidence" else _context_section(sents)
        return PromptSpec(sys_section, context, question, variant)

    spec = make(sentences)
    while sentences and len(spec.render()) > char_budget:
        sentences.pop()
        spec = make(sentences)
    return spec


def parse_sections(rendered: str) -> dict[str, str]:
    """Split a rendered prompt back into its named sections."""
    m = re.fullmatch(
        r"<<SYS>>\n(.*)\n\n<<Context>>\n(.*)\n\n<<Question>>\n(.*)\n",
        rendered,
        re.DOTALL,
    )
    if m is None:
        raise ValueError("text is not a rendered three-section prompt")
    return {"sys": m.group(1), "context": m.group(2), "question": m.group(3)}


_LABEL_MAP = {"yes": "Supported", "no": "Refuted", "nei": "NEI"}
_LABEL_RE = re.compile(
    r"^[\s*_#>`'\"-]*label[\s*_`]*:[\s*_`]*(yes|no|nei)\b[*_`]*[.,!:;]?",
    re.IGNORECASE,
)


def parse_reasoning(raw: str) -> ReasoningOutput:
    """Extract the leading label and the justification that follows.

    Never raises: anything without a parseable leading label comes back
    as NEI with parse_ok=False and the raw text kept as justification.
    """
    if not isinstance(raw, str):
        raw = str(raw)
    m = _LABEL_RE.match(raw)
    if m is None:
        return ReasoningOutput("NEI", raw, parse_ok=False, raw=raw)
    label = _LABEL_MAP[m.group(1).lower()]
    justification = raw[m.end() :].strip()
    return ReasoningOutput(label, justification, parse_ok=True, raw=raw)


def prompt_hash(rendered_prompt: str, provider_tag: str = "") -> str:
    digest = hashlib.sha256()
    digest.update(rendered_prompt.encode("utf-8"))
    if provider_tag:
        digest.update(b"\x00")
        digest.update(provider_tag.encode("utf-8"))
    return digest.hexdigest()


class LLMProvider:
    """Turns a rendered prompt into raw completion text."""

    tag: str = "base"

    def complete(self, rendered_prompt: str) -> str:
        raise NotImplementedError


class HTTPLLMProvider(LLMProvider):
    """POST {"prompt", "temperature", "max_tokens"} -> {"text"}.

    Endpoint and key default to CER_LLM_ENDPOINT / CER_LLM_API_KEY.
    Raises ProviderError with retryable set for 429/5xx/transport
    failures; other 4xx responses carry a body excerpt and do not retry.
    """

    def __init__(
        self,
        endpoint: str | None = None,
        api_key: str | None = None,
        tag: str | None = None,
        temperature: float = 0.0,
        max_tokens: int = 512,
        timeout: float = 120.0,
    ):
        endpoint = endpoint or os.environ.get(LLM_ENDPOINT_VAR)
        if not endpoint:
            raise ConfigError(f"no LLM endpoint: pass one or set {LLM_ENDPOINT_VAR}")
        self.endpoint = endpoint
        self.api_key = api_key if api_key is not None else os.environ.get(LLM_API_KEY_VAR)
        self.tag = tag or endpoint
        self.temperature = temperature
        self.max_tokens = max_tokens
        self.timeout = timeout

    def complete(self, rendered_prompt: str) -> str:
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = requests.post(
                self.endpoint,
                json={
                    "prompt": rendered_prompt,
                    "temperature": self.temperature,
                    "max_tokens": self.max_tokens,
                },
                headers=headers,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise ProviderError(f"LLM endpoint unreachable: {exc}", retryable=True) from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            raise ProviderError(
                f"LLM endpoint returned {resp.status_code}",
                status=resp.status_code,
                retryable=True,
            )
        if resp.status_code != 200:
            raise ProviderError(
                f"LLM endpoint returned {resp.status_code}: {resp.text[:200]}",
                status=resp.status_code,
            )
        payload = resp.json()
        if "text" not in payload:
            raise ProviderError("LLM response payload has no 'text' field")
        return str(payload["text"])


class FixtureLLMProvider(LLMProvider):
    """Replays canned completions from a JSON file mapping
    sha256(rendered prompt) -> response text."""

    tag = "fixtures"

    def __init__(self, path):
        with open(path, encoding="utf-8") as handle:
            table = json.load(handle)
        if not isinstance(table, dict):
            raise ConfigError(f"{path}: fixtures file must hold a JSON object")
        self._table = {str(k): str(v) for k, v in table.items()}

    def complete(self, rendered_prompt: str) -> str:
        key = prompt_hash(rendered_prompt)
        if key not in self._table:
            raise ProviderError(f"no fixture for prompt hash {key[:16]}...")
        return self._table[key]


class CannedLLMProvider(LLMProvider):
    """Offline stand-in that answers deterministically from the prompt
    hash. Output always follows the Label: contract."""

    tag = "canned"

    _JUSTIFICATIONS = {
        "Yes": "The evidence provided supports the claim.",
        "No": "The evidence provided contradicts the claim.",
        "NEI": "The evidence provided is insufficient to assess the claim.",
    }

    def complete(self, rendered_prompt: str) -> str:
        bucket = int(prompt_hash(rendered_prompt)[:8], 16) % 3
        label = ("Yes", "No", "NEI")[bucket]
        return f"Label: {label}\n{self._JUSTIFICATIONS[label]}"


class CallableLLMProvider(LLMProvider):
    """Adapter for tests: wraps any str -> str callable."""

    def __init__(self, fn, tag: str = "callable"):
        self._fn = fn
        self.tag = tag

    def complete(self, rendered_prompt: str) -> str:
        return self._fn(rendered_prompt)


class ResponseCache:
    """Content-addressed directory of JSON files, one per completion.

    Writes go through a temp file and an atomic rename, so a crashed
    run never leaves a half-written entry. Corrupt entries are treated
    as misses with a warning rather than failing the run.
    """

    def __init__(self, directory):
        self.directory = str(directory)
        os.makedirs(self.directory, exist_ok=True)

    def _path(self, key: str) -> str:
        return os.path.join(self.directory, f"{key}.json")

    def get(self, key: str) -> str | None:
        path = self._path(key)
        try:
            with open(path, encoding="utf-8") as handle:
                entry = json.load(handle)
            return str(entry["text"])
        except FileNotFoundError:
            return None
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            log.warning("cache entry %s is corrupt (%s), bypassing cache", path, exc)
            return None

    def put(self, key: str, text: str, provider_tag: str) -> None:
        entry = {"prompt_hash": key, "provider_tag": provider_tag, "text": text}
        path = self._path(key)
        tmp = f"{path}.tmp.{os.getpid()}"
        with open(tmp, "w", encoding="utf-8") as handle:
            json.dump(entry, handle, ensure_ascii=False)
        os.replace(tmp, path)


def invoke_llm(
    prompt: PromptSpec | str,
    provider: LLMProvider,
    cache: ResponseCache | None = None,
    max_retries: int = 3,
    backoff_base: float = 1.0,
    sleep=time.sleep,
) -> str:
    """Run one completion with caching and bounded retry.

    Transient provider failures are retried up to max_retries times
    after the first attempt, sleeping backoff_base * 2**n between tries.
    """
    rendered = prompt.render() if isinstance(prompt, PromptSpec) else prompt
    key = prompt_hash(rendered, provider.tag)
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit
    attempt = 0
    while True:
        attempt += 1
        try:
            text = provider.complete(rendered)
            break
        except ProviderError as exc:
            if not exc.retryable or attempt > max_retries:
                raise
            delay = backoff_base * 2 ** (attempt - 1)
            log.info(
                "provider attempt %d/%d failed (%s), retrying in %.1fs",
                attempt, max_retries + 1, exc, delay,
            )
            sleep(delay)
    if attempt > 1:
        log.info("provider call succeeded after %d attempts", attempt)
    if cache is not None:
        cache.put(key, text, provider.tag)
    return text
