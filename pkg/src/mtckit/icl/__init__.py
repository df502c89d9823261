"""In-context-learning extraction: few-shot selection, prompts, clients, records."""

from .client import (
    API_KEY_ENV,
    CompletionClient,
    CompletionRequest,
    CompletionResponse,
    HttpCompletionClient,
    ReplayClient,
    ServiceError,
    prompt_fingerprint,
)
from .extract import (
    CandidateResult,
    ExtractionRecord,
    FewShotLeakageError,
    RawCall,
    extract,
    extract_corpus,
    iter_extract_corpus,
)
from .fewshot import (
    FewShotPair,
    FewShotSet,
    InsufficientPoolError,
    PairCoverage,
    exclude_fewshot,
    fewshot_from_dugs,
    gold_answer,
    is_difficult,
    select_fewshot,
)
from .prompts import (
    SPECIALIZED_DEFAULT_TYPES,
    PromptBuildError,
    PromptStrategy,
    PromptTemplate,
    StrategyMismatchError,
    build_prompt,
    default_template,
    load_template,
    type_guides,
)

__all__ = [
    "API_KEY_ENV",
    "CandidateResult",
    "CompletionClient",
    "CompletionRequest",
    "CompletionResponse",
    "ExtractionRecord",
    "FewShotLeakageError",
    "FewShotPair",
    "FewShotSet",
    "HttpCompletionClient",
    "InsufficientPoolError",
    "PairCoverage",
    "PromptBuildError",
    "PromptStrategy",
    "PromptTemplate",
    "RawCall",
    "ReplayClient",
    "SPECIALIZED_DEFAULT_TYPES",
    "ServiceError",
    "StrategyMismatchError",
    "build_prompt",
    "default_template",
    "exclude_fewshot",
    "extract",
    "extract_corpus",
    "iter_extract_corpus",
    "fewshot_from_dugs",
    "gold_answer",
    "is_difficult",
    "load_template",
    "prompt_fingerprint",
    "select_fewshot",
    "type_guides",
]
