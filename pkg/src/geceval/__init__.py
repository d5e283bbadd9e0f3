"""geceval: multi-dimensional evaluation toolkit for grammatical error correction.

Scores hypothesis corrections against annotated references (F-beta over span
edits, GLEU, weighted edit scoring, reference-free perplexity scoring),
combines systems via majority-vote ensembles with pluggable fallbacks,
profiles per-error-type behavior, and runs a two-judge-plus-human
adjudication pipeline with an event-sourced review service.
"""

__version__ = "0.1.0"

from .corpus import (  # noqa: E402
    AnnotatedSentence,
    Corpus,
    Edit,
    ErrorTag,
    Operation,
    Sentence,
    apply_edits,
    parse_m2,
    read_hypothesis_file,
    write_m2,
    write_sentences,
)
from .errors import (  # noqa: E402
    AdjudicationError,
    ConfigurationError,
    ContractViolation,
    GecEvalError,
    IncompleteCasesError,
    InsufficientData,
    M2ParseError,
)
from .extraction import align, classify, extract_edits  # noqa: E402
from .metrics import (  # noqa: E402
    GleuReport,
    ScoreReport,
    ScribendiReport,
    score_errant,
    score_gleu,
    score_pt_errant,
    score_scribendi,
)
from .ensemble import (  # noqa: E402
    EnsembleConfig,
    Fallback,
    edit_majority,
    ensemble_corpus,
    ensemble_sentence,
    jaccard_ngram,
)
from .analysis import (  # noqa: E402
    ProfileRow,
    TypeProfile,
    correlate_profiles,
    profile_system,
    read_profile_tsv,
    write_profile_tsv,
)
from .stats import (  # noqa: E402
    AgreementStats,
    CorrelationResult,
    SignificanceResult,
    cohen_kappa,
    permutation_test,
    permutation_test_exhaustive,
    spearman,
)
from .judge import (  # noqa: E402
    CaseStatus,
    JudgeCase,
    JudgmentVerdict,
    OutcomeSummary,
    PanelOrder,
    build_cases,
    run_llm_stage,
    summarize,
)

__all__ = [
    "__version__",
    # corpus model
    "AnnotatedSentence", "Corpus", "Edit", "ErrorTag", "Operation", "Sentence",
    "apply_edits", "parse_m2", "read_hypothesis_file", "write_m2",
    "write_sentences",
    # errors
    "AdjudicationError", "ConfigurationError", "ContractViolation",
    "GecEvalError", "IncompleteCasesError", "InsufficientData", "M2ParseError",
    # extraction
    "align", "classify", "extract_edits",
    # metrics
    "GleuReport", "ScoreReport", "ScribendiReport", "score_errant",
    "score_gleu", "score_pt_errant", "score_scribendi",
    # ensemble
    "EnsembleConfig", "Fallback", "edit_majority", "ensemble_corpus",
    "ensemble_sentence", "jaccard_ngram",
    # analysis
    "ProfileRow", "TypeProfile", "correlate_profiles", "profile_system",
    "read_profile_tsv", "write_profile_tsv",
    # stats
    "AgreementStats", "CorrelationResult", "SignificanceResult", "cohen_kappa",
    "permutation_test", "permutation_test_exhaustive", "spearman",
    # judge pipeline
    "CaseStatus", "JudgeCase", "JudgmentVerdict", "OutcomeSummary",
    "PanelOrder", "build_cases", "run_llm_stage", "summarize",
]
