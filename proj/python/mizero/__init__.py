"""Implicit zero-watermarking for text style copyright protection."""

from ._mizero import (  # noqa: F401
    Ablation,
    AttackKind,
    BenchmarkResult,
    Corpus,
    Encoder,
    EncoderBackend,
    EncoderConfig,
    Label,
    LlmClient,
    MetricsRecord,
    MizeroError,
    Registry,
    Split,
    StubLlmClient,
    StyleSample,
    TrainedArtifacts,
    TrainingConfig,
    TrainingReport,
    VerificationVerdict,
    Verifier,
    default_epsilon,
    hamming_distance,
    make_registry,
    make_synthetic_corpus,
    perturb,
    run_benchmark,
    stub_condense,
    train,
)

__all__ = [
    "Ablation",
    "AttackKind",
    "BenchmarkResult",
    "Corpus",
    "Encoder",
    "EncoderBackend",
    "EncoderConfig",
    "Label",
    "LlmClient",
    "MetricsRecord",
    "MizeroError",
    "Registry",
    "Split",
    "StubLlmClient",
    "StyleSample",
    "TrainedArtifacts",
    "TrainingConfig",
    "TrainingReport",
    "VerificationVerdict",
    "Verifier",
    "default_epsilon",
    "hamming_distance",
    "make_registry",
    "make_synthetic_corpus",
    "perturb",
    "run_benchmark",
    "stub_condense",
    "train",
]
