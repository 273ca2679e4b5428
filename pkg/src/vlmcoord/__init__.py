"""Coordination harness: panels of vision-language experts produce captions
and plausible answers, a coordinator language model fuses them through a
fixed prompt template, and free-text completions map onto answer choices by
embedding similarity. Includes ensemble baselines, label-perturbation
ablations, dataset ingestion, metrics, and an instruction-tuning exporter."""

__version__ = "0.1.0"
