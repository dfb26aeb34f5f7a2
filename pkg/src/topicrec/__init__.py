"""Explainable topical tweet recommendations mined from social annotations.

Pipeline stages, each usable on its own:

- :mod:`topicrec.corpus` — ingest and validate the input corpora
- :mod:`topicrec.expertise` — mine per-user topical expertise from Lists
- :mod:`topicrec.interest` — EM inference of interest distributions
- :mod:`topicrec.bim` — entity extraction and tweet-topic scoring
- :mod:`topicrec.recommend` — deduplicated round-robin assembly
- :mod:`topicrec.synth` — synthetic corpora with recorded ground truth
- :mod:`topicrec.evaluation` — judged-ranking metrics and the
  expert-counting baseline
- :mod:`topicrec.service` — HTTP surface over trained artifacts
"""

__version__ = "0.1.0"
