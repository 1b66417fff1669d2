"""Sidecar producers for the jguard core: encoder embeddings, paraphrased
corpora, and chat-API generated corpora.

Data flows one way: this package writes files in the core's external
formats (JSON-lines corpora, JGEMB1 embeddings) and never computes style
features or metrics itself.
"""

__version__ = "0.1.0"
