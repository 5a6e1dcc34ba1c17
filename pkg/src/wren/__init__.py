"""wren: a web retrieval engine.

Corpus ingestion and passage chunking, a BM25 inverted index, an HNSW
graph over scalar-quantized embeddings, a sharded index service with
scatter-gather querying, and an evaluation harness for retrieval metrics.
"""

__version__ = "0.1.0"
