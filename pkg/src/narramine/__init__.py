"""Mine "who does what to whom" narrative statements from role-annotated text.

The package turns semantic-role-annotated sentences (JSONL) into low-dimensional
narrative statements (agent, verb, patient), then counts, scores, embeds, and
graphs them:

- :mod:`narramine.ingest`      -- wire schema, sentence splitting, metadata joins
- :mod:`narramine.rolecore`    -- role-phrase cleaning and verb/negation folding
- :mod:`narramine.entities`    -- entity vocabulary, SIF embeddings, k-means clusters
- :mod:`narramine.narratives`  -- statement assembly, counting, filtering
- :mod:`narramine.stats`       -- log-odds, divisiveness, sentiment, PMI, embeddings,
                                  partisanship classifier
- :mod:`narramine.graph`       -- directed narrative multigraph with exports
- :mod:`narramine.cli`         -- batch command-line pipeline
"""

__version__ = "0.1.0"
