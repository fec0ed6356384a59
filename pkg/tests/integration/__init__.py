"""Integration tests for the curation pipeline.

End-to-end runs of the command line and of the batch pipeline on generated corpora.
"""
