"""Cognition-inspired tag recommendation for folksonomies, with baselines and a time-aware benchmark."""

__version__ = "0.1.0"

from .core import EntityId, Folksonomy, Post, build_folksonomy, resource_tag_count
from .cognitive import MixParams, recommend_3lt_mpr, score_3l, score_3lt
from .topics import LdaConfig, TopicModel, build_documents, topic_vector, train_lda

__all__ = [
    "EntityId",
    "Folksonomy",
    "LdaConfig",
    "MixParams",
    "Post",
    "TopicModel",
    "build_documents",
    "build_folksonomy",
    "recommend_3lt_mpr",
    "resource_tag_count",
    "score_3l",
    "score_3lt",
    "topic_vector",
    "train_lda",
]
