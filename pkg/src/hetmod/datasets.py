"""Loaders that turn public datasets into typed networks."""
from __future__ import annotations

from pathlib import Path

from .graph import HetGraph, NodeRef, build

__all__ = ["movielens_100k"]

ML100K_GENRES = (
    "Action", "Adventure", "Animation", "Children's", "Comedy", "Crime", "Documentary", "Drama", "Fantasy",
    "Film-Noir", "Horror", "Musical", "Mystery", "Romance", "Sci-Fi", "Thriller", "War", "Western",
)


def movielens_100k(directory: str | Path) -> HetGraph:
    """User, movie and genre network from the MovieLens ml-100k files.

    A user links to every movie they rated (``u.data``) and a movie links to
    each of its genres (``u.item``).  The catch-all "unknown" genre flag is
    ignored, leaving 18 genres.  Node names are the dataset's ids and genre
    names with spaces removed.
    """
    directory = Path(directory)
    users: dict[str, int] = {}
    movies: dict[str, int] = {}
    edges = set()
    with open(directory / "u.item", encoding="latin-1") as fh:
        rows = [line.rstrip("\n").split("|") for line in fh if line.strip()]
    for row in rows:
        movies.setdefault(row[0], len(movies))
    genre_edges = []
    for row in rows:
        flags = row[-len(ML100K_GENRES):]
        for k, flag in enumerate(flags):
            if flag == "1":
                genre_edges.append((NodeRef(1, movies[row[0]]), NodeRef(2, k)))
    with open(directory / "u.data", encoding="latin-1") as fh:
        for line in fh:
            if not line.strip():
                continue
            user, item = line.split("\t")[:2]
            u = users.setdefault(user, len(users))
            if item not in movies:
                raise ValueError(f"rating refers to unknown movie {item}")
            edges.add((NodeRef(0, u), NodeRef(1, movies[item])))
    names = [
        sorted(users, key=users.get),
        sorted(movies, key=movies.get),
        [g.replace("'", "").replace(" ", "") for g in ML100K_GENRES],
    ]
    return build(
        [len(users), len(movies), len(ML100K_GENRES)],
        sorted(edges) + genre_edges,
        type_names=["user", "movie", "genre"],
        node_names=names,
    )
