"""Matplotlib figure output for trees, countermodels and space reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from . import space as sp


def _tree_layout(tree):
    """x by leaf order, y by depth below the root."""
    depth = [0] * tree.n
    order = []
    stack = [tree.root]
    while stack:
        x = stack.pop()
        order.append(x)
        for c in tree.children(x):
            depth[c] = depth[x] + 1
            stack.append(c)
    xs = {}
    next_x = [0.0]

    def place(node):
        kids = tree.children(node)
        if not kids:
            xs[node] = next_x[0]
            next_x[0] += 1.0
            return
        for c in kids:
            place(c)
        xs[node] = sum(xs[c] for c in kids) / len(kids)

    place(tree.root)
    return {i: (xs[i], -depth[i]) for i in range(tree.n)}


def save_tree_figure(tree, path, labels=None, title=None, highlight=()):
    pos = _tree_layout(tree)
    fig, ax = plt.subplots(figsize=(max(3, tree.n * 0.9), max(3, tree.height + 2)))
    for child, parent in enumerate(tree.parent):
        if parent is None:
            continue
        (x0, y0), (x1, y1) = pos[parent], pos[child]
        ax.plot([x0, x1], [y0, y1], color="0.6", zorder=1)
    for node, (x, y) in pos.items():
        color = "#d62728" if node in highlight else "#1f77b4"
        ax.scatter([x], [y], s=400, color=color, zorder=2)
        ax.annotate(str(node), (x, y), ha="center", va="center", color="white", zorder=3)
        if labels and node in labels:
            ax.annotate(labels[node], (x, y - 0.28), ha="center", va="top", fontsize=8)
    if title:
        ax.set_title(title)
    ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_space_figure(space, report, path, title=None):
    """Specialization diagram colored by point rank, report in the margin."""
    neigh = space.neigh
    ranks = report.rank_of_point
    max_rank = max((r for r in ranks if r is not None), default=0)
    fig, ax = plt.subplots(figsize=(max(4, space.n * 1.1), max(3.5, max_rank + 2.5)))
    row_counts = {}
    pos = {}
    for x in range(space.n):
        row = ranks[x] if ranks[x] is not None else max_rank + 1
        pos[x] = (row_counts.get(row, 0) * 1.0, row)
        row_counts[row] = row_counts.get(row, 0) + 1
    for x in range(space.n):
        for y in sp.points(neigh[x] & ~(1 << x)):
            ax.annotate(
                "",
                xy=pos[y],
                xytext=pos[x],
                arrowprops=dict(arrowstyle="->", color="0.6"),
            )
    cmap = plt.get_cmap("viridis")
    for x, (px, py) in pos.items():
        frac = 0.0 if max_rank == 0 else min(py, max_rank) / max_rank
        ax.scatter([px], [py], s=500, color=cmap(frac), zorder=2)
        ax.annotate(str(x), (px, py), ha="center", va="center", color="white", zorder=3)
    flags = ", ".join(
        k for k in ("scattered", "t_d", "t1", "discrete", "magari", "primal")
        if getattr(report, k)
    )
    ax.set_title(title or "cb_rank=%d; %s" % (report.cb_rank, flags or "no flags"))
    ax.set_ylabel("point rank")
    ax.set_xticks([])
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_refutation_figure(refut, path):
    """The countermodel tree annotated with least preimages."""
    f = refut.dmap
    labels = {
        node: str(f.least_preimage(node)) for node in range(f.tree.n)
    }
    save_tree_figure(
        f.tree,
        path,
        labels=labels,
        title="%s refuted at %s in [0, %s)" % (refut.phi, refut.point, f.dom),
        highlight=(refut.node,),
    )
