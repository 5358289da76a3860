"""PNG renderings of the CSV outputs (matplotlib, Agg backend)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_LABELS = {
    "phi": r"$|\tilde E_n(p) - k_n|\,/\,\nu^n$",
    "omega": r"$(2/\nu^n)\int_p^1 |\tilde F_n / (q^2(1-q^2))|\,dq$",
    "ratio": "first neglected term / bound integral",
}


def _save(fig, path):
    fig.tight_layout()
    # fixed metadata keeps the files byte-identical between runs
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def plot_diagnostic(samples, diag: str, nu, n: int, path) -> None:
    ps = [p for p, _ in samples]
    vs = [v for _, v in samples]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ps, vs, lw=1.5)
    ax.set_xlabel("p")
    ax.set_ylabel(_LABELS.get(diag, diag))
    ax.set_title(f"{diag}, nu={nu}, n={n}")
    ax.set_xlim(0, 1)
    ax.grid(alpha=0.3)
    _save(fig, path)


def plot_table(rows, path, title: str = "") -> None:
    zs = [r.z for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(zs, [r.eta_abs for r in rows], "o-", label="|eta| (oracle)")
    ax.loglog(zs, [r.bound for r in rows], "s--", label="bound")
    ax.set_xlabel("z")
    ax.set_ylabel("relative error")
    if title:
        ax.set_title(title)
    ax.legend()
    ax.grid(alpha=0.3, which="both")
    _save(fig, path)


def plot_nonhomog(rows, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for u in sorted({r.u for r in rows}):
        sub = [r for r in rows if r.u == u]
        (line,) = ax.semilogy([r.n for r in sub], [r.exact_error for r in sub], "o-", label=f"|remainder|, u={u:g}")
        ax.semilogy([r.n for r in sub], [r.bound_r0 for r in sub], "--", color=line.get_color(), label=f"bound, u={u:g}")
    ax.set_xlabel("n")
    ax.set_ylabel("absolute error")
    ax.legend(fontsize=7)
    ax.grid(alpha=0.3, which="both")
    _save(fig, path)
