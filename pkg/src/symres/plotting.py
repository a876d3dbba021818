"""Deterministic SVG figures: the pole diagram and the verification summary."""

from __future__ import annotations

import io
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .resonances import BranchPoint, Resonance  # noqa: E402

RC = {
    "svg.hashsalt": "symres",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _svg_bytes(fig) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return buf.getvalue()


def pole_diagram(
    branch: list[BranchPoint], resonances: list[Resonance], R_sq, title: str = ""
) -> bytes:
    """The negative imaginary axis with branch points (hollow) and resonances (filled).

    A branch point that coincides with a resonance is drawn once, as the filled
    resonance marker with a heavy outline.
    """
    res_keys = {r.z_abs_sq for r in resonances}
    depth = math.sqrt(float(R_sq)) * 1.08 + 0.2
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(3.2, 6.0))
        ax.plot([0, 0], [0, -depth], color="0.35", lw=1.0, gid="axis")
        ax.axhline(0, color="0.8", lw=0.6)
        for i, bp in enumerate(b for b in branch if b.L_sq not in res_keys):
            ax.plot(
                [0], [-math.sqrt(bp.L_sq)], marker="o", ms=7, mfc="none", mec="tab:blue", mew=1.3,
                ls="none", gid=f"branch_{i}",
            )
            src = ",".join(f"{s.factor}:{s.ell}" for s in bp.sources)
            ax.annotate(f"L²={bp.L_sq} [{src}]", (0, -math.sqrt(bp.L_sq)), xytext=(-8, 0),
                        textcoords="offset points", ha="right", va="center", fontsize=7, color="tab:blue")
        branch_keys = {b.L_sq for b in branch}
        for i, r in enumerate(resonances):
            coincident = r.z_abs_sq in branch_keys
            ax.plot(
                [0], [-math.sqrt(r.z_abs_sq)], marker="o", ms=4 + 3 * len(r.summands), mfc="tab:red",
                mec="black" if coincident else "tab:red", mew=1.6 if coincident else 0.5, ls="none",
                gid=f"resonance_{i}",
            )
            ax.annotate(f"|z|²={r.z_abs_sq}  |S|={len(r.summands)}", (0, -math.sqrt(r.z_abs_sq)),
                        xytext=(8, 0), textcoords="offset points", va="center", fontsize=7)
        ax.set_xlim(-1, 1)
        ax.set_ylim(-depth, 0.2)
        ax.set_xticks([])
        ax.set_ylabel("Im z")
        if title:
            ax.set_title(title, fontsize=9)
        fig.tight_layout()
        return _svg_bytes(fig)


def check_summary(checks: list[dict], title: str = "") -> bytes:
    """Horizontal bars of log10(error) per check with tolerance ticks."""
    floor = 1e-20
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6.0, 0.3 * len(checks) + 1.2))
        ys = range(len(checks))
        errs = [math.log10(max(c["error"], floor)) for c in checks]
        colors = ["tab:green" if c["pass"] else "tab:red" for c in checks]
        ax.barh(list(ys), [e - math.log10(floor) for e in errs], left=math.log10(floor), color=colors)
        for y, c in zip(ys, checks):
            if c["tol"] > 0:
                ax.plot([math.log10(c["tol"])] * 2, [y - 0.4, y + 0.4], color="black", lw=1.2)
        ax.set_yticks(list(ys), [c["name"] for c in checks])
        ax.invert_yaxis()
        ax.set_xlabel("log10 measured error (tick: tolerance)")
        if title:
            ax.set_title(title, fontsize=9)
        fig.tight_layout()
        return _svg_bytes(fig)
