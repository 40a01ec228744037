"""The memory walk on a regular tree and its two reinforcement regimes.

A walk that repeats a uniformly remembered past step with probability p
(and otherwise moves to a uniformly random other letter) embeds into the
reinforced framework two ways: p above 1/d keeps repeated steps as they
are, p below 1/d rotates them.  Either way the walk is transient and
ballistic; the escape speed barely moves with p, while the return
probability decays exponentially with a p-dependent rate.
"""

from srrw import erw_config, mc_escape_rate, point_mass_curve, rate_fit

SEED = 1729
D = 3


def describe(p):
    cfg = erw_config(D, p)
    kind = type(cfg.transform).__name__
    print(f"p = {p:.1f}: transform {kind}, alpha = {cfg.alpha:.3f}")
    return cfg


def main():
    print(f"degree d = {D}\n")
    ns = [8, 12, 16, 20, 24]
    for p in (0.0, 0.3, 0.6):
        cfg = describe(p)
        e = cfg.group.identity()
        pts = point_mass_curve(cfg, ns, e, 300_000, SEED)
        fit = rate_fit(pts, "exp")
        speed = mc_escape_rate(cfg, 200, 30_000, SEED)
        print(f"  log P(S_n = e) slope per step: {fit.slope:+.4f}")
        print(f"  escape speed d(e, S_n)/n at n=200: {speed.value:.4f} "
              f"+- {2 * speed.stderr:.4f}\n")


if __name__ == "__main__":
    main()
