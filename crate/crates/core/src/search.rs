//! One- and two-dimensional maximisation helpers.

use alloc::vec::Vec;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn clean(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Golden-section maximisation on `[lo, hi]`.
pub(crate) fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = clean(f(x1));
    let mut f2 = clean(f(x2));
    for _ in 0..200 {
        if hi - lo <= tol * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        // Ties move right so the search favours the larger maximiser.
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = clean(f(x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = clean(f(x2));
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Root of `g` on `[lo, hi]` given a sign change, by bisection to full precision.
pub(crate) fn bisect(g: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let glo = g(lo);
    if glo == 0.0 {
        return lo;
    }
    let slo = glo > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm > 0.0) == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Grid `lo + (hi − lo)(k/n)²`, dense near `lo`.
pub(crate) fn quadratic_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            let t = k as f64 / n as f64;
            lo + (hi - lo) * t * t
        })
        .collect()
}

/// Location and value of the last global maximum of `f` over the span of
/// `grid`. Every grid-local maximum is refined by golden section, or by
/// bisection on `slope` (a function with the sign of `f'`) when it brackets a
/// sign change. Among values within `1e−9` (relative) of the best, the largest
/// location wins.
pub(crate) fn last_global_max(
    f: &dyn Fn(f64) -> f64,
    slope: Option<&dyn Fn(f64) -> f64>,
    grid: &[f64],
) -> (f64, f64) {
    let n = grid.len();
    let vals: Vec<f64> = grid.iter().map(|&x| clean(f(x))).collect();
    let mut cands: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        let left_ok = i == 0 || vals[i] >= vals[i - 1];
        let right_ok = i + 1 == n || vals[i] >= vals[i + 1];
        if !(left_ok && right_ok) {
            continue;
        }
        // Skip interior plateau points; the plateau's ends are examined.
        if i > 0 && i + 1 < n && vals[i] == vals[i - 1] && vals[i] == vals[i + 1] {
            continue;
        }
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(n - 1)];
        let mut best = (grid[i], vals[i]);
        let mut refined = false;
        if let Some(s) = slope {
            let (slo, shi) = (s(lo), s(hi));
            if slo > 0.0 && shi < 0.0 {
                let x = bisect(s, lo, hi);
                let fx = clean(f(x));
                if fx >= best.1 {
                    best = (x, fx);
                }
                refined = true;
            }
        }
        if !refined && hi > lo {
            let (x, fx) = golden_max(f, lo, hi, 1e-12);
            if fx > best.1 {
                best = (x, fx);
            }
        }
        cands.push(best);
    }
    let top = cands.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    let thresh = top - 1e-9 * top.abs().max(1.0);
    cands
        .into_iter()
        .filter(|c| c.1 >= thresh)
        .fold((f64::NEG_INFINITY, f64::NEG_INFINITY), |acc, c| {
            if c.0 > acc.0 {
                c
            } else {
                acc
            }
        })
}

/// Nelder–Mead maximisation in two variables.
pub(crate) fn nelder_mead_max(
    f: &dyn Fn([f64; 2]) -> f64,
    start: [f64; 2],
    step: [f64; 2],
    tol: f64,
    max_iter: usize,
) -> ([f64; 2], f64) {
    let mut s = [
        start,
        [start[0] + step[0], start[1]],
        [start[0], start[1] + step[1]],
    ];
    let mut v = [clean(f(s[0])), clean(f(s[1])), clean(f(s[2]))];
    let comb = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for _ in 0..max_iter {
        // Order best first.
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| v[j].total_cmp(&v[i]));
        s = [s[idx[0]], s[idx[1]], s[idx[2]]];
        v = [v[idx[0]], v[idx[1]], v[idx[2]]];
        let size = (0..2)
            .map(|k| (s[1][k] - s[0][k]).abs().max((s[2][k] - s[0][k]).abs()))
            .fold(0.0, f64::max);
        if size <= tol * (1.0 + s[0][0].abs().max(s[0][1].abs())) {
            break;
        }
        let centroid = [(s[0][0] + s[1][0]) / 2.0, (s[0][1] + s[1][1]) / 2.0];
        let xr = comb(centroid, s[2], -1.0);
        let fr = clean(f(xr));
        if fr > v[0] {
            let xe = comb(centroid, s[2], -2.0);
            let fe = clean(f(xe));
            if fe > fr {
                s[2] = xe;
                v[2] = fe;
            } else {
                s[2] = xr;
                v[2] = fr;
            }
        } else if fr > v[1] {
            s[2] = xr;
            v[2] = fr;
        } else {
            let xc = if fr > v[2] {
                comb(centroid, xr, 0.5)
            } else {
                comb(centroid, s[2], 0.5)
            };
            let fc = clean(f(xc));
            if fc > v[2].max(fr) {
                s[2] = xc;
                v[2] = fc;
            } else {
                for k in 1..3 {
                    s[k] = comb(s[0], s[k], 0.5);
                    v[k] = clean(f(s[k]));
                }
            }
        }
    }
    let mut best = 0;
    for k in 1..3 {
        if v[k] > v[best] {
            best = k;
        }
    }
    (s[best], v[best])
}
